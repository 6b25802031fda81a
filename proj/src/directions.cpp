#include "dyadlab/directions.hpp"

#include <cmath>

namespace dyad {

namespace {

// Acklam's rational approximation of the standard normal quantile
double normal_quantile(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01,  -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double e[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    const double plow = 0.02425;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((e[0] * q + e[1]) * q + e[2]) * q + e[3]) * q + 1);
    }
    if (p > 1 - plow) return -normal_quantile(1 - p);
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

// generalized golden-ratio constants for the Kronecker sequence
double plastic_alpha(int d) {
    double x = 1.5;
    for (int it = 0; it < 64; ++it) x = std::pow(1.0 + x, 1.0 / (d + 1));
    return x;
}

}  // namespace

Eigen::MatrixXd direction_set(int d, int count, int phase) {
    Eigen::MatrixXd u(d, count);
    if (d == 1) {
        u.setOnes();
        return u;
    }
    if (d == 2) {
        double off = 0.5 * (phase + 0.318309886);
        for (int i = 0; i < count; ++i) {
            double th = M_PI * (i + off) / count;  // half circle; rho is symmetric
            u(0, i) = std::cos(th);
            u(1, i) = std::sin(th);
        }
        return u;
    }
    if (d == 3) {
        // Fibonacci sphere
        const double ga = M_PI * (3.0 - std::sqrt(5.0));
        double off = 0.5 + 0.123 * phase;
        for (int i = 0; i < count; ++i) {
            double z = 1.0 - 2.0 * (i + off) / count;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            u(0, i) = r * std::cos(ga * i + phase);
            u(1, i) = r * std::sin(ga * i + phase);
            u(2, i) = z;
        }
        return u;
    }
    // Kronecker sequence pushed through the normal quantile, then normalized
    double g = plastic_alpha(d);
    Eigen::VectorXd alpha(d);
    for (int k = 0; k < d; ++k) alpha(k) = std::fmod(std::pow(1.0 / g, k + 1), 1.0);
    for (int i = 0; i < count; ++i) {
        for (int k = 0; k < d; ++k) {
            double t = std::fmod((i + 1 + 37.0 * phase) * alpha(k) + 0.5 * phase, 1.0);
            t = std::min(std::max(t, 1e-12), 1.0 - 1e-12);
            u(k, i) = normal_quantile(t);
        }
        double n = u.col(i).norm();
        u.col(i) /= (n > 1e-12 ? n : 1.0);
    }
    return u;
}

Eigen::VectorXd sphere_ascent(
    const Eigen::VectorXd& u0,
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& eval,
    int steps) {
    Eigen::VectorXd u = u0.normalized();
    Eigen::VectorXd grad(u.size());
    double best = eval(u, grad);
    Eigen::VectorXd best_u = u;
    double step = 0.1;
    for (int it = 0; it < steps; ++it) {
        Eigen::VectorXd tang = grad - grad.dot(u) * u;  // tangential component
        double tn = tang.norm();
        if (tn < 1e-14) break;
        Eigen::VectorXd cand = (u + step * tang / tn).normalized();
        Eigen::VectorXd cgrad(u.size());
        double cv = eval(cand, cgrad);
        if (cv > best) {
            best = cv;
            best_u = cand;
            u = cand;
            grad = cgrad;
            step *= 1.3;
        } else {
            step *= 0.5;
        }
    }
    return best_u;
}

}  // namespace dyad
