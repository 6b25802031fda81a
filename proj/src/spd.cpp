#include "dyadlab/spd.hpp"

#include <cmath>

namespace dyad {

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& m, double s) {
    if (m.rows() != m.cols()) throw std::invalid_argument("matrix_power needs a square matrix");
    if (m.rows() == 1) {
        double x = m(0, 0);
        if (x <= kEigenvalueFloor) throw NearSingularError("matrix_power: eigenvalue floor breached");
        return Eigen::MatrixXd::Constant(1, 1, std::pow(x, s));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    if (es.info() != Eigen::Success) throw std::runtime_error("matrix_power: eigensolver failed");
    Eigen::VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() <= kEigenvalueFloor)
        throw NearSingularError("matrix_power: eigenvalue floor breached");
    Eigen::VectorXd pw(ev.size());
    for (int i = 0; i < ev.size(); ++i) pw(i) = std::pow(ev(i), s);
    return es.eigenvectors() * pw.asDiagonal() * es.eigenvectors().transpose();
}

double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    if (m.rows() == 2 && m.cols() == 2) {
        double fro2 = m.squaredNorm();
        double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        double disc = fro2 * fro2 - 4.0 * det * det;
        if (disc < 0) disc = 0;
        return std::sqrt(0.5 * (fro2 + std::sqrt(disc)));
    }
    return m.jacobiSvd().singularValues()(0);
}

double min_eigenvalue(const Eigen::MatrixXd& sym) {
    if (sym.rows() == 1) return sym(0, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sym + sym.transpose()));
    return es.eigenvalues().minCoeff();
}

std::vector<int> sign_select(const std::vector<Eigen::VectorXd>& vs) {
    if (vs.empty()) throw std::invalid_argument("sign_select needs at least one vector");
    const int d = int(vs.front().size());
    int best = 0;
    double best_sum = -1;
    for (int l = 0; l < d; ++l) {
        double s = 0;
        for (const auto& v : vs) s += std::abs(v(l));
        if (s > best_sum) {
            best_sum = s;
            best = l;
        }
    }
    std::vector<int> sigma(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) sigma[i] = vs[i](best) < 0 ? -1 : 1;
    return sigma;
}

}  // namespace dyad
