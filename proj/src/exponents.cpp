#include "dyadlab/exponents.hpp"

#include <cmath>

namespace dyad {

Rat gamma_exponent(const Rat& p) {
    if (p <= Rat(1)) throw std::invalid_argument("exponent must satisfy p > 1");
    if (p <= Rat(2)) return Rat(1) / (p - 1);
    return Rat(1, 2) + Rat(1) / (p * (p - 1));
}

ExponentTable exponent_table(const Rat& p) {
    if (p <= Rat(1)) throw std::invalid_argument("exponent must satisfy p > 1");
    ExponentTable t;
    t.p = p;
    t.p_conj = p / (p - 1);
    t.gamma_p = gamma_exponent(p);
    t.gamma_pconj = gamma_exponent(t.p_conj);
    t.alpha_p = 2 * t.gamma_p + 2 * t.gamma_pconj / (p - 1);
    Rat alpha_pconj = 2 * t.gamma_pconj + 2 * t.gamma_p / (t.p_conj - 1);
    t.alpha1_p = Rat(1) / p + (2 * t.gamma_pconj + alpha_pconj) / (p - 1);
    t.alpha2_p = Rat(1) / p + 2 * t.gamma_p + t.alpha_p;
    t.maximal_strong = (p + 1) / (p * (p - 1));
    t.maximal_modified = Rat(1) / (p - 1);
    return t;
}

Rat rational_of(double x) {
    for (long long den = 1; den <= 1 << 20; den *= 2) {
        double num = x * double(den);
        if (num == std::floor(num) && std::abs(num) < double(1LL << 40))
            return Rat(static_cast<long long>(num), den);
    }
    // small non-dyadic denominators
    for (long long den = 3; den <= 1000; ++den) {
        double num = x * double(den);
        if (num == std::floor(num) && std::abs(num) < double(1LL << 40))
            return Rat(static_cast<long long>(num), den);
    }
    throw std::invalid_argument("exponent is not a small rational");
}

ExponentTable exponent_table(double p) { return exponent_table(rational_of(p)); }

FeffermanSteinParts fefferman_stein_parts(double q, double r) {
    if (!(1 < r && r < q)) throw std::invalid_argument("need 1 < r < q");
    FeffermanSteinParts parts;
    parts.theta = (1.0 / r - 1.0 / q) / (1.0 - 1.0 / q);
    double rconj = r / (r - 1.0);
    parts.r_factor = std::pow(rconj + r / (q - r), 1.0 / r);
    return parts;
}

}  // namespace dyad
