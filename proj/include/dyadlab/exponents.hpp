#pragma once

#include <boost/rational.hpp>

#include <stdexcept>

namespace dyad {

using Rat = boost::rational<long long>;

// Exponent bookkeeping for the tracked inequalities, exact in rational
// arithmetic when p is rational.
struct ExponentTable {
    Rat p, p_conj;
    Rat gamma_p, gamma_pconj;
    Rat alpha_p;             // 2 gamma(p) + 2 gamma(p') / (p-1)
    Rat alpha1_p, alpha2_p;  // shift exponents; alpha2(p')/(p-1) == alpha1(p)
    Rat maximal_strong;      // (p+1)/(p(p-1)), strong modified maximal function
    Rat maximal_modified;    // 1/(p-1), one-parameter (modified) maximal function

    double gamma() const { return boost::rational_cast<double>(gamma_p); }
    double alpha() const { return boost::rational_cast<double>(alpha_p); }
    double alpha1() const { return boost::rational_cast<double>(alpha1_p); }
    double alpha2() const { return boost::rational_cast<double>(alpha2_p); }
};

Rat gamma_exponent(const Rat& p);  // 1/(p-1) for p<=2, 1/2 + 1/(p(p-1)) for p>2
ExponentTable exponent_table(const Rat& p);
ExponentTable exponent_table(double p);  // p must be exactly representable as a small rational

// Fefferman-Stein vector-valued maximal constant components for 1 < r < q:
// C(q,r,n) = 2 (r' + r/(q-r))^{1/r} C1(q,n)^theta C2(q)^{1-theta}
struct FeffermanSteinParts {
    double theta = 0;     // 1/r = theta + (1-theta)/q
    double r_factor = 0;  // (r' + r/(q-r))^{1/r}
};
FeffermanSteinParts fefferman_stein_parts(double q, double r);

Rat rational_of(double x);  // exact small-denominator rational, throws otherwise

}  // namespace dyad
