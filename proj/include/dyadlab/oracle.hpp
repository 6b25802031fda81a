#pragma once

#include "dyadlab/operators.hpp"
#include "dyadlab/sparse.hpp"

namespace dyad {

// Slow, independent reference computations. These deliberately avoid the
// transform/pyramid machinery of the fast paths: coefficients come from
// direct per-cell sums.

struct OracleReport {
    std::string quantity;
    double oracle_value = 0;
    double fast_value = 0;
    double deviation = 0;  // relative
    bool pass = true;
    std::string instance;
};

OracleReport make_report(const std::string& quantity, double oracle_value, double fast_value,
                         double tol, const std::string& instance);

Field2 slow_multiplier_apply(const MultiplierSymbol& s, const Field2& f);
Field2 slow_shift_apply(const ShiftKernel& k, const Field2& f);
Field2 slow_paraproduct_apply(const ParaproductSymbol& s, const Field2& f);
Field2 slow_partial_paraproduct_apply(const PartialParaproduct& s, const Field2& f);

// p = 2: power iteration on the weighted-conjugated matrix (exact largest
// singular value up to the iteration tolerance); p != 2: max over `restarts`
// of derivative-free hill climbing (a lower bound, monotone in restarts)
double brute_force_operator_norm(const LeafOp& op, const Weight2& win, const Weight2& wout,
                                 double p, int restarts = 32, std::uint64_t seed = 7);

// exhaustive Carleson packing check over every union of family rectangles
struct CarlesonReport {
    bool ok = true;
    double worst_ratio = 0;  // max over unions of sum |R| / |Omega|; ok iff <= 1/delta
};
CarlesonReport brute_force_carleson_check(const SparseFamily& fam, Frac delta);

// contract certification: rho(e) <= |Ae| <= sqrt(d) slack rho(e) over a
// dense direction sample plus local refinements of the worst violator
struct DirectionCheckReport {
    bool ok = true;
    double upper = 0;  // max |Ae| / (sqrt(d) rho(e))
    double lower = 0;  // max rho(e) / |Ae|
    Eigen::VectorXd worst_direction;
};
DirectionCheckReport dense_direction_check(const Eigen::MatrixXd& a,
                                           const std::function<double(const Eigen::VectorXd&)>& rho,
                                           int d, double slack, int directions = 2048,
                                           int refinements = 8);

}  // namespace dyad
