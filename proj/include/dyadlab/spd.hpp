#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace dyad {

inline constexpr double kEigenvalueFloor = 1e-10;

struct NearSingularError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// M^s via symmetric eigendecomposition; rejects eigenvalues at or below the floor.
Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& m, double s);

// largest singular value; closed form for 1x1 and 2x2, Eigen beyond
double spectral_norm(const Eigen::MatrixXd& m);

double min_eigenvalue(const Eigen::MatrixXd& sym);

// Signs sigma in {-1,1}^k with sum_i |v_i| <= d * |sum_i sigma_i v_i| (real vectors):
// pick the coordinate with the largest absolute-value column sum and follow its signs.
std::vector<int> sign_select(const std::vector<Eigen::VectorXd>& vs);

}  // namespace dyad
