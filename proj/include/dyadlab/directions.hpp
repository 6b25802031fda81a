#pragma once

#include <Eigen/Dense>

#include <functional>

namespace dyad {

// Deterministic well-spread unit directions in R^d. `phase` decorrelates
// independent samples (solver set vs certification set).
Eigen::MatrixXd direction_set(int d, int count, int phase);

// A few projected-gradient steps of u -> value(u) on the unit sphere,
// starting from u0. `eval` returns the value and writes the euclidean
// gradient. Returns the best direction found.
Eigen::VectorXd sphere_ascent(
    const Eigen::VectorXd& u0,
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& eval,
    int steps);

}  // namespace dyad
