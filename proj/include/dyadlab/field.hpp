#pragma once

#include "dyadlab/grid.hpp"

#include <Eigen/Dense>

namespace dyad {

// R^d-valued function, piecewise constant on the leaves of one axis.
struct Field1 {
    const Grid1* grid = nullptr;
    Eigen::MatrixXd v;  // d x leaf_count, column per leaf

    Field1() = default;
    Field1(const Grid1& g, int dim) : grid(&g), v(Eigen::MatrixXd::Zero(dim, g.leaf_count())) {}

    int dim() const { return int(v.rows()); }
    double leaf_measure() const { return 1.0 / double(grid->leaf_count()); }

    Eigen::VectorXd sum(Iv q) const;            // integral over q
    Eigen::VectorXd average(Iv q) const;        // normalized integral
    double abs_average(Iv q) const;             // average of |f|
    double norm_l2() const;                     // unweighted L^2 norm
    double norm_lp(double p) const;
};

// R^d-valued function on the leaves of a product grid.
struct Field2 {
    const ProductGrid* grid = nullptr;
    Eigen::MatrixXd v;  // d x leaf_count

    Field2() = default;
    Field2(const ProductGrid& g, int dim) : grid(&g), v(Eigen::MatrixXd::Zero(dim, g.leaf_count())) {}

    int dim() const { return int(v.rows()); }
    double leaf_measure() const { return grid->leaf_measure(); }

    Eigen::VectorXd sum(Rect r) const;
    Eigen::VectorXd average(Rect r) const;
    double abs_average(Rect r) const;
    double norm_l2() const;
    double norm_lp(double p) const;  // unweighted L^p

    Field2& operator+=(const Field2& o) { v += o.v; return *this; }
    Field2& operator*=(double s) { v *= s; return *this; }
};

// Nonnegative scalar fields (square function outputs etc.) reuse Field2 with dim 1.
using ScalarField2 = Field2;
using ScalarField1 = Field1;

double scalar_average(const Field2& f, Rect r);  // dim-1 helper
double scalar_average(const Field1& f, Iv q);

double pairing(const Field2& f, const Field2& g);  // unweighted L^2 pairing (f,g)
double pairing(const Field1& f, const Field1& g);

std::string field_to_json(const Field2& f);
Field2 field_from_json(const std::string& text, const ProductGrid& g);

}  // namespace dyad
