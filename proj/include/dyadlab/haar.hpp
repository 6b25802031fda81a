#pragma once

#include "dyadlab/field.hpp"

namespace dyad {

// Haar coefficients of a Field1: cancellative block plus the mean.
struct Spectrum1 {
    const Grid1* grid = nullptr;
    Eigen::MatrixXd coeff;  // d x cancellative_count, column per interval id
    Eigen::VectorXd mean;   // (f, 1)

    int dim() const { return int(coeff.rows()); }
};

// Biparameter Haar coefficients. Signature blocks:
//   c00 : bicancellative coefficients (h_I x h_J), the span all operators act on
//   c01 : h_I x 1 (cancellative in axis 1 only)
//   c10 : 1 x h_J
//   c11 : global mean
// The c01/c10/c11 blocks are the non-cancellative residue.
struct Spectrum2 {
    const ProductGrid* grid = nullptr;
    Eigen::MatrixXd c00;  // d x (nc1*nc2), column = i1*nc2 + i2
    Eigen::MatrixXd c01;  // d x nc1
    Eigen::MatrixXd c10;  // d x nc2
    Eigen::VectorXd c11;

    int dim() const { return int(c00.rows()); }
    int nc1() const { return grid->axis1().cancellative_count(); }
    int nc2() const { return grid->axis2().cancellative_count(); }
    int col(Rect r) const { return Grid1::id_of(r.a) * nc2() + Grid1::id_of(r.b); }
    Eigen::VectorXd at(Rect r) const { return c00.col(col(r)); }
    void set(Rect r, const Eigen::VectorXd& c) { c00.col(col(r)) = c; }
    void clear_residue() { c01.setZero(); c10.setZero(); c11.setZero(); }
    double energy() const {  // squared L^2 norm via Parseval
        return c00.squaredNorm() + c01.squaredNorm() + c10.squaredNorm() + c11.squaredNorm();
    }
};

// value of the one-parameter Haar function h^eps_I at a leaf (eps 0 cancellative, 1 non-cancellative)
double haar_value(const Grid1& g, Iv q, int eps, int leaf);
double haar_value(const ProductGrid& g, Rect r, int eps1, int eps2, int cell);

Spectrum1 analyze(const Field1& f);
Field1 synthesize(const Spectrum1& s);
Spectrum2 analyze(const Field2& f);
Field2 synthesize(const Spectrum2& s);

// f with its residue annihilated (projection onto the bicancellative span)
Field2 bicancellative(const Field2& f);

// one-variable coefficient f^{eps,axis}_I, a function of the other variable
Field1 partial_coefficient(const Field2& f, int axis, Iv q, int eps);

// rank-one projection Q_R^eps f = (f, h_R^eps) h_R^eps
Field2 project(const Field2& f, Rect r, int eps1, int eps2);

// coefficient triplets (rectangle, signature, vector); residue blocks carry
// the non-cancellative signatures
std::string spectrum_to_json(const Spectrum2& s);
Spectrum2 spectrum_from_json(const std::string& text, const ProductGrid& g);

}  // namespace dyad
