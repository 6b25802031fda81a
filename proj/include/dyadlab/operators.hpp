#pragma once

#include "dyadlab/haar.hpp"
#include "dyadlab/reducing.hpp"

#include <functional>

namespace dyad {

// ---- Haar multiplier T_sigma f = sum_R sigma_R f_R h_R -------------------

struct MultiplierSymbol {
    const ProductGrid* grid = nullptr;
    Eigen::ArrayXd sigma;  // per bicancellative rectangle, Spectrum2 column order

    explicit MultiplierSymbol(const ProductGrid& g)
        : grid(&g),
          sigma(Eigen::ArrayXd::Zero(g.axis1().cancellative_count() * g.axis2().cancellative_count())) {}
    static MultiplierSymbol identity(const ProductGrid& g) {
        MultiplierSymbol s(g);
        s.sigma.setOnes();
        return s;
    }
    double& at(Rect r) {
        return sigma(Grid1::id_of(r.a) * grid->axis2().cancellative_count() + Grid1::id_of(r.b));
    }
    double bound() const { return sigma.size() ? sigma.abs().maxCoeff() : 0.0; }
};

Spectrum2 apply(const MultiplierSymbol& s, const Spectrum2& f);
Field2 apply(const MultiplierSymbol& s, const Field2& f);

// ---- biparameter Haar shift ----------------------------------------------

struct ShiftEntry {
    Rect r, p, q;
    double a;
};

// T^{i,j} f = sum_R sum_{P in ch_i(R)} sum_{Q in ch_j(R)} a_{PQR} f_P h_Q,
// coefficients bounded by sqrt(|P||Q|)/|R| = 2^{-(i1+i2+j1+j2)/2}
class ShiftKernel {
  public:
    ShiftKernel(const ProductGrid& g, std::array<int, 2> i, std::array<int, 2> j);
    void add(Rect r, Rect p, Rect q, double a);
    const std::vector<ShiftEntry>& entries() const { return entries_; }
    const ProductGrid& grid() const { return *grid_; }
    std::array<int, 2> ci() const { return i_; }
    std::array<int, 2> cj() const { return j_; }
    double coefficient_bound() const;
    int complexity_sum() const { return i_[0] + i_[1] + j_[0] + j_[1]; }
    ShiftKernel adjoint() const;  // (T f, g) = (f, T* g) under the unweighted pairing

  private:
    const ProductGrid* grid_;
    std::array<int, 2> i_, j_;
    std::vector<ShiftEntry> entries_;
};

Spectrum2 apply(const ShiftKernel& k, const Spectrum2& f);
Field2 apply(const ShiftKernel& k, const Field2& f);

// ---- paraproducts ---------------------------------------------------------

enum class ParaKind { k11, k00, k01, k10 };

struct ParaproductSymbol {
    Spectrum2 a;  // scalar symbol (dim 1)
    ParaKind kind = ParaKind::k11;
    double bmo = 0;  // computed dyadic product BMO norm of the symbol
};

Field2 apply(const ParaproductSymbol& s, const Field2& f);

// partial paraproduct S^{i,j} (axis = 1) resp. S^{i,j,*} (axis = 2)
struct PartialSymbolEntry {
    Iv r1, p1, q1;          // intervals on `axis`; p1 in ch_i(r1), q1 in ch_j(r1)
    Eigen::ArrayXd coeffs;  // Haar coefficients over the other axis (cancellative ids)
};

class PartialParaproduct {
  public:
    PartialParaproduct(const ProductGrid& g, int axis, int i, int j);
    // validates membership and the BMO bound 2^{-(i+j)/2}
    void add(Iv r1, Iv p1, Iv q1, const Eigen::ArrayXd& coeffs);
    const std::vector<PartialSymbolEntry>& entries() const { return entries_; }
    int axis() const { return axis_; }
    int ci() const { return i_; }
    int cj() const { return j_; }
    const ProductGrid& grid() const { return *grid_; }

  private:
    const ProductGrid* grid_;
    int axis_, i_, j_;
    std::vector<PartialSymbolEntry> entries_;
};

Field2 apply(const PartialParaproduct& s, const Field2& f);

// ---- maximal functions -----------------------------------------------------

ScalarField1 maximal_cg(const Field1& f, const Weight1& w, double p);            // M^W
ScalarField1 maximal_cg_modified(const Field1& f, const IntervalReducing& red);  // M~^W
ScalarField2 maximal_strong_modified(const Field2& f, const RectReducing& red);  // strong M~^W
ScalarField2 maximal_strong_unweighted(const Field2& f);
ScalarField1 maximal_unweighted(const Field1& f);

// ---- weighted norms and BMO ------------------------------------------------

double lp_weighted_norm(const Field2& f, const Weight2& w, double p);
double lp_weighted_norm(const Field1& f, const Weight1& w, double p);

struct BmoResult {
    double value = 0;
    bool exact = true;  // false: sampled unions only, value is a lower bound
};

// dyadic product BMO norm: sup over unions of rectangles of the normalized
// coefficient mass; exact enumeration up to `exact_carrier_cap` carriers
BmoResult bmo_prod_norm(const Spectrum2& a, int exact_carrier_cap = 20, int samples = 4096,
                        std::uint64_t seed = 1);

// one-parameter dyadic BMO norm of a coefficient array (cancellative ids)
double bmo_norm(const Eigen::ArrayXd& coeffs, const Grid1& g);

// ---- operator norms ---------------------------------------------------------

using LeafOp = std::function<Field2(const Field2&)>;

// exact L^2(U) -> L^2(W) operator norm via the assembled matrix (largest
// singular value, Eigen)
double operator_norm_p2(const LeafOp& op, const Weight2& win, const Weight2& wout);

// empirical lower bound for p != 2: multi-restart projected gradient ascent;
// op_adj is the adjoint under the unweighted pairing
double operator_norm_lp(const LeafOp& op, const LeafOp& op_adj, const Weight2& win,
                        const Weight2& wout, double p, int restarts, std::uint64_t seed);

}  // namespace dyad
