#pragma once

#include "dyadlab/haar.hpp"
#include "dyadlab/reducing.hpp"

namespace dyad {

// exact rational sparseness constant
struct Frac {
    long num = 1, den = 4;
    double value() const { return double(num) / double(den); }
};

// set of leaf cells as a bitmap
class CellSet {
  public:
    CellSet() = default;
    explicit CellSet(int ncells) : n_(ncells), w_(std::size_t((ncells + 63) / 64), 0) {}
    void add(int c) { w_[std::size_t(c >> 6)] |= 1ULL << (c & 63); }
    bool test(int c) const { return (w_[std::size_t(c >> 6)] >> (c & 63)) & 1ULL; }
    long count() const;
    long intersection_count(const CellSet& o) const;
    bool intersects(const CellSet& o) const;
    bool subset_of(const CellSet& o) const;
    CellSet& unite(const CellSet& o);
    CellSet minus(const CellSet& o) const;
    int size() const { return n_; }
    std::vector<int> cells() const;

  private:
    int n_ = 0;
    std::vector<std::uint64_t> w_;
};

CellSet rect_cells(const ProductGrid& g, Rect r);

// Weakly sparse family of rectangles with explicit witness sets.
// `rects` has multiset semantics; duplicates are allowed.
struct SparseFamily {
    const ProductGrid* grid = nullptr;
    std::vector<Rect> rects;
    std::vector<CellSet> witnesses;
    Frac delta;
};

struct SparseCheckReport {
    bool ok = true;
    std::string violation;
};

// exact: witnesses pairwise disjoint, contained in their rectangles (throws
// if not), and |E_R| >= delta |R| in integer leaf units
SparseCheckReport check_weakly_sparse(const SparseFamily& fam);

// one-parameter family of intervals with the dyadic sparseness constant
struct IntervalFamily {
    const Grid1* grid = nullptr;
    std::vector<Iv> intervals;
    Frac epsilon;
};

// exact: for every member Q, the maximal members strictly inside Q cover at
// most (1 - epsilon)|Q|
SparseCheckReport check_dyadic_sparse(const IntervalFamily& fam);

// rectangles over which either spectrum has a nonzero bicancellative coefficient
std::vector<Rect> carrier_rects(const Spectrum2& f, const Spectrum2& g, double tol = 0.0);

struct SparseSelectResult {
    SparseFamily family;
    Rect q0;
    double c_used = 0;
    int k0 = 0;
};

// Cordoba-Fefferman selection from the level sets of the square-function
// pair (phi, psi); carriers are the rectangles to consider for selection.
SparseSelectResult biparameter_sparse_select(const ScalarField2& phi, const ScalarField2& psi,
                                             const std::vector<Rect>& carriers, Frac delta);

// sum_R (phi)_R (psi)_R |R|
double sparse_form_eval(const SparseFamily& fam, const ScalarField2& phi, const ScalarField2& psi);

// A_{S,W} f = (sum_L (|W_L f|)_L^2 |W(x)^{1/p} W_L^{-1}|^2 1_L)^{1/2}
ScalarField1 sparse_positive_operator(const IntervalFamily& fam, const Weight1& w, double p,
                                      const Field1& f, const IntervalReducing& red);

struct ShiftedSparseResult {
    IntervalFamily family;
    double c_used = 0;   // largest ladder constant used across recursion nodes
    double ratio = 0;    // sup_x lhs / (ibar 2^{(i+j)/2} rhs), over cells where rhs > 0
    ScalarField1 lhs;    // localized shifted square function on the root interval
    ScalarField1 rhs;    // sparse positive operator of the emitted family
};

// stopping-time sparse domination of the localized shifted square function
ShiftedSparseResult one_param_shifted_sparse(Iv root, const Field1& f, const Weight1& w, double p,
                                             int i, int j, Frac epsilon,
                                             const IntervalReducing& red);

}  // namespace dyad
