#pragma once

#include "dyadlab/field.hpp"
#include "dyadlab/spd.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace dyad {

inline double conjugate_exponent(double p) { return p / (p - 1.0); }

// q^{p/2} for q >= 0; sqrt chains for the exponents the suites use
inline double pow_half(double q, double p) {
    if (p == 2.0) return q;
    if (p == 1.0) return std::sqrt(q);
    if (p == 3.0) return q * std::sqrt(q);
    if (p == 1.5) return std::sqrt(q * std::sqrt(q));
    if (p == 4.0) return q * q;
    return std::pow(q, 0.5 * p);
}

// sums of a leaf array over every rectangle of the grid, indexed by rect id
Eigen::ArrayXd rect_sums(const ProductGrid& g, const Eigen::ArrayXd& leaf);
// sums of a leaf array over every interval, indexed by interval id
Eigen::ArrayXd interval_sums(const Grid1& g, const Eigen::ArrayXd& leaf);

namespace detail {
struct PowerCache {
    std::mutex mu;
    // exponent bits -> stacked (ncells*d) x d matrix of per-cell W_c^s
    std::map<long long, std::shared_ptr<const Eigen::MatrixXd>> stacks;
};
// copying a weight starts it with a fresh (empty) cache
struct CacheBox {
    std::unique_ptr<PowerCache> ptr = std::make_unique<PowerCache>();
    CacheBox() = default;
    CacheBox(const CacheBox&) : ptr(std::make_unique<PowerCache>()) {}
    CacheBox& operator=(const CacheBox&) {
        ptr = std::make_unique<PowerCache>();
        return *this;
    }
    CacheBox(CacheBox&&) noexcept = default;
    CacheBox& operator=(CacheBox&&) noexcept = default;
    void invalidate() { ptr = std::make_unique<PowerCache>(); }
};
}  // namespace detail

// Piecewise-constant SPD-matrix-valued weight on the leaves of a product grid.
// Immutable after construction; per-exponent power stacks are cached
// (write-once per key, safe for concurrent read).
class Weight2 {
  public:
    Weight2() = default;
    Weight2(const ProductGrid& g, int d);  // identity weight
    static Weight2 constant(const ProductGrid& g, const Eigen::MatrixXd& m);

    const ProductGrid& grid() const { return *grid_; }
    int dim() const { return dim_; }
    const Eigen::MatrixXd& at(int cell) const { return cells_[std::size_t(cell)]; }
    void set(int cell, const Eigen::MatrixXd& m);

    // throws NearSingularError if any cell breaches the eigenvalue floor
    void validate() const;

    Weight2 conjugate(double p) const;  // W^{-1/(p-1)} cellwise

    // stacked (ncells*d) x d block column of W_c^s; rows [cell*d, cell*d+d)
    std::shared_ptr<const Eigen::MatrixXd> power_stack(double s) const;
    Eigen::MatrixXd power_at(int cell, double s) const;

  private:
    const ProductGrid* grid_ = nullptr;
    int dim_ = 0;
    std::vector<Eigen::MatrixXd> cells_;
    mutable detail::CacheBox cache_;
};

class Weight1 {
  public:
    Weight1() = default;
    Weight1(const Grid1& g, int d);
    static Weight1 constant(const Grid1& g, const Eigen::MatrixXd& m);

    const Grid1& grid() const { return *grid_; }
    int dim() const { return dim_; }
    const Eigen::MatrixXd& at(int leaf) const { return cells_[std::size_t(leaf)]; }
    void set(int leaf, const Eigen::MatrixXd& m);
    void validate() const;
    Weight1 conjugate(double p) const;
    std::shared_ptr<const Eigen::MatrixXd> power_stack(double s) const;
    Eigen::MatrixXd power_at(int leaf, double s) const;

  private:
    const Grid1* grid_ = nullptr;
    int dim_ = 0;
    std::vector<Eigen::MatrixXd> cells_;
    mutable detail::CacheBox cache_;
};

// (avg_E |W(x)^{1/p} e|^p)^{1/p}
double rho_norm(const Weight2& w, Rect e_set, double p, const Eigen::VectorXd& e);
double rho_norm(const Weight1& w, Iv e_set, double p, const Eigen::VectorXd& e);

// averaging-operator constant C_E = avg_x (avg_y |W(x)^{1/p} W'(y)^{1/p'}|^{p'})^{p/p'}
double averaging_constant(const Weight2& w, Rect e_set, double p);
double averaging_constant(const Weight1& w, Iv e_set, double p);

// Integral-form Ap characteristics (supremum of the defining double averages).
double ap_characteristic(const Weight2& w, double p);                     // one weight
double ap_characteristic(const Weight2& w, const Weight2& v, double p);   // [W,V]
double ap_characteristic(const Weight1& w, double p);
double ap_characteristic(const Weight1& w, const Weight1& v, double p);
// per-rectangle value of the defining double average
double ap_local(const Weight2& w, Rect r, double p);

// one-parameter slice W(.,x2) resp. W(x1,.) as a Weight1
Weight1 slice(const Weight2& w, int axis, int other_leaf);

struct ReverseHolderReport {
    bool admissible = false;   // delta within the allowed range
    bool holds = false;        // (w^{1+delta})_R <= 4 (w)_R^{1+delta} on every rectangle
    double characteristic = 0; // [w]_{Ap,D} used for the range check
    double delta_max = 0;      // upper end of the admissible range
    double worst_ratio = 0;    // max over R of lhs / (4 rhs); holds iff <= 1
};

// scalar biparameter weight w given as the d=1 Weight2
ReverseHolderReport reverse_holder_check(const Weight2& w, double p, double delta);

std::string weight_to_json(const Weight2& w);
Weight2 weight_from_json(const std::string& text, const ProductGrid& g);

}  // namespace dyad
