#pragma once

#include "dyadlab/weight.hpp"

namespace dyad {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ReducingMethod { closed_form_p2, scalar_power, john_ellipsoid };

// SPD matrix A with rho(e) <= |Ae| <= sqrt(d) * slack * rho(e), where
// rho(e) = (avg_E |W(x)^{1/p} e|^p)^{1/p}.
struct ReducingMatrix {
    Eigen::MatrixXd a;
    ReducingMethod method = ReducingMethod::closed_form_p2;
    double certified_slack = 1.0;
};

struct EllipsoidOptions {
    int base_directions_per_dim = 256;
    int cert_directions = 2048;
    int augment_rounds = 3;
    int cert_refine_steps = 8;
    int max_inner_iters = 200;
    int max_cert_rounds = 4;
    double upper_slack = 1.05;
    double lower_tol = 1e-9;
    double logdet_tol = 1e-8;
};

// Internal rho evaluator over a fixed cell set of a weight (vectorized).
class RhoEvaluator {
  public:
    RhoEvaluator(const Weight2& w, Rect e_set, double p);
    RhoEvaluator(const Weight1& w, Iv e_set, double p);

    int dim() const { return d_; }
    double p() const { return p_; }
    // rho for every column of V
    Eigen::ArrayXd rho_of(const Eigen::MatrixXd& v) const;
    double rho(const Eigen::VectorXd& v) const;
    Eigen::VectorXd rho_gradient(const Eigen::VectorXd& v) const;  // euclidean gradient
    bool constant_weight(Eigen::MatrixXd* m) const;  // all cells equal? yields W_c^{1/p}
    Eigen::MatrixXd closed_form_p2_guess() const;    // (avg M_c^2)^{1/2}

  private:
    void gather(const Eigen::MatrixXd& stack, const Eigen::MatrixXd& stack2,
                const std::vector<int>& cells, int d);
    int d_ = 0;
    double p_ = 2;
    Eigen::MatrixXd g_;   // (n*d) x d, per-cell W^{1/p}
    Eigen::MatrixXd g2_;  // (n*d) x d, per-cell W^{2/p}
};

ReducingMatrix reducing_matrix(const Weight2& w, Rect e_set, double p,
                               const EllipsoidOptions& opt = {});
ReducingMatrix reducing_matrix(const Weight1& w, Iv e_set, double p,
                               const EllipsoidOptions& opt = {});

// reducing matrices for every rectangle of the grid, computed once
class RectReducing {
  public:
    RectReducing(const Weight2& w, double p, const EllipsoidOptions& opt = {});
    const Eigen::MatrixXd& at(Rect r) const { return mats_[std::size_t(grid_->rect_id(r))].a; }
    const ReducingMatrix& rm(Rect r) const { return mats_[std::size_t(grid_->rect_id(r))]; }
    double exponent() const { return p_; }
    const Weight2& weight() const { return *w_; }
    double max_slack() const;

  private:
    const ProductGrid* grid_;
    const Weight2* w_;
    double p_;
    std::vector<ReducingMatrix> mats_;
};

class IntervalReducing {
  public:
    IntervalReducing(const Weight1& w, double p, const EllipsoidOptions& opt = {});
    const Eigen::MatrixXd& at(Iv q) const { return mats_[std::size_t(Grid1::id_of(q))].a; }
    const ReducingMatrix& rm(Iv q) const { return mats_[std::size_t(Grid1::id_of(q))]; }
    double exponent() const { return p_; }
    const Weight1& weight() const { return *w_; }
    double max_slack() const;

  private:
    const Grid1* grid_;
    const Weight1* w_;
    double p_;
    std::vector<ReducingMatrix> mats_;
};

// W_{x,Q} for every leaf x of the other axis and every interval Q of `axis`
class SlicedReducing {
  public:
    SlicedReducing(const Weight2& w, int axis, double p, const EllipsoidOptions& opt = {});
    const Eigen::MatrixXd& at(int other_leaf, Iv q) const {
        return mats_[std::size_t(other_leaf * stride_ + Grid1::id_of(q))].a;
    }
    int axis() const { return axis_; }
    double exponent() const { return p_; }

  private:
    int axis_, stride_;
    double p_;
    std::vector<ReducingMatrix> mats_;
};

// sliced weight W_Q(x) := W_{x,Q}^p, a one-parameter weight on the other axis
Weight1 sliced_weight(const Weight2& w, int axis, Iv q, double p,
                      const EllipsoidOptions& opt = {});

// reduce over the second factor first, then over the first (eq-(3.1) iteration)
Eigen::MatrixXd iterated_reducing(const Weight2& w, Rect r, double p,
                                  const EllipsoidOptions& opt = {});

// reducing-operator-form Ap characteristics: sup_R |V_R W_R|^p
double ap_reducing_form(const RectReducing& rw, const RectReducing& rv_conj);
double ap_reducing_form(const IntervalReducing& rw, const IntervalReducing& rv_conj);

struct LemmaReport {
    // (i) inverse vs prime, both directions; hard contract at slack 1+1e-9
    double max_inv_vs_prime = 0;
    double max_prime_vs_inv = 0;
    // (ii) scalar Ap constants of w_e = |W^{1/p}e|^p and u = |W^{1/p}A|^p over C_E
    double max_scalar_ap_over_ce = 0;
    // (iii) |W_E e| over C_E^{1/p} (|W^{1/p}e|)_E
    double max_reduced_over_average = 0;
    Eigen::VectorXd worst_e;
    bool inverse_prime_ok(double slack = 1.0 + 1e-9) const {
        return max_inv_vs_prime <= slack && max_prime_vs_inv <= slack;
    }
};

LemmaReport lemma_checks(const Weight2& w, double p, Rect e_set, int sample_count = 128,
                         const EllipsoidOptions& opt = {});

}  // namespace dyad
