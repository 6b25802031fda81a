#include "dyadlab/reducing.hpp"

#include "dyadlab/directions.hpp"

#include <algorithm>
#include <cmath>

namespace dyad {

void RhoEvaluator::gather(const Eigen::MatrixXd& stack, const Eigen::MatrixXd& stack2,
                          const std::vector<int>& cells, int d) {
    g_.resize(int(cells.size()) * d, d);
    g2_.resize(int(cells.size()) * d, d);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        g_.middleRows(int(i) * d, d) = stack.middleRows(cells[i] * d, d);
        g2_.middleRows(int(i) * d, d) = stack2.middleRows(cells[i] * d, d);
    }
}

RhoEvaluator::RhoEvaluator(const Weight2& w, Rect e_set, double p) : d_(w.dim()), p_(p) {
    gather(*w.power_stack(1.0 / p), *w.power_stack(2.0 / p), w.grid().cells_of(e_set), d_);
}

RhoEvaluator::RhoEvaluator(const Weight1& w, Iv e_set, double p) : d_(w.dim()), p_(p) {
    std::vector<int> cells;
    for (int n = 0; n < w.grid().leaf_span(e_set.gen); ++n) cells.push_back(w.grid().leaf_at(e_set, n));
    gather(*w.power_stack(1.0 / p), *w.power_stack(2.0 / p), cells, d_);
}

Eigen::ArrayXd RhoEvaluator::rho_of(const Eigen::MatrixXd& v) const {
    const int m = int(v.cols());
    const int n = int(g_.rows()) / d_;
    Eigen::MatrixXd z = g_ * v;  // (n*d) x m
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(m);
    for (int c = 0; c < n; ++c) {
        auto block = z.middleRows(c * d_, d_);
        for (int j = 0; j < m; ++j) acc(j) += pow_half(block.col(j).squaredNorm(), p_);
    }
    return (acc / double(n)).pow(1.0 / p_);
}

double RhoEvaluator::rho(const Eigen::VectorXd& v) const { return rho_of(v)(0); }

Eigen::VectorXd RhoEvaluator::rho_gradient(const Eigen::VectorXd& v) const {
    const int n = int(g_.rows()) / d_;
    Eigen::VectorXd z = g_ * v;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d_);
    double accp = 0;
    for (int c = 0; c < n; ++c) {
        double q = z.segment(c * d_, d_).squaredNorm();
        accp += pow_half(q, p_);
        if (q > 0) acc += pow_half(q, p_ - 2.0) * (g2_.middleRows(c * d_, d_) * v);
    }
    double r = std::pow(accp / double(n), 1.0 / p_);
    if (r <= 0) return Eigen::VectorXd::Zero(d_);
    return std::pow(r, 1.0 - p_) * acc / double(n);
}

bool RhoEvaluator::constant_weight(Eigen::MatrixXd* m) const {
    const int n = int(g_.rows()) / d_;
    Eigen::MatrixXd first = g_.topRows(d_);
    double scale = 1.0 + first.cwiseAbs().maxCoeff();
    for (int c = 1; c < n; ++c)
        if ((g_.middleRows(c * d_, d_) - first).cwiseAbs().maxCoeff() > 1e-13 * scale) return false;
    if (m) *m = first;
    return true;
}

Eigen::MatrixXd RhoEvaluator::closed_form_p2_guess() const {
    const int n = int(g_.rows()) / d_;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d_, d_);
    for (int c = 0; c < n; ++c) acc += g2_.middleRows(c * d_, d_);
    return matrix_power(acc / double(n), 0.5);
}

namespace {

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd ev = es.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) ev(i) = 1.0 / ev(i);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double logdet(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    return es.eigenvalues().array().log().sum();
}

bool is_spd(const Eigen::MatrixXd& m) { return min_eigenvalue(m) > 0; }

struct CertResult {
    double lower = 0;  // max rho(e)/|Ae|          (contract wants <= 1)
    double upper = 0;  // max |Ae|/(sqrt(d) rho(e)) (contract wants <= slack)
};

CertResult certify(const RhoEvaluator& rho, const Eigen::MatrixXd& a, const Eigen::MatrixXd& dirs,
                   int refine_steps) {
    const double sq = std::sqrt(double(rho.dim()));
    Eigen::ArrayXd rhos = rho.rho_of(dirs);
    Eigen::ArrayXd norms(dirs.cols());
    for (int j = 0; j < dirs.cols(); ++j) norms(j) = (a * dirs.col(j)).norm();
    CertResult res;
    int worst_lo = 0, worst_hi = 0;
    for (int j = 0; j < dirs.cols(); ++j) {
        double lo = rhos(j) / norms(j);
        double hi = norms(j) / (sq * rhos(j));
        if (lo > res.lower) { res.lower = lo; worst_lo = j; }
        if (hi > res.upper) { res.upper = hi; worst_hi = j; }
    }
    if (refine_steps > 0) {
        auto eval_lo = [&](const Eigen::VectorXd& e, Eigen::VectorXd& grad) {
            double r = rho.rho(e), n = (a * e).norm();
            grad = rho.rho_gradient(e) / n - r * (a.transpose() * (a * e)) / (n * n * n);
            return r / n;
        };
        auto eval_hi = [&](const Eigen::VectorXd& e, Eigen::VectorXd& grad) {
            double r = rho.rho(e), n = (a * e).norm();
            grad = (a.transpose() * (a * e)) / (n * r) - n * rho.rho_gradient(e) / (r * r);
            return n / (sq * r);
        };
        Eigen::VectorXd e = sphere_ascent(dirs.col(worst_lo), eval_lo, refine_steps);
        res.lower = std::max(res.lower, rho.rho(e) / (a * e).norm());
        e = sphere_ascent(dirs.col(worst_hi), eval_hi, refine_steps);
        res.upper = std::max(res.upper, (a * e).norm() / (sq * rho.rho(e)));
    }
    return res;
}

// Maximum-volume inscribed ellipsoid B * (unit ball) of {e : rho(e) <= 1}:
// ascent on the scale-invariant log det B - d log max_i rho(B u_i), with B
// rescaled to the boundary after every step. The ascent works against an
// active constraint subset; a full sweep re-arms it whenever the iterate
// escapes, cutting-plane style.
Eigen::MatrixXd solve_ellipsoid(const RhoEvaluator& rho, const EllipsoidOptions& opt) {
    const int d = rho.dim();
    Eigen::MatrixXd dirs = direction_set(d, opt.base_directions_per_dim * d, /*phase=*/0);

    auto g_of = [&](const Eigen::MatrixXd& bb, const Eigen::MatrixXd& u, int* arg) {
        Eigen::ArrayXd vals = rho.rho_of(bb * u);
        int j = 0;
        double g = vals.maxCoeff(&j);
        if (arg) *arg = j;
        return g;
    };

    Eigen::MatrixXd b = spd_inverse(rho.closed_form_p2_guess());
    b /= g_of(b, dirs, nullptr);

    // start from a well-spread active subset plus the currently tightest ones
    std::vector<int> seed_ids;
    for (int i = 0; i < dirs.cols(); i += std::max<long>(1, dirs.cols() / (8 * d)))
        seed_ids.push_back(i);
    {
        Eigen::ArrayXd vals = rho.rho_of(b * dirs);
        std::vector<int> order(std::size_t(dirs.cols()));
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
        std::sort(order.begin(), order.end(), [&](int x, int y) { return vals(x) > vals(y); });
        for (int i = 0; i < std::min<int>(4 * d, int(order.size())); ++i)
            seed_ids.push_back(order[std::size_t(i)]);
    }
    std::sort(seed_ids.begin(), seed_ids.end());
    seed_ids.erase(std::unique(seed_ids.begin(), seed_ids.end()), seed_ids.end());
    Eigen::MatrixXd act(d, int(seed_ids.size()));
    for (std::size_t i = 0; i < seed_ids.size(); ++i) act.col(int(i)) = dirs.col(seed_ids[i]);
    auto add_active = [&](const Eigen::VectorXd& u) {
        act.conservativeResize(Eigen::NoChange, act.cols() + 1);
        act.col(act.cols() - 1) = u;
    };

    int augmentations = 0;
    for (int outer = 0; outer < 24; ++outer) {
        b /= g_of(b, act, nullptr);
        double step = 0.25;
        double f = logdet(b);
        for (int it = 0; it < opt.max_inner_iters; ++it) {
            int argmax = 0;
            double g = g_of(b, act, &argmax);
            // subgradient of the scale-invariant objective at the boundary
            Eigen::VectorXd u = act.col(argmax);
            Eigen::VectorXd gr = rho.rho_gradient(b * u);
            Eigen::MatrixXd gg = 0.5 * (gr * u.transpose() + u * gr.transpose());
            Eigen::MatrixXd dir = spd_inverse(b) - double(d) / g * gg;
            double scale = spectral_norm(b) / std::max(spectral_norm(dir), 1e-300);

            double gained = 0;
            for (int ls = 0; ls < 24; ++ls) {
                Eigen::MatrixXd cand = b + (step * scale) * dir;
                cand = 0.5 * (cand + cand.transpose());
                if (is_spd(cand)) {
                    cand /= g_of(cand, act, nullptr);
                    double fc = logdet(cand);
                    if (fc > f + 1e-15) {
                        gained = fc - f;
                        b = cand;
                        f = fc;
                        step = std::min(step * 1.4, 4.0);
                        break;
                    }
                }
                step *= 0.5;
            }
            if (gained < opt.logdet_tol || step < 1e-12) break;
        }
        // full sweep: catch constraints the active subset missed
        int worst = 0;
        double g_full = g_of(b, dirs, &worst);
        if (g_full > 1.0 + 1e-12) {
            b /= g_full;
            add_active(dirs.col(worst));
            continue;
        }
        if (augmentations >= opt.augment_rounds) break;
        // adaptive worst-direction refinement: local ascent of rho(B u)
        ++augmentations;
        auto eval = [&](const Eigen::VectorXd& u, Eigen::VectorXd& grad) {
            grad = b.transpose() * rho.rho_gradient(b * u);
            return rho.rho(b * u);
        };
        Eigen::VectorXd refined = sphere_ascent(dirs.col(worst), eval, 8);
        if (rho.rho(b * refined) > 1.0 + 1e-12) {
            b /= rho.rho(b * refined);
            dirs.conservativeResize(Eigen::NoChange, dirs.cols() + 1);
            dirs.col(dirs.cols() - 1) = refined;
            add_active(refined);
        }
    }
    b /= std::max(1.0, g_of(b, dirs, nullptr));
    return b;
}

ReducingMatrix reduce_impl(const RhoEvaluator& rho, const EllipsoidOptions& opt) {
    const int d = rho.dim();
    ReducingMatrix out;
    if (d == 1) {
        // rho(e) = |e| (avg w)^{1/p}
        out.method = ReducingMethod::scalar_power;
        out.a = Eigen::MatrixXd::Constant(1, 1, rho.rho(Eigen::VectorXd::Ones(1)));
        out.certified_slack = 1.0;
        return out;
    }
    if (rho.p() == 2.0) {
        out.method = ReducingMethod::closed_form_p2;
        out.a = rho.closed_form_p2_guess();
        out.certified_slack = 1.0;
        return out;
    }
    out.method = ReducingMethod::john_ellipsoid;
    Eigen::MatrixXd constm;
    if (rho.constant_weight(&constm)) {
        // rho is the quadratic norm |M e|: its own John ellipsoid
        out.a = 0.5 * (constm + constm.transpose());
        out.certified_slack = 1.0;
        return out;
    }
    Eigen::MatrixXd b = solve_ellipsoid(rho, opt);
    Eigen::MatrixXd a = spd_inverse(b);
    Eigen::MatrixXd cert_dirs = direction_set(d, opt.cert_directions, /*phase=*/1);
    // margin against feasibility gaps between sampled directions; the upper
    // side has the whole 5% budget, the lower side has none
    const double margin = 1.0 + 1e-5;
    double slack = 0;
    for (int round = 0; round < opt.max_cert_rounds; ++round) {
        CertResult cr = certify(rho, a, cert_dirs, opt.cert_refine_steps);
        a *= std::max(1.0, cr.lower) * margin;
        slack = std::max(1.0, cr.upper * std::max(1.0, cr.lower) * margin);
        if (slack <= opt.upper_slack) {
            out.a = 0.5 * (a + a.transpose());
            out.certified_slack = slack;
            return out;
        }
        if (round + 1 < opt.max_cert_rounds) {
            // tighten: rerun the ascent with a larger direction budget
            EllipsoidOptions harder = opt;
            harder.base_directions_per_dim *= 2;
            harder.augment_rounds += 2;
            b = solve_ellipsoid(rho, harder);
            a = spd_inverse(b);
        }
    }
    throw SolverError("reducing matrix failed certification (slack " + std::to_string(slack) + ")");
}

}  // namespace

ReducingMatrix reducing_matrix(const Weight2& w, Rect e_set, double p, const EllipsoidOptions& opt) {
    return reduce_impl(RhoEvaluator(w, e_set, p), opt);
}

ReducingMatrix reducing_matrix(const Weight1& w, Iv e_set, double p, const EllipsoidOptions& opt) {
    return reduce_impl(RhoEvaluator(w, e_set, p), opt);
}

RectReducing::RectReducing(const Weight2& w, double p, const EllipsoidOptions& opt)
    : grid_(&w.grid()), w_(&w), p_(p) {
    mats_.resize(std::size_t(grid_->rect_count()));
    for (const Rect& r : grid_->all_rects())
        mats_[std::size_t(grid_->rect_id(r))] = reducing_matrix(w, r, p, opt);
}

double RectReducing::max_slack() const {
    double s = 1;
    for (const auto& m : mats_) s = std::max(s, m.certified_slack);
    return s;
}

IntervalReducing::IntervalReducing(const Weight1& w, double p, const EllipsoidOptions& opt)
    : grid_(&w.grid()), w_(&w), p_(p) {
    mats_.resize(std::size_t(grid_->interval_count()));
    for (int id = 0; id < grid_->interval_count(); ++id)
        mats_[std::size_t(id)] = reducing_matrix(w, grid_->iv_of(id), p, opt);
}

double IntervalReducing::max_slack() const {
    double s = 1;
    for (const auto& m : mats_) s = std::max(s, m.certified_slack);
    return s;
}

SlicedReducing::SlicedReducing(const Weight2& w, int axis, double p, const EllipsoidOptions& opt)
    : axis_(axis), p_(p) {
    const Grid1& ga = axis == 1 ? w.grid().axis1() : w.grid().axis2();
    const Grid1& gb = axis == 1 ? w.grid().axis2() : w.grid().axis1();
    stride_ = ga.interval_count();
    mats_.resize(std::size_t(gb.leaf_count() * stride_));
    for (int t = 0; t < gb.leaf_count(); ++t) {
        Weight1 s = slice(w, axis, t);
        for (int id = 0; id < stride_; ++id)
            mats_[std::size_t(t * stride_ + id)] = reducing_matrix(s, ga.iv_of(id), p, opt);
    }
}

Weight1 sliced_weight(const Weight2& w, int axis, Iv q, double p, const EllipsoidOptions& opt) {
    const Grid1& gb = axis == 1 ? w.grid().axis2() : w.grid().axis1();
    Weight1 out(gb, w.dim());
    for (int t = 0; t < gb.leaf_count(); ++t) {
        Weight1 s = slice(w, axis, t);
        ReducingMatrix rm = reducing_matrix(s, q, p, opt);
        out.set(t, matrix_power(rm.a, p));
    }
    return out;
}

Eigen::MatrixXd iterated_reducing(const Weight2& w, Rect r, double p, const EllipsoidOptions& opt) {
    Weight1 wq = sliced_weight(w, 2, r.b, p, opt);  // reduce over R2 per x1
    return reducing_matrix(wq, r.a, p, opt).a;
}

double ap_reducing_form(const RectReducing& rw, const RectReducing& rv_conj) {
    double best = 0;
    const ProductGrid& g = rw.weight().grid();
    for (const Rect& r : g.all_rects())
        best = std::max(best, spectral_norm(rv_conj.at(r) * rw.at(r)));
    return std::pow(best, rw.exponent());
}

double ap_reducing_form(const IntervalReducing& rw, const IntervalReducing& rv_conj) {
    double best = 0;
    const Grid1& g = rw.weight().grid();
    for (int id = 0; id < g.interval_count(); ++id) {
        Iv q = g.iv_of(id);
        best = std::max(best, spectral_norm(rv_conj.at(q) * rw.at(q)));
    }
    return std::pow(best, rw.exponent());
}

LemmaReport lemma_checks(const Weight2& w, double p, Rect e_set, int sample_count,
                         const EllipsoidOptions& opt) {
    const int d = w.dim();
    const double pp = conjugate_exponent(p);
    Weight2 wc = w.conjugate(p);
    ReducingMatrix rw = reducing_matrix(w, e_set, p, opt);
    ReducingMatrix rwc = reducing_matrix(wc, e_set, pp, opt);
    Eigen::MatrixXd winv = spd_inverse(rw.a), wcinv = spd_inverse(rwc.a);
    double ce = averaging_constant(w, e_set, p);
    auto pstack = w.power_stack(1.0 / p);
    auto cells = w.grid().cells_of(e_set);

    LemmaReport rep;
    Eigen::MatrixXd dirs = direction_set(d, sample_count, /*phase=*/2);
    for (int j = 0; j < dirs.cols(); ++j) {
        Eigen::VectorXd e = dirs.col(j);
        double r1 = (winv * e).norm() / (rwc.a * e).norm();
        double r2 = (wcinv * e).norm() / (rw.a * e).norm();
        if (std::max(r1, r2) > std::max(rep.max_inv_vs_prime, rep.max_prime_vs_inv)) rep.worst_e = e;
        rep.max_inv_vs_prime = std::max(rep.max_inv_vs_prime, r1);
        rep.max_prime_vs_inv = std::max(rep.max_prime_vs_inv, r2);

        // scalar weight w_e = |W^{1/p} e|^p over E
        double sw = 0, swc = 0, sabs = 0;
        for (int c : cells) {
            double q = (pstack->middleRows(c * d, d) * e).squaredNorm();
            double we = pow_half(q, p);
            sw += we;
            swc += std::pow(we, -1.0 / (p - 1.0));
            sabs += std::sqrt(q);
        }
        double n = double(cells.size());
        double scalar_ap = (sw / n) * std::pow(swc / n, p - 1.0);
        rep.max_scalar_ap_over_ce = std::max(rep.max_scalar_ap_over_ce, scalar_ap / ce);
        rep.max_reduced_over_average = std::max(
            rep.max_reduced_over_average, (rw.a * e).norm() / (std::pow(ce, 1.0 / p) * (sabs / n)));
    }
    // (ii) for u = |W^{1/p} A|^p with A = the reducing matrix itself
    double su = 0, suc = 0;
    for (int c : cells) {
        double u = std::pow(spectral_norm(pstack->middleRows(c * d, d) * rw.a), p);
        su += u;
        suc += std::pow(u, -1.0 / (p - 1.0));
    }
    double n = double(cells.size());
    rep.max_scalar_ap_over_ce =
        std::max(rep.max_scalar_ap_over_ce, (su / n) * std::pow(suc / n, p - 1.0) / ce);
    return rep;
}

}  // namespace dyad
