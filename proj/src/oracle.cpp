#include "dyadlab/oracle.hpp"

#include <cmath>
#include <random>

namespace dyad {

OracleReport make_report(const std::string& quantity, double oracle_value, double fast_value,
                         double tol, const std::string& instance) {
    OracleReport rep;
    rep.quantity = quantity;
    rep.oracle_value = oracle_value;
    rep.fast_value = fast_value;
    double scale = std::max({std::abs(oracle_value), std::abs(fast_value), 1e-30});
    rep.deviation = std::abs(oracle_value - fast_value) / scale;
    rep.pass = rep.deviation <= tol;
    rep.instance = instance;
    return rep;
}

namespace {

// (f, h_R) by direct summation
Eigen::VectorXd direct_coefficient(const Field2& f, Rect r, int e1, int e2) {
    const ProductGrid& g = *f.grid;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.dim());
    for (int c = 0; c < g.leaf_count(); ++c) acc += f.v.col(c) * haar_value(g, r, e1, e2, c);
    return acc * g.leaf_measure();
}

Eigen::VectorXd direct_average(const Field2& f, Rect r) {
    const ProductGrid& g = *f.grid;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.dim());
    long n = 0;
    for (int c = 0; c < g.leaf_count(); ++c)
        if (g.contains(r, c)) {
            acc += f.v.col(c);
            ++n;
        }
    return acc / double(n);
}

}  // namespace

Field2 slow_multiplier_apply(const MultiplierSymbol& s, const Field2& f) {
    const ProductGrid& g = *f.grid;
    Field2 out(g, f.dim());
    for (const Rect& r : g.cancellative_rects()) {
        double sigma = s.sigma(Grid1::id_of(r.a) * g.axis2().cancellative_count() + Grid1::id_of(r.b));
        if (sigma == 0) continue;
        Eigen::VectorXd coeff = direct_coefficient(f, r, 0, 0);
        for (int c = 0; c < g.leaf_count(); ++c)
            out.v.col(c) += sigma * coeff * haar_value(g, r, 0, 0, c);
    }
    return out;
}

Field2 slow_shift_apply(const ShiftKernel& k, const Field2& f) {
    const ProductGrid& g = *f.grid;
    Field2 out(g, f.dim());
    for (const ShiftEntry& e : k.entries()) {
        Eigen::VectorXd coeff = direct_coefficient(f, e.p, 0, 0);
        for (int c = 0; c < g.leaf_count(); ++c)
            out.v.col(c) += e.a * coeff * haar_value(g, e.q, 0, 0, c);
    }
    return out;
}

Field2 slow_paraproduct_apply(const ParaproductSymbol& s, const Field2& f) {
    const ProductGrid& g = *f.grid;
    const Grid1 &g1 = g.axis1(), &g2 = g.axis2();
    Field2 out(g, f.dim());
    for (const Rect& r : g.cancellative_rects()) {
        double a = s.a.c00(0, Grid1::id_of(r.a) * g2.cancellative_count() + Grid1::id_of(r.b));
        if (a == 0) continue;
        switch (s.kind) {
            case ParaKind::k11: {
                Eigen::VectorXd avg = direct_average(f, r);
                for (int c = 0; c < g.leaf_count(); ++c)
                    out.v.col(c) += a * avg * haar_value(g, r, 0, 0, c);
                break;
            }
            case ParaKind::k00: {
                Eigen::VectorXd coeff = direct_coefficient(f, r, 0, 0);
                for (int c = 0; c < g.leaf_count(); ++c)
                    if (g.contains(r, c)) out.v.col(c) += a * coeff / g.measure(r);
                break;
            }
            case ParaKind::k01: {
                // (f^1_{R1})_{R2} by direct sums
                Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.dim());
                for (int c = 0; c < g.leaf_count(); ++c) {
                    int t1 = g.cell_t1(c), t2 = g.cell_t2(c);
                    if (!g2.contains(r.b, t2)) continue;
                    acc += f.v.col(c) * haar_value(g1, r.a, 0, t1);
                }
                acc /= double(g1.leaf_count()) * g2.leaf_span(r.b.gen);
                for (int c = 0; c < g.leaf_count(); ++c) {
                    int t1 = g.cell_t1(c), t2 = g.cell_t2(c);
                    if (!g1.contains(r.a, t1)) continue;
                    out.v.col(c) += a * acc / g1.measure(r.a) * haar_value(g2, r.b, 0, t2);
                }
                break;
            }
            case ParaKind::k10: {
                Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.dim());
                for (int c = 0; c < g.leaf_count(); ++c) {
                    int t1 = g.cell_t1(c), t2 = g.cell_t2(c);
                    if (!g1.contains(r.a, t1)) continue;
                    acc += f.v.col(c) * haar_value(g2, r.b, 0, t2);
                }
                acc /= double(g2.leaf_count()) * g1.leaf_span(r.a.gen);
                for (int c = 0; c < g.leaf_count(); ++c) {
                    int t1 = g.cell_t1(c), t2 = g.cell_t2(c);
                    if (!g2.contains(r.b, t2)) continue;
                    out.v.col(c) += a * acc / g2.measure(r.b) * haar_value(g1, r.a, 0, t1);
                }
                break;
            }
        }
    }
    return out;
}

Field2 slow_partial_paraproduct_apply(const PartialParaproduct& s, const Field2& f) {
    const ProductGrid& g = *f.grid;
    const int axis = s.axis();
    const Grid1& ga = axis == 1 ? g.axis1() : g.axis2();
    const Grid1& gb = axis == 1 ? g.axis2() : g.axis1();
    Field2 out(g, f.dim());
    for (const PartialSymbolEntry& e : s.entries())
        for (int ib = 0; ib < gb.cancellative_count(); ++ib) {
            double a = e.coeffs(ib);
            if (a == 0) continue;
            Iv r2 = gb.iv_of(ib);
            Rect pr = axis == 1 ? Rect{e.p1, r2} : Rect{r2, e.p1};
            Eigen::VectorXd coeff = direct_coefficient(f, pr, 0, 0);
            for (int c = 0; c < g.leaf_count(); ++c) {
                int ta = axis == 1 ? g.cell_t1(c) : g.cell_t2(c);
                int tb = axis == 1 ? g.cell_t2(c) : g.cell_t1(c);
                if (!gb.contains(r2, tb)) continue;
                out.v.col(c) += a * coeff * haar_value(ga, e.q1, 0, ta) / gb.measure(r2);
            }
        }
    return out;
}

double brute_force_operator_norm(const LeafOp& op, const Weight2& win, const Weight2& wout,
                                 double p, int restarts, std::uint64_t seed) {
    const ProductGrid& g = win.grid();
    const int d = win.dim();
    const int n = g.leaf_count() * d;
    if (n > (1 << 16)) throw std::invalid_argument("operator basis too large for brute force");
    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return double(rng() >> 11) * 0x1p-53; };

    if (p == 2.0) {
        // assemble the weighted-conjugated matrix and run power iteration
        Eigen::MatrixXd m(n, n);
        Field2 basis(g, d);
        for (int k = 0; k < n; ++k) {
            basis.v.setZero();
            basis.v(k % d, k / d) = 1.0;
            Field2 img = op(basis);
            for (int c = 0; c < g.leaf_count(); ++c) m.block(c * d, k, d, 1) = img.v.col(c);
        }
        for (int c = 0; c < g.leaf_count(); ++c) {
            m.middleRows(c * d, d) = wout.power_at(c, 0.5) * m.middleRows(c * d, d);
            m.middleCols(c * d, d) = m.middleCols(c * d, d) * win.power_at(c, -0.5);
        }
        Eigen::MatrixXd mm = m.transpose() * m;
        double best = 0;
        for (int r = 0; r < 4; ++r) {
            Eigen::VectorXd v(n);
            for (int k = 0; k < n; ++k) v(k) = 2.0 * uniform() - 1.0;
            v.normalize();
            double lambda = 0;
            for (int it = 0; it < 20000; ++it) {
                Eigen::VectorXd w = mm * v;
                double nl = w.norm();
                if (nl == 0) break;
                w /= nl;
                if (std::abs(nl - lambda) < 1e-14 * std::max(1.0, nl) && it > 4) {
                    lambda = nl;
                    break;
                }
                lambda = nl;
                v = w;
            }
            best = std::max(best, std::sqrt(lambda));
        }
        return best;
    }

    // p != 2: derivative-free hill climbing from random starts (lower bound)
    double best = 0;
    for (int r = 0; r < restarts; ++r) {
        Field2 x(g, d);
        for (int c = 0; c < g.leaf_count(); ++c)
            for (int k = 0; k < d; ++k) x.v(k, c) = 2.0 * uniform() - 1.0;
        double nx = lp_weighted_norm(x, win, p);
        if (nx == 0) continue;
        x.v /= nx;
        double val = lp_weighted_norm(op(x), wout, p);
        double radius = 0.5;
        for (int it = 0; it < 200 && radius > 1e-7; ++it) {
            Field2 cand = x;
            for (int c = 0; c < g.leaf_count(); ++c)
                for (int k = 0; k < d; ++k) cand.v(k, c) += radius * (2.0 * uniform() - 1.0);
            double nc = lp_weighted_norm(cand, win, p);
            if (nc > 0) {
                cand.v /= nc;
                double vc = lp_weighted_norm(op(cand), wout, p);
                if (vc > val) {
                    x = cand;
                    val = vc;
                    radius *= 1.1;
                    continue;
                }
            }
            radius *= 0.8;
        }
        best = std::max(best, val);
    }
    return best;
}

CarlesonReport brute_force_carleson_check(const SparseFamily& fam, Frac delta) {
    const ProductGrid& g = *fam.grid;
    const std::size_t n = fam.rects.size();
    if (n > 12) throw std::invalid_argument("carleson brute force capped at 12 rectangles");
    CarlesonReport rep;
    if (n == 0) return rep;
    std::vector<CellSet> bitmaps;
    std::vector<long> sizes;
    for (const Rect& r : fam.rects) {
        bitmaps.push_back(rect_cells(g, r));
        sizes.push_back(g.leaves(r));
    }
    for (std::size_t mask = 1; mask < (std::size_t(1) << n); ++mask) {
        CellSet omega(g.leaf_count());
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t(1) << i)) omega.unite(bitmaps[i]);
        long measure = omega.count();
        long packed = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (bitmaps[i].subset_of(omega)) packed += sizes[i];
        rep.worst_ratio = std::max(rep.worst_ratio, double(packed) / double(measure));
        if (delta.num * packed > delta.den * measure) rep.ok = false;
    }
    return rep;
}

DirectionCheckReport dense_direction_check(const Eigen::MatrixXd& a,
                                           const std::function<double(const Eigen::VectorXd&)>& rho,
                                           int d, double slack, int directions, int refinements) {
    DirectionCheckReport rep;
    const double sq = std::sqrt(double(d));
    std::mt19937_64 rng(12345);
    auto uniform = [&rng] { return double(rng() >> 11) * 0x1p-53; };

    // deterministic dense sweep (equal angles for d = 2, seeded otherwise)
    std::vector<Eigen::VectorXd> dirs;
    dirs.reserve(std::size_t(directions));
    if (d == 1) {
        dirs.push_back(Eigen::VectorXd::Ones(1));
    } else if (d == 2) {
        for (int i = 0; i < directions; ++i) {
            double th = M_PI * (i + 0.5) / directions;
            Eigen::VectorXd e(2);
            e << std::cos(th), std::sin(th);
            dirs.push_back(e);
        }
    } else {
        for (int i = 0; i < directions; ++i) {
            Eigen::VectorXd e(d);
            for (int k = 0; k < d; ++k) e(k) = 2.0 * uniform() - 1.0;
            if (e.norm() < 1e-9) e(0) = 1;
            dirs.push_back(e.normalized());
        }
    }
    Eigen::VectorXd worst_lo = dirs.front(), worst_hi = dirs.front();
    for (const auto& e : dirs) {
        double r = rho(e), na = (a * e).norm();
        double lo = r / na, hi = na / (sq * r);
        if (lo > rep.lower) {
            rep.lower = lo;
            worst_lo = e;
        }
        if (hi > rep.upper) {
            rep.upper = hi;
            worst_hi = e;
        }
    }
    // derivative-free local refinement of the worst violators
    auto refine = [&](Eigen::VectorXd e, bool lower) {
        double best = lower ? rho(e) / (a * e).norm() : (a * e).norm() / (sq * rho(e));
        double radius = 0.05;
        for (int it = 0; it < refinements * 8; ++it) {
            Eigen::VectorXd cand = e;
            for (int k = 0; k < d; ++k) cand(k) += radius * (2.0 * uniform() - 1.0);
            cand.normalize();
            double v = lower ? rho(cand) / (a * cand).norm() : (a * cand).norm() / (sq * rho(cand));
            if (v > best) {
                best = v;
                e = cand;
            } else {
                radius *= 0.8;
            }
        }
        return std::pair<double, Eigen::VectorXd>(best, e);
    };
    auto [lo, elo] = refine(worst_lo, true);
    if (lo > rep.lower) {
        rep.lower = lo;
        worst_lo = elo;
    }
    auto [hi, ehi] = refine(worst_hi, false);
    if (hi > rep.upper) {
        rep.upper = hi;
        worst_hi = ehi;
    }
    rep.ok = rep.lower <= 1.0 + 1e-9 && rep.upper <= slack;
    rep.worst_direction = rep.lower > 1.0 + 1e-9 ? worst_lo : worst_hi;
    return rep;
}

}  // namespace dyad
