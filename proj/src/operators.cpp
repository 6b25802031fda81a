#include "dyadlab/operators.hpp"

#include "dyadlab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dyad {

Spectrum2 apply(const MultiplierSymbol& s, const Spectrum2& f) {
    Spectrum2 out = f;
    for (int c = 0; c < out.c00.cols(); ++c) out.c00.col(c) *= s.sigma(c);
    out.clear_residue();
    return out;
}

Field2 apply(const MultiplierSymbol& s, const Field2& f) { return synthesize(apply(s, analyze(f))); }

ShiftKernel::ShiftKernel(const ProductGrid& g, std::array<int, 2> i, std::array<int, 2> j)
    : grid_(&g), i_(i), j_(j) {
    if (i[0] < 0 || i[1] < 0 || j[0] < 0 || j[1] < 0)
        throw std::invalid_argument("shift complexity must be nonnegative");
}

double ShiftKernel::coefficient_bound() const { return std::pow(2.0, -0.5 * complexity_sum()); }

void ShiftKernel::add(Rect r, Rect p, Rect q, double a) {
    const Grid1 &g1 = grid_->axis1(), &g2 = grid_->axis2();
    if (p.a.gen != r.a.gen + i_[0] || p.b.gen != r.b.gen + i_[1] || !grid_->contains(r, p))
        throw std::invalid_argument("shift entry: P not in ch_i(R)");
    if (q.a.gen != r.a.gen + j_[0] || q.b.gen != r.b.gen + j_[1] || !grid_->contains(r, q))
        throw std::invalid_argument("shift entry: Q not in ch_j(R)");
    if (p.a.gen > g1.depth() - 1 || p.b.gen > g2.depth() - 1 || q.a.gen > g1.depth() - 1 ||
        q.b.gen > g2.depth() - 1)
        throw std::invalid_argument("shift entry: child beyond the cancellative range");
    if (std::abs(a) > coefficient_bound() * (1.0 + 1e-12))
        throw std::invalid_argument("shift coefficient exceeds sqrt(|P||Q|)/|R|");
    entries_.push_back(ShiftEntry{r, p, q, a});
}

ShiftKernel ShiftKernel::adjoint() const {
    ShiftKernel out(*grid_, j_, i_);
    for (const ShiftEntry& e : entries_) out.add(e.r, e.q, e.p, e.a);
    return out;
}

Spectrum2 apply(const ShiftKernel& k, const Spectrum2& f) {
    Spectrum2 out = f;
    out.c00.setZero();
    out.clear_residue();
    for (const ShiftEntry& e : k.entries()) out.c00.col(out.col(e.q)) += e.a * f.c00.col(f.col(e.p));
    return out;
}

Field2 apply(const ShiftKernel& k, const Field2& f) { return synthesize(apply(k, analyze(f))); }

namespace {

// averages of f over every rectangle, d x rect_count
Eigen::MatrixXd all_rect_averages(const Field2& f) {
    const ProductGrid& g = *f.grid;
    Eigen::MatrixXd out(f.dim(), g.rect_count());
    for (int r = 0; r < f.dim(); ++r) {
        Eigen::ArrayXd sums = rect_sums(g, f.v.row(r).transpose().array());
        for (const Rect& rect : g.all_rects()) {
            int id = g.rect_id(rect);
            out(r, id) = sums(id) / double(g.leaves(rect));
        }
    }
    return out;
}

}  // namespace

Field2 apply(const ParaproductSymbol& s, const Field2& f) {
    const ProductGrid& g = *f.grid;
    const Grid1 &g1 = g.axis1(), &g2 = g.axis2();
    Field2 out(g, f.dim());
    Spectrum2 sf = analyze(f);

    switch (s.kind) {
        case ParaKind::k11: {
            // sum_R a_R (f)_R h_R: assemble output coefficients and synthesize
            Eigen::MatrixXd avg = all_rect_averages(f);
            Spectrum2 res = sf;
            res.c00.setZero();
            res.clear_residue();
            for (const Rect& r : g.cancellative_rects())
                res.c00.col(res.col(r)) = s.a.c00(0, res.col(r)) * avg.col(g.rect_id(r));
            return synthesize(res);
        }
        case ParaKind::k00: {
            // sum_R a_R f_R 1_R / |R|
            for (const Rect& r : g.cancellative_rects()) {
                Eigen::VectorXd term = s.a.c00(0, sf.col(r)) / g.measure(r) * sf.at(r);
                for (int c : g.cells_of(r)) out.v.col(c) += term;
            }
            return out;
        }
        case ParaKind::k01: {
            // sum_R a_R (f^1_{R1})_{R2} (1_{R1}/|R1|) x h_{R2}
            for (int i1 = 0; i1 < g1.cancellative_count(); ++i1) {
                Iv r1 = g1.iv_of(i1);
                Field1 part = partial_coefficient(f, 1, r1, 0);
                for (int i2 = 0; i2 < g2.cancellative_count(); ++i2) {
                    Iv r2 = g2.iv_of(i2);
                    double a = s.a.c00(0, i1 * g2.cancellative_count() + i2);
                    if (a == 0) continue;
                    Eigen::VectorXd avg = part.average(r2);
                    for (int n1 = 0; n1 < g1.leaf_span(r1.gen); ++n1) {
                        int t1 = g1.leaf_at(r1, n1);
                        for (int n2 = 0; n2 < g2.leaf_span(r2.gen); ++n2) {
                            int t2 = g2.leaf_at(r2, n2);
                            out.v.col(g.cell(t1, t2)) +=
                                a * avg / g1.measure(r1) * haar_value(g2, r2, 0, t2);
                        }
                    }
                }
            }
            return out;
        }
        case ParaKind::k10: {
            for (int i2 = 0; i2 < g2.cancellative_count(); ++i2) {
                Iv r2 = g2.iv_of(i2);
                Field1 part = partial_coefficient(f, 2, r2, 0);
                for (int i1 = 0; i1 < g1.cancellative_count(); ++i1) {
                    Iv r1 = g1.iv_of(i1);
                    double a = s.a.c00(0, i1 * g2.cancellative_count() + i2);
                    if (a == 0) continue;
                    Eigen::VectorXd avg = part.average(r1);
                    for (int n1 = 0; n1 < g1.leaf_span(r1.gen); ++n1) {
                        int t1 = g1.leaf_at(r1, n1);
                        double h1 = haar_value(g1, r1, 0, t1);
                        for (int n2 = 0; n2 < g2.leaf_span(r2.gen); ++n2) {
                            int t2 = g2.leaf_at(r2, n2);
                            out.v.col(g.cell(t1, t2)) += a * avg * h1 / g2.measure(r2);
                        }
                    }
                }
            }
            return out;
        }
    }
    throw std::logic_error("unknown paraproduct kind");
}

PartialParaproduct::PartialParaproduct(const ProductGrid& g, int axis, int i, int j)
    : grid_(&g), axis_(axis), i_(i), j_(j) {
    if (axis != 1 && axis != 2) throw std::invalid_argument("axis must be 1 or 2");
    if (i < 0 || j < 0) throw std::invalid_argument("complexity must be nonnegative");
    const Grid1& ga = axis == 1 ? g.axis1() : g.axis2();
    if (std::max(i, j) > ga.depth() - 1)
        throw std::invalid_argument("complexity exceeds the cancellative range");
}

void PartialParaproduct::add(Iv r1, Iv p1, Iv q1, const Eigen::ArrayXd& coeffs) {
    const Grid1& ga = axis_ == 1 ? grid_->axis1() : grid_->axis2();
    const Grid1& gb = axis_ == 1 ? grid_->axis2() : grid_->axis1();
    if (p1.gen != r1.gen + i_ || !ga.contains(r1, p1))
        throw std::invalid_argument("partial paraproduct: P1 not in ch_i(R1)");
    if (q1.gen != r1.gen + j_ || !ga.contains(r1, q1))
        throw std::invalid_argument("partial paraproduct: Q1 not in ch_j(R1)");
    if (p1.gen > ga.depth() - 1 || q1.gen > ga.depth() - 1)
        throw std::invalid_argument("partial paraproduct: child beyond the cancellative range");
    if (coeffs.size() != gb.cancellative_count())
        throw std::invalid_argument("partial paraproduct: bad symbol coefficient count");
    double bound = std::pow(2.0, -0.5 * (i_ + j_));
    if (bmo_norm(coeffs, gb) > bound * (1.0 + 1e-12))
        throw std::invalid_argument("partial paraproduct symbol exceeds its BMO bound");
    entries_.push_back(PartialSymbolEntry{r1, p1, q1, coeffs});
}

Field2 apply(const PartialParaproduct& s, const Field2& f) {
    const ProductGrid& g = *f.grid;
    const int axis = s.axis();
    const Grid1& ga = axis == 1 ? g.axis1() : g.axis2();
    const Grid1& gb = axis == 1 ? g.axis2() : g.axis1();
    Spectrum2 sf = analyze(f);
    Field2 out(g, f.dim());
    for (const PartialSymbolEntry& e : s.entries()) {
        for (int ib = 0; ib < gb.cancellative_count(); ++ib) {
            double a = e.coeffs(ib);
            if (a == 0) continue;
            Iv r2 = gb.iv_of(ib);
            Rect pr = axis == 1 ? Rect{e.p1, r2} : Rect{r2, e.p1};
            Eigen::VectorXd fc = sf.at(pr);
            // a * f_{P1 x R2} h_{Q1} x 1_{R2}/|R2|
            for (int na = 0; na < ga.leaf_span(e.q1.gen); ++na) {
                int ta = ga.leaf_at(e.q1, na);
                double h = haar_value(ga, e.q1, 0, ta);
                for (int nb = 0; nb < gb.leaf_span(r2.gen); ++nb) {
                    int tb = gb.leaf_at(r2, nb);
                    int cell = axis == 1 ? g.cell(ta, tb) : g.cell(tb, ta);
                    out.v.col(cell) += a * h / gb.measure(r2) * fc;
                }
            }
        }
    }
    return out;
}

ScalarField1 maximal_cg(const Field1& f, const Weight1& w, double p) {
    const Grid1& g = *f.grid;
    const int d = w.dim();
    auto pstack = w.power_stack(1.0 / p);
    ScalarField1 out(g, 1);
    for (int x = 0; x < g.leaf_count(); ++x) {
        Eigen::MatrixXd wx = pstack->middleRows(x * d, d);
        double best = 0;
        for (Iv q : g.tower(x)) {
            double acc = 0;
            for (int n = 0; n < g.leaf_span(q.gen); ++n) acc += (wx * f.v.col(g.leaf_at(q, n))).norm();
            best = std::max(best, acc / double(g.leaf_span(q.gen)));
        }
        out.v(0, x) = best;
    }
    return out;
}

ScalarField1 maximal_cg_modified(const Field1& f, const IntervalReducing& red) {
    const Grid1& g = *f.grid;
    Eigen::ArrayXd avg(g.interval_count());
    for (int id = 0; id < g.interval_count(); ++id) {
        Iv q = g.iv_of(id);
        double acc = 0;
        for (int n = 0; n < g.leaf_span(q.gen); ++n) acc += (red.at(q) * f.v.col(g.leaf_at(q, n))).norm();
        avg(id) = acc / double(g.leaf_span(q.gen));
    }
    ScalarField1 out(g, 1);
    for (int x = 0; x < g.leaf_count(); ++x) {
        double best = 0;
        for (Iv q : g.tower(x)) best = std::max(best, avg(Grid1::id_of(q)));
        out.v(0, x) = best;
    }
    return out;
}

ScalarField2 maximal_strong_modified(const Field2& f, const RectReducing& red) {
    const ProductGrid& g = *f.grid;
    Eigen::ArrayXd avg(g.rect_count());
    for (const Rect& r : g.all_rects()) {
        double acc = 0;
        auto cells = g.cells_of(r);
        for (int c : cells) acc += (red.at(r) * f.v.col(c)).norm();
        avg(g.rect_id(r)) = acc / double(cells.size());
    }
    ScalarField2 out(g, 1);
    for (int c = 0; c < g.leaf_count(); ++c) {
        double best = 0;
        for (Iv a : g.axis1().tower(g.cell_t1(c)))
            for (Iv b : g.axis2().tower(g.cell_t2(c)))
                best = std::max(best, avg(g.rect_id(Rect{a, b})));
        out.v(0, c) = best;
    }
    return out;
}

ScalarField2 maximal_strong_unweighted(const Field2& f) {
    const ProductGrid& g = *f.grid;
    Eigen::ArrayXd normv(g.leaf_count());
    for (int c = 0; c < g.leaf_count(); ++c) normv(c) = f.v.col(c).norm();
    Eigen::ArrayXd sums = rect_sums(g, normv);
    ScalarField2 out(g, 1);
    for (int c = 0; c < g.leaf_count(); ++c) {
        double best = 0;
        for (Iv a : g.axis1().tower(g.cell_t1(c)))
            for (Iv b : g.axis2().tower(g.cell_t2(c))) {
                Rect r{a, b};
                best = std::max(best, sums(g.rect_id(r)) / double(g.leaves(r)));
            }
        out.v(0, c) = best;
    }
    return out;
}

ScalarField1 maximal_unweighted(const Field1& f) {
    const Grid1& g = *f.grid;
    Eigen::ArrayXd normv(g.leaf_count());
    for (int c = 0; c < g.leaf_count(); ++c) normv(c) = f.v.col(c).norm();
    Eigen::ArrayXd sums = interval_sums(g, normv);
    ScalarField1 out(g, 1);
    for (int x = 0; x < g.leaf_count(); ++x) {
        double best = 0;
        for (Iv q : g.tower(x))
            best = std::max(best, sums(Grid1::id_of(q)) / double(g.leaf_span(q.gen)));
        out.v(0, x) = best;
    }
    return out;
}

double lp_weighted_norm(const Field2& f, const Weight2& w, double p) {
    auto pstack = w.power_stack(1.0 / p);
    const int d = w.dim();
    double acc = 0;
    for (int c = 0; c < f.grid->leaf_count(); ++c)
        acc += pow_half((pstack->middleRows(c * d, d) * f.v.col(c)).squaredNorm(), p);
    return std::pow(acc * f.leaf_measure(), 1.0 / p);
}

double lp_weighted_norm(const Field1& f, const Weight1& w, double p) {
    auto pstack = w.power_stack(1.0 / p);
    const int d = w.dim();
    double acc = 0;
    for (int c = 0; c < f.grid->leaf_count(); ++c)
        acc += pow_half((pstack->middleRows(c * d, d) * f.v.col(c)).squaredNorm(), p);
    return std::pow(acc * f.leaf_measure(), 1.0 / p);
}

BmoResult bmo_prod_norm(const Spectrum2& a, int exact_carrier_cap, int samples, std::uint64_t seed) {
    const ProductGrid& g = *a.grid;
    struct Carrier {
        CellSet cells;
        long leaves;
        double energy;
    };
    std::vector<Carrier> carriers;
    for (const Rect& r : g.cancellative_rects()) {
        double e = a.at(r).squaredNorm();
        if (e > 0) carriers.push_back(Carrier{rect_cells(g, r), g.leaves(r), e});
    }
    BmoResult res;
    if (carriers.empty()) return res;
    const double leafm = g.leaf_measure();

    auto ratio_of = [&](const CellSet& omega) {
        double num = 0;
        for (const Carrier& c : carriers)
            if (c.cells.subset_of(omega)) num += c.energy;
        return num / (double(omega.count()) * leafm);
    };

    double best = 0;
    if (int(carriers.size()) <= exact_carrier_cap) {
        // exact: every union of carrier rectangles (minimal representatives)
        std::vector<CellSet> stack;
        std::function<void(std::size_t, const CellSet&, bool)> rec = [&](std::size_t idx,
                                                                         const CellSet& uni,
                                                                         bool any) {
            if (idx == carriers.size()) {
                if (any) best = std::max(best, ratio_of(uni));
                return;
            }
            rec(idx + 1, uni, any);
            CellSet with = uni;
            with.unite(carriers[idx].cells);
            rec(idx + 1, with, true);
        };
        rec(0, CellSet(g.leaf_count()), false);
        res.exact = true;
    } else {
        // sampled unions: all singletons plus random subsets (lower bound)
        for (const Carrier& c : carriers) best = std::max(best, ratio_of(c.cells));
        std::mt19937_64 rng(seed);
        for (int s = 0; s < samples; ++s) {
            CellSet uni(g.leaf_count());
            bool any = false;
            for (const Carrier& c : carriers)
                if (rng() & 1) {
                    uni.unite(c.cells);
                    any = true;
                }
            if (any) best = std::max(best, ratio_of(uni));
        }
        res.exact = false;
    }
    res.value = std::sqrt(best);
    return res;
}

double bmo_norm(const Eigen::ArrayXd& coeffs, const Grid1& g) {
    // cumulative coefficient energy below each interval
    Eigen::ArrayXd energy = Eigen::ArrayXd::Zero(g.interval_count());
    for (int k = g.depth(); k >= 0; --k)
        for (int m = 0; m < (1 << k); ++m) {
            Iv q{k, m};
            double e = 0;
            if (k <= g.depth() - 1) {
                e = coeffs(Grid1::id_of(q)) * coeffs(Grid1::id_of(q));
                for (const Iv& h : g.halves(q)) e += energy(Grid1::id_of(h));
            }
            energy(Grid1::id_of(q)) = e;
        }
    double best = 0;
    for (int id = 0; id < g.interval_count(); ++id)
        best = std::max(best, energy(id) / g.measure(g.iv_of(id)));
    return std::sqrt(best);
}

namespace {

Eigen::MatrixXd assemble(const LeafOp& op, const ProductGrid& g, int d) {
    const int n = g.leaf_count() * d;
    Eigen::MatrixXd m(n, n);
    Field2 basis(g, d);
    for (int k = 0; k < n; ++k) {
        basis.v.setZero();
        basis.v(k % d, k / d) = 1.0;
        Field2 img = op(basis);
        for (int c = 0; c < g.leaf_count(); ++c) m.block(c * d, k, d, 1) = img.v.col(c);
    }
    return m;
}

}  // namespace

double operator_norm_p2(const LeafOp& op, const Weight2& win, const Weight2& wout) {
    const ProductGrid& g = win.grid();
    const int d = win.dim();
    Eigen::MatrixXd m = assemble(op, g, d);
    auto so = wout.power_stack(0.5);
    auto si = win.power_stack(-0.5);
    Eigen::MatrixXd conj(m.rows(), m.cols());
    for (int c = 0; c < g.leaf_count(); ++c)
        conj.middleRows(c * d, d) = so->middleRows(c * d, d) * m.middleRows(c * d, d);
    for (int c = 0; c < g.leaf_count(); ++c)
        conj.middleCols(c * d, d) = conj.middleCols(c * d, d) * si->middleRows(c * d, d);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(conj);
    return svd.singularValues()(0);
}

double operator_norm_lp(const LeafOp& op, const LeafOp& op_adj, const Weight2& win,
                        const Weight2& wout, double p, int restarts, std::uint64_t seed) {
    const ProductGrid& g = win.grid();
    const int d = win.dim();
    auto so = wout.power_stack(1.0 / p);
    auto so2 = wout.power_stack(2.0 / p);
    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return double(rng() >> 11) * 0x1p-53; };

    double best = 0;
    for (int r = 0; r < restarts; ++r) {
        Field2 x(g, d);
        for (int c = 0; c < g.leaf_count(); ++c)
            for (int k = 0; k < d; ++k) x.v(k, c) = 2.0 * uniform() - 1.0;
        double nx = lp_weighted_norm(x, win, p);
        if (nx == 0) continue;
        x.v /= nx;
        double val = 0;
        for (int it = 0; it < 60; ++it) {
            Field2 y = op(x);
            double ny = lp_weighted_norm(y, wout, p);
            val = ny;
            if (ny == 0) break;
            // gradient of ||op x||_{Lp(Wout)} in x: op^T applied to the duality image of y
            Field2 dual(g, d);
            for (int c = 0; c < g.leaf_count(); ++c) {
                double q = (so->middleRows(c * d, d) * y.v.col(c)).squaredNorm();
                if (q > 0) dual.v.col(c) = pow_half(q, p - 2.0) * (so2->middleRows(c * d, d) * y.v.col(c));
            }
            dual.v *= std::pow(ny, 1.0 - p);
            Field2 grad = op_adj(dual);
            double gn = grad.v.norm();
            if (gn < 1e-15) break;
            Field2 cand(g, d);
            double step = 0.5;
            bool improved = false;
            for (int ls = 0; ls < 12; ++ls) {
                cand.v = x.v + step * grad.v / gn * x.v.norm();
                double nc = lp_weighted_norm(cand, win, p);
                if (nc > 0) {
                    cand.v /= nc;
                    double vc = lp_weighted_norm(op(cand), wout, p);
                    if (vc > val * (1.0 + 1e-12)) {
                        x = cand;
                        val = vc;
                        improved = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if (!improved) break;
        }
        best = std::max(best, val);
    }
    return best;
}

}  // namespace dyad
