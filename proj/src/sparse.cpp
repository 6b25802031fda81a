#include "dyadlab/sparse.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace dyad {

long CellSet::count() const {
    long n = 0;
    for (auto w : w_) n += std::popcount(w);
    return n;
}

long CellSet::intersection_count(const CellSet& o) const {
    long n = 0;
    for (std::size_t i = 0; i < w_.size(); ++i) n += std::popcount(w_[i] & o.w_[i]);
    return n;
}

bool CellSet::intersects(const CellSet& o) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
        if (w_[i] & o.w_[i]) return true;
    return false;
}

bool CellSet::subset_of(const CellSet& o) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
        if (w_[i] & ~o.w_[i]) return false;
    return true;
}

CellSet& CellSet::unite(const CellSet& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
}

CellSet CellSet::minus(const CellSet& o) const {
    CellSet out = *this;
    for (std::size_t i = 0; i < w_.size(); ++i) out.w_[i] &= ~o.w_[i];
    return out;
}

std::vector<int> CellSet::cells() const {
    std::vector<int> out;
    for (int c = 0; c < n_; ++c)
        if (test(c)) out.push_back(c);
    return out;
}

CellSet rect_cells(const ProductGrid& g, Rect r) {
    CellSet s(g.leaf_count());
    for (int c : g.cells_of(r)) s.add(c);
    return s;
}

SparseCheckReport check_weakly_sparse(const SparseFamily& fam) {
    const ProductGrid& g = *fam.grid;
    if (fam.rects.size() != fam.witnesses.size())
        throw std::invalid_argument("sparse family: one witness per rectangle required");
    for (std::size_t i = 0; i < fam.rects.size(); ++i)
        if (!fam.witnesses[i].subset_of(rect_cells(g, fam.rects[i])))
            throw std::invalid_argument("witness set not contained in its rectangle");
    SparseCheckReport rep;
    for (std::size_t i = 0; i < fam.rects.size(); ++i)
        for (std::size_t j = i + 1; j < fam.rects.size(); ++j)
            if (fam.witnesses[i].intersects(fam.witnesses[j])) {
                rep.ok = false;
                rep.violation = "witness overlap between rectangles " + std::to_string(i) + " and " +
                                std::to_string(j);
                return rep;
            }
    for (std::size_t i = 0; i < fam.rects.size(); ++i) {
        long er = fam.witnesses[i].count();
        long r = g.leaves(fam.rects[i]);
        if (fam.delta.den * er < fam.delta.num * r) {
            rep.ok = false;
            rep.violation = "witness of rectangle " + std::to_string(i) + " smaller than delta |R|";
            return rep;
        }
    }
    return rep;
}

SparseCheckReport check_dyadic_sparse(const IntervalFamily& fam) {
    const Grid1& g = *fam.grid;
    SparseCheckReport rep;
    for (std::size_t qi = 0; qi < fam.intervals.size(); ++qi) {
        Iv q = fam.intervals[qi];
        // members strictly inside q
        std::vector<Iv> inside;
        for (std::size_t ki = 0; ki < fam.intervals.size(); ++ki) {
            if (ki == qi) continue;
            Iv k = fam.intervals[ki];
            if (k.gen > q.gen && g.contains(q, k)) inside.push_back(k);
        }
        long total = 0;
        for (std::size_t a = 0; a < inside.size(); ++a) {
            bool maximal = true;
            for (std::size_t b = 0; b < inside.size(); ++b)
                if (a != b && inside[b].gen < inside[a].gen && g.contains(inside[b], inside[a])) {
                    maximal = false;
                    break;
                }
            if (maximal) total += g.leaf_span(inside[a].gen);
        }
        if (fam.epsilon.den * total > (fam.epsilon.den - fam.epsilon.num) * long(g.leaf_span(q.gen))) {
            rep.ok = false;
            rep.violation = "children of member " + std::to_string(qi) + " exceed (1-eps)|Q|";
            return rep;
        }
    }
    return rep;
}

std::vector<Rect> carrier_rects(const Spectrum2& f, const Spectrum2& g, double tol) {
    std::vector<Rect> out;
    const ProductGrid& grid = *f.grid;
    for (const Rect& r : grid.cancellative_rects()) {
        if (f.at(r).norm() > tol || g.at(r).norm() > tol) out.push_back(r);
    }
    return out;
}

namespace {

// selection order: decreasing area, then decreasing |R1|, then lexicographic
// lower-left corner, then generation/position for full determinism
bool selection_order(const ProductGrid& g, const Rect& a, const Rect& b) {
    long la = g.leaves(a), lb = g.leaves(b);
    if (la != lb) return la > lb;
    int wa = g.axis1().leaf_span(a.a.gen), wb = g.axis1().leaf_span(b.a.gen);
    if (wa != wb) return wa > wb;
    auto corner = [&g](const Rect& r) {
        return std::pair<int, int>(g.axis1().start_leaf(r.a), g.axis2().start_leaf(r.b));
    };
    auto ca = corner(a), cb = corner(b);
    if (ca != cb) return ca < cb;
    return std::tie(a.a.gen, a.a.pos, a.b.gen, a.b.pos) <
           std::tie(b.a.gen, b.a.pos, b.b.gen, b.b.pos);
}

}  // namespace

SparseSelectResult biparameter_sparse_select(const ScalarField2& phi, const ScalarField2& psi,
                                             const std::vector<Rect>& carriers, Frac delta) {
    if (2 * delta.num >= delta.den) throw std::invalid_argument("delta must be < 1/2");
    const ProductGrid& g = *phi.grid;
    SparseSelectResult res;
    res.q0 = g.common_ancestor(carriers);
    const Rect q0 = res.q0;
    const long q0_leaves = g.leaves(q0);

    double mean_f = scalar_average(phi, q0);
    double mean_g = scalar_average(psi, q0);
    auto q0cells = g.cells_of(q0);

    // double c until |Omega_0| <= |Q0|/2
    double c = 2.0;
    auto omega0_size = [&](double cc) {
        long n = 0;
        for (int cell : q0cells)
            if (phi.v(0, cell) > cc * mean_f || psi.v(0, cell) > cc * mean_g) ++n;
        return n;
    };
    while (2 * omega0_size(c) > q0_leaves) c *= 2.0;
    res.c_used = c;

    // per-cell ladder level: cell is in Omega_k iff level > k
    std::vector<int> level(std::size_t(g.leaf_count()), 0);
    int max_level = 0;
    for (int cell : q0cells) {
        int k = 0;
        while (phi.v(0, cell) > std::ldexp(c * mean_f, k) || psi.v(0, cell) > std::ldexp(c * mean_g, k))
            ++k;
        level[std::size_t(cell)] = k;
        max_level = std::max(max_level, k);
    }

    // classify carriers into rungs: -1 for R_0, else the unique k with
    // |R cap Omega_k| > |R|/2 >= |R cap Omega_{k+1}|
    std::vector<Rect> uniq = carriers;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    std::vector<std::vector<Rect>> rungs(std::size_t(max_level) + 1);
    for (const Rect& r : uniq) {
        if (!g.contains(q0, r)) continue;
        auto cells = g.cells_of(r);
        long half = long(cells.size());
        auto overlap = [&](int k) {
            long n = 0;
            for (int cell : cells)
                if (level[std::size_t(cell)] > k) ++n;
            return n;
        };
        if (2 * overlap(0) <= half) continue;  // rung -1: covered by the Q0 term
        int k = 0;
        while (2 * overlap(k + 1) > half) ++k;
        rungs[std::size_t(k)].push_back(r);
    }
    res.k0 = max_level > 0 ? max_level - 1 : 0;

    SparseFamily fam;
    fam.grid = &g;
    fam.delta = delta;
    CellSet covered(g.leaf_count());
    auto try_select = [&](const Rect& r) {
        CellSet rc = rect_cells(g, r);
        long inter = rc.intersection_count(covered);
        if (delta.den * inter < (delta.den - delta.num) * g.leaves(r)) {
            fam.rects.push_back(r);
            fam.witnesses.push_back(rc.minus(covered));
            covered.unite(rc);
            return true;
        }
        return false;
    };
    for (int k = int(rungs.size()) - 1; k >= 0; --k) {
        auto& rung = rungs[std::size_t(k)];
        std::sort(rung.begin(), rung.end(),
                  [&g](const Rect& a, const Rect& b) { return selection_order(g, a, b); });
        for (const Rect& r : rung) try_select(r);
    }
    if (std::find(fam.rects.begin(), fam.rects.end(), q0) == fam.rects.end()) try_select(q0);
    res.family = std::move(fam);
    return res;
}

double sparse_form_eval(const SparseFamily& fam, const ScalarField2& phi, const ScalarField2& psi) {
    const ProductGrid& g = *fam.grid;
    double acc = 0;
    for (const Rect& r : fam.rects)
        acc += scalar_average(phi, r) * scalar_average(psi, r) * g.measure(r);
    return acc;
}

ScalarField1 sparse_positive_operator(const IntervalFamily& fam, const Weight1& w, double p,
                                      const Field1& f, const IntervalReducing& red) {
    const Grid1& g = *fam.grid;
    const int d = w.dim();
    auto pstack = w.power_stack(1.0 / p);
    ScalarField1 out(g, 1);
    for (const Iv& q : fam.intervals) {
        // (|W_L f|)_L
        double avg = 0;
        const Eigen::MatrixXd& a = red.at(q);
        for (int n = 0; n < g.leaf_span(q.gen); ++n) avg += (a * f.v.col(g.leaf_at(q, n))).norm();
        avg /= double(g.leaf_span(q.gen));
        Eigen::MatrixXd ainv = matrix_power(a, -1.0);
        for (int n = 0; n < g.leaf_span(q.gen); ++n) {
            int t = g.leaf_at(q, n);
            double m = spectral_norm(pstack->middleRows(t * d, d) * ainv);
            out.v(0, t) += avg * avg * m * m;
        }
    }
    out.v = out.v.array().sqrt();
    return out;
}

namespace {

struct ShiftedSparseState {
    const Grid1* g;
    const Spectrum1* sf;
    const Field1* f;
    const IntervalReducing* red;
    double p;
    int i;
    Frac eps;
    std::vector<Iv> family;
    double c_used = 0;
};

// (sum_{P in ch_i(I)} |A f_P|)^2 / |I|, zero when ch_i leaves the grid
double node_contribution(const ShiftedSparseState& st, Iv iv, const Eigen::MatrixXd& a) {
    const Grid1& g = *st.g;
    if (iv.gen + st.i > g.depth() - 1) return 0.0;  // no cancellative coefficients that deep
    double s = 0;
    for (const Iv& p : g.children_at_depth(iv, st.i)) s += (a * st.sf->coeff.col(Grid1::id_of(p))).norm();
    return s * s / g.measure(iv);
}

void select_maximal(const ShiftedSparseState& st, Iv iv, double acc, double thresh,
                    const Eigen::MatrixXd& a, std::vector<Iv>& out) {
    const Grid1& g = *st.g;
    if (iv.gen >= g.depth()) return;
    for (const Iv& ch : g.halves(iv)) {
        double val = acc + node_contribution(st, ch, a);
        if (val > thresh)
            out.push_back(ch);
        else
            select_maximal(st, ch, val, thresh, a, out);
    }
}

void build_family(ShiftedSparseState& st, Iv root) {
    const Grid1& g = *st.g;
    const Eigen::MatrixXd& a = st.red->at(root);
    double m = 0;
    for (int n = 0; n < g.leaf_span(root.gen); ++n) m += (a * st.f->v.col(g.leaf_at(root, n))).norm();
    m /= double(g.leaf_span(root.gen));
    if (m <= 0) return;
    st.family.push_back(root);

    double ibar = std::max(st.i, 1);
    double c = 2.0;
    std::vector<Iv> picked;
    for (;;) {
        picked.clear();
        double thresh = c * c * ibar * ibar * std::ldexp(1.0, st.i) * m * m;
        select_maximal(st, root, node_contribution(st, root, a), thresh, a, picked);
        long total = 0;
        for (const Iv& l : picked) total += g.leaf_span(l.gen);
        if (st.eps.den * total <= (st.eps.den - st.eps.num) * long(g.leaf_span(root.gen))) break;
        c *= 2.0;
    }
    st.c_used = std::max(st.c_used, c);
    for (const Iv& l : picked) build_family(st, l);
}

}  // namespace

ShiftedSparseResult one_param_shifted_sparse(Iv root, const Field1& f, const Weight1& w, double p,
                                             int i, int j, Frac epsilon,
                                             const IntervalReducing& red) {
    if (epsilon.num <= 0 || epsilon.num >= epsilon.den)
        throw std::invalid_argument("epsilon must be in (0,1)");
    const Grid1& g = *f.grid;
    Spectrum1 sf = analyze(f);
    ShiftedSparseState st{&g, &sf, &f, &red, p, i, epsilon, {}, 0};
    build_family(st, root);

    ShiftedSparseResult res;
    res.family = IntervalFamily{&g, st.family, epsilon};
    res.c_used = st.c_used;

    // localized shifted square function on the root
    auto pstack = w.power_stack(1.0 / p);
    const int d = w.dim();
    res.lhs = ScalarField1(g, 1);
    for (int n = 0; n < g.leaf_span(root.gen); ++n) {
        int t = g.leaf_at(root, n);
        Eigen::MatrixXd wx = pstack->middleRows(t * d, d);
        double acc = 0;
        for (Iv iv : g.tower(t)) {
            if (iv.gen < root.gen || !g.contains(root, iv)) continue;
            if (iv.gen + i > g.depth() - 1) continue;
            double s = 0;
            for (const Iv& pch : g.children_at_depth(iv, i))
                s += (wx * sf.coeff.col(Grid1::id_of(pch))).norm();
            acc += s * s / g.measure(iv);
        }
        res.lhs.v(0, t) = std::sqrt(acc) * std::pow(2.0, 0.5 * j);
    }
    res.rhs = sparse_positive_operator(res.family, w, p, f, red);
    double ibar = std::max(i, 1);
    double factor = ibar * std::pow(2.0, 0.5 * (i + j));
    res.ratio = 0;
    for (int t = 0; t < g.leaf_count(); ++t)
        if (res.rhs.v(0, t) > 0)
            res.ratio = std::max(res.ratio, res.lhs.v(0, t) / (factor * res.rhs.v(0, t)));
    return res;
}

}  // namespace dyad
