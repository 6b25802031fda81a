#include "dyadlab/square.hpp"

#include <cmath>

namespace dyad {

namespace {

// spread val^2 * 1_Q/|Q| onto the squared accumulator
void spread1(ScalarField1& acc2, const Grid1& g, Iv q, double val) {
    double term = val * val / g.measure(q);
    for (int n = 0; n < g.leaf_span(q.gen); ++n) acc2.v(0, g.leaf_at(q, n)) += term;
}

void spread2(ScalarField2& acc2, const ProductGrid& g, Rect r, double val) {
    double term = val * val / g.measure(r);
    for (int c : g.cells_of(r)) acc2.v(0, c) += term;
}

ScalarField1 finish(ScalarField1 acc2) {
    acc2.v = acc2.v.array().sqrt();
    return acc2;
}

ScalarField2 finish(ScalarField2 acc2) {
    acc2.v = acc2.v.array().sqrt();
    return acc2;
}

}  // namespace

ScalarField1 square_fn(const Field1& f) {
    const Grid1& g = *f.grid;
    Spectrum1 s = analyze(f);
    ScalarField1 acc(g, 1);
    for (int id = 0; id < g.cancellative_count(); ++id)
        spread1(acc, g, g.iv_of(id), s.coeff.col(id).norm());
    return finish(std::move(acc));
}

ScalarField1 square_fn_reduced(const Field1& f, const IntervalReducing& red) {
    const Grid1& g = *f.grid;
    Spectrum1 s = analyze(f);
    ScalarField1 acc(g, 1);
    for (int id = 0; id < g.cancellative_count(); ++id) {
        Iv q = g.iv_of(id);
        spread1(acc, g, q, (red.at(q) * s.coeff.col(id)).norm());
    }
    return finish(std::move(acc));
}

ScalarField1 square_fn_pointwise(const Field1& f, const Weight1& w, double p) {
    const Grid1& g = *f.grid;
    Spectrum1 s = analyze(f);
    auto pstack = w.power_stack(1.0 / p);
    const int d = w.dim();
    ScalarField1 acc(g, 1);
    for (int x = 0; x < g.leaf_count(); ++x) {
        Eigen::MatrixXd wx = pstack->middleRows(x * d, d);
        double total = 0;
        for (Iv q : g.tower(x)) {
            if (q.gen > g.depth() - 1) continue;
            total += (wx * s.coeff.col(Grid1::id_of(q))).squaredNorm() / g.measure(q);
        }
        acc.v(0, x) = total;
    }
    return finish(std::move(acc));
}

ScalarField2 square_fn(const Field2& f) {
    const ProductGrid& g = *f.grid;
    Spectrum2 s = analyze(f);
    ScalarField2 acc(g, 1);
    for (const Rect& r : g.cancellative_rects()) spread2(acc, g, r, s.at(r).norm());
    return finish(std::move(acc));
}

ScalarField2 square_fn_reduced(const Field2& f, const RectReducing& red) {
    const ProductGrid& g = *f.grid;
    Spectrum2 s = analyze(f);
    ScalarField2 acc(g, 1);
    for (const Rect& r : g.cancellative_rects()) spread2(acc, g, r, (red.at(r) * s.at(r)).norm());
    return finish(std::move(acc));
}

ScalarField2 square_fn_pointwise(const Field2& f, const Weight2& w, double p) {
    const ProductGrid& g = *f.grid;
    Spectrum2 s = analyze(f);
    auto pstack = w.power_stack(1.0 / p);
    const int d = w.dim();
    ScalarField2 acc(g, 1);
    for (int c = 0; c < g.leaf_count(); ++c) {
        Eigen::MatrixXd wx = pstack->middleRows(c * d, d);
        double total = 0;
        for (Iv a : g.axis1().tower(g.cell_t1(c))) {
            if (a.gen > g.depth1() - 1) continue;
            for (Iv b : g.axis2().tower(g.cell_t2(c))) {
                if (b.gen > g.depth2() - 1) continue;
                Rect r{a, b};
                total += (wx * s.at(r)).squaredNorm() / g.measure(r);
            }
        }
        acc.v(0, c) = total;
    }
    return finish(std::move(acc));
}

// ---- shifted, one-parameter ---------------------------------------------------

namespace {

// admissible base intervals: coefficients exist at depth +i, indicator children at +j
bool admissible1(const Grid1& g, Iv q, int i, int j) {
    return q.gen + i <= g.depth() - 1 && q.gen + j <= g.depth();
}

// sum_{K in ch_i(I)} |A f_K| with A constant
double child_sum(const Grid1& g, const Spectrum1& s, Iv q, int i, const Eigen::MatrixXd& a) {
    double acc = 0;
    for (const Iv& k : g.children_at_depth(q, i)) acc += (a * s.coeff.col(Grid1::id_of(k))).norm();
    return acc;
}

}  // namespace

ScalarField1 shifted_square_reduced(const Field1& f, const IntervalReducing& red, int i, int j,
                                    bool prefactor_form) {
    const Grid1& g = *f.grid;
    Spectrum1 s = analyze(f);
    ScalarField1 acc(g, 1);
    for (int id = 0; id < g.interval_count(); ++id) {
        Iv q = g.iv_of(id);
        if (!admissible1(g, q, i, j)) continue;
        double inner = child_sum(g, s, q, i, red.at(q));
        if (prefactor_form) {
            spread1(acc, g, q, inner * std::pow(2.0, 0.5 * j));
        } else {
            for (const Iv& l : g.children_at_depth(q, j)) spread1(acc, g, l, inner);
        }
    }
    return finish(std::move(acc));
}

ScalarField1 shifted_square_pointwise(const Field1& f, const Weight1& w, double p, int i, int j,
                                      bool prefactor_form) {
    const Grid1& g = *f.grid;
    Spectrum1 s = analyze(f);
    auto pstack = w.power_stack(1.0 / p);
    const int d = w.dim();
    ScalarField1 acc(g, 1);
    for (int x = 0; x < g.leaf_count(); ++x) {
        Eigen::MatrixXd wx = pstack->middleRows(x * d, d);
        double total = 0;
        for (Iv q : g.tower(x)) {
            if (!admissible1(g, q, i, j)) continue;
            double inner = child_sum(g, s, q, i, wx);
            // 1_L(x)/|L| for the unique L in ch_j(q) containing x equals 2^j/|q|
            double ind = prefactor_form ? std::pow(2.0, double(j)) / g.measure(q)
                                        : 1.0 / g.measure(g.cell_at(q.gen + j, x));
            total += inner * inner * ind;
        }
        acc.v(0, x) = total;
    }
    return finish(std::move(acc));
}

ScalarField1 shifted_square_pointwise_star(const Field1& f, const Weight1& w, double p, int i,
                                           int j) {
    const Grid1& g = *f.grid;
    Spectrum1 s = analyze(f);
    auto pstack = w.power_stack(1.0 / p);
    const int d = w.dim();
    ScalarField1 acc(g, 1);
    for (int x = 0; x < g.leaf_count(); ++x) {
        Eigen::MatrixXd wx = pstack->middleRows(x * d, d);
        double total = 0;
        for (Iv q : g.tower(x)) {
            if (!admissible1(g, q, i, j)) continue;
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(f.dim());
            for (const Iv& k : g.children_at_depth(q, i)) sum += s.coeff.col(Grid1::id_of(k));
            double inner = (wx * sum).norm();
            total += inner * inner * std::pow(2.0, double(j)) / g.measure(q);
        }
        acc.v(0, x) = total;
    }
    return finish(std::move(acc));
}

// ---- shifted, biparameter -------------------------------------------------------

namespace {

bool admissible2(const ProductGrid& g, Rect r, std::array<int, 2> i, std::array<int, 2> j) {
    return r.a.gen + i[0] <= g.depth1() - 1 && r.b.gen + i[1] <= g.depth2() - 1 &&
           r.a.gen + j[0] <= g.depth1() && r.b.gen + j[1] <= g.depth2();
}

double child_sum2(const ProductGrid& g, const Spectrum2& s, Rect r, std::array<int, 2> i,
                  const Eigen::MatrixXd& a) {
    double acc = 0;
    for (const Rect& p : g.children_at_depth(r, i[0], i[1])) acc += (a * s.at(p)).norm();
    return acc;
}

}  // namespace

ScalarField2 shifted_square_reduced(const Field2& f, const RectReducing& red, std::array<int, 2> i,
                                    std::array<int, 2> j, bool prefactor_form) {
    const ProductGrid& g = *f.grid;
    Spectrum2 s = analyze(f);
    ScalarField2 acc(g, 1);
    for (const Rect& r : g.all_rects()) {
        if (!admissible2(g, r, i, j)) continue;
        double inner = child_sum2(g, s, r, i, red.at(r));
        if (inner == 0) continue;
        if (prefactor_form) {
            spread2(acc, g, r, inner * std::pow(2.0, 0.5 * (j[0] + j[1])));
        } else {
            for (const Rect& q : g.children_at_depth(r, j[0], j[1])) spread2(acc, g, q, inner);
        }
    }
    return finish(std::move(acc));
}

ScalarField2 shifted_square_pointwise(const Field2& f, const Weight2& w, double p,
                                      std::array<int, 2> i, std::array<int, 2> j,
                                      bool prefactor_form) {
    const ProductGrid& g = *f.grid;
    Spectrum2 s = analyze(f);
    auto pstack = w.power_stack(1.0 / p);
    const int d = w.dim();
    ScalarField2 acc(g, 1);
    for (int c = 0; c < g.leaf_count(); ++c) {
        Eigen::MatrixXd wx = pstack->middleRows(c * d, d);
        int t1 = g.cell_t1(c), t2 = g.cell_t2(c);
        double total = 0;
        for (Iv a : g.axis1().tower(t1))
            for (Iv b : g.axis2().tower(t2)) {
                Rect r{a, b};
                if (!admissible2(g, r, i, j)) continue;
                double inner = child_sum2(g, s, r, i, wx);
                double ind;
                if (prefactor_form) {
                    ind = std::pow(2.0, double(j[0] + j[1])) / g.measure(r);
                } else {
                    Rect q{g.axis1().cell_at(a.gen + j[0], t1), g.axis2().cell_at(b.gen + j[1], t2)};
                    ind = 1.0 / g.measure(q);
                }
                total += inner * inner * ind;
            }
        acc.v(0, c) = total;
    }
    return finish(std::move(acc));
}

ScalarField2 shifted_square_pointwise_star(const Field2& f, const Weight2& w, double p,
                                           std::array<int, 2> i, std::array<int, 2> j) {
    const ProductGrid& g = *f.grid;
    Spectrum2 s = analyze(f);
    auto pstack = w.power_stack(1.0 / p);
    const int d = w.dim();
    ScalarField2 acc(g, 1);
    for (int c = 0; c < g.leaf_count(); ++c) {
        Eigen::MatrixXd wx = pstack->middleRows(c * d, d);
        double total = 0;
        for (Iv a : g.axis1().tower(g.cell_t1(c)))
            for (Iv b : g.axis2().tower(g.cell_t2(c))) {
                Rect r{a, b};
                if (!admissible2(g, r, i, j)) continue;
                Eigen::VectorXd sum = Eigen::VectorXd::Zero(f.dim());
                for (const Rect& pr : g.children_at_depth(r, i[0], i[1])) sum += s.at(pr);
                double inner = (wx * sum).norm();
                total += inner * inner * std::pow(2.0, double(j[0] + j[1])) / g.measure(r);
            }
        acc.v(0, c) = total;
    }
    return finish(std::move(acc));
}

// ---- mixed operators --------------------------------------------------------------

ScalarField2 mixed_sm_tilde(const Field2& f, const RectReducing& red) {
    const ProductGrid& g = *f.grid;
    const Grid1 &g1 = g.axis1(), &g2 = g.axis2();
    ScalarField2 acc(g, 1);
    for (int i1 = 0; i1 < g1.cancellative_count(); ++i1) {
        Iv iv = g1.iv_of(i1);
        Field1 part = partial_coefficient(f, 1, iv, 0);
        // v(J) = |W_{I x J} (f^1_I)_J|
        Eigen::ArrayXd v(g2.interval_count());
        for (int id = 0; id < g2.interval_count(); ++id) {
            Iv jv = g2.iv_of(id);
            v(id) = (red.at(Rect{iv, jv}) * part.average(jv)).norm();
        }
        for (int t2 = 0; t2 < g2.leaf_count(); ++t2) {
            double sup = 0;
            for (Iv jv : g2.tower(t2)) sup = std::max(sup, v(Grid1::id_of(jv)));
            double term = sup * sup / g1.measure(iv);
            for (int n = 0; n < g1.leaf_span(iv.gen); ++n)
                acc.v(0, g.cell(g1.leaf_at(iv, n), t2)) += term;
        }
    }
    return finish(std::move(acc));
}

ScalarField2 mixed_mtilde_s(const Field2& f, const RectReducing& red) {
    const ProductGrid& g = *f.grid;
    const Grid1 &g1 = g.axis1(), &g2 = g.axis2();
    ScalarField2 acc(g, 1);
    for (int i2 = 0; i2 < g2.cancellative_count(); ++i2) {
        Iv jv = g2.iv_of(i2);
        Field1 part = partial_coefficient(f, 2, jv, 0);
        Eigen::ArrayXd v(g1.interval_count());
        for (int id = 0; id < g1.interval_count(); ++id) {
            Iv iv = g1.iv_of(id);
            v(id) = (red.at(Rect{iv, jv}) * part.average(iv)).norm();
        }
        for (int t1 = 0; t1 < g1.leaf_count(); ++t1) {
            double sup = 0;
            for (Iv iv : g1.tower(t1)) sup = std::max(sup, v(Grid1::id_of(iv)));
            double term = sup * sup / g2.measure(jv);
            for (int n = 0; n < g2.leaf_span(jv.gen); ++n)
                acc.v(0, g.cell(t1, g2.leaf_at(jv, n))) += term;
        }
    }
    return finish(std::move(acc));
}

namespace {

// common core of [S^{i,0} M] and [S M]-style operators: for each base interval
// R1 on `axis`, inner absolute sum over ch_i(R1) of per-slice maximal values.
ScalarField2 mixed_shifted_maximal(const Field2& f, const SlicedReducing& slices, int i) {
    const ProductGrid& g = *f.grid;
    const int axis = slices.axis();
    const Grid1& ga = axis == 1 ? g.axis1() : g.axis2();
    const Grid1& gb = axis == 1 ? g.axis2() : g.axis1();
    ScalarField2 acc(g, 1);
    // partials for every cancellative interval of `axis`
    std::vector<Field1> parts;
    parts.reserve(std::size_t(ga.cancellative_count()));
    for (int ia = 0; ia < ga.cancellative_count(); ++ia)
        parts.push_back(partial_coefficient(f, axis, ga.iv_of(ia), 0));
    // averages over every interval of the other axis
    std::vector<Eigen::MatrixXd> avgs(parts.size());
    for (std::size_t k = 0; k < parts.size(); ++k) {
        avgs[k].resize(f.dim(), gb.interval_count());
        for (int id = 0; id < gb.interval_count(); ++id) avgs[k].col(id) = parts[k].average(gb.iv_of(id));
    }
    for (int ra = 0; ra < ga.interval_count(); ++ra) {
        Iv r1 = ga.iv_of(ra);
        if (r1.gen + i > ga.depth() - 1) continue;
        auto children = ga.children_at_depth(r1, i);
        for (int tb = 0; tb < gb.leaf_count(); ++tb) {
            const Eigen::MatrixXd& wred = slices.at(tb, r1);
            double inner = 0;
            for (const Iv& p1 : children) {
                double sup = 0;
                const Eigen::MatrixXd& av = avgs[std::size_t(Grid1::id_of(p1))];
                for (Iv r2 : gb.tower(tb)) sup = std::max(sup, (wred * av.col(Grid1::id_of(r2))).norm());
                inner += sup;
            }
            double term = inner * inner / ga.measure(r1);
            for (int na = 0; na < ga.leaf_span(r1.gen); ++na) {
                int ta = ga.leaf_at(r1, na);
                acc.v(0, axis == 1 ? g.cell(ta, tb) : g.cell(tb, ta)) += term;
            }
        }
    }
    return finish(std::move(acc));
}

// common core of [S^{j,0} S~] style operators
ScalarField2 mixed_shifted_square(const Field2& f, const SlicedReducing& slices, int j) {
    const ProductGrid& g = *f.grid;
    const int axis = slices.axis();
    const Grid1& ga = axis == 1 ? g.axis1() : g.axis2();
    const Grid1& gb = axis == 1 ? g.axis2() : g.axis1();
    Spectrum2 s = analyze(f);
    ScalarField2 acc(g, 1);
    for (int ra = 0; ra < ga.interval_count(); ++ra) {
        Iv r1 = ga.iv_of(ra);
        if (r1.gen + j > ga.depth() - 1) continue;
        auto children = ga.children_at_depth(r1, j);
        for (int tb = 0; tb < gb.leaf_count(); ++tb) {
            const Eigen::MatrixXd& wred = slices.at(tb, r1);
            double inner = 0;
            for (const Iv& p1 : children) {
                double sq = 0;
                for (Iv r2 : gb.tower(tb)) {
                    if (r2.gen > gb.depth() - 1) continue;
                    Rect pr = axis == 1 ? Rect{p1, r2} : Rect{r2, p1};
                    sq += (wred * s.at(pr)).squaredNorm() / gb.measure(r2);
                }
                inner += std::sqrt(sq);
            }
            double term = inner * inner / ga.measure(r1);
            for (int na = 0; na < ga.leaf_span(r1.gen); ++na) {
                int ta = ga.leaf_at(r1, na);
                acc.v(0, axis == 1 ? g.cell(ta, tb) : g.cell(tb, ta)) += term;
            }
        }
    }
    return finish(std::move(acc));
}

}  // namespace

ScalarField2 mixed_si0_m(const Field2& f, const SlicedReducing& slices, int i) {
    if (slices.axis() != 1) throw std::invalid_argument("[S^{i,0}M] needs axis-1 slices");
    return mixed_shifted_maximal(f, slices, i);
}

ScalarField2 mixed_m_si0(const Field2& f, const SlicedReducing& slices, int i) {
    if (slices.axis() != 2) throw std::invalid_argument("[MS^{i,0}] needs axis-2 slices");
    return mixed_shifted_maximal(f, slices, i);
}

ScalarField2 mixed_sj0_stilde(const Field2& f, const SlicedReducing& slices, int j) {
    if (slices.axis() != 1) throw std::invalid_argument("[S^{j,0}S~] needs axis-1 slices");
    return mixed_shifted_square(f, slices, j);
}

ScalarField2 mixed_stilde_sj0(const Field2& f, const SlicedReducing& slices, int j) {
    if (slices.axis() != 2) throw std::invalid_argument("[S~S^{j,0}] needs axis-2 slices");
    return mixed_shifted_square(f, slices, j);
}

ScalarField2 mixed_sm(const Field2& f, const SlicedReducing& slices) {
    if (slices.axis() != 1) throw std::invalid_argument("[SM] needs axis-1 slices");
    return mixed_shifted_maximal(f, slices, 0);
}

ScalarField2 mixed_stilde_mtilde(const Field2& f, const SlicedReducing& slices) {
    // [S~M~] f = (sum_I (sup_J |W_{x1,J} (f^1_I)_J| 1_J(x2))^2 1_I(x1)/|I|)^{1/2}
    if (slices.axis() != 2) throw std::invalid_argument("[S~M~] needs axis-2 slices");
    const ProductGrid& g = *f.grid;
    const Grid1 &g1 = g.axis1(), &g2 = g.axis2();
    ScalarField2 acc(g, 1);
    for (int i1 = 0; i1 < g1.cancellative_count(); ++i1) {
        Iv iv = g1.iv_of(i1);
        Field1 part = partial_coefficient(f, 1, iv, 0);
        Eigen::MatrixXd avgs(f.dim(), g2.interval_count());
        for (int id = 0; id < g2.interval_count(); ++id) avgs.col(id) = part.average(g2.iv_of(id));
        for (int t1 = 0; t1 < g1.leaf_count(); ++t1) {
            if (!g1.contains(iv, t1)) continue;
            for (int t2 = 0; t2 < g2.leaf_count(); ++t2) {
                double sup = 0;
                for (Iv jv : g2.tower(t2))
                    sup = std::max(sup, (slices.at(t1, jv) * avgs.col(Grid1::id_of(jv))).norm());
                acc.v(0, g.cell(t1, t2)) += sup * sup / g1.measure(iv);
            }
        }
    }
    return finish(std::move(acc));
}

}  // namespace dyad
