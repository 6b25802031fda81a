#include "dyadlab/haar.hpp"

#include <json.hpp>

namespace dyad {

namespace {

// Forward transform along the columns of a d x n leaf block for one axis.
// Output: d x (nc+1); columns 0..nc-1 are cancellative coefficients by
// interval id, the last column is the mean (f, 1).
Eigen::MatrixXd haar1d_forward(const Grid1& g, const Eigen::MatrixXd& leaves) {
    const int L = g.depth();
    const int d = int(leaves.rows());
    const double leafm = 1.0 / double(g.leaf_count());
    // integrals over cells, finest to coarsest
    std::vector<Eigen::MatrixXd> sums(std::size_t(L) + 1);
    sums[std::size_t(L)] = leaves * leafm;
    for (int k = L - 1; k >= 0; --k) {
        Eigen::MatrixXd s(d, 1 << k);
        for (int m = 0; m < (1 << k); ++m) {
            auto h = g.halves(Iv{k, m});
            s.col(m) = sums[std::size_t(k) + 1].col(h[0].pos) + sums[std::size_t(k) + 1].col(h[1].pos);
        }
        sums[std::size_t(k)] = std::move(s);
    }
    Eigen::MatrixXd out(d, g.cancellative_count() + 1);
    for (int k = 0; k < L; ++k) {
        double scale = std::pow(2.0, 0.5 * k);  // 1/sqrt(|I|)
        for (int m = 0; m < (1 << k); ++m) {
            auto h = g.halves(Iv{k, m});
            out.col(Grid1::id_of(Iv{k, m})) =
                (sums[std::size_t(k) + 1].col(h[1].pos) - sums[std::size_t(k) + 1].col(h[0].pos)) * scale;
        }
    }
    out.col(g.cancellative_count()) = sums[0].col(0);
    return out;
}

Eigen::MatrixXd haar1d_inverse(const Grid1& g, const Eigen::MatrixXd& coeffs) {
    const int L = g.depth();
    const int d = int(coeffs.rows());
    Eigen::MatrixXd leaves = coeffs.col(g.cancellative_count()).replicate(1, g.leaf_count());
    for (int k = 0; k < L; ++k) {
        double scale = std::pow(2.0, 0.5 * k);
        for (int m = 0; m < (1 << k); ++m) {
            Iv q{k, m};
            Eigen::VectorXd c = coeffs.col(Grid1::id_of(q)) * scale;
            int half = g.leaf_span(k) / 2;
            for (int n = 0; n < g.leaf_span(k); ++n) {
                int t = g.leaf_at(q, n);
                leaves.col(t) += (n < half ? -c : c);
            }
        }
    }
    return leaves;
}

}  // namespace

double haar_value(const Grid1& g, Iv q, int eps, int leaf) {
    if (!g.contains(q, leaf)) return 0.0;
    double scale = std::pow(2.0, 0.5 * q.gen);
    if (eps == 1) return scale;
    int off = int((std::uint32_t(leaf) - std::uint32_t(g.start_leaf(q))) & std::uint32_t(g.leaf_count() - 1));
    return off < g.leaf_span(q.gen) / 2 ? -scale : scale;
}

double haar_value(const ProductGrid& g, Rect r, int eps1, int eps2, int cell) {
    return haar_value(g.axis1(), r.a, eps1, g.cell_t1(cell)) *
           haar_value(g.axis2(), r.b, eps2, g.cell_t2(cell));
}

Spectrum1 analyze(const Field1& f) {
    Spectrum1 s;
    s.grid = f.grid;
    Eigen::MatrixXd out = haar1d_forward(*f.grid, f.v);
    s.coeff = out.leftCols(f.grid->cancellative_count());
    s.mean = out.col(f.grid->cancellative_count());
    return s;
}

Field1 synthesize(const Spectrum1& s) {
    Field1 f(*s.grid, s.dim());
    Eigen::MatrixXd coeffs(s.dim(), s.grid->cancellative_count() + 1);
    coeffs.leftCols(s.grid->cancellative_count()) = s.coeff;
    coeffs.col(s.grid->cancellative_count()) = s.mean;
    f.v = haar1d_inverse(*s.grid, coeffs);
    return f;
}

Spectrum2 analyze(const Field2& f) {
    const ProductGrid& g = *f.grid;
    const Grid1 &g1 = g.axis1(), &g2 = g.axis2();
    const int d = f.dim(), n1 = g.n1(), n2 = g.n2();
    const int m1 = g1.cancellative_count() + 1;  // axis-1 coefficients incl. mean

    // axis-1 transform of every row t2: mid holds (f(.,t2), h_I^{eps1}) per (i1, t2)
    Eigen::MatrixXd mid(d, m1 * n2);
    for (int t2 = 0; t2 < n2; ++t2) {
        Eigen::MatrixXd c = haar1d_forward(g1, f.v.middleCols(t2 * n1, n1));
        for (int i1 = 0; i1 < m1; ++i1) mid.col(i1 * n2 + t2) = c.col(i1);
    }
    // axis-2 transform per axis-1 index
    Spectrum2 s;
    s.grid = &g;
    const int nc1 = g1.cancellative_count(), nc2 = g2.cancellative_count();
    s.c00.resize(d, nc1 * nc2);
    s.c01.resize(d, nc1);
    s.c10.resize(d, nc2);
    for (int i1 = 0; i1 < m1; ++i1) {
        Eigen::MatrixXd c = haar1d_forward(g2, mid.middleCols(i1 * n2, n2));
        if (i1 < nc1) {
            for (int i2 = 0; i2 < nc2; ++i2) s.c00.col(i1 * nc2 + i2) = c.col(i2);
            s.c01.col(i1) = c.col(nc2);
        } else {
            for (int i2 = 0; i2 < nc2; ++i2) s.c10.col(i2) = c.col(i2);
            s.c11 = c.col(nc2);
        }
    }
    return s;
}

Field2 synthesize(const Spectrum2& s) {
    const ProductGrid& g = *s.grid;
    const Grid1 &g1 = g.axis1(), &g2 = g.axis2();
    const int d = s.dim(), n1 = g.n1(), n2 = g.n2();
    const int nc1 = s.nc1(), nc2 = s.nc2(), m1 = nc1 + 1;

    Eigen::MatrixXd mid(d, m1 * n2);
    for (int i1 = 0; i1 < m1; ++i1) {
        Eigen::MatrixXd c(d, nc2 + 1);
        if (i1 < nc1) {
            for (int i2 = 0; i2 < nc2; ++i2) c.col(i2) = s.c00.col(i1 * nc2 + i2);
            c.col(nc2) = s.c01.col(i1);
        } else {
            for (int i2 = 0; i2 < nc2; ++i2) c.col(i2) = s.c10.col(i2);
            c.col(nc2) = s.c11;
        }
        Eigen::MatrixXd rows = haar1d_inverse(g2, c);
        for (int t2 = 0; t2 < n2; ++t2) mid.col(i1 * n2 + t2) = rows.col(t2);
    }
    Field2 f(g, d);
    for (int t2 = 0; t2 < n2; ++t2) {
        Eigen::MatrixXd c(d, m1);
        for (int i1 = 0; i1 < m1; ++i1) c.col(i1) = mid.col(i1 * n2 + t2);
        f.v.middleCols(t2 * n1, n1) = haar1d_inverse(g1, c);
    }
    return f;
}

Field2 bicancellative(const Field2& f) {
    Spectrum2 s = analyze(f);
    s.clear_residue();
    return synthesize(s);
}

Field1 partial_coefficient(const Field2& f, int axis, Iv q, int eps) {
    if (axis != 1 && axis != 2) throw std::invalid_argument("axis must be 1 or 2");
    const ProductGrid& g = *f.grid;
    const Grid1& ga = axis == 1 ? g.axis1() : g.axis2();
    const Grid1& gb = axis == 1 ? g.axis2() : g.axis1();
    Field1 out(gb, f.dim());
    for (int tb = 0; tb < gb.leaf_count(); ++tb) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.dim());
        for (int n = 0; n < ga.leaf_span(q.gen); ++n) {
            int ta = ga.leaf_at(q, n);
            int c = axis == 1 ? g.cell(ta, tb) : g.cell(tb, ta);
            acc += f.v.col(c) * haar_value(ga, q, eps, ta);
        }
        out.v.col(tb) = acc / double(ga.leaf_count());
    }
    return out;
}

Field2 project(const Field2& f, Rect r, int eps1, int eps2) {
    const ProductGrid& g = *f.grid;
    Eigen::VectorXd coeff = Eigen::VectorXd::Zero(f.dim());
    for (int c : g.cells_of(r)) coeff += f.v.col(c) * haar_value(g, r, eps1, eps2, c);
    coeff *= g.leaf_measure();
    Field2 out(g, f.dim());
    for (int c : g.cells_of(r)) out.v.col(c) = coeff * haar_value(g, r, eps1, eps2, c);
    return out;
}

std::string spectrum_to_json(const Spectrum2& s) {
    const ProductGrid& g = *s.grid;
    nlohmann::json j;
    j["dim"] = s.dim();
    nlohmann::json coeffs = nlohmann::json::array();
    auto push = [&](std::array<int, 4> r, std::array<int, 2> e, const Eigen::VectorXd& v) {
        if (v.norm() == 0) return;
        std::vector<double> vals(v.data(), v.data() + v.size());
        coeffs.push_back({{"r", r}, {"e", e}, {"v", vals}});
    };
    for (const Rect& r : g.cancellative_rects())
        push({r.a.gen, r.a.pos, r.b.gen, r.b.pos}, {0, 0}, s.at(r));
    for (int i1 = 0; i1 < s.nc1(); ++i1) {
        Iv q = g.axis1().iv_of(i1);
        push({q.gen, q.pos, 0, 0}, {0, 1}, s.c01.col(i1));
    }
    for (int i2 = 0; i2 < s.nc2(); ++i2) {
        Iv q = g.axis2().iv_of(i2);
        push({0, 0, q.gen, q.pos}, {1, 0}, s.c10.col(i2));
    }
    push({0, 0, 0, 0}, {1, 1}, s.c11);
    j["coefficients"] = coeffs;
    return j.dump();
}

Spectrum2 spectrum_from_json(const std::string& text, const ProductGrid& g) {
    nlohmann::json j = nlohmann::json::parse(text);
    const int d = j.at("dim").get<int>();
    Spectrum2 s;
    s.grid = &g;
    s.c00 = Eigen::MatrixXd::Zero(d, g.axis1().cancellative_count() * g.axis2().cancellative_count());
    s.c01 = Eigen::MatrixXd::Zero(d, g.axis1().cancellative_count());
    s.c10 = Eigen::MatrixXd::Zero(d, g.axis2().cancellative_count());
    s.c11 = Eigen::VectorXd::Zero(d);
    for (const auto& entry : j.at("coefficients")) {
        auto r = entry.at("r").get<std::array<int, 4>>();
        auto e = entry.at("e").get<std::array<int, 2>>();
        auto vals = entry.at("v").get<std::vector<double>>();
        Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(vals.data(), long(vals.size()));
        if (e[0] == 0 && e[1] == 0)
            s.set(Rect{Iv{r[0], r[1]}, Iv{r[2], r[3]}}, v);
        else if (e[0] == 0 && e[1] == 1)
            s.c01.col(Grid1::id_of(Iv{r[0], r[1]})) = v;
        else if (e[0] == 1 && e[1] == 0)
            s.c10.col(Grid1::id_of(Iv{r[2], r[3]})) = v;
        else
            s.c11 = v;
    }
    return s;
}

}  // namespace dyad
