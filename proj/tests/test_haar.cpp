#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyadlab/corpus.hpp"
#include "dyadlab/haar.hpp"

using namespace dyad;

namespace {

Field2 haar_field(const ProductGrid& g, Rect r, int e1 = 0, int e2 = 0) {
    Field2 f(g, 1);
    for (int c = 0; c < g.leaf_count(); ++c) f.v(0, c) = haar_value(g, r, e1, e2, c);
    return f;
}

}  // namespace

TEST_CASE("sign convention: h on [0,1) is -1 then +1") {
    Grid1 g(AxisSpec::standard(1));
    CHECK(haar_value(g, Iv{0, 0}, 0, 0) == -1.0);
    CHECK(haar_value(g, Iv{0, 0}, 0, 1) == 1.0);
    CHECK(haar_value(g, Iv{0, 0}, 1, 0) == 1.0);  // non-cancellative top = 1
}

TEST_CASE("orthonormality of the bicancellative system") {
    ProductGrid g(random_grid(4, 3, 2));
    auto rects = g.cancellative_rects();
    for (std::size_t a = 0; a < rects.size(); a += 7)
        for (std::size_t b = a; b < rects.size(); b += 5) {
            double ip = pairing(haar_field(g, rects[a]), haar_field(g, rects[b]));
            CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-12);
        }
}

TEST_CASE("constant field: zero cancellative coefficients, mean residue") {
    ProductGrid g(random_grid(1, 3, 2));
    Field2 f(g, 2);
    Eigen::Vector2d c(0.75, -2.0);
    for (int cell = 0; cell < g.leaf_count(); ++cell) f.v.col(cell) = c;
    Spectrum2 s = analyze(f);
    CHECK(s.c00.cwiseAbs().maxCoeff() < 1e-13);
    CHECK(s.c01.cwiseAbs().maxCoeff() < 1e-13);
    CHECK(s.c10.cwiseAbs().maxCoeff() < 1e-13);
    CHECK((s.c11 - c).norm() < 1e-13);
}

TEST_CASE("single Haar function has a single unit coefficient") {
    ProductGrid g(random_grid(6, 3, 2));
    Rect r0{Iv{1, 1}, Iv{2, 2}};
    Spectrum2 s = analyze(haar_field(g, r0));
    CHECK(std::abs(s.at(r0)(0) - 1.0) < 1e-12);
    s.set(r0, Eigen::VectorXd::Zero(1));
    CHECK(s.energy() < 1e-24);
}

TEST_CASE("round trip and Parseval on random fields") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        ProductGrid g(random_grid(seed, 4, 2));
        Rng rng(seed);
        Field2 f = make_field(g, 2, rng, /*bicancellative=*/false);
        Field2 back = synthesize(analyze(f));
        CHECK((back.v - f.v).cwiseAbs().maxCoeff() < 1e-12);
        double energy = analyze(f).energy();
        CHECK(std::abs(energy - f.norm_l2() * f.norm_l2()) < 1e-12);
    }
}

TEST_CASE("analyze-synthesize is the identity on spectra; synthesize is linear") {
    ProductGrid g(random_grid(2, 3, 2));
    Rng rng(3);
    Spectrum2 s1 = analyze(make_field(g, 1, rng, false));
    Spectrum2 s2 = analyze(make_field(g, 1, rng, false));
    Spectrum2 round = analyze(synthesize(s1));
    CHECK((round.c00 - s1.c00).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((round.c11 - s1.c11).cwiseAbs().maxCoeff() < 1e-12);

    Spectrum2 sum = s1;
    sum.c00 += s2.c00;
    sum.c01 += s2.c01;
    sum.c10 += s2.c10;
    sum.c11 += s2.c11;
    Field2 lhs = synthesize(sum);
    Field2 rhs = synthesize(s1);
    rhs += synthesize(s2);
    CHECK((lhs.v - rhs.v).cwiseAbs().maxCoeff() < 1e-12);

    Spectrum2 zero = s1;
    zero.c00.setZero();
    zero.clear_residue();
    CHECK(synthesize(zero).v.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("partial coefficients: tensor factorization and composition") {
    ProductGrid g(random_grid(8, 3, 2));
    const Grid1 &g1 = g.axis1(), &g2 = g.axis2();
    Rng rng(5);
    // tensor f = u(x1) v(x2)
    Eigen::ArrayXd u(g1.leaf_count()), v(g2.leaf_count());
    for (int t = 0; t < g1.leaf_count(); ++t) u(t) = rng.normal();
    for (int t = 0; t < g2.leaf_count(); ++t) v(t) = rng.normal();
    Field2 f(g, 1);
    for (int c = 0; c < g.leaf_count(); ++c) f.v(0, c) = u(g.cell_t1(c)) * v(g.cell_t2(c));

    Iv i{1, 0};
    Field1 part = partial_coefficient(f, 1, i, 0);
    double ucoef = 0;
    for (int t = 0; t < g1.leaf_count(); ++t)
        ucoef += u(t) * haar_value(g1, i, 0, t) / g1.leaf_count();
    for (int t = 0; t < g2.leaf_count(); ++t)
        CHECK(std::abs(part.v(0, t) - ucoef * v(t)) < 1e-12);

    // (f^1_I, h_J) = f_{IxJ}
    Spectrum1 ps = analyze(part);
    Spectrum2 s = analyze(f);
    for (int id = 0; id < g2.cancellative_count(); ++id) {
        Iv j = g2.iv_of(id);
        CHECK(std::abs(ps.coeff(0, id) - s.at(Rect{i, j})(0)) < 1e-12);
    }

    // constant field has vanishing cancellative partial coefficients
    Field2 cst(g, 1);
    cst.v.setOnes();
    CHECK(partial_coefficient(cst, 2, Iv{1, 1}, 0).v.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("projections: idempotent, orthogonal, and factoring through the axes") {
    ProductGrid g(random_grid(9, 3, 2));
    Rng rng(7);
    Field2 f = make_field(g, 2, rng, false);
    Rect r{Iv{1, 1}, Iv{1, 0}};
    Rect r2{Iv{2, 0}, Iv{1, 0}};

    for (int e1 : {0, 1})
        for (int e2 : {0, 1}) {
            Field2 once = project(f, r, e1, e2);
            Field2 twice = project(once, r, e1, e2);
            CHECK((once.v - twice.v).cwiseAbs().maxCoeff() < 1e-12);

            // factorization Q_R = Q_I^{e1,1} Q_J^{e2,2}, built by hand
            Field1 partial2 = partial_coefficient(f, 2, r.b, e2);
            Field2 qj(g, f.dim());
            for (int c = 0; c < g.leaf_count(); ++c)
                qj.v.col(c) = partial2.v.col(g.cell_t1(c)) *
                              haar_value(g.axis2(), r.b, e2, g.cell_t2(c));
            Field1 partial1 = partial_coefficient(qj, 1, r.a, e1);
            Field2 qiqj(g, f.dim());
            for (int c = 0; c < g.leaf_count(); ++c)
                qiqj.v.col(c) = partial1.v.col(g.cell_t2(c)) *
                                haar_value(g.axis1(), r.a, e1, g.cell_t1(c));
            CHECK((once.v - qiqj.v).cwiseAbs().maxCoeff() < 1e-12);
        }

    Field2 p1 = project(project(f, r, 0, 0), r2, 0, 0);
    CHECK(p1.v.cwiseAbs().maxCoeff() < 1e-13);  // distinct rectangles annihilate
}

TEST_CASE("bicancellative strips the residue only") {
    ProductGrid g(random_grid(12, 3, 2));
    Rng rng(11);
    Field2 f = make_field(g, 2, rng, false);
    Spectrum2 s = analyze(bicancellative(f));
    CHECK(s.c01.cwiseAbs().maxCoeff() < 1e-13);
    CHECK(s.c10.cwiseAbs().maxCoeff() < 1e-13);
    CHECK(s.c11.cwiseAbs().maxCoeff() < 1e-13);
    CHECK((s.c00 - analyze(f).c00).cwiseAbs().maxCoeff() < 1e-12);
}
