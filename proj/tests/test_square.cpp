#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyadlab/corpus.hpp"
#include "dyadlab/square.hpp"

using namespace dyad;

TEST_CASE("unweighted square function facts") {
    ProductGrid g(random_grid(1, 3, 2));
    Rng rng(2);
    Field2 f = make_field(g, 2, rng);

    // Parseval: ||Sf||_2 = ||f||_2 on the bicancellative span
    CHECK(square_fn(f).norm_l2() == doctest::Approx(f.norm_l2()).epsilon(1e-12));

    // identity weight collapses the weighted variants
    Weight2 id(g, 2);
    RectReducing red(id, 2.0);
    CHECK((square_fn_reduced(f, red).v - square_fn(f).v).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((square_fn_pointwise(f, id, 3.0).v - square_fn(f).v).cwiseAbs().maxCoeff() < 1e-12);

    // a single Haar function: Sf = 1_{R0} / sqrt(|R0|)
    Rect r0{Iv{1, 0}, Iv{1, 1}};
    Field2 h(g, 1);
    for (int c = 0; c < g.leaf_count(); ++c) h.v(0, c) = haar_value(g, r0, 0, 0, c);
    ScalarField2 s = square_fn(h);
    for (int c = 0; c < g.leaf_count(); ++c)
        CHECK(s.v(0, c) == doctest::Approx(g.contains(r0, c) ? 1.0 / std::sqrt(g.measure(r0)) : 0.0));
}

TEST_CASE("p=2 norm identity on random weights") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        ProductGrid g(random_grid(seed, 3, 2));
        CorpusSpec spec;
        spec.L = 3;
        spec.d = 2;
        spec.p = 2.0;
        spec.amplitude = 0.8;
        Weight2 w = make_weight_values(g, spec, seed + 5);
        Rng rng(seed + 7);
        Field2 f = make_field(g, 2, rng);
        RectReducing red(w, 2.0);
        double a = square_fn_reduced(f, red).norm_l2();
        double b = square_fn_pointwise(f, w, 2.0).norm_l2();
        CHECK(std::abs(a - b) <= 1e-10 * std::max(a, b));
    }
}

TEST_CASE("shifted square functions") {
    ProductGrid g(random_grid(3, 4, 2));
    CorpusSpec spec;
    spec.L = 4;
    spec.d = 2;
    spec.p = 2.0;
    spec.amplitude = 0.6;
    Weight2 w = make_weight_values(g, spec, 9);
    Rng rng(11);
    Field2 f = make_field(g, 2, rng);
    RectReducing red(w, 2.0);

    // complexity zero collapses to the unshifted operators
    CHECK((shifted_square_reduced(f, red, {0, 0}, {0, 0}).v - square_fn_reduced(f, red).v)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK((shifted_square_pointwise(f, w, 2.0, {0, 0}, {0, 0}).v - square_fn_pointwise(f, w, 2.0).v)
              .cwiseAbs()
              .maxCoeff() < 1e-12);

    // the two displays agree, and the starred variant is dominated pointwise
    for (std::array<int, 2> ci : {std::array<int, 2>{1, 1}, std::array<int, 2>{2, 0}})
        for (std::array<int, 2> cj : {std::array<int, 2>{0, 1}, std::array<int, 2>{2, 2}}) {
            ScalarField2 a = shifted_square_pointwise(f, w, 2.0, ci, cj, false);
            ScalarField2 b = shifted_square_pointwise(f, w, 2.0, ci, cj, true);
            CHECK((a.v - b.v).cwiseAbs().maxCoeff() < 1e-12);
            ScalarField2 c = shifted_square_reduced(f, red, ci, cj, false);
            ScalarField2 d = shifted_square_reduced(f, red, ci, cj, true);
            CHECK((c.v - d.v).cwiseAbs().maxCoeff() < 1e-12);
            ScalarField2 star = shifted_square_pointwise_star(f, w, 2.0, ci, cj);
            for (int cell = 0; cell < g.leaf_count(); ++cell)
                CHECK(star.v(0, cell) <= b.v(0, cell) * (1 + 1e-12));
        }

    // one-parameter versions
    Grid1 g1(AxisSpec::standard(4));
    Rng r1(13);
    Weight1 w1 = make_weight1(g1, 2, 0.7, r1);
    Field1 f1 = make_field1(g1, 2, r1);
    IntervalReducing red1(w1, 2.0);
    for (int i : {0, 1, 2})
        for (int j : {0, 1, 2}) {
            ScalarField1 a = shifted_square_pointwise(f1, w1, 2.0, i, j, false);
            ScalarField1 b = shifted_square_pointwise(f1, w1, 2.0, i, j, true);
            CHECK((a.v - b.v).cwiseAbs().maxCoeff() < 1e-12);
            ScalarField1 c = shifted_square_reduced(f1, red1, i, j, false);
            ScalarField1 d = shifted_square_reduced(f1, red1, i, j, true);
            CHECK((c.v - d.v).cwiseAbs().maxCoeff() < 1e-12);
            ScalarField1 star = shifted_square_pointwise_star(f1, w1, 2.0, i, j);
            for (int t = 0; t < g1.leaf_count(); ++t)
                CHECK(star.v(0, t) <= a.v(0, t) * (1 + 1e-12));
        }
}

TEST_CASE("homogeneity and coefficient monotonicity") {
    ProductGrid g(random_grid(5, 3, 2));
    CorpusSpec spec;
    spec.L = 3;
    spec.d = 2;
    spec.p = 1.5;
    spec.amplitude = 0.7;
    Weight2 w = make_weight_values(g, spec, 15);
    Rng rng(17);
    Field2 f = make_field(g, 2, rng);

    Field2 f3 = f;
    f3.v *= 3.0;
    CHECK((square_fn_pointwise(f3, w, 1.5).v - 3.0 * square_fn_pointwise(f, w, 1.5).v)
              .cwiseAbs()
              .maxCoeff() < 1e-11);

    // zeroing one coefficient never increases the absolute-sum square functions
    Spectrum2 s = analyze(f);
    Spectrum2 cut = s;
    cut.set(Rect{Iv{1, 1}, Iv{1, 0}}, Eigen::VectorXd::Zero(2));
    Field2 fcut = synthesize(cut);
    RectReducing red(w, 1.5);
    auto le = [&](const ScalarField2& a, const ScalarField2& b) {
        for (int c = 0; c < g.leaf_count(); ++c)
            if (a.v(0, c) > b.v(0, c) * (1 + 1e-12)) return false;
        return true;
    };
    CHECK(le(square_fn(fcut), square_fn(f)));
    CHECK(le(square_fn_pointwise(fcut, w, 1.5), square_fn_pointwise(f, w, 1.5)));
    CHECK(le(square_fn_reduced(fcut, red), square_fn_reduced(f, red)));
    CHECK(le(shifted_square_pointwise(fcut, w, 1.5, {1, 1}, {1, 0}),
             shifted_square_pointwise(f, w, 1.5, {1, 1}, {1, 0})));
}

TEST_CASE("mixed operators collapse as expected") {
    // f(x1,x2) = u(x1), W constant in x2: [S Mtilde] f = S_{D1,W} u
    ProductGrid g(GridSpec{2, AxisSpec::standard(2), AxisSpec::standard(2)});
    Rng rng(19);
    std::vector<Eigen::MatrixXd> umat;
    for (int t = 0; t < g.n1(); ++t) umat.push_back(random_spd(2, 0.5, rng));
    Weight2 w(g, 2);
    for (int c = 0; c < g.leaf_count(); ++c) w.set(c, umat[std::size_t(g.cell_t1(c))]);
    Field1 u = make_field1(g.axis1(), 2, rng);
    Field2 f(g, 2);
    for (int c = 0; c < g.leaf_count(); ++c) f.v.col(c) = u.v.col(g.cell_t1(c));

    RectReducing red(w, 2.0);
    ScalarField2 sm = mixed_sm_tilde(f, red);
    Weight1 w1(g.axis1(), 2);
    for (int t = 0; t < g.n1(); ++t) w1.set(t, umat[std::size_t(t)]);
    IntervalReducing red1(w1, 2.0);
    ScalarField1 s1 = square_fn_reduced(u, red1);
    for (int c = 0; c < g.leaf_count(); ++c)
        CHECK(sm.v(0, c) == doctest::Approx(s1.v(0, g.cell_t1(c))).epsilon(1e-10));

    // [S^{0,0} M] coincides with [S M]
    SlicedReducing slices(w, 1, 2.0);
    ScalarField2 a = mixed_si0_m(f, slices, 0);
    ScalarField2 b = mixed_sm(f, slices);
    CHECK((a.v - b.v).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mixed operators: identity weight sanity and axis symmetry") {
    ProductGrid g(random_grid(7, 3, 2));
    Weight2 id(g, 2);
    Rng rng(23);
    Field2 f = make_field(g, 2, rng);
    RectReducing red(id, 2.0);
    SlicedReducing sl1(id, 1, 2.0), sl2(id, 2, 2.0);

    ScalarField2 a = mixed_sm_tilde(f, red);
    ScalarField2 b = mixed_mtilde_s(f, red);
    CHECK(a.v.minCoeff() >= 0);
    CHECK(b.v.minCoeff() >= 0);
    // joint-reduce and slice-then-reduce agree for the identity weight
    CHECK((mixed_sm(f, sl1).v - a.v).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((mixed_stilde_mtilde(f, sl2).v - a.v).cwiseAbs().maxCoeff() < 1e-10);

    for (int j : {0, 1}) {
        ScalarField2 c = mixed_sj0_stilde(f, sl1, j);
        ScalarField2 d = mixed_stilde_sj0(f, sl2, j);
        CHECK(c.v.minCoeff() >= 0);
        CHECK(d.v.minCoeff() >= 0);
    }
}
