#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyadlab/corpus.hpp"
#include "dyadlab/oracle.hpp"
#include "dyadlab/sparse.hpp"
#include "dyadlab/square.hpp"

using namespace dyad;

namespace {

SparseFamily family_of(const ProductGrid& g, const std::vector<Rect>& rects, Frac delta) {
    SparseFamily fam;
    fam.grid = &g;
    fam.delta = delta;
    CellSet covered(g.leaf_count());
    for (const Rect& r : rects) {
        CellSet rc = rect_cells(g, r);
        fam.rects.push_back(r);
        fam.witnesses.push_back(rc.minus(covered));
        covered.unite(rc);
    }
    return fam;
}

}  // namespace

TEST_CASE("weak sparseness check") {
    ProductGrid g(random_grid(1, 3, 2));
    // one rectangle with a full witness passes at delta = 1
    SparseFamily fam = family_of(g, {Rect{Iv{1, 0}, Iv{1, 1}}}, Frac{1, 1});
    CHECK(check_weakly_sparse(fam).ok);

    // two disjoint rectangles with full witnesses at delta = 1/2
    fam = family_of(g, {Rect{Iv{1, 0}, Iv{0, 0}}, Rect{Iv{1, 1}, Iv{0, 0}}}, Frac{1, 2});
    CHECK(check_weakly_sparse(fam).ok);

    // nested rectangles sharing a witness cell: disjointness fails with a report
    Rect outer{Iv{0, 0}, Iv{0, 0}}, inner{Iv{1, 0}, Iv{1, 0}};
    SparseFamily bad;
    bad.grid = &g;
    bad.delta = Frac{1, 1000};
    CellSet cell(g.leaf_count());
    cell.add(g.cells_of(inner).front());
    bad.rects = {outer, inner};
    bad.witnesses = {cell, cell};
    auto rep = check_weakly_sparse(bad);
    CHECK_FALSE(rep.ok);
    CHECK(rep.violation.find("overlap") != std::string::npos);

    // witness not contained in its rectangle throws
    SparseFamily wrong;
    wrong.grid = &g;
    wrong.delta = Frac{1, 4};
    CellSet outside(g.leaf_count());
    outside.add(g.cells_of(Rect{Iv{1, 1}, Iv{1, 1}}).front());
    wrong.rects = {inner};
    wrong.witnesses = {outside};
    CHECK_THROWS(check_weakly_sparse(wrong));
}

TEST_CASE("carleson brute force") {
    ProductGrid g(random_grid(2, 3, 2));
    // disjoint family packs with constant 1
    SparseFamily fam = family_of(g, {Rect{Iv{1, 0}, Iv{0, 0}}, Rect{Iv{1, 1}, Iv{0, 0}}}, Frac{1, 1});
    auto rep = brute_force_carleson_check(fam, Frac{1, 1});
    CHECK(rep.ok);
    CHECK(rep.worst_ratio == doctest::Approx(1.0));

    // k copies of one rectangle: packing ratio exactly k
    const int k = 5;
    SparseFamily dup;
    dup.grid = &g;
    dup.delta = Frac{1, k};
    Rect r{Iv{1, 1}, Iv{1, 0}};
    for (int i = 0; i < k; ++i) {
        dup.rects.push_back(r);
        dup.witnesses.push_back(CellSet(g.leaf_count()));
    }
    rep = brute_force_carleson_check(dup, Frac{1, k});
    CHECK(rep.worst_ratio == doctest::Approx(double(k)));
    CHECK(rep.ok);
    CHECK_FALSE(brute_force_carleson_check(dup, Frac{1, k - 1}).ok);
}

TEST_CASE("weakly sparse implies Carleson on random small families") {
    Rng rng(3);
    int tested = 0;
    for (std::uint64_t seed = 0; tested < 100; ++seed) {
        ProductGrid g(random_grid(seed, 3, 2));
        auto all = g.all_rects();
        std::vector<Rect> picks;
        int n = 2 + rng.uniform_int(9);
        for (int i = 0; i < n; ++i) picks.push_back(all[std::size_t(rng.uniform_int(int(all.size())))]);
        SparseFamily fam = family_of(g, picks, Frac{1, 4});
        if (!check_weakly_sparse(fam).ok) continue;
        CHECK(brute_force_carleson_check(fam, fam.delta).ok);
        ++tested;
    }
}

TEST_CASE("dyadic sparseness of interval families") {
    Grid1 g(AxisSpec::standard(3));
    IntervalFamily fam{&g, {Iv{0, 0}, Iv{2, 0}, Iv{2, 3}}, Frac{1, 2}};
    CHECK(check_dyadic_sparse(fam).ok);  // children cover 1/2 of the root
    IntervalFamily fat{&g, {Iv{0, 0}, Iv{1, 0}, Iv{1, 1}}, Frac{1, 2}};
    CHECK_FALSE(check_dyadic_sparse(fat).ok);  // children cover everything
}

TEST_CASE("sparse selection: single coefficient collapses to the ancestor") {
    ProductGrid g(random_grid(4, 3, 2));
    Field2 f(g, 1);
    Spectrum2 s = analyze(f);
    s.set(g.top(), Eigen::VectorXd::Constant(1, 1e-6));
    f = synthesize(s);
    ScalarField2 phi = square_fn(f);
    auto sel = biparameter_sparse_select(phi, phi, carrier_rects(s, s), Frac{1, 4});
    REQUIRE(sel.family.rects.size() == 1);
    CHECK(sel.family.rects.front() == g.top());
    CHECK(check_weakly_sparse(sel.family).ok);
}

TEST_CASE("sparse selection is scale invariant and exactly weakly sparse") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        ProductGrid g(random_grid(seed, 4, 2));
        Rng rf(seed + 1), rg(seed + 2);
        Field2 f = make_field(g, 2, rf), h = make_field(g, 2, rg);
        Spectrum2 sf = analyze(f), sh = analyze(h);
        ScalarField2 phi = square_fn(f), psi = square_fn(h);
        auto carriers = carrier_rects(sf, sh);
        auto sel = biparameter_sparse_select(phi, psi, carriers, Frac{1, 4});
        CHECK(check_weakly_sparse(sel.family).ok);

        ScalarField2 phil = phi;
        phil.v *= 7.25;  // level sets are scale-relative
        auto sel2 = biparameter_sparse_select(phil, psi, carriers, Frac{1, 4});
        CHECK(sel2.family.rects == sel.family.rects);

        if (sel.family.rects.size() <= 12)
            CHECK(brute_force_carleson_check(sel.family, sel.family.delta).ok);
    }
}

TEST_CASE("sparse form evaluation") {
    ProductGrid g(random_grid(5, 2, 2));
    ScalarField2 ones(g, 1);
    ones.v.setOnes();
    SparseFamily empty;
    empty.grid = &g;
    CHECK(sparse_form_eval(empty, ones, ones) == 0.0);

    SparseFamily one = family_of(g, {Rect{Iv{1, 0}, Iv{1, 1}}}, Frac{1, 1});
    CHECK(sparse_form_eval(one, ones, ones) == doctest::Approx(0.25));

    ScalarField2 threes = ones;
    threes.v *= 3.0;
    CHECK(sparse_form_eval(one, threes, ones) == doctest::Approx(0.75));
}

TEST_CASE("sparse positive operator") {
    Grid1 g(AxisSpec::standard(2));
    Weight1 id(g, 2);
    IntervalReducing red(id, 2.0);
    Rng rng(7);
    Field1 f = make_field1(g, 2, rng);
    IntervalFamily fam{&g, {Iv{0, 0}, Iv{2, 1}}, Frac{1, 2}};
    ScalarField1 out = sparse_positive_operator(fam, id, 2.0, f, red);
    // identity weight: (sum_L (|f|)_L^2 1_L)^{1/2}
    for (int t = 0; t < g.leaf_count(); ++t) {
        double expect = std::pow(f.abs_average(Iv{0, 0}), 2);
        if (g.contains(Iv{2, 1}, t)) expect += std::pow(f.abs_average(Iv{2, 1}), 2);
        CHECK(out.v(0, t) == doctest::Approx(std::sqrt(expect)));
    }
    // 1-homogeneous
    Field1 f2 = f;
    f2.v *= 3.0;
    ScalarField1 out2 = sparse_positive_operator(fam, id, 2.0, f2, red);
    CHECK((out2.v - 3.0 * out.v).cwiseAbs().maxCoeff() < 1e-12);

    IntervalFamily none{&g, {}, Frac{1, 2}};
    CHECK(sparse_positive_operator(none, id, 2.0, f, red).v.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("one-parameter shifted sparse domination") {
    Grid1 g(AxisSpec::standard(4));
    Rng rng(9);

    // f vanishing on J: empty family, both sides zero
    Weight1 id(g, 1);
    IntervalReducing redid(id, 2.0);
    Field1 f(g, 1);
    Iv j{1, 0};
    for (int t = 0; t < g.leaf_count(); ++t)
        if (!g.contains(j, t)) f.v(0, t) = rng.normal();
    auto res = one_param_shifted_sparse(j, f, id, 2.0, 0, 0, Frac{1, 2}, redid);
    CHECK(res.family.intervals.empty());
    CHECK(res.ratio == 0.0);

    // random corpus: family is dyadically sparse, ratio finite
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        Rng r2(seed + 19);
        Weight1 w = make_weight1(g, 2, 0.7, r2);
        IntervalReducing red(w, 2.0);
        Field1 h = make_field1(g, 2, r2);
        for (int i : {0, 1, 2})
            for (int jj : {0, 2}) {
                auto rr = one_param_shifted_sparse(Iv{0, 0}, h, w, 2.0, i, jj, Frac{1, 2}, red);
                CHECK(check_dyadic_sparse(rr.family).ok);
                CHECK(rr.ratio >= 0.0);
                CHECK(rr.ratio < 1e6);
            }
    }
}
