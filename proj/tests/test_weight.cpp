#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyadlab/corpus.hpp"
#include "dyadlab/weight.hpp"

using namespace dyad;

namespace {

ProductGrid tiny_grid(int L = 1) { return ProductGrid(GridSpec{2, AxisSpec::standard(L), AxisSpec::standard(L)}); }

// scalar biparameter weight constant in x2 with two values on the x1 halves
Weight2 two_valued(const ProductGrid& g, double a, double b) {
    Weight2 w(g, 1);
    for (int c = 0; c < g.leaf_count(); ++c) {
        double v = g.cell_t1(c) < g.n1() / 2 ? a : b;
        w.set(c, Eigen::MatrixXd::Constant(1, 1, v));
    }
    return w;
}

}  // namespace

TEST_CASE("rho norm") {
    ProductGrid g = tiny_grid();
    Weight2 id(g, 3);
    Eigen::VectorXd e(3);
    e << 1, -2, 2;
    CHECK(std::abs(rho_norm(id, g.top(), 1.7, e) - 3.0) < 1e-12);  // |e| = 3

    // d=1, p=2, two equal cells {1,16}: rho = sqrt(17/2)
    Grid1 g1(AxisSpec::standard(1));
    Weight1 w(g1, 1);
    w.set(0, Eigen::MatrixXd::Constant(1, 1, 1.0));
    w.set(1, Eigen::MatrixXd::Constant(1, 1, 16.0));
    CHECK(std::abs(rho_norm(w, Iv{0, 0}, 2.0, Eigen::VectorXd::Ones(1)) - std::sqrt(8.5)) < 1e-12);

    // positive homogeneity
    Weight2 ww = two_valued(g, 1.0, 9.0);
    Eigen::VectorXd e1 = Eigen::VectorXd::Ones(1);
    CHECK(std::abs(rho_norm(ww, g.top(), 3.0, 2 * e1) - 2 * rho_norm(ww, g.top(), 3.0, e1)) < 1e-12);
}

TEST_CASE("conjugate weight") {
    ProductGrid g = tiny_grid();
    // d=1, p=3, w=8: w' = 8^{-1/2}
    Weight2 w = Weight2::constant(g, Eigen::MatrixXd::Constant(1, 1, 8.0));
    CHECK(std::abs(w.conjugate(3.0).at(0)(0, 0) - std::pow(8.0, -0.5)) < 1e-14);

    Rng rng(1);
    ProductGrid g2(random_grid(2, 2, 2));
    Weight2 wr(g2, 2);
    for (int c = 0; c < g2.leaf_count(); ++c) wr.set(c, random_spd(2, 0.8, rng));
    // p=2: conjugate is the cellwise inverse
    Weight2 winv = wr.conjugate(2.0);
    for (int c = 0; c < g2.leaf_count(); ++c)
        CHECK((wr.at(c) * winv.at(c) - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
    // involution at p=3
    Weight2 back = wr.conjugate(3.0).conjugate(1.5);
    for (int c = 0; c < g2.leaf_count(); ++c)
        CHECK((back.at(c) - wr.at(c)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("averaging constant") {
    ProductGrid g = tiny_grid();
    Rng rng(3);
    Weight2 cst = Weight2::constant(g, random_spd(2, 0.5, rng));
    CHECK(std::abs(averaging_constant(cst, g.top(), 2.0) - 1.0) < 1e-12);

    // d=1, p=2, cells {1,4}: C_E = (w)_E (w^{-1})_E = (5/2)(5/8) = 25/16
    Weight2 w = two_valued(g, 1.0, 4.0);
    CHECK(std::abs(averaging_constant(w, g.top(), 2.0) - 25.0 / 16.0) < 1e-12);
}

TEST_CASE("Ap characteristics") {
    ProductGrid g = tiny_grid();
    Weight2 cst = Weight2::constant(g, Eigen::MatrixXd::Identity(2, 2) * 3.0);
    CHECK(std::abs(ap_characteristic(cst, 2.0) - 1.0) < 1e-9);
    CHECK(std::abs(ap_characteristic(cst, 1.5) - 1.0) < 1e-9);

    // d=1, p=2, leaf weight {1,4} on halves: sup is 25/16 at the top interval
    Weight2 w = two_valued(g, 1.0, 4.0);
    CHECK(std::abs(ap_characteristic(w, 2.0) - 25.0 / 16.0) < 1e-12);
    CHECK(std::abs(ap_local(w, g.top(), 2.0) - 25.0 / 16.0) < 1e-12);

    Grid1 g1(AxisSpec::standard(1));
    Weight1 w1(g1, 1);
    w1.set(0, Eigen::MatrixXd::Constant(1, 1, 1.0));
    w1.set(1, Eigen::MatrixXd::Constant(1, 1, 4.0));
    CHECK(std::abs(ap_characteristic(w1, 2.0) - 25.0 / 16.0) < 1e-12);

    // two-weight form with V = W' matches the one-weight form
    ProductGrid g4(random_grid(5, 3, 2));
    CorpusSpec spec;
    spec.L = 3;
    spec.d = 2;
    spec.p = 2.0;
    spec.amplitude = 0.7;
    Weight2 wr = make_weight_values(g4, spec, 77);
    CHECK(std::abs(ap_characteristic(wr, 2.0) - ap_characteristic(wr, wr.conjugate(2.0), 2.0)) <
          1e-9 * ap_characteristic(wr, 2.0));
}

TEST_CASE("weight validation") {
    ProductGrid g = tiny_grid();
    Weight2 w(g, 2);
    Eigen::MatrixXd bad(2, 2);
    bad << 1, 0, 0, -0.5;
    w.set(0, bad);
    CHECK_THROWS_AS(w.validate(), NearSingularError);
}

TEST_CASE("reverse Holder") {
    ProductGrid g = tiny_grid(2);
    Weight2 ones = Weight2::constant(g, Eigen::MatrixXd::Constant(1, 1, 1.0));
    ReverseHolderReport rep = reverse_holder_check(ones, 2.0, 0.01);
    CHECK(rep.admissible);
    CHECK(rep.holds);

    // two-valued {1,4}: [w]_{A2} = 25/16; delta = 0.03 < 16/400 is admissible
    Weight2 w = two_valued(g, 1.0, 4.0);
    rep = reverse_holder_check(w, 2.0, 0.03);
    CHECK(std::abs(rep.characteristic - 25.0 / 16.0) < 1e-12);
    CHECK(rep.delta_max == doctest::Approx(1.0 / 25.0));
    CHECK(rep.admissible);
    CHECK(rep.holds);

    // out-of-range delta is a precondition violation, not an inequality failure
    rep = reverse_holder_check(w, 2.0, 0.2);
    CHECK_FALSE(rep.admissible);

    // seeded scalar corpus: no violations at half the admissible range
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        ProductGrid gg(random_grid(seed, 3, 2));
        CorpusSpec spec;
        spec.L = 3;
        spec.d = 1;
        spec.p = 2.0;
        spec.amplitude = 0.8;
        Weight2 ws = make_weight_values(gg, spec, seed + 1);
        ReverseHolderReport r = reverse_holder_check(ws, 2.0, 0.0);
        r = reverse_holder_check(ws, 2.0, 0.5 * r.delta_max);
        CHECK(r.admissible);
        CHECK(r.holds);
    }
}

TEST_CASE("Holder duality of weighted norms") {
    ProductGrid g(random_grid(3, 3, 2));
    CorpusSpec spec;
    spec.L = 3;
    spec.d = 2;
    spec.p = 1.5;
    spec.amplitude = 0.8;
    Weight2 w = make_weight_values(g, spec, 5);
    Rng rng(9);
    Field2 f = make_field(g, 2, rng), h = make_field(g, 2, rng);
    double lhs = std::abs(pairing(f, h));
    double rhs = lp_weighted_norm(f, w, 1.5) * lp_weighted_norm(h, w.conjugate(1.5), 3.0);
    CHECK(lhs <= rhs * (1.0 + 1e-9));
}

TEST_CASE("slices and JSON round trip") {
    ProductGrid g(random_grid(6, 2, 2));
    CorpusSpec spec;
    spec.L = 2;
    spec.d = 2;
    spec.p = 2.0;
    spec.amplitude = 0.5;
    Weight2 w = make_weight_values(g, spec, 3);
    Weight1 s = slice(w, 1, 1);
    for (int t1 = 0; t1 < g.n1(); ++t1)
        CHECK((s.at(t1) - w.at(g.cell(t1, 1))).cwiseAbs().maxCoeff() == 0.0);

    Weight2 back = weight_from_json(weight_to_json(w), g);
    for (int c = 0; c < g.leaf_count(); ++c)
        CHECK((back.at(c) - w.at(c)).cwiseAbs().maxCoeff() < 1e-15);
}
