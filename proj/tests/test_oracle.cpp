#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyadlab/corpus.hpp"
#include "dyadlab/oracle.hpp"

using namespace dyad;

TEST_CASE("oracle reports") {
    OracleReport good = make_report("q", 1.0, 1.0 + 1e-13, 1e-12, "x");
    CHECK(good.pass);
    OracleReport bad = make_report("q", 1.0, 1.01, 1e-12, "x");
    CHECK_FALSE(bad.pass);
}

TEST_CASE("p != 2 norm lower bound is monotone in restarts") {
    ProductGrid g(random_grid(2, 2, 2));
    CorpusSpec spec;
    spec.L = 2;
    spec.d = 2;
    spec.p = 1.5;
    spec.amplitude = 0.6;
    Weight2 w = make_weight_values(g, spec, 3);
    Rng rng(4);
    MultiplierSymbol s = make_multiplier(g, rng, false);
    auto op = [&s](const Field2& x) { return apply(s, x); };
    double lo = brute_force_operator_norm(op, w, w, 1.5, 2);
    double hi = brute_force_operator_norm(op, w, w, 1.5, 8);
    CHECK(hi >= lo - 1e-12);
    // restarts beyond the first reuse the RNG stream, so values only grow
    double exact2 = operator_norm_p2(op, w, w);
    double lp2 = brute_force_operator_norm(op, w, w, 2.0);
    CHECK(lp2 == doctest::Approx(exact2).epsilon(1e-9));
}

TEST_CASE("dimension cap") {
    ProductGrid g(GridSpec{2, AxisSpec::standard(8), AxisSpec::standard(8)});
    Weight2 id(g, 2);
    auto op = [](const Field2& x) { return x; };
    CHECK_THROWS(brute_force_operator_norm(op, id, id, 2.0));
}
