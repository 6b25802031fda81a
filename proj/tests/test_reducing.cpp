#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyadlab/corpus.hpp"
#include "dyadlab/oracle.hpp"
#include "dyadlab/directions.hpp"
#include "dyadlab/reducing.hpp"

using namespace dyad;

namespace {

CorpusSpec spec_of(int L, int d, double p, double amp) {
    CorpusSpec s;
    s.L = L;
    s.d = d;
    s.p = p;
    s.amplitude = amp;
    return s;
}

auto rho_fn(const Weight2& w, Rect e, double p) {
    return [&w, e, p](const Eigen::VectorXd& dir) { return rho_norm(w, e, p, dir); };
}

}  // namespace

TEST_CASE("closed forms") {
    ProductGrid g(random_grid(1, 2, 2));
    Rng rng(4);
    Eigen::MatrixXd c = random_spd(2, 0.7, rng);
    Weight2 w = Weight2::constant(g, c);

    // p = 2 with constant weight: A = C^{1/2}
    ReducingMatrix r2 = reducing_matrix(w, g.top(), 2.0);
    CHECK(r2.method == ReducingMethod::closed_form_p2);
    CHECK((r2.a - matrix_power(c, 0.5)).cwiseAbs().maxCoeff() < 1e-12);

    // identity weight at any p: A = I
    Weight2 id(g, 2);
    ReducingMatrix r3 = reducing_matrix(id, g.top(), 3.0);
    CHECK((r3.a - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r3.certified_slack == 1.0);

    // d = 1: scalar power ((w)_E)^{1/p}
    Weight2 ws = Weight2::constant(g, Eigen::MatrixXd::Constant(1, 1, 8.0));
    ReducingMatrix r1 = reducing_matrix(ws, g.top(), 3.0);
    CHECK(r1.method == ReducingMethod::scalar_power);
    CHECK(std::abs(r1.a(0, 0) - 2.0) < 1e-12);
}

TEST_CASE("ellipsoid solver on diag(1,1)/diag(16,1) at p=3") {
    Grid1 g1(AxisSpec::standard(1));
    Weight1 w(g1, 2);
    w.set(0, Eigen::MatrixXd::Identity(2, 2));
    Eigen::MatrixXd m(2, 2);
    m << 16, 0, 0, 1;
    w.set(1, m);
    ReducingMatrix rm = reducing_matrix(w, Iv{0, 0}, 3.0);
    CHECK(rm.method == ReducingMethod::john_ellipsoid);
    CHECK(rm.certified_slack <= 1.05);
    // dense 2048-direction sweep against the direct rho oracle
    auto rho = [&w](const Eigen::VectorXd& e) { return rho_norm(w, Iv{0, 0}, 3.0, e); };
    auto rep = dense_direction_check(rm.a, rho, 2, std::sqrt(2.0) * 1.05);
    CHECK(rep.ok);
}

TEST_CASE("dense direction check catches violations") {
    ProductGrid g(random_grid(2, 2, 2));
    CorpusSpec spec = spec_of(2, 2, 2.0, 0.8);
    Weight2 w = make_weight_values(g, spec, 9);
    ReducingMatrix rm = reducing_matrix(w, g.top(), 2.0);
    auto rho = rho_fn(w, g.top(), 2.0);
    CHECK(dense_direction_check(rm.a, rho, 2, 1.0 + 1e-9).ok);  // closed form is exact

    auto bad = dense_direction_check(0.5 * rm.a, rho, 2, 1.05);
    CHECK_FALSE(bad.ok);
    CHECK(bad.lower > 1.0 + 1e-9);

    // d = 1: the corridor collapses to equality
    Weight2 ws = Weight2::constant(g, Eigen::MatrixXd::Constant(1, 1, 5.0));
    ReducingMatrix r1 = reducing_matrix(ws, g.top(), 1.5);
    CHECK(dense_direction_check(r1.a, rho_fn(ws, g.top(), 1.5), 1, 1.0 + 1e-9).ok);
}

TEST_CASE("solver handles a random corpus at p in {3/2, 3}") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        ProductGrid g(random_grid(seed, 3, 2));
        Weight2 w = make_weight_values(g, spec_of(3, 2, 2.0, 0.8), seed + 11);
        for (double p : {1.5, 3.0}) {
            RectReducing red(w, p);
            CHECK(red.max_slack() <= 1.05);
            // spot-check the contract against the independent oracle
            for (const Rect& r : {g.top(), Rect{Iv{1, 1}, Iv{2, 3}}, Rect{Iv{3, 5}, Iv{0, 0}}}) {
                auto rep = dense_direction_check(red.at(r), rho_fn(w, r, p), 2,
                                                 std::sqrt(2.0) * 1.05, 512, 4);
                CHECK(rep.ok);
            }
        }
    }
}

TEST_CASE("iterated reducing operators") {
    ProductGrid g(random_grid(5, 3, 2));
    Weight2 w = make_weight_values(g, spec_of(3, 2, 2.0, 0.7), 21);
    // p = 2: slice-then-reduce equals the direct reducing matrix exactly
    Rect r{Iv{1, 0}, Iv{1, 1}};
    Eigen::MatrixXd direct = reducing_matrix(w, r, 2.0).a;
    Eigen::MatrixXd iter = iterated_reducing(w, r, 2.0);
    CHECK((direct - iter).cwiseAbs().maxCoeff() < 1e-10);

    // p = 3: two-sided comparability within a generous constant
    Eigen::MatrixXd direct3 = reducing_matrix(w, r, 3.0).a;
    Eigen::MatrixXd iter3 = iterated_reducing(w, r, 3.0);
    Eigen::MatrixXd dirs = direction_set(2, 128, 5);
    for (int k = 0; k < dirs.cols(); ++k) {
        double a = (iter3 * dirs.col(k)).norm(), b = (direct3 * dirs.col(k)).norm();
        CHECK(a / b < 4.0);
        CHECK(b / a < 4.0);
    }
}

TEST_CASE("sliced weight of a tensor weight is the factor") {
    ProductGrid g(random_grid(6, 2, 2));
    Rng rng(13);
    // W(x1, x2) = U(x1), constant in x2
    std::vector<Eigen::MatrixXd> u;
    for (int t = 0; t < g.n1(); ++t) u.push_back(random_spd(2, 0.6, rng));
    Weight2 w(g, 2);
    for (int c = 0; c < g.leaf_count(); ++c) w.set(c, u[std::size_t(g.cell_t1(c))]);
    Weight1 wq = sliced_weight(w, 2, Iv{1, 1}, 2.0);
    for (int t = 0; t < g.n1(); ++t) CHECK((wq.at(t) - u[std::size_t(t)]).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("reducing-operator form of the characteristic is at least one") {
    for (double p : {1.5, 2.0, 3.0}) {
        ProductGrid g(random_grid(7, 3, 2));
        Weight2 w = make_weight_values(g, spec_of(3, 2, p, 0.8), 31);
        RectReducing rw(w, p);
        RectReducing rwc(w.conjugate(p), conjugate_exponent(p));
        CHECK(ap_reducing_form(rw, rwc) >= 1.0 - 1e-9);
    }
}

TEST_CASE("lemma checks") {
    ProductGrid g(random_grid(8, 3, 2));
    // constant weight: inverse-vs-prime holds with equality
    Rng rng(17);
    Weight2 cst = Weight2::constant(g, random_spd(2, 0.6, rng));
    LemmaReport rep = lemma_checks(cst, 2.0, g.top());
    CHECK(rep.inverse_prime_ok());
    CHECK(rep.max_inv_vs_prime == doctest::Approx(1.0).epsilon(1e-9));

    // d=1 scalar identity: the w_e ratio over C_E is exactly 1
    Weight2 ws(g, 1);
    for (int c = 0; c < g.leaf_count(); ++c)
        ws.set(c, Eigen::MatrixXd::Constant(1, 1, 1.0 + (c % 5)));
    LemmaReport rs = lemma_checks(ws, 1.5, g.top());
    CHECK(rs.max_scalar_ap_over_ce == doctest::Approx(1.0).epsilon(1e-9));

    // random corpus: the hard contract never fails
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ProductGrid gg(random_grid(seed, 3, 2));
        Weight2 w = make_weight_values(gg, spec_of(3, 2, 2.0, 0.8), seed + 41);
        for (double p : {1.5, 2.0, 3.0}) CHECK(lemma_checks(w, p, gg.top()).inverse_prime_ok());
    }
}
