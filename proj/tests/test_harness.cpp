#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyadlab/runner.hpp"

#include <filesystem>
#include <fstream>

using namespace dyad;

TEST_CASE("exponent table values") {
    ExponentTable t2 = exponent_table(2.0);
    CHECK(t2.gamma_p == Rat(1));       // both branches give 1 at p = 2
    CHECK(gamma_exponent(Rat(2)) == Rat(1, 2) + Rat(1, 2));
    CHECK(t2.alpha_p == Rat(4));       // 2*1 + 2*1/1

    ExponentTable t4 = exponent_table(4.0);
    CHECK(t4.gamma_p == Rat(7, 12));   // 1/2 + 1/12

    CHECK_THROWS(exponent_table(1.0));
    CHECK_THROWS(exponent_table(0.5));
}

TEST_CASE("alpha2(p')/(p-1) == alpha1(p) exactly in rational arithmetic") {
    for (Rat p : {Rat(3, 2), Rat(2), Rat(3), Rat(4), Rat(7, 3), Rat(9, 5)}) {
        ExponentTable t = exponent_table(p);
        ExponentTable tc = exponent_table(t.p_conj);
        CHECK(tc.alpha2_p / (p - 1) == t.alpha1_p);
    }
}

TEST_CASE("fefferman-stein components") {
    auto parts = fefferman_stein_parts(2.0, 1.5);
    CHECK(parts.theta == doctest::Approx((1.0 / 1.5 - 0.5) / 0.5));
    CHECK(parts.r_factor == doctest::Approx(std::pow(3.0 + 1.5 / 0.5, 1.0 / 1.5)));
    CHECK_THROWS(fefferman_stein_parts(1.5, 2.0));
}

TEST_CASE("corpus determinism and amplitude control") {
    CorpusSpec spec;
    spec.seed = 3;
    spec.L = 3;
    spec.d = 2;
    spec.p = 2.0;
    spec.amplitude = 0.0;
    WeightInstance flat = make_weight(spec, 0);
    CHECK(std::abs(flat.characteristic - 1.0) < 1e-9);  // amplitude 0: constant weight

    spec.amplitude = 0.7;
    WeightInstance a = make_weight(spec, 1);
    WeightInstance b = make_weight(spec, 1);
    CHECK(weight_to_json(a.w) == weight_to_json(b.w));  // same seed, same corpus

    // characteristic grows with the amplitude sweep (sampled trend)
    double prev = 1.0;
    int increases = 0, total = 0;
    for (double amp : {0.0, 0.4, 0.8, 1.2}) {
        spec.amplitude = amp;
        WeightInstance inst = make_weight(spec, 2);
        if (inst.characteristic >= prev - 1e-9) ++increases;
        ++total;
        prev = inst.characteristic;
    }
    CHECK(increases >= total - 1);

    // oversized amplitudes breach the floor, are halved, and still validate
    spec.amplitude = 60.0;
    WeightInstance big = make_weight(spec, 3);
    CHECK(big.regenerations >= 1);
    big.w.validate();
}

TEST_CASE("rhs_core wiring re-derived from the exponent table") {
    SuiteConfig cfg;
    cfg.seeds = 1;
    cfg.L = 3;
    cfg.d = 2;
    cfg.amplitude = 0.6;
    Instance inst(cfg, 5, 1.5);
    ExponentTable t = exponent_table(1.5);

    auto row = [&](const std::string& id) { return verify_inequality(id, inst, nullptr).at(0); };

    BoundReport sf = row("sf_upper");
    CHECK(sf.rhs_core == doctest::Approx(std::pow(inst.char_w, 2 * t.gamma()) *
                                         lp_weighted_norm(inst.f, inst.w, 1.5)));
    BoundReport mx = row("maximal_strong_modified");
    double ms = boost::rational_cast<double>(t.maximal_strong);
    CHECK(mx.rhs_core ==
          doctest::Approx(std::pow(inst.char_w, ms) * lp_weighted_norm(inst.f, inst.w, 1.5)));
    BoundReport mn = row("multiplier_norm");
    CHECK(mn.rhs_core == doctest::Approx(std::pow(inst.char_w, t.alpha())));
}

TEST_CASE("constant-weight multiplier ratio is 1 at p = 2") {
    SuiteConfig cfg;
    cfg.seeds = 1;
    cfg.L = 3;
    cfg.d = 2;
    cfg.amplitude = 0.0;
    cfg.model = WeightModel::constant;
    Instance inst(cfg, 1, 2.0);
    CHECK(std::abs(inst.char_w - 1.0) < 1e-9);
    // multiplier_norm draws a general symbol; force the +-1 case directly
    MultiplierSymbol pm(
        *inst.grid);
    pm.sigma.setOnes();
    auto op = [&pm](const Field2& x) { return apply(pm, x); };
    CHECK(operator_norm_p2(op, inst.w, inst.w) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("baselines round trip and freezing") {
    std::vector<BoundReport> reports;
    BoundReport r;
    r.id = "sf_upper";
    r.p = 2.0;
    r.d = 2;
    r.ratio = 0.5;
    reports.push_back(r);
    r.ratio = 0.8;
    reports.push_back(r);
    Baselines b = freeze_baselines(reports, 0.2);
    CHECK(b.at(baseline_key("sf_upper", 2.0, 2)) == doctest::Approx(0.96));

    auto tmp = std::filesystem::temp_directory_path() / "dyadlab_baseline_test.json";
    save_baselines(b, tmp.string());
    Baselines back = load_baselines(tmp.string());
    CHECK(back == b);
    std::filesystem::remove(tmp);
}

TEST_CASE("runner: empty suite lists and determinism") {
    SuiteConfig cfg;
    cfg.seeds = 2;
    cfg.L = 3;
    cfg.d = 2;
    cfg.ps = {2.0};
    cfg.amplitude = 0.6;
    cfg.suites = {};
    CHECK(run_suites(cfg, nullptr).empty());

    cfg.suites = {"sf_upper", "sf_lower", "p2_square_identity", "sparse_multiplier_one_weight"};
    auto r1 = run_suites(cfg, nullptr);
    auto r2 = run_suites(cfg, nullptr);
    CHECK(reports_to_csv(r1) == reports_to_csv(r2));
    cfg.jobs = 2;
    auto r3 = run_suites(cfg, nullptr);
    CHECK(reports_to_csv(r1) == reports_to_csv(r3));

    // freeze then verify: everything passes against its own baseline
    Baselines b = freeze_baselines(r1, 0.2);
    auto checked = run_suites(cfg, &b);
    for (const auto& row : checked) CHECK(row.pass);

    // unknown ids are rejected
    cfg.suites = {"no_such_inequality"};
    CHECK_THROWS(run_suites(cfg, nullptr));
}

TEST_CASE("run config JSON and the run directory") {
    std::string json = R"({"seed": 4, "instances": 1, "L": 3, "d": 2, "p": [2.0],
                           "suites": ["sf_upper"], "freeze": true,
                           "corpus": {"model": "random_log_field", "amplitude": 0.5},
                           "out_dir": "dyadlab_test_run"})";
    RunConfig cfg = run_config_from_json(json);
    CHECK(cfg.suite.seeds == 1);
    CHECK(cfg.freeze);
    auto tmp = std::filesystem::temp_directory_path() / "dyadlab_runs";
    setenv("DYADLAB_RUN_DIR", tmp.c_str(), 1);
    RunResult res = run(cfg);
    CHECK(res.exit_code == 0);
    CHECK(res.rows == 1);
    CHECK(std::filesystem::exists(res.csv_path));
    CHECK(std::filesystem::exists(res.manifest_path));
    std::filesystem::remove_all(tmp);

    // an empty suite list yields an empty report and exit 0
    RunConfig empty = run_config_from_json(R"({"suites": [], "freeze": true, "out_dir": "e"})");
    setenv("DYADLAB_RUN_DIR", tmp.c_str(), 1);
    RunResult er = run(empty);
    CHECK(er.exit_code == 0);
    CHECK(er.rows == 0);
    std::filesystem::remove_all(tmp);
}

TEST_CASE("open-question probes") {
    // k = 1 and constant weight: the plain Fefferman-Stein ratio, at least 1
    auto rows = probe_open_question(2, 3.0, 1, 3, 2, {0.0}, 1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].characteristic == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rows[0].ratio >= 1.0 - 1e-12);

    auto sweep = probe_open_question(1, 3.0, 2, 3, 2, {0.0, 0.5, 1.0});
    CHECK(sweep.size() == 3);
    CHECK(sweep[2].characteristic > sweep[0].characteristic);
    std::string csv = probe_to_csv(sweep);
    CHECK(csv.find("amplitude,characteristic,ratio") == 0);
}
