#include "dyadlab/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace dyad {

RunConfig run_config_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    RunConfig cfg;
    cfg.suite.seed = j.value("seed", std::uint64_t(1));
    cfg.suite.seeds = j.value("instances", 50);
    cfg.suite.L = j.value("L", 4);
    cfg.suite.d = j.value("d", 2);
    if (j.contains("p")) {
        if (j["p"].is_array())
            cfg.suite.ps = j["p"].get<std::vector<double>>();
        else
            cfg.suite.ps = {j["p"].get<double>()};
    }
    if (j.contains("suites"))
        cfg.suite.suites = j["suites"].get<std::vector<std::string>>();
    else
        cfg.suite.suites = known_inequalities();
    if (j.contains("corpus")) {
        const auto& c = j["corpus"];
        cfg.suite.amplitude = c.value("amplitude", 0.6);
        std::string model = c.value("model", "random_log_field");
        if (model == "constant")
            cfg.suite.model = WeightModel::constant;
        else if (model == "scalar_power")
            cfg.suite.model = WeightModel::scalar_power;
        else if (model == "random_log_field")
            cfg.suite.model = WeightModel::random_log_field;
        else
            throw std::invalid_argument("unknown weight model: " + model);
    }
    cfg.suite.baseline_path = j.value("baseline_path", std::string());
    cfg.suite.jobs = j.value("jobs", 1);
    cfg.out_dir = j.value("out_dir", std::string("run"));
    cfg.freeze = j.value("freeze", false);
    cfg.headroom = j.value("headroom", 0.2);
    return cfg;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::string reports_to_csv(std::vector<BoundReport> reports) {
    std::stable_sort(reports.begin(), reports.end(), [](const BoundReport& a, const BoundReport& b) {
        return std::tie(a.id, a.p, a.seed) < std::tie(b.id, b.p, b.seed);
    });
    std::string out = "inequality_id,seed,L,d,p,lhs,rhs_core,characteristic,ratio,baseline,pass\n";
    for (const BoundReport& r : reports) {
        out += r.id + "," + std::to_string(r.seed) + "," + std::to_string(r.L) + "," +
               std::to_string(r.d) + "," + fmt(r.p) + "," + fmt(r.lhs) + "," + fmt(r.rhs_core) +
               "," + fmt(r.characteristic) + "," + fmt(r.ratio) + "," + fmt(r.baseline) + "," +
               (r.pass ? "1" : "0") + "\n";
    }
    return out;
}

RunResult run(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    fs::path dir(cfg.out_dir);
    if (dir.is_relative()) {
        const char* root = std::getenv("DYADLAB_RUN_DIR");
        if (root && *root) dir = fs::path(root) / dir;
    }
    fs::create_directories(dir);

    Baselines baselines;
    bool have_baselines = false;
    if (!cfg.freeze) {
        if (cfg.suite.baseline_path.empty() && !cfg.suite.suites.empty())
            throw std::runtime_error("baseline file required (or set freeze)");
        if (!cfg.suite.baseline_path.empty()) {
            baselines = load_baselines(cfg.suite.baseline_path);
            have_baselines = true;
        }
    }

    std::vector<BoundReport> reports =
        cfg.suite.suites.empty()
            ? std::vector<BoundReport>{}
            : run_suites(cfg.suite, have_baselines ? &baselines : nullptr);

    RunResult res;
    res.rows = int(reports.size());
    for (const BoundReport& r : reports)
        if (!r.pass) ++res.failures;

    std::string csv = reports_to_csv(reports);
    fs::path csv_path = dir / "reports.csv";
    std::ofstream(csv_path) << csv;
    res.csv_path = csv_path.string();

    if (cfg.freeze) {
        Baselines frozen = freeze_baselines(reports, cfg.headroom);
        std::string path = cfg.suite.baseline_path.empty() ? (dir / "baselines.json").string()
                                                           : cfg.suite.baseline_path;
        save_baselines(frozen, path);
    }

    nlohmann::json manifest;
    manifest["seed"] = cfg.suite.seed;
    manifest["instances"] = cfg.suite.seeds;
    manifest["L"] = cfg.suite.L;
    manifest["d"] = cfg.suite.d;
    manifest["p"] = cfg.suite.ps;
    manifest["suites"] = cfg.suite.suites;
    manifest["rows"] = res.rows;
    manifest["failures"] = res.failures;
    manifest["freeze"] = cfg.freeze;
    manifest["timestamp"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    fs::path man_path = dir / "manifest.json";
    std::ofstream(man_path) << manifest.dump(1) << "\n";
    res.manifest_path = man_path.string();
    res.exit_code = res.failures == 0 ? 0 : 1;
    return res;
}

std::vector<ProbeRow> probe_open_question(int which, double p, std::uint64_t seed, int L, int d,
                                          const std::vector<double>& amplitudes, int kcount) {
    if (which != 1 && which != 2) throw std::invalid_argument("probe question must be 1 or 2");
    Grid1 g(AxisSpec::standard(L));
    std::vector<ProbeRow> rows;
    for (double amp : amplitudes) {
        Rng rw(seed * 0x8f1bbcdcULL + 41);
        Weight1 w = make_weight1(g, d, amp, rw);
        double charac = ap_characteristic(w, p);
        IntervalReducing red(w, p);
        Rng rf(seed * 0x8f1bbcdcULL + 42);
        auto pstack = w.power_stack(1.0 / p);
        ScalarField1 lhs2(g, 1), rhs2(g, 1);
        for (int k = 0; k < kcount; ++k) {
            Field1 fk = make_field1(g, d, rf);
            ScalarField1 m = which == 1 ? maximal_cg_modified(fk, red) : maximal_cg(fk, w, p);
            lhs2.v.array() += m.v.array().square();
            for (int t = 0; t < g.leaf_count(); ++t)
                rhs2.v(0, t) += (pstack->middleRows(t * d, d) * fk.v.col(t)).squaredNorm();
        }
        lhs2.v = lhs2.v.array().sqrt();
        rhs2.v = rhs2.v.array().sqrt();
        rows.push_back(ProbeRow{amp, charac, lhs2.norm_lp(p) / rhs2.norm_lp(p)});
    }
    return rows;
}

std::string probe_to_csv(const std::vector<ProbeRow>& rows) {
    std::string out = "amplitude,characteristic,ratio\n";
    for (const ProbeRow& r : rows)
        out += fmt(r.amplitude) + "," + fmt(r.characteristic) + "," + fmt(r.ratio) + "\n";
    return out;
}

}  // namespace dyad
