#pragma once

#include "dyadlab/verify.hpp"

namespace dyad {

struct RunConfig {
    SuiteConfig suite;      // suite.suites is the exact id list (may be empty)
    std::string out_dir;    // run directory; created if missing
    bool freeze = false;    // write a fresh baseline file instead of checking
    double headroom = 0.2;  // freeze headroom
};

// config JSON: {seed, L, d, p: [..], suites: [..], corpus: {model, amplitude},
//               baseline_path, jobs}; "suites" absent means every known id
RunConfig run_config_from_json(const std::string& text);

std::string reports_to_csv(std::vector<BoundReport> reports);

struct RunResult {
    int exit_code = 0;
    int rows = 0;
    int failures = 0;
    std::string csv_path, manifest_path;
};

// resolves the run directory against DYADLAB_RUN_DIR when `out_dir` is relative
RunResult run(const RunConfig& cfg);

// Empirical probes of the vector-valued maximal-function questions:
// which = 1 uses the modified maximal function, which = 2 the plain one.
struct ProbeRow {
    double amplitude = 0;
    double characteristic = 0;
    double ratio = 0;
};
std::vector<ProbeRow> probe_open_question(int which, double p, std::uint64_t seed, int L, int d,
                                          const std::vector<double>& amplitudes, int kcount = 6);
std::string probe_to_csv(const std::vector<ProbeRow>& rows);

}  // namespace dyad
