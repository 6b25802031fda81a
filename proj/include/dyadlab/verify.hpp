#pragma once

#include "dyadlab/corpus.hpp"
#include "dyadlab/exponents.hpp"
#include "dyadlab/oracle.hpp"
#include "dyadlab/sparse.hpp"
#include "dyadlab/square.hpp"

#include <map>
#include <optional>

namespace dyad {

struct SuiteConfig {
    std::uint64_t seed = 1;
    int seeds = 50;
    int L = 4;
    int d = 2;
    std::vector<double> ps = {1.5, 2.0, 3.0};
    double amplitude = 0.6;
    WeightModel model = WeightModel::random_log_field;
    std::vector<std::string> suites;  // inequality ids; empty = every known id
    std::string baseline_path;
    int jobs = 1;
};

struct BoundReport {
    std::string id;
    std::uint64_t seed = 0;
    int L = 0, d = 0;
    double p = 0;
    double lhs = 0, rhs_core = 0, characteristic = 0, ratio = 0, baseline = 0;
    bool pass = true;
};

using Baselines = std::map<std::string, double>;

std::string baseline_key(const std::string& id, double p, int d);
Baselines load_baselines(const std::string& path);
void save_baselines(const Baselines& b, const std::string& path);
Baselines freeze_baselines(const std::vector<BoundReport>& reports, double headroom = 0.2);

std::vector<std::string> known_inequalities();

// Shared per-(seed, p) instance: weights, fields, operators, reducing sets.
// Reducing sets are built lazily, once each.
class Instance {
  public:
    Instance(const SuiteConfig& cfg, std::uint64_t seed, double p);

    const SuiteConfig& cfg;
    std::uint64_t seed;
    double p, pc;  // exponent and conjugate

    std::shared_ptr<ProductGrid> grid;
    Weight2 w, wconj, u, uconj;
    double char_w = 1, char_u = 1, char_wu = 1;  // [W], [U], [W,U'] integral forms
    Field2 f, g;

    const RectReducing& red_w();       // exponent p
    const RectReducing& red_wconj();   // exponent p'
    const RectReducing& red_u();       // exponent p
    const SlicedReducing& slices1();   // W, axis 1
    const SlicedReducing& slices2();   // W, axis 2

    ScalarField2 stilde_w_f();   // S~_{D,W} f, cached
    ScalarField2 stilde_wc_g();  // S~_{D,W'} g

    // one-parameter companion instance (axis-1 grid)
    const Weight1& w1();
    const Field1& f1();
    double char_w1();
    const IntervalReducing& red_w1();

  private:
    std::optional<RectReducing> red_w_, red_wconj_, red_u_;
    std::optional<SlicedReducing> slices1_, slices2_;
    std::optional<ScalarField2> stilde_w_f_, stilde_wc_g_;
    std::optional<Weight1> w1_;
    std::optional<Field1> f1_;
    std::optional<double> char_w1_;
    std::optional<IntervalReducing> red_w1_;
};

// every report the id produces on this instance (empty if id does not apply at p)
std::vector<BoundReport> verify_inequality(const std::string& id, Instance& inst,
                                           const Baselines* baselines);

std::vector<BoundReport> run_suites(const SuiteConfig& cfg, const Baselines* baselines);

}  // namespace dyad
