#pragma once

#include "dyadlab/operators.hpp"

#include <memory>
#include <random>

namespace dyad {

// Deterministic RNG: all draws flow through explicit algorithms on top of a
// seeded mt19937_64, so streams are reproducible across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ^ 0x6a09e667f3bcc909ULL) {}
    std::uint64_t raw() { return state_(); }
    double uniform() { return double(raw() >> 11) * 0x1p-53; }
    double normal();
    int uniform_int(int n) { return int(raw() % std::uint64_t(n)); }

  private:
    std::mt19937_64 state_;
    bool have_spare_ = false;
    double spare_ = 0;
};

enum class WeightModel { constant, scalar_power, random_log_field };

struct CorpusSpec {
    std::uint64_t seed = 1;
    int L = 4;
    int d = 2;
    double p = 2.0;
    WeightModel model = WeightModel::random_log_field;
    double amplitude = 0.6;
    int count = 1;
};

struct WeightInstance {
    std::shared_ptr<ProductGrid> grid;
    Weight2 w;
    double characteristic = 1;  // integral-form [W]_{Ap,D} at spec.p
    int regenerations = 0;      // amplitude halvings after floor breaches
};

WeightInstance make_weight(const CorpusSpec& spec, std::uint64_t index);
// draw a weight onto an existing grid; `regens` counts amplitude halvings
Weight2 make_weight_values(const ProductGrid& g, const CorpusSpec& spec, std::uint64_t stream,
                           int* regens = nullptr);
Weight1 make_weight1(const Grid1& g, int d, double amplitude, Rng& rng);

// random field from seeded Haar coefficients; bicancellative unless asked not to
Field2 make_field(const ProductGrid& g, int d, Rng& rng, bool bicancellative = true);
Field1 make_field1(const Grid1& g, int d, Rng& rng);

MultiplierSymbol make_multiplier(const ProductGrid& g, Rng& rng, bool pm_one);
ShiftKernel make_shift(const ProductGrid& g, std::array<int, 2> i, std::array<int, 2> j, Rng& rng);
// symbol drawn then rescaled so the computed BMO norm equals target exactly
ParaproductSymbol make_paraproduct(const ProductGrid& g, ParaKind kind, Rng& rng,
                                   double target_bmo = 1.0);
PartialParaproduct make_partial_paraproduct(const ProductGrid& g, int axis, int i, int j, Rng& rng);

Eigen::MatrixXd random_spd(int d, double spread, Rng& rng);

}  // namespace dyad
