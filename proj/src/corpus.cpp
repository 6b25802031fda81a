#include "dyadlab/corpus.hpp"

#include <cmath>

namespace dyad {

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    have_spare_ = true;
    spare_ = r * std::sin(2.0 * M_PI * u2);
    return r * std::cos(2.0 * M_PI * u2);
}

namespace {

Eigen::MatrixXd matrix_exp_sym(const Eigen::MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (s + s.transpose()));
    Eigen::VectorXd ev = es.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) ev(i) = std::exp(ev(i));
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// scalar field from seeded Haar coefficients with amplitude control
Eigen::ArrayXd log_entry_field(const ProductGrid& g, double amplitude, Rng& rng) {
    Spectrum2 s;
    s.grid = &g;
    const int nc1 = g.axis1().cancellative_count(), nc2 = g.axis2().cancellative_count();
    s.c00 = Eigen::MatrixXd::Zero(1, nc1 * nc2);
    s.c01 = Eigen::MatrixXd::Zero(1, nc1);
    s.c10 = Eigen::MatrixXd::Zero(1, nc2);
    s.c11 = Eigen::VectorXd::Zero(1);
    for (const Rect& r : g.cancellative_rects()) {
        double scale = amplitude * std::sqrt(g.measure(r)) *
                       std::pow(2.0, -0.5 * (r.a.gen + r.b.gen));
        s.c00(0, s.col(r)) = scale * rng.normal();
    }
    return synthesize(s).v.row(0).array();
}

}  // namespace

Eigen::MatrixXd random_spd(int d, double spread, Rng& rng) {
    Eigen::MatrixXd s(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= i; ++j) {
            double v = spread * rng.normal();
            s(i, j) = v;
            s(j, i) = v;
        }
    return matrix_exp_sym(s);
}

Weight2 make_weight_values(const ProductGrid& g, const CorpusSpec& spec, std::uint64_t stream,
                           int* regens) {
    double amplitude = spec.amplitude;
    for (;;) {
        Rng rng(stream);
        Weight2 w(g, spec.d);
        switch (spec.model) {
            case WeightModel::constant: {
                Eigen::MatrixXd m = amplitude == 0 ? Eigen::MatrixXd::Identity(spec.d, spec.d)
                                                   : random_spd(spec.d, amplitude, rng);
                w = Weight2::constant(g, m);
                break;
            }
            case WeightModel::scalar_power: {
                // torus power weight (dist to 0)^a per axis, times the identity
                double a = amplitude * 0.9 * std::min(spec.p - 1.0, 1.0);
                for (int c = 0; c < g.leaf_count(); ++c) {
                    double u = (g.cell_t1(c) + 0.5) / double(g.n1());
                    double v = (g.cell_t2(c) + 0.5) / double(g.n2());
                    double du = std::min(u, 1.0 - u), dv = std::min(v, 1.0 - v);
                    w.set(c, std::pow(du, a) * std::pow(dv, a) *
                                 Eigen::MatrixXd::Identity(spec.d, spec.d));
                }
                break;
            }
            case WeightModel::random_log_field: {
                std::vector<Eigen::ArrayXd> entries;
                for (int i = 0; i < spec.d; ++i)
                    for (int j = 0; j <= i; ++j) entries.push_back(log_entry_field(g, amplitude, rng));
                for (int c = 0; c < g.leaf_count(); ++c) {
                    Eigen::MatrixXd s(spec.d, spec.d);
                    int k = 0;
                    for (int i = 0; i < spec.d; ++i)
                        for (int j = 0; j <= i; ++j) {
                            s(i, j) = entries[std::size_t(k)](c);
                            s(j, i) = s(i, j);
                            ++k;
                        }
                    w.set(c, matrix_exp_sym(s));
                }
                break;
            }
        }
        try {
            w.validate();
        } catch (const NearSingularError&) {
            amplitude *= 0.5;  // regenerate with halved amplitude
            if (regens) ++(*regens);
            continue;
        }
        return w;
    }
}

WeightInstance make_weight(const CorpusSpec& spec, std::uint64_t index) {
    WeightInstance inst;
    GridSpec gs = random_grid(spec.seed * 0x51ed2701 + index, spec.L, 2);
    inst.grid = std::make_shared<ProductGrid>(gs);
    inst.w = make_weight_values(*inst.grid, spec, spec.seed * 0x9d2c5680 + 0x3779 * index,
                                &inst.regenerations);
    inst.characteristic = ap_characteristic(inst.w, spec.p);
    return inst;
}

Weight1 make_weight1(const Grid1& g, int d, double amplitude, Rng& rng) {
    // per-interval Haar coefficients for each symmetric entry
    std::vector<Eigen::ArrayXd> entries;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= i; ++j) {
            Spectrum1 s;
            s.grid = &g;
            s.coeff = Eigen::MatrixXd::Zero(1, g.cancellative_count());
            s.mean = Eigen::VectorXd::Zero(1);
            for (int id = 0; id < g.cancellative_count(); ++id) {
                Iv q = g.iv_of(id);
                s.coeff(0, id) = amplitude * std::sqrt(g.measure(q)) *
                                 std::pow(2.0, -0.5 * q.gen) * rng.normal();
            }
            entries.push_back(synthesize(s).v.row(0).array());
        }
    Weight1 w(g, d);
    for (int c = 0; c < g.leaf_count(); ++c) {
        Eigen::MatrixXd s(d, d);
        int k = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j <= i; ++j) {
                s(i, j) = entries[std::size_t(k)](c);
                s(j, i) = s(i, j);
                ++k;
            }
        w.set(c, matrix_exp_sym(s));
    }
    return w;
}

Field2 make_field(const ProductGrid& g, int d, Rng& rng, bool bicancellative) {
    Spectrum2 s;
    s.grid = &g;
    const int nc1 = g.axis1().cancellative_count(), nc2 = g.axis2().cancellative_count();
    s.c00 = Eigen::MatrixXd::Zero(d, nc1 * nc2);
    s.c01 = Eigen::MatrixXd::Zero(d, nc1);
    s.c10 = Eigen::MatrixXd::Zero(d, nc2);
    s.c11 = Eigen::VectorXd::Zero(d);
    for (const Rect& r : g.cancellative_rects()) {
        double scale = std::sqrt(g.measure(r)) * std::pow(2.0, -0.25 * (r.a.gen + r.b.gen));
        for (int k = 0; k < d; ++k) s.c00(k, s.col(r)) = scale * rng.normal();
    }
    if (!bicancellative) {
        for (int c = 0; c < nc1; ++c)
            for (int k = 0; k < d; ++k) s.c01(k, c) = 0.25 * rng.normal();
        for (int c = 0; c < nc2; ++c)
            for (int k = 0; k < d; ++k) s.c10(k, c) = 0.25 * rng.normal();
        for (int k = 0; k < d; ++k) s.c11(k) = rng.normal();
    }
    return synthesize(s);
}

Field1 make_field1(const Grid1& g, int d, Rng& rng) {
    Spectrum1 s;
    s.grid = &g;
    s.coeff = Eigen::MatrixXd::Zero(d, g.cancellative_count());
    s.mean = Eigen::VectorXd::Zero(d);
    for (int id = 0; id < g.cancellative_count(); ++id) {
        Iv q = g.iv_of(id);
        double scale = std::sqrt(g.measure(q)) * std::pow(2.0, -0.25 * q.gen);
        for (int k = 0; k < d; ++k) s.coeff(k, id) = scale * rng.normal();
    }
    return synthesize(s);
}

MultiplierSymbol make_multiplier(const ProductGrid& g, Rng& rng, bool pm_one) {
    MultiplierSymbol s(g);
    for (int c = 0; c < s.sigma.size(); ++c)
        s.sigma(c) = pm_one ? (rng.raw() & 1 ? 1.0 : -1.0) : 2.0 * rng.uniform() - 1.0;
    return s;
}

ShiftKernel make_shift(const ProductGrid& g, std::array<int, 2> i, std::array<int, 2> j, Rng& rng) {
    ShiftKernel k(g, i, j);
    const Grid1 &g1 = g.axis1(), &g2 = g.axis2();
    double bound = k.coefficient_bound();
    int max1 = std::min(g1.depth() - 1 - std::max(i[0], j[0]), g1.depth() - 1);
    int max2 = std::min(g2.depth() - 1 - std::max(i[1], j[1]), g2.depth() - 1);
    for (int k1 = 0; k1 <= max1; ++k1)
        for (int m1 = 0; m1 < (1 << k1); ++m1)
            for (int k2 = 0; k2 <= max2; ++k2)
                for (int m2 = 0; m2 < (1 << k2); ++m2) {
                    Rect r{Iv{k1, m1}, Iv{k2, m2}};
                    for (const Rect& p : g.children_at_depth(r, i[0], i[1]))
                        for (const Rect& q : g.children_at_depth(r, j[0], j[1]))
                            k.add(r, p, q, bound * (2.0 * rng.uniform() - 1.0));
                }
    return k;
}

ParaproductSymbol make_paraproduct(const ProductGrid& g, ParaKind kind, Rng& rng,
                                   double target_bmo) {
    ParaproductSymbol s;
    s.kind = kind;
    s.a.grid = &g;
    const int nc1 = g.axis1().cancellative_count(), nc2 = g.axis2().cancellative_count();
    s.a.c00 = Eigen::MatrixXd::Zero(1, nc1 * nc2);
    s.a.c01 = Eigen::MatrixXd::Zero(1, nc1);
    s.a.c10 = Eigen::MatrixXd::Zero(1, nc2);
    s.a.c11 = Eigen::VectorXd::Zero(1);
    auto rects = g.cancellative_rects();
    int carriers = std::min<int>(10, int(rects.size()));
    for (int n = 0; n < carriers; ++n) {
        const Rect& r = rects[std::size_t(rng.uniform_int(int(rects.size())))];
        s.a.c00(0, s.a.col(r)) = std::sqrt(g.measure(r)) * rng.normal();
    }
    BmoResult bmo = bmo_prod_norm(s.a);
    if (bmo.value == 0) {
        s.a.c00(0, 0) = std::sqrt(g.measure(rects.front()));
        bmo = bmo_prod_norm(s.a);
    }
    s.a.c00 *= target_bmo / bmo.value;
    s.bmo = target_bmo;
    return s;
}

PartialParaproduct make_partial_paraproduct(const ProductGrid& g, int axis, int i, int j,
                                            Rng& rng) {
    PartialParaproduct s(g, axis, i, j);
    const Grid1& ga = axis == 1 ? g.axis1() : g.axis2();
    const Grid1& gb = axis == 1 ? g.axis2() : g.axis1();
    double target = std::pow(2.0, -0.5 * (i + j));
    int maxgen = ga.depth() - 1 - std::max(i, j);
    for (int k1 = 0; k1 <= maxgen; ++k1)
        for (int m1 = 0; m1 < (1 << k1); ++m1) {
            Iv r1{k1, m1};
            for (const Iv& p1 : ga.children_at_depth(r1, i))
                for (const Iv& q1 : ga.children_at_depth(r1, j)) {
                    Eigen::ArrayXd coeffs = Eigen::ArrayXd::Zero(gb.cancellative_count());
                    for (int n = 0; n < 4; ++n) {
                        int id = rng.uniform_int(gb.cancellative_count());
                        coeffs(id) = std::sqrt(gb.measure(gb.iv_of(id))) * rng.normal();
                    }
                    double norm = bmo_norm(coeffs, gb);
                    if (norm > 0) coeffs *= target / norm;
                    s.add(r1, p1, q1, coeffs);
                }
        }
    return s;
}

}  // namespace dyad
