#include "dyadlab/runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

dyad::ProductGrid load_grid(const std::string& path) {
    return dyad::ProductGrid(dyad::grid_spec_from_json(slurp(path)));
}

}  // namespace

int main(int argc, char** argv) {
    using namespace dyad;
    CLI::App app{"matrix-weighted biparameter dyadic analysis lab"};
    app.require_subcommand(1);

    // ---- gen: corpus instances to JSON files ----
    auto* gen = app.add_subcommand("gen", "generate a corpus instance (grid + weight + field)");
    std::uint64_t seed = 1;
    int L = 4, d = 2, count = 1;
    double p = 2.0, amplitude = 0.6;
    std::string model = "random_log_field", out = ".";
    gen->add_option("--seed", seed);
    gen->add_option("--L", L);
    gen->add_option("--d", d);
    gen->add_option("--p", p);
    gen->add_option("--amplitude", amplitude);
    gen->add_option("--model", model)->check(CLI::IsMember({"constant", "scalar_power", "random_log_field"}));
    gen->add_option("--count", count);
    gen->add_option("--out", out);

    // ---- char: characteristics of a weight ----
    auto* chr = app.add_subcommand("char", "Ap characteristics of a weight");
    std::string grid_path, weight_path, weight2_path;
    chr->add_option("--grid", grid_path)->required();
    chr->add_option("--weight", weight_path)->required();
    chr->add_option("--weight2", weight2_path);
    chr->add_option("--p", p);

    // ---- apply: operator to a field ----
    auto* ap = app.add_subcommand("apply", "apply an operator JSON to a field JSON");
    std::string op_path, field_path, out_path = "out_field.json";
    ap->add_option("--grid", grid_path)->required();
    ap->add_option("--op", op_path)->required();
    ap->add_option("--field", field_path)->required();
    ap->add_option("--out", out_path);

    // ---- sparse: family + domination report ----
    auto* sp = app.add_subcommand("sparse", "sparse selection for the multiplier pairing");
    std::uint64_t sseed = 1;
    sp->add_option("--seed", sseed);
    sp->add_option("--L", L);
    sp->add_option("--d", d);
    sp->add_option("--p", p);
    sp->add_option("--amplitude", amplitude);

    // ---- verify: suite run ----
    auto* ver = app.add_subcommand("verify", "run inequality suites against baselines");
    std::string config_path;
    int jobs = 0;
    bool freeze = false;
    ver->add_option("--config", config_path)->required();
    ver->add_option("--jobs", jobs);
    ver->add_flag("--freeze-baselines", freeze);

    // ---- probe: open questions ----
    auto* pr = app.add_subcommand("probe", "vector-valued maximal function growth probe");
    int which = 1;
    pr->add_option("--which", which)->check(CLI::Range(1, 2));
    pr->add_option("--p", p);
    pr->add_option("--seed", seed);
    pr->add_option("--L", L);
    pr->add_option("--d", d);

    // ---- exponents ----
    auto* ex = app.add_subcommand("exponents", "exponent table for p");
    ex->add_option("--p", p)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            for (int i = 0; i < count; ++i) {
                CorpusSpec spec;
                spec.seed = seed;
                spec.L = L;
                spec.d = d;
                spec.p = p;
                spec.amplitude = amplitude;
                spec.model = model == "constant"       ? WeightModel::constant
                             : model == "scalar_power" ? WeightModel::scalar_power
                                                       : WeightModel::random_log_field;
                WeightInstance inst = make_weight(spec, std::uint64_t(i));
                Rng rng(seed * 31 + std::uint64_t(i));
                Field2 f = make_field(*inst.grid, d, rng);
                std::string stem = out + "/instance_" + std::to_string(i);
                std::ofstream(stem + "_grid.json") << grid_spec_to_json(inst.grid->spec());
                std::ofstream(stem + "_weight.json") << weight_to_json(inst.w);
                std::ofstream(stem + "_field.json") << field_to_json(f);
                std::cout << stem << " characteristic=" << inst.characteristic
                          << " regenerations=" << inst.regenerations << "\n";
            }
        } else if (*chr) {
            ProductGrid grid = load_grid(grid_path);
            Weight2 w = weight_from_json(slurp(weight_path), grid);
            nlohmann::json j;
            j["p"] = p;
            j["ap_integral"] = ap_characteristic(w, p);
            RectReducing rw(w, p);
            RectReducing rwc(w.conjugate(p), conjugate_exponent(p));
            j["ap_reducing"] = ap_reducing_form(rw, rwc);
            j["max_solver_slack"] = std::max(rw.max_slack(), rwc.max_slack());
            if (!weight2_path.empty()) {
                Weight2 v = weight_from_json(slurp(weight2_path), grid);
                j["ap_two_weight"] = ap_characteristic(w, v.conjugate(p), p);
            }
            std::cout << j.dump(1) << "\n";
        } else if (*ap) {
            ProductGrid grid = load_grid(grid_path);
            Field2 f = field_from_json(slurp(field_path), grid);
            nlohmann::json op = nlohmann::json::parse(slurp(op_path));
            std::string type = op.at("type").get<std::string>();
            Field2 outf(grid, f.dim());
            if (type == "multiplier") {
                MultiplierSymbol s(grid);
                for (const auto& e : op.at("sigma")) {
                    auto r = e.at("r").get<std::vector<int>>();
                    s.at(Rect{Iv{r[0], r[1]}, Iv{r[2], r[3]}}) = e.at("value").get<double>();
                }
                outf = apply(s, f);
            } else if (type == "shift") {
                auto ci = op.at("i").get<std::array<int, 2>>();
                auto cj = op.at("j").get<std::array<int, 2>>();
                ShiftKernel k(grid, ci, cj);
                auto rect_of = [](const std::vector<int>& v) {
                    return Rect{Iv{v[0], v[1]}, Iv{v[2], v[3]}};
                };
                for (const auto& e : op.at("coeffs"))
                    k.add(rect_of(e.at("r").get<std::vector<int>>()),
                          rect_of(e.at("p").get<std::vector<int>>()),
                          rect_of(e.at("q").get<std::vector<int>>()), e.at("a").get<double>());
                outf = apply(k, f);
            } else {
                throw std::runtime_error("unknown operator type: " + type);
            }
            std::ofstream(out_path) << field_to_json(outf);
            std::cout << "wrote " << out_path << "\n";
        } else if (*sp) {
            SuiteConfig cfg;
            cfg.seed = sseed;
            cfg.seeds = 1;
            cfg.L = L;
            cfg.d = d;
            cfg.ps = {p};
            cfg.amplitude = amplitude;
            Instance inst(cfg, sseed, p);
            Rng rng(sseed * 0x2545f491ULL + 25);
            MultiplierSymbol sym = make_multiplier(*inst.grid, rng, false);
            Spectrum2 sf = analyze(inst.f), sg = analyze(inst.g);
            ScalarField2 phi = inst.stilde_w_f(), psi = inst.stilde_wc_g();
            auto sel = biparameter_sparse_select(phi, psi, carrier_rects(sf, sg), Frac{1, 4});
            auto chk = check_weakly_sparse(sel.family);
            nlohmann::json j;
            j["delta"] = {sel.family.delta.num, sel.family.delta.den};
            j["c_used"] = sel.c_used;
            j["weakly_sparse"] = chk.ok;
            j["pairing"] = std::abs(pairing(apply(sym, inst.f), inst.g));
            j["sparse_form"] = sparse_form_eval(sel.family, phi, psi);
            nlohmann::json rects = nlohmann::json::array();
            for (std::size_t i = 0; i < sel.family.rects.size(); ++i) {
                const Rect& r = sel.family.rects[i];
                rects.push_back({{"r", {r.a.gen, r.a.pos, r.b.gen, r.b.pos}},
                                 {"witness_cells", sel.family.witnesses[i].cells()}});
            }
            j["rectangles"] = rects;
            std::cout << j.dump(1) << "\n";
        } else if (*ver) {
            RunConfig cfg = run_config_from_json(slurp(config_path));
            if (jobs > 0) cfg.suite.jobs = jobs;
            if (freeze) cfg.freeze = true;
            RunResult res = run(cfg);
            std::cout << "rows=" << res.rows << " failures=" << res.failures << "\n"
                      << "csv=" << res.csv_path << "\n";
            return res.exit_code;
        } else if (*pr) {
            auto rows = probe_open_question(which, p, seed, L, d, {0.0, 0.2, 0.4, 0.8, 1.2, 1.6});
            std::cout << probe_to_csv(rows);
        } else if (*ex) {
            ExponentTable t = exponent_table(p);
            nlohmann::json j;
            j["p"] = p;
            j["p_conjugate"] = boost::rational_cast<double>(t.p_conj);
            j["gamma"] = t.gamma();
            j["alpha"] = t.alpha();
            j["alpha1"] = t.alpha1();
            j["alpha2"] = t.alpha2();
            j["maximal_strong"] = boost::rational_cast<double>(t.maximal_strong);
            j["maximal_modified"] = boost::rational_cast<double>(t.maximal_modified);
            std::cout << j.dump(1) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
