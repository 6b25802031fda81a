#include "dyadlab/weight.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>

namespace dyad {

Eigen::ArrayXd interval_sums(const Grid1& g, const Eigen::ArrayXd& leaf) {
    Eigen::ArrayXd out(g.interval_count());
    const int L = g.depth();
    for (int t = 0; t < g.leaf_count(); ++t) out(Grid1::id_of(Iv{L, g.cell_at(L, t).pos})) = leaf(t);
    for (int k = L - 1; k >= 0; --k)
        for (int m = 0; m < (1 << k); ++m) {
            auto h = g.halves(Iv{k, m});
            out(Grid1::id_of(Iv{k, m})) = out(Grid1::id_of(h[0])) + out(Grid1::id_of(h[1]));
        }
    return out;
}

Eigen::ArrayXd rect_sums(const ProductGrid& g, const Eigen::ArrayXd& leaf) {
    const Grid1 &g1 = g.axis1(), &g2 = g.axis2();
    const int ic1 = g1.interval_count(), ic2 = g2.interval_count();
    // axis-1 sums per (interval, t2)
    Eigen::ArrayXXd mid(ic1, g.n2());
    for (int t2 = 0; t2 < g.n2(); ++t2)
        mid.col(t2) = interval_sums(g1, leaf.segment(t2 * g.n1(), g.n1()));
    Eigen::ArrayXd out(ic1 * ic2);
    for (int i = 0; i < ic1; ++i) {
        Eigen::ArrayXd col = interval_sums(g2, mid.row(i).transpose());
        out.segment(i * ic2, ic2) = col;
    }
    return out;
}

namespace {

long long key_of(double s) { return std::bit_cast<long long>(s); }

std::shared_ptr<const Eigen::MatrixXd> stack_powers(detail::PowerCache& cache,
                                                    const std::vector<Eigen::MatrixXd>& cells,
                                                    int d, double s) {
    std::lock_guard<std::mutex> lock(cache.mu);
    auto it = cache.stacks.find(key_of(s));
    if (it != cache.stacks.end()) return it->second;
    auto stack = std::make_shared<Eigen::MatrixXd>(int(cells.size()) * d, d);
    for (std::size_t c = 0; c < cells.size(); ++c)
        stack->middleRows(int(c) * d, d) = matrix_power(cells[c], s);
    cache.stacks.emplace(key_of(s), stack);
    return stack;
}

void check_cells(const std::vector<Eigen::MatrixXd>& cells) {
    for (const auto& m : cells) {
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff()))
            throw std::invalid_argument("weight cell is not symmetric");
        if (min_eigenvalue(m) <= kEigenvalueFloor)
            throw NearSingularError("weight cell breaches the eigenvalue floor");
    }
}

}  // namespace

Weight2::Weight2(const ProductGrid& g, int d)
    : grid_(&g), dim_(d), cells_(std::size_t(g.leaf_count()), Eigen::MatrixXd::Identity(d, d)) {}

Weight2 Weight2::constant(const ProductGrid& g, const Eigen::MatrixXd& m) {
    Weight2 w(g, int(m.rows()));
    for (auto& c : w.cells_) c = m;
    return w;
}

void Weight2::set(int cell, const Eigen::MatrixXd& m) {
    if (m.rows() != dim_ || m.cols() != dim_) throw std::invalid_argument("weight cell dimension mismatch");
    cells_[std::size_t(cell)] = 0.5 * (m + m.transpose());
    cache_.invalidate();
}

void Weight2::validate() const { check_cells(cells_); }

Weight2 Weight2::conjugate(double p) const {
    Weight2 w(*grid_, dim_);
    double s = -1.0 / (p - 1.0);
    for (std::size_t c = 0; c < cells_.size(); ++c) w.cells_[c] = matrix_power(cells_[c], s);
    return w;
}

std::shared_ptr<const Eigen::MatrixXd> Weight2::power_stack(double s) const {
    return stack_powers(*cache_.ptr, cells_, dim_, s);
}

Eigen::MatrixXd Weight2::power_at(int cell, double s) const { return matrix_power(at(cell), s); }

Weight1::Weight1(const Grid1& g, int d)
    : grid_(&g), dim_(d), cells_(std::size_t(g.leaf_count()), Eigen::MatrixXd::Identity(d, d)) {}

Weight1 Weight1::constant(const Grid1& g, const Eigen::MatrixXd& m) {
    Weight1 w(g, int(m.rows()));
    for (auto& c : w.cells_) c = m;
    return w;
}

void Weight1::set(int leaf, const Eigen::MatrixXd& m) {
    if (m.rows() != dim_ || m.cols() != dim_) throw std::invalid_argument("weight cell dimension mismatch");
    cells_[std::size_t(leaf)] = 0.5 * (m + m.transpose());
    cache_.invalidate();
}

void Weight1::validate() const { check_cells(cells_); }

Weight1 Weight1::conjugate(double p) const {
    Weight1 w(*grid_, dim_);
    double s = -1.0 / (p - 1.0);
    for (std::size_t c = 0; c < cells_.size(); ++c) w.cells_[c] = matrix_power(cells_[c], s);
    return w;
}

std::shared_ptr<const Eigen::MatrixXd> Weight1::power_stack(double s) const {
    return stack_powers(*cache_.ptr, cells_, dim_, s);
}

Eigen::MatrixXd Weight1::power_at(int leaf, double s) const { return matrix_power(at(leaf), s); }

double rho_norm(const Weight2& w, Rect e_set, double p, const Eigen::VectorXd& e) {
    auto cells = w.grid().cells_of(e_set);
    if (cells.empty()) throw std::invalid_argument("rho_norm over an empty set");
    auto stack = w.power_stack(1.0 / p);
    const int d = w.dim();
    double acc = 0;
    for (int c : cells) acc += pow_half((stack->middleRows(c * d, d) * e).squaredNorm(), p);
    return std::pow(acc / double(cells.size()), 1.0 / p);
}

double rho_norm(const Weight1& w, Iv e_set, double p, const Eigen::VectorXd& e) {
    auto stack = w.power_stack(1.0 / p);
    const int d = w.dim();
    double acc = 0;
    int span = w.grid().leaf_span(e_set.gen);
    for (int n = 0; n < span; ++n) {
        int c = w.grid().leaf_at(e_set, n);
        acc += pow_half((stack->middleRows(c * d, d) * e).squaredNorm(), p);
    }
    return std::pow(acc / double(span), 1.0 / p);
}

namespace {

// avg over y in `cells` of |A N_y|^{p'} where N is a power stack
double inner_average(const Eigen::MatrixXd& a, const Eigen::MatrixXd& nstack,
                     const std::vector<int>& cells, int d, double pprime) {
    double acc = 0;
    for (int y : cells) acc += pow_half(std::pow(spectral_norm(a * nstack.middleRows(y * d, d)), 2.0), pprime);
    return acc / double(cells.size());
}

}  // namespace

double averaging_constant(const Weight2& w, Rect e_set, double p) {
    const double pp = conjugate_exponent(p);
    auto pstack = w.power_stack(1.0 / p);
    auto nstack = w.power_stack(-1.0 / p);  // W'(y)^{1/p'} = W(y)^{-1/p}
    auto cells = w.grid().cells_of(e_set);
    const int d = w.dim();
    double acc = 0;
    for (int x : cells) {
        double inner = inner_average(pstack->middleRows(x * d, d), *nstack, cells, d, pp);
        acc += std::pow(inner, p / pp);
    }
    return acc / double(cells.size());
}

double averaging_constant(const Weight1& w, Iv e_set, double p) {
    const double pp = conjugate_exponent(p);
    auto pstack = w.power_stack(1.0 / p);
    auto nstack = w.power_stack(-1.0 / p);
    const int d = w.dim();
    std::vector<int> cells;
    for (int n = 0; n < w.grid().leaf_span(e_set.gen); ++n) cells.push_back(w.grid().leaf_at(e_set, n));
    double acc = 0;
    for (int x : cells) {
        double inner = inner_average(pstack->middleRows(x * d, d), *nstack, cells, d, pp);
        acc += std::pow(inner, p / pp);
    }
    return acc / double(cells.size());
}

namespace {

// sup over rectangles of avg_x (avg_y |P_x N_y|^{p'})^{p/p'}
double ap_sup_2(const ProductGrid& g, const Eigen::MatrixXd& pstack, const Eigen::MatrixXd& nstack,
                int d, double p) {
    const double pp = conjugate_exponent(p);
    const int ncells = g.leaf_count();
    Eigen::ArrayXd accum = Eigen::ArrayXd::Zero(g.rect_count());
    Eigen::ArrayXd row(ncells);
    for (int x = 0; x < ncells; ++x) {
        Eigen::MatrixXd px = pstack.middleRows(x * d, d);
        for (int y = 0; y < ncells; ++y) {
            double s = spectral_norm(px * nstack.middleRows(y * d, d));
            row(y) = pow_half(s * s, pp);
        }
        Eigen::ArrayXd sums = rect_sums(g, row);
        for (Iv a : g.axis1().tower(g.cell_t1(x)))
            for (Iv b : g.axis2().tower(g.cell_t2(x))) {
                Rect r{a, b};
                int id = g.rect_id(r);
                accum(id) += std::pow(sums(id) / double(g.leaves(r)), p / pp);
            }
    }
    double best = 0;
    for (const Rect& r : g.all_rects()) {
        int id = g.rect_id(r);
        best = std::max(best, accum(id) / double(g.leaves(r)));
    }
    return best;
}

double ap_sup_1(const Grid1& g, const Eigen::MatrixXd& pstack, const Eigen::MatrixXd& nstack,
                int d, double p) {
    const double pp = conjugate_exponent(p);
    const int ncells = g.leaf_count();
    Eigen::ArrayXd accum = Eigen::ArrayXd::Zero(g.interval_count());
    Eigen::ArrayXd row(ncells);
    for (int x = 0; x < ncells; ++x) {
        Eigen::MatrixXd px = pstack.middleRows(x * d, d);
        for (int y = 0; y < ncells; ++y) {
            double s = spectral_norm(px * nstack.middleRows(y * d, d));
            row(y) = pow_half(s * s, pp);
        }
        Eigen::ArrayXd sums = interval_sums(g, row);
        for (Iv q : g.tower(x)) {
            int id = Grid1::id_of(q);
            accum(id) += std::pow(sums(id) / double(g.leaf_span(q.gen)), p / pp);
        }
    }
    double best = 0;
    for (int id = 0; id < g.interval_count(); ++id) {
        Iv q = g.iv_of(id);
        best = std::max(best, accum(id) / double(g.leaf_span(q.gen)));
    }
    return best;
}

}  // namespace

double ap_characteristic(const Weight2& w, double p) {
    return ap_sup_2(w.grid(), *w.power_stack(1.0 / p), *w.power_stack(-1.0 / p), w.dim(), p);
}

double ap_characteristic(const Weight2& w, const Weight2& v, double p) {
    const double pp = conjugate_exponent(p);
    return ap_sup_2(w.grid(), *w.power_stack(1.0 / p), *v.power_stack(1.0 / pp), w.dim(), p);
}

double ap_characteristic(const Weight1& w, double p) {
    return ap_sup_1(w.grid(), *w.power_stack(1.0 / p), *w.power_stack(-1.0 / p), w.dim(), p);
}

double ap_characteristic(const Weight1& w, const Weight1& v, double p) {
    const double pp = conjugate_exponent(p);
    return ap_sup_1(w.grid(), *w.power_stack(1.0 / p), *v.power_stack(1.0 / pp), w.dim(), p);
}

double ap_local(const Weight2& w, Rect r, double p) {
    const double pp = conjugate_exponent(p);
    auto pstack = w.power_stack(1.0 / p);
    auto nstack = w.power_stack(-1.0 / p);
    auto cells = w.grid().cells_of(r);
    const int d = w.dim();
    double acc = 0;
    for (int x : cells)
        acc += std::pow(inner_average(pstack->middleRows(x * d, d), *nstack, cells, d, pp), p / pp);
    return acc / double(cells.size());
}

Weight1 slice(const Weight2& w, int axis, int other_leaf) {
    const ProductGrid& g = w.grid();
    if (axis == 1) {
        Weight1 s(g.axis1(), w.dim());
        for (int t1 = 0; t1 < g.n1(); ++t1) s.set(t1, w.at(g.cell(t1, other_leaf)));
        return s;
    }
    if (axis == 2) {
        Weight1 s(g.axis2(), w.dim());
        for (int t2 = 0; t2 < g.n2(); ++t2) s.set(t2, w.at(g.cell(other_leaf, t2)));
        return s;
    }
    throw std::invalid_argument("axis must be 1 or 2");
}

ReverseHolderReport reverse_holder_check(const Weight2& w, double p, double delta) {
    if (w.dim() != 1) throw std::invalid_argument("reverse_holder_check needs a scalar weight");
    ReverseHolderReport rep;
    rep.characteristic = ap_characteristic(w, p);
    rep.delta_max = 1.0 / (16.0 * rep.characteristic);  // 2^{max(m,n)+3} with m=n=1
    rep.admissible = delta > 0 && delta < rep.delta_max;
    if (!rep.admissible) return rep;
    const ProductGrid& g = w.grid();
    Eigen::ArrayXd wv(g.leaf_count()), wd(g.leaf_count());
    for (int c = 0; c < g.leaf_count(); ++c) {
        wv(c) = w.at(c)(0, 0);
        wd(c) = std::pow(wv(c), 1.0 + delta);
    }
    Eigen::ArrayXd s1 = rect_sums(g, wv), s2 = rect_sums(g, wd);
    rep.worst_ratio = 0;
    for (const Rect& r : g.all_rects()) {
        int id = g.rect_id(r);
        double n = double(g.leaves(r));
        double lhs = s2(id) / n;
        double rhs = 4.0 * std::pow(s1(id) / n, 1.0 + delta);
        rep.worst_ratio = std::max(rep.worst_ratio, lhs / rhs);
    }
    rep.holds = rep.worst_ratio <= 1.0 + 1e-12;
    return rep;
}

std::string weight_to_json(const Weight2& w) {
    nlohmann::json j;
    j["dim"] = w.dim();
    std::vector<std::vector<double>> cells;
    for (int c = 0; c < w.grid().leaf_count(); ++c) {
        std::vector<double> m;
        for (int r = 0; r < w.dim(); ++r)
            for (int col = 0; col < w.dim(); ++col) m.push_back(w.at(c)(r, col));
        cells.push_back(std::move(m));
    }
    j["values"] = cells;  // cell-major, row-major matrices
    return j.dump();
}

Weight2 weight_from_json(const std::string& text, const ProductGrid& g) {
    nlohmann::json j = nlohmann::json::parse(text);
    int d = j.at("dim").get<int>();
    auto cells = j.at("values").get<std::vector<std::vector<double>>>();
    if (int(cells.size()) != g.leaf_count()) throw std::invalid_argument("weight size does not match grid");
    Weight2 w(g, d);
    for (int c = 0; c < g.leaf_count(); ++c) {
        Eigen::MatrixXd m(d, d);
        for (int r = 0; r < d; ++r)
            for (int col = 0; col < d; ++col) m(r, col) = cells[std::size_t(c)][std::size_t(r * d + col)];
        w.set(c, m);
    }
    w.validate();
    return w;
}

}  // namespace dyad
