#include "dyadlab/grid.hpp"

#include <json.hpp>

#include <random>

namespace dyad {

Grid1::Grid1(const AxisSpec& spec) : depth_(spec.depth), bits_(spec.shift_bits) {
    if (depth_ < 1 || depth_ > 20) throw std::invalid_argument("grid depth must be in [1,20]");
    if (bits_.empty()) bits_.assign(depth_, 0);
    if (int(bits_.size()) != depth_) throw std::invalid_argument("need one shift bit per generation");
    for (int b : bits_)
        if (b != 0 && b != 1) throw std::invalid_argument("shift bits must be 0 or 1");
    leaf_mask_ = (1 << depth_) - 1;
    // W_k = sum_{j=k+1..L} bit(j) 2^{L-j}, in leaf units
    shift_.assign(depth_ + 1, 0);
    for (int k = depth_ - 1; k >= 0; --k)
        shift_[k] = shift_[k + 1] + (std::uint32_t(bits_[k]) << (depth_ - 1 - k));
}

Iv Grid1::iv_of(int id) const {
    if (id < 0 || id >= interval_count()) throw std::out_of_range("interval id");
    int gen = 0;
    while ((2 << gen) - 1 <= id) ++gen;
    return Iv{gen, id - ((1 << gen) - 1)};
}

bool Grid1::contains(Iv outer, Iv inner) const {
    if (outer.gen > inner.gen) return false;
    return cell_at(outer.gen, start_leaf(inner)).pos == outer.pos;
}

std::array<Iv, 2> Grid1::halves(Iv q) const {
    if (q.gen >= depth_) throw std::invalid_argument("leaf cells have no children");
    int left = (2 * q.pos + bits_[q.gen]) & ((2 << q.gen) - 1);
    int right = (left + 1) & ((2 << q.gen) - 1);
    return {Iv{q.gen + 1, left}, Iv{q.gen + 1, right}};
}

std::vector<Iv> Grid1::children_at_depth(Iv q, int i) const {
    if (i < 0) throw std::invalid_argument("child depth must be nonnegative");
    if (q.gen + i > depth_) throw std::invalid_argument("child depth exceeds grid depth");
    std::vector<Iv> out;
    out.reserve(std::size_t(1) << i);
    int span = leaf_span(q.gen + i);
    int s0 = start_leaf(q);
    for (int s = 0; s < (1 << i); ++s) out.push_back(cell_at(q.gen + i, (s0 + s * span) & leaf_mask_));
    return out;
}

Iv Grid1::ancestor_at_depth(Iv q, int i) const {
    if (i < 0) throw std::invalid_argument("ancestor depth must be nonnegative");
    if (q.gen - i < 0) throw std::invalid_argument("ancestor coarser than generation 0");
    return cell_at(q.gen - i, start_leaf(q));
}

std::vector<Iv> Grid1::tower(int leaf) const {
    std::vector<Iv> out;
    out.reserve(depth_ + 1);
    for (int k = 0; k <= depth_; ++k) out.push_back(cell_at(k, leaf));
    return out;
}

ProductGrid::ProductGrid(const GridSpec& spec) : spec_(spec), g1_(spec.axis1) {
    if (spec.axes != 1 && spec.axes != 2) throw std::invalid_argument("axes must be 1 or 2");
    g2_ = Grid1(spec.axes == 2 ? spec.axis2 : spec.axis1);
}

std::vector<Rect> ProductGrid::children_at_depth(Rect r, int i1, int i2) const {
    auto c1 = g1_.children_at_depth(r.a, i1);
    auto c2 = g2_.children_at_depth(r.b, i2);
    std::vector<Rect> out;
    out.reserve(c1.size() * c2.size());
    for (const Iv& a : c1)
        for (const Iv& b : c2) out.push_back(Rect{a, b});
    return out;
}

Rect ProductGrid::ancestor_at_depth(Rect r, int i1, int i2) const {
    return Rect{g1_.ancestor_at_depth(r.a, i1), g2_.ancestor_at_depth(r.b, i2)};
}

std::vector<int> ProductGrid::cells_of(Rect r) const {
    std::vector<int> out;
    out.reserve(std::size_t(leaves(r)));
    int s1 = g1_.start_leaf(r.a), s2 = g2_.start_leaf(r.b);
    int m1 = n1() - 1, m2 = n2() - 1;
    for (int u = 0; u < g2_.leaf_span(r.b.gen); ++u) {
        int t2 = (s2 + u) & m2;
        for (int v = 0; v < g1_.leaf_span(r.a.gen); ++v) out.push_back(cell((s1 + v) & m1, t2));
    }
    return out;
}

std::vector<Rect> ProductGrid::all_rects() const {
    std::vector<Rect> out;
    out.reserve(std::size_t(rect_count()));
    for (int i = 0; i < g1_.interval_count(); ++i)
        for (int j = 0; j < g2_.interval_count(); ++j) out.push_back(Rect{g1_.iv_of(i), g2_.iv_of(j)});
    return out;
}

std::vector<Rect> ProductGrid::cancellative_rects() const {
    std::vector<Rect> out;
    out.reserve(std::size_t(g1_.cancellative_count()) * g2_.cancellative_count());
    for (int i = 0; i < g1_.cancellative_count(); ++i)
        for (int j = 0; j < g2_.cancellative_count(); ++j)
            out.push_back(Rect{g1_.iv_of(i), g2_.iv_of(j)});
    return out;
}

Rect ProductGrid::common_ancestor(const std::vector<Rect>& rs) const {
    if (rs.empty()) return top();
    Rect anc = rs.front();
    for (const Rect& r : rs) {
        while (!g1_.contains(anc.a, r.a)) anc.a = g1_.ancestor_at_depth(anc.a, 1);
        while (!g2_.contains(anc.b, r.b)) anc.b = g2_.ancestor_at_depth(anc.b, 1);
    }
    return anc;
}

GridSpec random_grid(std::uint64_t seed, int L, int axes) {
    if (L < 1) throw std::invalid_argument("grid depth must be >= 1");
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    auto draw_bits = [&rng, L] {
        std::vector<int> bits(L);
        for (int& b : bits) b = int(rng() >> 63);
        return bits;
    };
    GridSpec spec;
    spec.axes = axes;
    spec.axis1 = AxisSpec{L, draw_bits()};
    spec.axis2 = axes == 2 ? AxisSpec{L, draw_bits()} : spec.axis1;
    return spec;
}

std::string grid_spec_to_json(const GridSpec& spec) {
    nlohmann::json j;
    j["L"] = spec.axis1.depth;
    j["axes"] = spec.axes;
    j["shift_bits_axis1"] = spec.axis1.shift_bits;
    if (spec.axes == 2) {
        j["L2"] = spec.axis2.depth;
        j["shift_bits_axis2"] = spec.axis2.shift_bits;
    }
    return j.dump();
}

GridSpec grid_spec_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    GridSpec spec;
    spec.axes = j.at("axes").get<int>();
    spec.axis1.depth = j.at("L").get<int>();
    spec.axis1.shift_bits = j.value("shift_bits_axis1", std::vector<int>{});
    if (spec.axes == 2) {
        spec.axis2.depth = j.value("L2", spec.axis1.depth);
        spec.axis2.shift_bits = j.value("shift_bits_axis2", std::vector<int>{});
    }
    return spec;
}

}  // namespace dyad
