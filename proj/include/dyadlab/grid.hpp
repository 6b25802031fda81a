#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyad {

// One axis of a dyadic grid on the unit torus [0,1), generations 0..L.
// Generation k is a partition into 2^k half-open arcs of length 2^-k,
// shifted by w^k = sum_{j>k} bit(j) 2^-j (truncated at L, so leaves are
// the standard leaves and every cell is a contiguous run of leaves mod 2^L).
struct AxisSpec {
    int depth = 1;
    std::vector<int> shift_bits;  // bit(1..L), each 0 or 1; empty means all zero

    static AxisSpec standard(int L) { return AxisSpec{L, {}}; }
};

struct GridSpec {
    int axes = 2;  // 1 or 2
    AxisSpec axis1, axis2;
};

// Interval handle: generation + position index within that generation.
struct Iv {
    int gen = 0;
    int pos = 0;
    friend bool operator==(const Iv&, const Iv&) = default;
    friend auto operator<=>(const Iv&, const Iv&) = default;
};

class Grid1 {
  public:
    Grid1() : Grid1(AxisSpec{1, {}}) {}
    explicit Grid1(const AxisSpec& spec);

    int depth() const { return depth_; }
    int leaf_count() const { return 1 << depth_; }
    const std::vector<int>& shift_bits() const { return bits_; }

    // Linear interval ids: id = 2^gen - 1 + pos. Ids [0, 2^L-1) are the
    // cancellative generations 0..L-1; leaves come last.
    int interval_count() const { return (1 << (depth_ + 1)) - 1; }
    int cancellative_count() const { return (1 << depth_) - 1; }
    static int id_of(Iv q) { return (1 << q.gen) - 1 + q.pos; }
    Iv iv_of(int id) const;

    double measure(Iv q) const { return 1.0 / double(1 << q.gen); }
    int leaf_span(int gen) const { return 1 << (depth_ - gen); }
    // first leaf of the realized arc
    int start_leaf(Iv q) const {
        return int((std::uint32_t(q.pos) << (depth_ - q.gen)) + shift_[q.gen]) & leaf_mask_;
    }
    // n-th leaf of the arc, n in [0, leaf_span)
    int leaf_at(Iv q, int n) const { return (start_leaf(q) + n) & leaf_mask_; }
    // cell of generation `gen` containing the given leaf
    Iv cell_at(int gen, int leaf) const {
        return Iv{gen, int((std::uint32_t(leaf - shift_[gen])) & leaf_mask_) >> (depth_ - gen)};
    }
    bool contains(Iv q, int leaf) const { return cell_at(q.gen, leaf).pos == q.pos; }
    bool contains(Iv outer, Iv inner) const;

    // left/right halves in realized order (left starts at start_leaf)
    std::array<Iv, 2> halves(Iv q) const;
    std::vector<Iv> children_at_depth(Iv q, int i) const;
    Iv ancestor_at_depth(Iv q, int i) const;
    // all intervals containing the leaf, one per generation 0..L
    std::vector<Iv> tower(int leaf) const;

    friend bool operator==(const Grid1& a, const Grid1& b) {
        return a.depth_ == b.depth_ && a.bits_ == b.bits_;
    }

  private:
    int depth_;
    int leaf_mask_;
    std::vector<int> bits_;             // bit(1..L)
    std::vector<std::uint32_t> shift_;  // shift_[k] = W_k in leaf units, k = 0..L
};

// Rectangle: product of one interval per axis.
struct Rect {
    Iv a, b;
    friend bool operator==(const Rect&, const Rect&) = default;
    friend auto operator<=>(const Rect&, const Rect&) = default;
};

class ProductGrid {
  public:
    ProductGrid() = default;
    explicit ProductGrid(const GridSpec& spec);

    const Grid1& axis1() const { return g1_; }
    const Grid1& axis2() const { return g2_; }
    int depth1() const { return g1_.depth(); }
    int depth2() const { return g2_.depth(); }
    int n1() const { return g1_.leaf_count(); }
    int n2() const { return g2_.leaf_count(); }
    int leaf_count() const { return n1() * n2(); }
    double leaf_measure() const { return 1.0 / double(leaf_count()); }

    int cell(int t1, int t2) const { return t2 * n1() + t1; }
    int cell_t1(int c) const { return c % n1(); }
    int cell_t2(int c) const { return c / n1(); }

    int rect_count() const { return g1_.interval_count() * g2_.interval_count(); }
    int rect_id(Rect r) const { return Grid1::id_of(r.a) * g2_.interval_count() + Grid1::id_of(r.b); }
    Rect rect_of(int id) const {
        return Rect{g1_.iv_of(id / g2_.interval_count()), g2_.iv_of(id % g2_.interval_count())};
    }
    Rect top() const { return Rect{Iv{0, 0}, Iv{0, 0}}; }

    double measure(Rect r) const { return g1_.measure(r.a) * g2_.measure(r.b); }
    long leaves(Rect r) const { return long(g1_.leaf_span(r.a.gen)) * g2_.leaf_span(r.b.gen); }
    bool contains(Rect outer, Rect inner) const {
        return g1_.contains(outer.a, inner.a) && g2_.contains(outer.b, inner.b);
    }
    bool contains(Rect r, int cellid) const {
        return g1_.contains(r.a, cell_t1(cellid)) && g2_.contains(r.b, cell_t2(cellid));
    }

    std::vector<Rect> children_at_depth(Rect r, int i1, int i2) const;
    Rect ancestor_at_depth(Rect r, int i1, int i2) const;
    std::vector<int> cells_of(Rect r) const;
    // all rectangles of the product grid (every generation pair)
    std::vector<Rect> all_rects() const;
    // rectangles with both generations < depth (carry a bicancellative Haar function)
    std::vector<Rect> cancellative_rects() const;
    // minimal grid rectangle containing all the given ones
    Rect common_ancestor(const std::vector<Rect>& rs) const;

    const GridSpec& spec() const { return spec_; }

  private:
    GridSpec spec_;
    Grid1 g1_, g2_;
};

// i.i.d. fair shift bits from a deterministic seeded generator
GridSpec random_grid(std::uint64_t seed, int L, int axes);

std::string grid_spec_to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const std::string& text);

}  // namespace dyad
