#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyadlab/grid.hpp"

#include <set>

using namespace dyad;

TEST_CASE("standard grid generations") {
    Grid1 g(AxisSpec::standard(1));
    CHECK(g.leaf_count() == 2);
    // generation 1 = {[0,1/2), [1/2,1)}
    CHECK(g.start_leaf(Iv{1, 0}) == 0);
    CHECK(g.start_leaf(Iv{1, 1}) == 1);
    CHECK(g.measure(Iv{1, 0}) == 0.5);
    CHECK(g.measure(Iv{0, 0}) == 1.0);
}

TEST_CASE("shifted grid: L=2, bits (0,1) shifts generation 1 by 1/4") {
    // w^1 = sum_{j>1} bit(j) 2^-j = 2^-2 = 0.25
    Grid1 g(AxisSpec{2, {0, 1}});
    // generation-1 cell 0 realizes [0.25, 0.75): starts at leaf 1 of 4
    CHECK(g.start_leaf(Iv{1, 0}) == 1);
    CHECK(g.leaf_at(Iv{1, 0}, 1) == 2);
    // cell 1 wraps: leaves 3, 0
    CHECK(g.start_leaf(Iv{1, 1}) == 3);
    CHECK(g.leaf_at(Iv{1, 1}, 1) == 0);
    // leaves are unshifted (w^L = 0)
    for (int t = 0; t < 4; ++t) CHECK(g.start_leaf(Iv{2, g.cell_at(2, t).pos}) == t);
}

TEST_CASE("every generation partitions the torus") {
    for (std::uint64_t seed : {0ULL, 1ULL, 7ULL}) {
        GridSpec spec = random_grid(seed, 4, 2);
        ProductGrid pg(spec);
        const Grid1& g = pg.axis1();
        for (int k = 0; k <= g.depth(); ++k) {
            std::set<int> covered;
            long measure_num = 0;  // in leaf units
            for (int m = 0; m < (1 << k); ++m) {
                Iv q{k, m};
                for (int n = 0; n < g.leaf_span(k); ++n) covered.insert(g.leaf_at(q, n));
                measure_num += g.leaf_span(k);
            }
            CHECK(int(covered.size()) == g.leaf_count());
            CHECK(measure_num == g.leaf_count());  // measures sum to exactly 1
        }
    }
}

TEST_CASE("nesting: each generation-(k+1) cell lies in exactly one parent") {
    GridSpec spec = random_grid(3, 4, 1);
    Grid1 g(spec.axis1);
    for (int k = 0; k + 1 <= g.depth(); ++k)
        for (int m = 0; m < (2 << k); ++m) {
            Iv child{k + 1, m};
            int parents = 0;
            for (int mm = 0; mm < (1 << k); ++mm)
                if (g.contains(Iv{k, mm}, child)) ++parents;
            CHECK(parents == 1);
            CHECK(g.contains(g.ancestor_at_depth(child, 1), child));
        }
}

TEST_CASE("children_at_depth counts and coverage") {
    GridSpec spec = random_grid(11, 3, 2);
    ProductGrid g(spec);
    Iv q{1, 1};
    CHECK(g.axis1().children_at_depth(q, 0) == std::vector<Iv>{q});
    auto ch = g.axis1().children_at_depth(q, 2);
    CHECK(ch.size() == 4);
    std::set<int> leaves;
    for (const Iv& c : ch) {
        CHECK(g.axis1().measure(c) == g.axis1().measure(q) / 4);
        for (int n = 0; n < g.axis1().leaf_span(c.gen); ++n) leaves.insert(g.axis1().leaf_at(c, n));
    }
    CHECK(int(leaves.size()) == g.axis1().leaf_span(q.gen));

    // rectangle with depths (1,2) has 2^{1+2} = 8 children
    Rect r{Iv{0, 0}, Iv{0, 0}};
    CHECK(g.children_at_depth(r, 1, 2).size() == 8);
}

TEST_CASE("ancestor examples and round trip") {
    Grid1 g(AxisSpec::standard(2));
    CHECK(g.ancestor_at_depth(Iv{2, 1}, 0) == Iv{2, 1});
    // [1/4,1/2) at L=2 has generation-1 ancestor [0,1/2)
    CHECK(g.ancestor_at_depth(Iv{2, 1}, 1) == Iv{1, 0});

    GridSpec spec = random_grid(5, 4, 1);
    Grid1 gs(spec.axis1);
    for (int k = 0; k <= gs.depth(); ++k)
        for (int m = 0; m < (1 << k); ++m)
            for (int i = 0; i <= k; ++i) {
                Iv p{k, m};
                Iv anc = gs.ancestor_at_depth(p, i);
                auto ch = gs.children_at_depth(anc, i);
                CHECK(std::find(ch.begin(), ch.end(), p) != ch.end());
            }
}

TEST_CASE("random grids are seeded and fair") {
    CHECK(grid_spec_to_json(random_grid(42, 4, 2)) == grid_spec_to_json(random_grid(42, 4, 2)));

    int distinct = 0;
    for (std::uint64_t s = 0; s < 100; ++s)
        if (grid_spec_to_json(random_grid(s, 4, 2)) != grid_spec_to_json(random_grid(s + 1, 4, 2)))
            ++distinct;
    CHECK(distinct >= 95);

    long ones = 0, total = 0;
    for (std::uint64_t s = 0; s < 1250; ++s) {
        GridSpec spec = random_grid(s, 4, 2);
        for (int b : spec.axis1.shift_bits) ones += b, ++total;
        for (int b : spec.axis2.shift_bits) ones += b, ++total;
    }
    double mean = double(ones) / double(total);
    CHECK(mean > 0.45);
    CHECK(mean < 0.55);
}

TEST_CASE("errors") {
    CHECK_THROWS(Grid1(AxisSpec{0, {}}));
    Grid1 g(AxisSpec::standard(2));
    CHECK_THROWS(g.children_at_depth(Iv{1, 0}, 2));  // beyond depth
    CHECK_THROWS(g.ancestor_at_depth(Iv{1, 0}, 2));  // coarser than generation 0
}

TEST_CASE("grid spec JSON round trip") {
    GridSpec spec = random_grid(9, 4, 2);
    GridSpec back = grid_spec_from_json(grid_spec_to_json(spec));
    CHECK(back.axes == spec.axes);
    CHECK(back.axis1.shift_bits == spec.axis1.shift_bits);
    CHECK(back.axis2.shift_bits == spec.axis2.shift_bits);
}

TEST_CASE("common ancestor") {
    ProductGrid g(random_grid(2, 3, 2));
    std::vector<Rect> rs = {Rect{Iv{2, 1}, Iv{1, 0}}, Rect{Iv{3, 5}, Iv{2, 2}}};
    Rect anc = g.common_ancestor(rs);
    for (const Rect& r : rs) CHECK(g.contains(anc, r));
}
