#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "attractorlab/grid.hpp"
#include "attractorlab/rng.hpp"

using namespace attractorlab;

namespace {

// Brute-force periodic point-to-set distances between cell centers; the
// library's separable transform must reproduce these exactly.
std::vector<double> brute_distance_sq(const CellSet& set) {
    const Grid3& g = set.grid;
    double hb = 1.0 / g.n_base, hf = 1.0 / g.n_fiber;
    std::vector<double> out(static_cast<std::size_t>(g.total()), 1e300);
    for (std::int64_t cell = 0; cell < g.total(); ++cell) {
        int i, j, k;
        g.decompose(static_cast<std::uint32_t>(cell), i, j, k);
        for (std::uint32_t m : set.members) {
            int a, b, c;
            g.decompose(m, a, b, c);
            int di = std::abs(i - a);
            di = std::min(di, g.n_base - di);
            int dj = std::abs(j - b);
            dj = std::min(dj, g.n_base - dj);
            int dk = std::abs(k - c);
            dk = std::min(dk, g.n_fiber - dk);
            double d = di * hb * di * hb + dj * hb * dj * hb + dk * hf * dk * hf;
            out[static_cast<std::size_t>(cell)] = std::min(out[static_cast<std::size_t>(cell)], d);
        }
    }
    return out;
}

std::uint32_t cell_id(const Grid3& g, int i, int j, int k) {
    return static_cast<std::uint32_t>(
        (static_cast<std::int64_t>(i) * g.n_base + j) * g.n_fiber + k);
}

}  // namespace

TEST_CASE("grid rejects resolutions below eight cells per axis") {
    CHECK_THROWS_AS(Grid3(4, 32), ValidationError);
    CHECK_THROWS_AS(Grid3(32, 7), ValidationError);
    CHECK_NOTHROW(Grid3(8, 8));
}

TEST_CASE("cell indexing round-trips through center and corner") {
    Grid3 g{8, 8};
    CHECK(g.total() == 512);
    for (std::uint32_t cell = 0; cell < 512; ++cell) {
        CHECK(g.cell_of(g.center(cell)) == cell);
        CHECK(g.cell_of(g.corner(cell)) == cell);
        int i, j, k;
        g.decompose(cell, i, j, k);
        CHECK(cell_id(g, i, j, k) == cell);
        CHECK(i >= 0);
        CHECK(i < 8);
        CHECK(j >= 0);
        CHECK(j < 8);
        CHECK(k >= 0);
        CHECK(k < 8);
    }
    // Points just below 1 land in the last cell; the clamp guards exact 1.0.
    CHECK(g.cell_of({{0.999999999, 0.0}, 0.9999999999}) == cell_id(g, 7, 0, 7));
}

TEST_CASE("cell diagonal uses both spacings") {
    Grid3 cube{32, 32};
    CHECK(cube.cell_diagonal() == doctest::Approx(std::sqrt(3.0) / 32.0).epsilon(1e-14));
    Grid3 flat{16, 8};
    CHECK(flat.cell_diagonal() ==
          doctest::Approx(std::sqrt(2.0 / 256.0 + 1.0 / 64.0)).epsilon(1e-14));
}

TEST_CASE("from_unsorted sorts and deduplicates") {
    Grid3 g{8, 8};
    CellSet s = CellSet::from_unsorted(g, {9, 3, 9, 200, 3});
    REQUIRE(s.members.size() == 3);
    CHECK(s.members[0] == 3);
    CHECK(s.members[1] == 9);
    CHECK(s.members[2] == 200);
    CHECK(s.contains(9));
    CHECK_FALSE(s.contains(10));
    CHECK(s.count() == 3);
}

TEST_CASE("set algebra on small hand sets") {
    Grid3 g{8, 8};
    CellSet a = CellSet::from_unsorted(g, {1, 2, 3});
    CellSet b = CellSet::from_unsorted(g, {3, 4});
    CellSet u = a.unite(b);
    CellSet i = a.intersect(b);
    CHECK(u.members == std::vector<std::uint32_t>{1, 2, 3, 4});
    CHECK(i.members == std::vector<std::uint32_t>{3});
    CHECK(i.subset_of(a));
    CHECK(i.subset_of(b));
    CHECK(a.subset_of(u));
    CHECK_FALSE(u.subset_of(a));
    CellSet full = CellSet::full(g);
    CHECK(full.count() == g.total());
    CHECK(full.fraction() == 1.0);
    CHECK(a.subset_of(full));
    CHECK(box_measure(a) == doctest::Approx(3.0 / 512.0).epsilon(1e-15));
}

TEST_CASE("fatten dilates with periodic wrap") {
    Grid3 g{8, 8};
    CellSet mid = CellSet::from_unsorted(g, {cell_id(g, 4, 4, 4)});
    CellSet f = mid.fatten(1);
    CHECK(f.count() == 27);
    for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj)
            for (int dk = -1; dk <= 1; ++dk)
                CHECK(f.contains(cell_id(g, 4 + di, 4 + dj, 4 + dk)));
    CellSet corner = CellSet::from_unsorted(g, {cell_id(g, 0, 0, 0)});
    CellSet fc = corner.fatten(1);
    CHECK(fc.count() == 27);
    CHECK(fc.contains(cell_id(g, 7, 7, 7)));
    CHECK(fc.contains(cell_id(g, 0, 7, 1)));
    CHECK(mid.fatten(0).members == mid.members);
}

TEST_CASE("distance transform matches the brute-force oracle") {
    Rng rng(3);
    for (int trial = 0; trial < 3; ++trial) {
        Grid3 g = trial == 2 ? Grid3{16, 8} : Grid3{8, 8};
        std::vector<std::uint32_t> cells;
        for (int i = 0; i < 20; ++i)
            cells.push_back(static_cast<std::uint32_t>(
                rng.uniform_index(static_cast<std::uint64_t>(g.total()))));
        CellSet s = CellSet::from_unsorted(g, cells);
        std::vector<double> fast = distance_transform_sq(s);
        std::vector<double> slow = brute_distance_sq(s);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t i = 0; i < fast.size(); ++i) {
            CHECK(std::fabs(fast[i] - slow[i]) < 1e-12);
        }
    }
}

TEST_CASE("distance transform of a single cell peaks at the antipode") {
    Grid3 g{8, 8};
    CellSet s = CellSet::from_unsorted(g, {cell_id(g, 0, 0, 0)});
    auto d = distance_transform_sq(s);
    CHECK(d[cell_id(g, 0, 0, 0)] == 0.0);
    CHECK(d[cell_id(g, 4, 4, 4)] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(d[cell_id(g, 7, 0, 0)] == doctest::Approx(1.0 / 64.0).epsilon(1e-12));
}

TEST_CASE("Hausdorff distance on hand-computed sets") {
    Grid3 g{8, 8};
    CellSet a = CellSet::from_unsorted(g, {cell_id(g, 0, 0, 0)});
    CellSet b = CellSet::from_unsorted(g, {cell_id(g, 0, 0, 0), cell_id(g, 0, 0, 4)});
    CHECK(hausdorff_distance(a, b) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(hausdorff_distance(b, a) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(hausdorff_distance(a, a) == 0.0);
    CHECK(hausdorff_distance(b, b) == 0.0);

    CellSet empty = CellSet::from_unsorted(g, {});
    CHECK(hausdorff_distance(empty, empty) == 0.0);
    CHECK(std::isinf(hausdorff_distance(empty, a)));
    CHECK(std::isinf(hausdorff_distance(a, empty)));
}

TEST_CASE("Hausdorff distance shrinks when the far set joins the union") {
    Grid3 g{8, 8};
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::uint32_t> ca, cb;
        for (int i = 0; i < 6; ++i) {
            ca.push_back(static_cast<std::uint32_t>(rng.uniform_index(512)));
            cb.push_back(static_cast<std::uint32_t>(rng.uniform_index(512)));
        }
        CellSet a = CellSet::from_unsorted(g, ca);
        CellSet b = CellSet::from_unsorted(g, cb);
        CHECK(hausdorff_distance(a.unite(b), b) <= hausdorff_distance(a, b) + 1e-12);
        CHECK(hausdorff_distance(a, b) == doctest::Approx(hausdorff_distance(b, a)));
    }
}

TEST_CASE("visit histograms count, merge and threshold") {
    Grid3 g{8, 8};
    VisitHistogram h(g);
    h.record(5);
    h.record(5);
    h.record(9);
    CHECK(h.total == 3);
    VisitHistogram other(g);
    other.record(5);
    h.merge(other);
    CHECK(h.total == 4);
    CHECK(h.counts[5] == 3);
    CHECK(h.counts[9] == 1);

    CellSet occ = h.occupied();
    CHECK(occ.members == std::vector<std::uint32_t>{5, 9});
    // Threshold is strict: frequency 1/4 is excluded at theta = 1/4.
    CellSet above = h.cells_above(0.25);
    CHECK(above.members == std::vector<std::uint32_t>{5});
    CHECK(h.cells_above(0.74).members == std::vector<std::uint32_t>{5});
    CHECK(h.cells_above(0.75).members.empty());
}
