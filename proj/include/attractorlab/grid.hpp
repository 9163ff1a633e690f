#pragma once

#include <cstdint>
#include <vector>

#include "attractorlab/errors.hpp"
#include "attractorlab/skew.hpp"

namespace attractorlab {

// Uniform cell partition of the total space: n_base x n_base over the torus
// coordinates, n_fiber over the circle.
struct Grid3 {
    int n_base = 32;
    int n_fiber = 32;

    Grid3() = default;
    Grid3(int nb, int nf) : n_base(nb), n_fiber(nf) {
        if (nb < 8 || nf < 8) throw ValidationError("grid needs at least 8 cells per axis");
    }

    std::int64_t total() const {
        return static_cast<std::int64_t>(n_base) * n_base * n_fiber;
    }

    std::uint32_t cell_of(const PointX& p) const {
        int i = static_cast<int>(p.base.x1 * n_base);
        int j = static_cast<int>(p.base.x2 * n_base);
        int k = static_cast<int>(p.y * n_fiber);
        if (i >= n_base) i = n_base - 1;
        if (j >= n_base) j = n_base - 1;
        if (k >= n_fiber) k = n_fiber - 1;
        return static_cast<std::uint32_t>((static_cast<std::int64_t>(i) * n_base + j) * n_fiber +
                                          k);
    }

    void decompose(std::uint32_t cell, int& i, int& j, int& k) const {
        k = static_cast<int>(cell % static_cast<std::uint32_t>(n_fiber));
        std::uint32_t rest = cell / static_cast<std::uint32_t>(n_fiber);
        j = static_cast<int>(rest % static_cast<std::uint32_t>(n_base));
        i = static_cast<int>(rest / static_cast<std::uint32_t>(n_base));
    }

    PointX center(std::uint32_t cell) const {
        int i, j, k;
        decompose(cell, i, j, k);
        return {{(i + 0.5) / n_base, (j + 0.5) / n_base}, (k + 0.5) / n_fiber};
    }

    PointX corner(std::uint32_t cell) const {
        int i, j, k;
        decompose(cell, i, j, k);
        return {{static_cast<double>(i) / n_base, static_cast<double>(j) / n_base},
                static_cast<double>(k) / n_fiber};
    }

    // Space diagonal of one cell.
    double cell_diagonal() const {
        double hb = 1.0 / n_base, hf = 1.0 / n_fiber;
        return std::sqrt(2.0 * hb * hb + hf * hf);
    }

    bool operator==(const Grid3& o) const {
        return n_base == o.n_base && n_fiber == o.n_fiber;
    }
};

// Set of grid cells, members kept sorted for deterministic artifacts and
// fast binary-search membership.
struct CellSet {
    Grid3 grid;
    std::vector<std::uint32_t> members;

    static CellSet from_unsorted(const Grid3& g, std::vector<std::uint32_t> cells);
    static CellSet full(const Grid3& g);

    bool contains(std::uint32_t cell) const;
    bool subset_of(const CellSet& other) const;
    CellSet unite(const CellSet& other) const;
    CellSet intersect(const CellSet& other) const;
    // Chebyshev dilation by `cells` cells per axis, with periodic wrap.
    CellSet fatten(int cells) const;

    std::int64_t count() const { return static_cast<std::int64_t>(members.size()); }
    double fraction() const {
        return static_cast<double>(members.size()) / static_cast<double>(grid.total());
    }
};

// Per-cell visit counts of one or more orbits on a grid.
struct VisitHistogram {
    Grid3 grid;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;

    explicit VisitHistogram(const Grid3& g)
        : grid(g), counts(static_cast<std::size_t>(g.total()), 0) {}

    void record(std::uint32_t cell) {
        ++counts[cell];
        ++total;
    }
    void merge(const VisitHistogram& other);

    // Cells with visit frequency strictly above theta.
    CellSet cells_above(double theta) const;
    // Cells with at least one visit (the theta -> 0+ limit).
    CellSet occupied() const;
};

// Squared distances from every cell center to the nearest member cell
// center, under the flat periodic metric with the grid's axis spacings.
// Exact separable transform; each periodic axis is handled by running the
// one-dimensional pass on three tiled copies and keeping the middle one.
std::vector<double> distance_transform_sq(const CellSet& set);

// Hausdorff distance between the cell-center clouds of two sets on one grid.
// Empty vs nonempty is reported as +infinity; two empty sets are at
// distance 0.
double hausdorff_distance(const CellSet& a, const CellSet& b);

// Occupied volume fraction.
double box_measure(const CellSet& set);

}  // namespace attractorlab
