#include "attractorlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace attractorlab {

CellSet CellSet::from_unsorted(const Grid3& g, std::vector<std::uint32_t> cells) {
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return CellSet{g, std::move(cells)};
}

CellSet CellSet::full(const Grid3& g) {
    CellSet s{g, {}};
    s.members.resize(static_cast<std::size_t>(g.total()));
    for (std::size_t i = 0; i < s.members.size(); ++i) {
        s.members[i] = static_cast<std::uint32_t>(i);
    }
    return s;
}

bool CellSet::contains(std::uint32_t cell) const {
    return std::binary_search(members.begin(), members.end(), cell);
}

bool CellSet::subset_of(const CellSet& other) const {
    if (!(grid == other.grid)) throw ValidationError("cell sets live on different grids");
    return std::includes(other.members.begin(), other.members.end(), members.begin(),
                         members.end());
}

CellSet CellSet::unite(const CellSet& other) const {
    if (!(grid == other.grid)) throw ValidationError("cell sets live on different grids");
    CellSet out{grid, {}};
    out.members.reserve(members.size() + other.members.size());
    std::set_union(members.begin(), members.end(), other.members.begin(), other.members.end(),
                   std::back_inserter(out.members));
    return out;
}

CellSet CellSet::intersect(const CellSet& other) const {
    if (!(grid == other.grid)) throw ValidationError("cell sets live on different grids");
    CellSet out{grid, {}};
    std::set_intersection(members.begin(), members.end(), other.members.begin(),
                          other.members.end(), std::back_inserter(out.members));
    return out;
}

CellSet CellSet::fatten(int cells) const {
    if (cells < 0) throw ValidationError("fatten width must be >= 0");
    if (cells == 0) return *this;
    std::vector<std::uint32_t> out;
    out.reserve(members.size() * (2 * cells + 1) * (2 * cells + 1) * (2 * cells + 1));
    for (std::uint32_t m : members) {
        int i, j, k;
        grid.decompose(m, i, j, k);
        for (int di = -cells; di <= cells; ++di) {
            int ii = (i + di % grid.n_base + grid.n_base) % grid.n_base;
            for (int dj = -cells; dj <= cells; ++dj) {
                int jj = (j + dj % grid.n_base + grid.n_base) % grid.n_base;
                for (int dk = -cells; dk <= cells; ++dk) {
                    int kk = (k + dk % grid.n_fiber + grid.n_fiber) % grid.n_fiber;
                    out.push_back(static_cast<std::uint32_t>(
                        (static_cast<std::int64_t>(ii) * grid.n_base + jj) * grid.n_fiber + kk));
                }
            }
        }
    }
    return from_unsorted(grid, std::move(out));
}

void VisitHistogram::merge(const VisitHistogram& other) {
    if (!(grid == other.grid)) throw ValidationError("histograms live on different grids");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
    total += other.total;
}

CellSet VisitHistogram::cells_above(double theta) const {
    std::vector<std::uint32_t> cells;
    double cut = theta * static_cast<double>(total);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (static_cast<double>(counts[i]) > cut) cells.push_back(static_cast<std::uint32_t>(i));
    }
    return CellSet{grid, std::move(cells)};
}

CellSet VisitHistogram::occupied() const {
    std::vector<std::uint32_t> cells;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] > 0) cells.push_back(static_cast<std::uint32_t>(i));
    }
    return CellSet{grid, std::move(cells)};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One-dimensional squared-distance transform (lower envelope of parabolas)
// over a periodic axis of m samples with physical spacing w.  Runs on three
// tiled copies so wrap-around sources are seen; writes the middle copy back.
void dt1d_periodic(std::vector<double>& f, std::vector<double>& scratch,
                   std::vector<int>& hull, std::vector<double>& breaks, int m, double w) {
    const int n = 3 * m;
    scratch.resize(static_cast<std::size_t>(n));
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < m; ++i) scratch[static_cast<std::size_t>(c * m + i)] = f[static_cast<std::size_t>(i)];
    }
    hull.assign(static_cast<std::size_t>(n), 0);
    breaks.assign(static_cast<std::size_t>(n) + 1, 0.0);
    int k = 0;
    hull[0] = 0;
    breaks[0] = -kInf;
    breaks[1] = kInf;
    const double w2 = w * w;
    for (int q = 1; q < n; ++q) {
        if (scratch[static_cast<std::size_t>(q)] == kInf) continue;
        double s;
        while (true) {
            int p = hull[static_cast<std::size_t>(k)];
            if (scratch[static_cast<std::size_t>(p)] == kInf) {
                // Degenerate first parabola; replace it.
                if (k == 0) {
                    hull[0] = q;
                    breaks[0] = -kInf;
                    breaks[1] = kInf;
                    s = -kInf;
                    break;
                }
                --k;
                continue;
            }
            s = ((scratch[static_cast<std::size_t>(q)] + w2 * q * q) -
                 (scratch[static_cast<std::size_t>(p)] + w2 * p * p)) /
                (2.0 * w2 * (q - p));
            if (s <= breaks[static_cast<std::size_t>(k)]) {
                --k;
                continue;
            }
            ++k;
            hull[static_cast<std::size_t>(k)] = q;
            breaks[static_cast<std::size_t>(k)] = s;
            breaks[static_cast<std::size_t>(k) + 1] = kInf;
            break;
        }
    }
    int ki = 0;
    for (int q = m; q < 2 * m; ++q) {
        while (breaks[static_cast<std::size_t>(ki) + 1] < static_cast<double>(q)) ++ki;
        int p = hull[static_cast<std::size_t>(ki)];
        double d = w * static_cast<double>(q - p);
        f[static_cast<std::size_t>(q - m)] = scratch[static_cast<std::size_t>(p)] + d * d;
    }
}

}  // namespace

std::vector<double> distance_transform_sq(const CellSet& set) {
    const Grid3& g = set.grid;
    const int nb = g.n_base, nf = g.n_fiber;
    std::vector<double> d(static_cast<std::size_t>(g.total()), kInf);
    for (std::uint32_t m : set.members) d[m] = 0.0;
    if (set.members.empty()) return d;

    std::vector<double> line, scratch, breaks;
    std::vector<int> hull;

    // Pass along the fiber axis (contiguous stride 1).
    line.resize(static_cast<std::size_t>(nf));
    for (int i = 0; i < nb; ++i) {
        for (int j = 0; j < nb; ++j) {
            std::size_t base = static_cast<std::size_t>((static_cast<std::int64_t>(i) * nb + j) * nf);
            for (int k = 0; k < nf; ++k) line[static_cast<std::size_t>(k)] = d[base + static_cast<std::size_t>(k)];
            dt1d_periodic(line, scratch, hull, breaks, nf, 1.0 / nf);
            for (int k = 0; k < nf; ++k) d[base + static_cast<std::size_t>(k)] = line[static_cast<std::size_t>(k)];
        }
    }
    // Pass along x2 (stride nf).
    line.resize(static_cast<std::size_t>(nb));
    for (int i = 0; i < nb; ++i) {
        for (int k = 0; k < nf; ++k) {
            for (int j = 0; j < nb; ++j) {
                line[static_cast<std::size_t>(j)] =
                    d[static_cast<std::size_t>((static_cast<std::int64_t>(i) * nb + j) * nf + k)];
            }
            dt1d_periodic(line, scratch, hull, breaks, nb, 1.0 / nb);
            for (int j = 0; j < nb; ++j) {
                d[static_cast<std::size_t>((static_cast<std::int64_t>(i) * nb + j) * nf + k)] =
                    line[static_cast<std::size_t>(j)];
            }
        }
    }
    // Pass along x1 (stride nb*nf).
    for (int j = 0; j < nb; ++j) {
        for (int k = 0; k < nf; ++k) {
            for (int i = 0; i < nb; ++i) {
                line[static_cast<std::size_t>(i)] =
                    d[static_cast<std::size_t>((static_cast<std::int64_t>(i) * nb + j) * nf + k)];
            }
            dt1d_periodic(line, scratch, hull, breaks, nb, 1.0 / nb);
            for (int i = 0; i < nb; ++i) {
                d[static_cast<std::size_t>((static_cast<std::int64_t>(i) * nb + j) * nf + k)] =
                    line[static_cast<std::size_t>(i)];
            }
        }
    }
    return d;
}

double hausdorff_distance(const CellSet& a, const CellSet& b) {
    if (!(a.grid == b.grid)) throw ValidationError("cell sets live on different grids");
    if (a.members.empty() && b.members.empty()) return 0.0;
    if (a.members.empty() || b.members.empty()) return kInf;
    std::vector<double> to_b = distance_transform_sq(b);
    double h = 0.0;
    for (std::uint32_t m : a.members) h = std::max(h, to_b[m]);
    std::vector<double> to_a = distance_transform_sq(a);
    for (std::uint32_t m : b.members) h = std::max(h, to_a[m]);
    return std::sqrt(h);
}

double box_measure(const CellSet& set) { return set.fraction(); }

}  // namespace attractorlab
