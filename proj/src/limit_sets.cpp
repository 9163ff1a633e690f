#include "attractorlab/limit_sets.hpp"

#include <algorithm>

namespace attractorlab {

namespace {

void validate_params(const AttractorParams& p) {
    if (p.n_samples < 16) throw ValidationError("attractor estimate needs n_samples >= 16");
    if (p.n_steps < 1) throw ValidationError("n_steps must be >= 1");
    if (p.burn_in < 0) throw ValidationError("burn_in must be >= 0");
    if (p.theta < 0.0) throw ValidationError("theta must be >= 0");
    if (p.tail_fraction <= 0.0 || p.tail_fraction > 1.0) {
        throw ValidationError("tail_fraction must lie in (0, 1]");
    }
}

// Records one orbit's cells after burn-in into a fresh histogram.
VisitHistogram run_histogram(const SystemView& view, PointX p, std::int64_t n_steps,
                             std::int64_t burn_in, const Grid3& grid) {
    VisitHistogram hist(grid);
    for (std::int64_t i = 0; i < burn_in; ++i) p = view.step(p);
    for (std::int64_t i = 0; i < n_steps; ++i) {
        hist.record(grid.cell_of(p));
        p = view.step(p);
    }
    return hist;
}

}  // namespace

PointX random_point(std::uint64_t seed, RngTag tag, std::uint64_t index) {
    Rng rng(derive_seed(seed, tag, index));
    PointX p;
    p.base.x1 = rng.uniform01();
    p.base.x2 = rng.uniform01();
    p.y = rng.uniform01();
    return p;
}

VisitHistogram visit_histogram(const SystemView& view, const PointX& start,
                               std::int64_t n_steps, std::int64_t burn_in,
                               const Grid3& grid) {
    if (n_steps < 1) throw ValidationError("n_steps must be >= 1");
    if (burn_in < 0) throw ValidationError("burn_in must be >= 0");
    view.system().ensure_certified();
    return run_histogram(view, start, n_steps, burn_in, grid);
}

CellSet omega_stat_estimate(const VisitHistogram& hist, double theta) {
    if (theta < 0.0) throw ValidationError("theta must be >= 0");
    return hist.cells_above(theta);
}

CellSet omega_limit_estimate(const SystemView& view, const PointX& start,
                             std::int64_t n_steps, double tail_fraction, const Grid3& grid) {
    if (n_steps < 1) throw ValidationError("n_steps must be >= 1");
    if (tail_fraction <= 0.0 || tail_fraction > 1.0) {
        throw ValidationError("tail_fraction must lie in (0, 1]");
    }
    view.system().ensure_certified();
    std::int64_t tail = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(tail_fraction * static_cast<double>(n_steps)));
    std::int64_t skip = n_steps - tail;
    PointX p = start;
    for (std::int64_t i = 0; i < skip; ++i) p = view.step(p);
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(grid.total()), 0);
    for (std::int64_t i = 0; i < tail; ++i) {
        seen[grid.cell_of(p)] = 1;
        p = view.step(p);
    }
    std::vector<std::uint32_t> cells;
    for (std::size_t c = 0; c < seen.size(); ++c) {
        if (seen[c]) cells.push_back(static_cast<std::uint32_t>(c));
    }
    return CellSet{grid, std::move(cells)};
}

AttractorEstimate attractor_estimate(const SystemView& view, AttractorKind kind,
                                     const Grid3& grid, const AttractorParams& params) {
    validate_params(params);
    view.system().ensure_certified();
    std::vector<CellSet> per_sample(static_cast<std::size_t>(params.n_samples));
    parallel_for(params.n_samples, params.exec, [&](std::int64_t i) {
        PointX start = random_point(params.seed, RngTag::attractor_sample,
                                    static_cast<std::uint64_t>(i));
        if (kind == AttractorKind::statistical) {
            VisitHistogram h = run_histogram(view, start, params.n_steps, params.burn_in, grid);
            per_sample[static_cast<std::size_t>(i)] = h.cells_above(params.theta);
        } else {
            per_sample[static_cast<std::size_t>(i)] = omega_limit_estimate(
                view, start, params.n_steps + params.burn_in,
                static_cast<double>(params.n_steps) /
                    static_cast<double>(params.n_steps + params.burn_in) *
                    params.tail_fraction,
                grid);
        }
    });
    AttractorEstimate est{grid, CellSet{grid, {}}, std::move(per_sample)};
    for (const CellSet& s : est.per_sample) est.union_set = est.union_set.unite(s);
    return est;
}

AttractorPairEstimate attractor_pair_estimate(const SystemView& view, const Grid3& grid,
                                              const AttractorParams& params) {
    validate_params(params);
    view.system().ensure_certified();
    std::vector<CellSet> milnor(static_cast<std::size_t>(params.n_samples));
    std::vector<CellSet> stat(static_cast<std::size_t>(params.n_samples));
    parallel_for(params.n_samples, params.exec, [&](std::int64_t i) {
        PointX p = random_point(params.seed, RngTag::attractor_sample,
                                static_cast<std::uint64_t>(i));
        VisitHistogram h = run_histogram(view, p, params.n_steps, params.burn_in, grid);
        milnor[static_cast<std::size_t>(i)] = h.occupied();
        stat[static_cast<std::size_t>(i)] = h.cells_above(params.theta);
    });
    AttractorPairEstimate pair{grid,
                               AttractorEstimate{grid, CellSet{grid, {}}, std::move(milnor)},
                               AttractorEstimate{grid, CellSet{grid, {}}, std::move(stat)}};
    for (const CellSet& s : pair.milnor.per_sample) {
        pair.milnor.union_set = pair.milnor.union_set.unite(s);
    }
    for (const CellSet& s : pair.statistical.per_sample) {
        pair.statistical.union_set = pair.statistical.union_set.unite(s);
    }
    return pair;
}

CellSet nonwandering_estimate(const SystemView& view, const Grid3& grid,
                              const NonwanderingParams& params) {
    if (params.horizon < 1) throw ValidationError("horizon must be >= 1");
    if (params.steps_per_cell < 1) throw ValidationError("steps_per_cell must be >= 1");
    view.system().ensure_certified();
    const std::int64_t total = grid.total();
    std::int64_t n_starts = std::max<std::int64_t>(1, params.steps_per_cell / params.horizon);
    std::vector<std::uint8_t> member(static_cast<std::size_t>(total), 0);
    parallel_for(total, params.exec, [&](std::int64_t c) {
        std::uint32_t cell = static_cast<std::uint32_t>(c);
        for (std::int64_t s = 0; s < n_starts; ++s) {
            PointX p;
            if (s == 0) {
                p = grid.corner(cell);
            } else if (s == 1) {
                p = grid.center(cell);
            } else {
                PointX corner = grid.corner(cell);
                Rng rng(derive_seed(params.seed, RngTag::nonwander_start,
                                    static_cast<std::uint64_t>(c) * 1024 +
                                        static_cast<std::uint64_t>(s)));
                p.base.x1 = wrap01(corner.base.x1 + rng.uniform01() / grid.n_base);
                p.base.x2 = wrap01(corner.base.x2 + rng.uniform01() / grid.n_base);
                p.y = wrap01(corner.y + rng.uniform01() / grid.n_fiber);
            }
            // Recurrent means the orbit re-enters the cell after leaving it,
            // or never leaves it within the horizon; a slow crossing that
            // lingers a few steps and moves on does not count.
            bool returned = false;
            bool left = false;
            for (std::int64_t t = 0; t < params.horizon; ++t) {
                p = view.step(p);
                if (grid.cell_of(p) != cell) {
                    left = true;
                } else if (left) {
                    returned = true;
                    break;
                }
            }
            if (returned || !left) {
                member[static_cast<std::size_t>(c)] = 1;
                break;
            }
        }
    });
    std::vector<std::uint32_t> cells;
    for (std::size_t c = 0; c < member.size(); ++c) {
        if (member[c]) cells.push_back(static_cast<std::uint32_t>(c));
    }
    return CellSet{grid, std::move(cells)};
}

}  // namespace attractorlab
