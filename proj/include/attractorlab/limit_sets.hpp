#pragma once

#include <cstdint>
#include <vector>

#include "attractorlab/grid.hpp"
#include "attractorlab/parallel.hpp"
#include "attractorlab/rng.hpp"
#include "attractorlab/skew.hpp"

namespace attractorlab {

enum class AttractorKind { milnor, statistical };

// Sampling parameters shared by the attractor estimators.
struct AttractorParams {
    int n_samples = 64;             // independent random starts (>= 16)
    std::int64_t n_steps = 10000000;  // recorded steps per sample
    std::int64_t burn_in = 10000;   // discarded transient per sample
    double theta = 1e-5;            // visit-frequency cut for the statistical kind
    double tail_fraction = 0.5;     // recorded tail for the Milnor kind
    std::uint64_t seed = 1;
    ExecMode exec = ExecMode::openmp;
};

struct AttractorEstimate {
    Grid3 grid;
    CellSet union_set;
    std::vector<CellSet> per_sample;
};

// Both estimates extracted from the same orbits: per sample one trajectory
// is recorded after burn-in, the Milnor surrogate keeps every visited cell
// and the statistical surrogate keeps the cells above the frequency cut.
// Sharing the window makes the statistical set a subset of the Milnor set
// cell for cell, by construction.
struct AttractorPairEstimate {
    Grid3 grid;
    AttractorEstimate milnor;
    AttractorEstimate statistical;
};

// Visit counts of one orbit: burn_in discarded, n_steps recorded.
VisitHistogram visit_histogram(const SystemView& view, const PointX& start,
                               std::int64_t n_steps, std::int64_t burn_in, const Grid3& grid);

// Cells with visit frequency strictly above theta.
CellSet omega_stat_estimate(const VisitHistogram& hist, double theta);

// Frequency-free limit-set surrogate: cells visited during the final
// tail_fraction of an n_steps orbit.
CellSet omega_limit_estimate(const SystemView& view, const PointX& start,
                             std::int64_t n_steps, double tail_fraction, const Grid3& grid);

// Union and per-sample limit-set estimates over seeded random starts.
// Per-sample orbits are independent work items (parallel across samples);
// the union is merged in sample-index order, so membership is bit-for-bit
// reproducible for a fixed seed regardless of worker count.
AttractorEstimate attractor_estimate(const SystemView& view, AttractorKind kind,
                                     const Grid3& grid, const AttractorParams& params);

// Milnor and statistical estimates from shared orbit data (one orbit per
// sample feeding both).
AttractorPairEstimate attractor_pair_estimate(const SystemView& view, const Grid3& grid,
                                              const AttractorParams& params);

struct NonwanderingParams {
    std::int64_t steps_per_cell = 200000;  // total step budget per cell
    std::int64_t horizon = 100000;         // return window per start
    std::uint64_t seed = 1;
    ExecMode exec = ExecMode::openmp;
};

// Finite-horizon nonwandering surrogate: a cell is a member when one of its
// sampled starts re-enters it after first leaving it, or never leaves it at
// all, within the horizon.  A start that merely lingers for a few steps
// while drifting through does not count.  Starts are the cell corner, the
// cell center, then seeded uniform draws while the per-cell budget lasts.
// The corner start makes every cell holding a fixed point on its corner
// lattice a member by construction.
CellSet nonwandering_estimate(const SystemView& view, const Grid3& grid,
                              const NonwanderingParams& params);

// Uniform random start derived from (seed, tag, index); used by every
// sampling estimator.
PointX random_point(std::uint64_t seed, RngTag tag, std::uint64_t index);

}  // namespace attractorlab
