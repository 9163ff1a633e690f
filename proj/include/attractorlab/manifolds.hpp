#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "attractorlab/circle_map.hpp"
#include "attractorlab/grid.hpp"
#include "attractorlab/limit_sets.hpp"
#include "attractorlab/skew.hpp"

namespace attractorlab {

// Fiberwise periodic point: y is periodic under the composite fiber map g_p
// over the k-periodic base point p, so the total-space point (p, y) has
// period base_period * fiber_period.
struct FiberPeriodicPoint {
    TorusPoint base;
    int base_period = 1;
    double y = 0.0;
    int fiber_period = 1;
    double multiplier = 0.0;  // (g_p^fiber_period)' at y
    bool attracting = false;
    int orbit_index = 0;  // which g_p-orbit the point belongs to
};

struct LeafNode {
    double t = 0.0;  // signed arclength along the base leaf
    PointX point;
};

// One-dimensional invariant leaf computed as a fiber graph over a straight
// base leaf.  The struct carries everything needed to re-evaluate or extend
// the graph: the anchor, the acting block (in single steps of the system)
// and either the anchor's base cycle (periodic anchors) or its backward
// orbit (shadowing anchors).
struct LeafGraph {
    LeafKind kind = LeafKind::unstable;
    PointX anchor;
    bool periodic_anchor = true;
    int acting_block = 1;  // system steps per transform application
    double radius = 0.0;   // current half-extent in base arclength
    double max_seg = 0.0;
    int n_back = 200;
    double node_tol = 1e-8;
    std::vector<LeafNode> nodes;          // sorted by t
    std::vector<TorusPoint> base_cycle;   // periodic mode
    std::vector<PointX> shadow_tail;      // shadow mode: anchor, F^-1 anchor, ...
};

struct ClosureEstimate {
    CellSet cells;
    bool converged = false;   // false = arclength budget exhausted first
    double reached_radius = 0.0;
};

struct EscapeWitness {
    PointX start;
    double delta = 0.0;
    std::int64_t escape_step = 0;
    PointX escape_point;
    double escape_distance = 0.0;
};

// Outcome of the finite-resolution stability probe for one eps.  delta_found
// is the largest tested delta whose sampled starts never left the
// eps-neighbourhood; 0 means even the smallest delta produced an escape.
// The probe reports "no escape found", never a stability proof.
struct StabilityResult {
    double eps = 0.0;
    double delta_found = 0.0;
    std::optional<EscapeWitness> witness;  // escape at the smallest failing delta
};

struct StabilityProbeReport {
    std::vector<StabilityResult> results;
};

struct StabilityProbeParams {
    std::vector<double> eps_list = {0.02, 0.05, 0.1};
    std::int64_t n_steps = 100000;
    int n_boundary_samples = 64;
    double delta_floor = 1e-6;
    int fine_factor = 4;  // refinement of the distance lookup grid
    std::uint64_t seed = 1;
    ExecMode exec = ExecMode::openmp;
};

struct SaturationViolation {
    int probe = 0;
    std::uint32_t cell = 0;
    double t = 0.0;
    PointX point;
};

// Empty violation list = saturated at this resolution (no stronger claim).
struct SaturationReport {
    int n_probe = 0;
    std::int64_t nodes_checked = 0;
    std::vector<SaturationViolation> violations;
};

struct SaturationParams {
    int n_probe = 200;
    double leaf_radius = 5.0;
    int fatten = 1;
    double max_seg = 0.0;  // 0 = derive 1/(4 n_base) from the grid
    int n_back = 200;
    double node_tol = 1e-8;
    std::uint64_t seed = 1;
    ExecMode exec = ExecMode::openmp;
};

// Periodic points of the composite fiber map over p, flattened to one entry
// per circle point.  Throws NotPeriodicError (base), NotMorseSmaleError or
// NoPeriodicOrbitsError (fiber) as appropriate.
std::vector<FiberPeriodicPoint> fiberwise_periodic_points(const SystemView& view,
                                                          const TorusPoint& p, int k,
                                                          int max_period = 8,
                                                          double multiplier_tol = 1e-4);

// Invariant leaf through a fiberwise periodic point, as a graph over the
// straight base leaf through p.  Fiber values come from the graph transform:
// pull the base parameter back through the expanding direction, start at the
// anchor fiber, push forward through the fiber maps; the pullback depth
// grows until successive depths agree within node_tol (cap n_back system
// steps, else NoConvergenceError).  kind == stable runs the same transform
// on the inverse view.  Consecutive nodes are subdivided until their
// total-space spacing is at most max_seg.
LeafGraph leaf_graph(const SystemView& view, const FiberPeriodicPoint& anchor, LeafKind kind,
                     double radius, double max_seg, int n_back = 200, double node_tol = 1e-8);

// Local invariant leaf through an arbitrary point, anchored by backward
// shadowing: depth-n pullbacks start from the anchor's n-step backward
// orbit.  Used by the saturation probes.
LeafGraph local_leaf_segment(const SystemView& view, const PointX& anchor, LeafKind kind,
                             double radius, double max_seg, int n_back = 200,
                             double node_tol = 1e-8);

// Fresh graph-transform evaluation of the leaf fiber value at parameter t.
double leaf_value(const SystemView& view, const LeafGraph& graph, double t);

// Grow the graph symmetrically to the larger radius (no-op if not larger).
void extend_leaf(const SystemView& view, LeafGraph& graph, double radius);

// Cells met by the graph while growing its arclength until no new cell
// appears for stall_length of additional radius (converged) or the radius
// budget runs out (partial result, converged = false).
ClosureEstimate closure_estimate(const SystemView& view, LeafGraph& graph, const Grid3& grid,
                                 double stall_length = 20.0, double radius_budget = 400.0);

// Fiber coordinate over p whose forward orbit shadows the orbit of z:
// limit of the inverse fiber chain along p's orbit applied to the fiber of
// the n-th forward image of z.  Requires base(z) on the stable leaf of p
// (NotOnStableLeafError) and convergence of successive depths within tol
// before depth_cap system steps (NoConvergenceError).
double stable_holonomy(const SystemView& view, const PointX& z, const TorusPoint& p, int k,
                       int depth_cap = 200, double tol = 1e-8);

// Finite-resolution Lyapunov stability probe around the cell region of K.
// For each eps, delta starts at eps and halves: seeded starts on the
// delta-sphere around member-cell centers are iterated n_steps and watched
// for leaving the eps-neighbourhood of the cell region (distance lookup on a
// refined grid with a conservative cushion).
StabilityProbeReport lyapunov_stability_probe(const SystemView& view, const CellSet& K,
                                              const StabilityProbeParams& params);

// Local unstable segments through seeded member-cell centers; nodes landing
// outside s fattened by `fatten` cells are reported as violations.
SaturationReport saturation_check(const SystemView& view, const CellSet& s,
                                  const SaturationParams& params);

}  // namespace attractorlab
