#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "attractorlab/grid.hpp"
#include "attractorlab/limit_sets.hpp"
#include "attractorlab/manifolds.hpp"
#include "attractorlab/skew.hpp"

namespace attractorlab {

enum class CheckStatus { pass, fail, inconclusive };

const char* to_cstring(CheckStatus s);

// One verification check: named metrics and notes are kept in insertion
// order so serialized reports are reproducible byte for byte.
struct CheckEntry {
    std::string name;
    CheckStatus status = CheckStatus::pass;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::pair<std::string, std::string>> notes;
    std::vector<std::string> artifacts;  // file names inside the run directory

    void metric(const std::string& key, double value) { metrics.emplace_back(key, value); }
    void note(const std::string& key, const std::string& value) {
        notes.emplace_back(key, value);
    }
};

struct SuiteReport {
    std::string system_description;
    std::uint64_t seed = 0;
    std::vector<CheckEntry> entries;

    // fail dominates inconclusive dominates pass.
    CheckStatus aggregate() const;
};

// Artifact drop target for the suites; an empty directory discards payloads
// (the entry then records no artifact names).
struct ArtifactSink {
    std::string dir;

    // Atomic write; returns the recorded name, or "" when discarded.
    std::string write(const std::string& name, const std::string& content) const;
};

// Pass/fail thresholds.  Each one is a resolution-scale quantity, not a
// physical constant; all are echoed into the report entries.
// coincidence_tol = 0 means "twice the cell diagonal of the grid in use".
struct Thresholds {
    double coincidence_tol = 0.0;
    double shrink_min = 1.5;      // occupied-fraction ratio for the thin branch
    double full_min = 0.95;       // occupied fraction for the full branch
    double nw_max = 0.2;          // nonwandering fraction bound (thin branch)
    double dense_min = 0.95;      // single-orbit coverage (full branch)
    double repeller_margin = 5e-3;
    double slack = 1e-6;          // numerical slack for the monotone scan
    double stability_ratio = 4.0;  // require delta_found >= eps / ratio
};

// Budget for growing invariant-leaf closures onto a grid.
struct ClosureParams {
    double stall_length = 20.0;
    double radius_budget = 400.0;
    double max_seg = 0.0;  // 0 = derive 1/(4 n_base) from the grid
    int n_back = 200;
    double node_tol = 1e-8;
};

struct ExperimentConfig {
    Grid3 grid{32, 32};
    AttractorParams attractor;
    StabilityProbeParams stability;
    SaturationParams saturation;
    ClosureParams closure;
    NonwanderingParams nonwander;
    Grid3 nw_grid{16, 16};              // resolution of the nonwandering surrogate
    std::int64_t nw_n_steps = 1000000;  // reduced orbit budget for its containment sets
    Thresholds thresholds;
    std::uint64_t seed = 1;
    ExecMode exec = ExecMode::openmp;

    // Pushes seed and exec into the nested parameter structs.
    void propagate();
};

double resolved_coincidence_tol(const Thresholds& t, const Grid3& grid);

// Signed arclength of q along the straight base leaf through origin, when
// some integer translate of q - origin is parallel to the leaf direction.
std::optional<double> leaf_parameter(const SystemView& view, const TorusPoint& origin,
                                     const TorusPoint& q, LeafKind kind, int max_shift = 64,
                                     double tol = 1e-9);

enum class DichotomyBranch { zero_measure, full, inconclusive };

const char* to_cstring(DichotomyBranch b);

struct Assumption1Result {
    CheckEntry entry;
    int n_repellers = 0;
    // min over repellers of (best over homoclinic candidates of the
    // distance from the transported point to the repeller set).
    double min_distance = 0.0;
    bool vacuous = false;
};

struct DecompositionResult {
    CheckEntry entry;
    std::vector<CellSet> closures;  // one per attracting orbit
    std::vector<int> matched;       // sorted distinct closure indices hit by samples
    double max_match_distance = 0.0;
    double union_hausdorff = 0.0;
};

struct TheoremAResult {
    SuiteReport report;
    DichotomyBranch branch = DichotomyBranch::inconclusive;
    AttractorPairEstimate pair;  // shared-orbit estimates at config.grid
};

struct PerturbationPoint {
    double b = 0.0;
    double z_hat = 0.0;  // lifted graph value over the probe point, continuous in b
};

struct PerturbationScanResult {
    CheckEntry entry;
    std::vector<PerturbationPoint> points;
    bool continuation_lost = false;
    double critical_b = 0.0;  // first scanned b where the continuation failed
};

struct CorollaryBResult {
    CheckEntry entry;
    double fraction = 0.0;  // nonwandering fraction or single-orbit coverage
};

struct InverseSuiteResult {
    CheckEntry entry;
    CellSet forward_set;
    CellSet backward_set;
    double intersection_fraction = 0.0;  // |A & B| / min(|A|, |B|)
};

// Union of leaf-closure cells over the acting block of a fiberwise periodic
// point: the invariant unstable set of its whole orbit.
CellSet attractor_closure(const SystemView& view, const FiberPeriodicPoint& anchor,
                          const Grid3& grid, const ClosureParams& params);

// For each repeller of the composite fiber map over p: take homoclinic base
// points, lift each to the repeller's unstable leaf, transport the lifted
// point along its stable leaf into the fiber over p, and measure the
// distance from the transported fiber value to the repeller set.  The best
// candidate per repeller is reported; pass means every repeller clears
// thresholds.repeller_margin.  No repellers at all is a vacuous pass.
Assumption1Result assumption1_check(const SystemView& view, const TorusPoint& p, int k,
                                    const ExperimentConfig& config,
                                    const ArtifactSink& sink = {});

// Closure of the unstable set of every attracting orbit over p, matched by
// Hausdorff distance against each per-sample statistical limit-set
// estimate, plus the distance between the matched union and the pooled
// statistical estimate.
DecompositionResult attractor_decomposition(const SystemView& view, const TorusPoint& p, int k,
                                            const ExperimentConfig& config,
                                            const ArtifactSink& sink = {});

// The combined suite: coincidence of the statistical and Milnor estimates,
// exact cellwise containment, the stability probe, the two-resolution
// measure dichotomy, and leafwise saturation.
TheoremAResult theoremA_suite(const SystemView& view, const ExperimentConfig& config,
                              const ArtifactSink& sink = {});

// Rigid fiber rotations by each b: continue the attracting orbit over the
// anchor's base point, evaluate its unstable graph over the probe base
// point q (which must lie on the base unstable leaf of the anchor), and
// check that the lifted value moves up by at least b - slack and never
// decreases.  A lost continuation (orbit vanishes or jumps) stops the scan
// and is reported with the critical b.
PerturbationScanResult perturbation_scan(const SystemView& view,
                                         const FiberPeriodicPoint& anchor,
                                         const std::vector<double>& b_values,
                                         const TorusPoint& q, const ExperimentConfig& config,
                                         const ArtifactSink& sink = {});

// Thin branch: nonwandering fraction below nw_max and containment in the
// fattened union of the forward and backward statistical estimates.  Full
// branch: one seeded orbit covers at least dense_min of the cells.
CorollaryBResult corollaryB_check(const SystemView& view, const ExperimentConfig& config,
                                  DichotomyBranch branch, const ArtifactSink& sink = {});

// Statistical estimates for the view and its inverse plus their
// intersection fraction; in the full branch additionally compares the
// closures of the unstable set of an attractor and the stable set of a
// repeller against the full grid.
InverseSuiteResult inverse_system_suite(const SystemView& view, const ExperimentConfig& config,
                                        DichotomyBranch branch, const ArtifactSink& sink = {});

std::string describe_system(const SkewProduct& sys);

}  // namespace attractorlab
