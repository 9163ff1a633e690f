#include "attractorlab/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

namespace attractorlab {

namespace {

// The graph transform always builds the unstable leaf of some view; stable
// leaves are unstable leaves of the inverse view.
SystemView working_view(const SystemView& view, LeafKind kind) {
    return kind == LeafKind::unstable ? view : view.inverse();
}

// Fiber value of the invariant graph at base-leaf parameter t, computed by a
// fixed-depth pullback: walk the base parameter back through the expanding
// rate, seed the fiber from the anchor (periodic mode) or from the anchor's
// backward orbit (shadow mode), then push forward through the fiber maps
// above the exact base-leaf points.  Base points along the leaf are computed
// directly from the parameter, never by iterating a rounded orbit.
double graph_value_at_depth(const SystemView& work, const LeafGraph& g, double t,
                            int blocks) {
    const Vec2 v = work.expanding_direction();
    const double rate = work.expanding_rate_signed();
    if (g.periodic_anchor) {
        const int steps = blocks * g.acting_block;
        const int k = static_cast<int>(g.base_cycle.size());
        double s = t * std::pow(rate, -steps);
        double u = g.anchor.y;
        for (int j = 0; j < steps; ++j) {
            const TorusPoint& c = g.base_cycle[static_cast<std::size_t>(j % k)];
            TorusPoint x = wrap_point(c.x1 + s * v.x1, c.x2 + s * v.x2);
            u = wrap01(work.fiber_lift(x, u));
            s *= rate;
        }
        return u;
    }
    const int steps = blocks;  // acting block is one system step in shadow mode
    double s = t * std::pow(rate, -steps);
    double u = g.shadow_tail[static_cast<std::size_t>(steps)].y;
    for (int j = steps; j >= 1; --j) {
        const PointX& anchor_back = g.shadow_tail[static_cast<std::size_t>(j)];
        TorusPoint x = wrap_point(anchor_back.base.x1 + s * v.x1, anchor_back.base.x2 + s * v.x2);
        u = wrap01(work.fiber_lift(x, u));
        s *= rate;
    }
    return u;
}

// Adaptive depth: grow the pullback until successive depths agree within a
// quarter of node_tol, capped at n_back system steps.
double graph_value(const SystemView& work, const LeafGraph& g, double t) {
    const double tol = 0.25 * g.node_tol;
    const int max_blocks = g.n_back / g.acting_block;
    if (max_blocks < 1) {
        throw ValidationError("n_back cap is smaller than one acting block");
    }
    double prev = graph_value_at_depth(work, g, t, 1);
    int m = 1;
    while (m < max_blocks) {
        m = std::min(max_blocks, m + std::max(1, m / 2));
        double cur = graph_value_at_depth(work, g, t, m);
        if (circle_dist(cur, prev) < tol) return cur;
        prev = cur;
    }
    throw NoConvergenceError("leaf graph transform did not converge within " +
                             std::to_string(g.n_back) + " steps at t = " + std::to_string(t));
}

PointX leaf_point(const SystemView& work, const LeafGraph& g, double t, double y) {
    // The base leaf is anchored at the anchor's base point for both modes.
    const Vec2 v = work.expanding_direction();
    return {wrap_point(g.anchor.base.x1 + t * v.x1, g.anchor.base.x2 + t * v.x2), y};
}

// Evaluate a batch of parameters into nodes (parallel, merged in order).
std::vector<LeafNode> eval_params(const SystemView& work, const LeafGraph& g,
                                  const std::vector<double>& params) {
    std::vector<LeafNode> out(params.size());
    std::vector<std::exception_ptr> errs(params.size());
    parallel_for(static_cast<std::int64_t>(params.size()), ExecMode::openmp,
                 [&](std::int64_t i) {
                     try {
                         double t = params[static_cast<std::size_t>(i)];
                         double y = graph_value(work, g, t);
                         out[static_cast<std::size_t>(i)] = {t, leaf_point(work, g, t, y)};
                     } catch (...) {
                         errs[static_cast<std::size_t>(i)] = std::current_exception();
                     }
                 });
    for (const auto& e : errs) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

void merge_nodes(LeafGraph& g, std::vector<LeafNode> fresh) {
    g.nodes.insert(g.nodes.end(), fresh.begin(), fresh.end());
    std::sort(g.nodes.begin(), g.nodes.end(),
              [](const LeafNode& a, const LeafNode& b) { return a.t < b.t; });
}

// Insert midpoints until consecutive nodes are within max_seg in the
// total-space metric; a parameter floor keeps steep folds from subdividing
// without bound.
void subdivide(const SystemView& work, LeafGraph& g) {
    const double t_floor = g.max_seg / 4096.0;
    for (int pass = 0; pass < 48; ++pass) {
        std::vector<double> mids;
        for (std::size_t i = 0; i + 1 < g.nodes.size(); ++i) {
            double dt = g.nodes[i + 1].t - g.nodes[i].t;
            if (dt > t_floor && dist_x(g.nodes[i].point, g.nodes[i + 1].point) > g.max_seg) {
                mids.push_back(g.nodes[i].t + 0.5 * dt);
            }
        }
        if (mids.empty()) return;
        merge_nodes(g, eval_params(work, g, mids));
    }
}

std::vector<double> ladder(double from, double to, double step) {
    // Parameters in (from, to] spaced by step, endpoint included.
    std::vector<double> out;
    for (double t = from + step; t < to - 0.5 * step; t += step) out.push_back(t);
    if (to > from) out.push_back(to);
    return out;
}

void build_initial_nodes(const SystemView& work, LeafGraph& g, double radius) {
    std::vector<double> params = {0.0};
    for (double t : ladder(0.0, radius, g.max_seg)) {
        params.push_back(t);
        params.push_back(-t);
    }
    merge_nodes(g, eval_params(work, g, params));
    g.radius = radius;
    subdivide(work, g);
}

}  // namespace

std::vector<FiberPeriodicPoint> fiberwise_periodic_points(const SystemView& view,
                                                          const TorusPoint& p, int k,
                                                          int max_period,
                                                          double multiplier_tol) {
    CompositeCircleMap g = view.composite_fiber_map(p, k);
    MorseSmaleData ms = find_periodic_orbits(g, max_period, multiplier_tol);
    std::vector<FiberPeriodicPoint> out;
    for (std::size_t oi = 0; oi < ms.orbits.size(); ++oi) {
        const CircleOrbit& orb = ms.orbits[oi];
        for (double y : orb.points) {
            FiberPeriodicPoint fp;
            fp.base = p;
            fp.base_period = k;
            fp.y = y;
            fp.fiber_period = orb.period;
            fp.multiplier = orb.multiplier;
            fp.attracting = orb.attracting;
            fp.orbit_index = static_cast<int>(oi);
            out.push_back(fp);
        }
    }
    return out;
}

LeafGraph leaf_graph(const SystemView& view, const FiberPeriodicPoint& anchor, LeafKind kind,
                     double radius, double max_seg, int n_back, double node_tol) {
    if (radius < 0.0) throw ValidationError("leaf radius must be >= 0");
    if (max_seg <= 0.0) throw ValidationError("max_seg must be > 0");
    view.system().ensure_certified();
    SystemView work = working_view(view, kind);

    LeafGraph g;
    g.kind = kind;
    g.anchor = {anchor.base, anchor.y};
    g.periodic_anchor = true;
    g.acting_block = anchor.base_period * anchor.fiber_period;
    g.max_seg = max_seg;
    g.n_back = n_back;
    g.node_tol = node_tol;

    // Base cycle of the anchor under the working view's base map.
    TorusPoint x = anchor.base;
    for (int j = 0; j < anchor.base_period; ++j) {
        g.base_cycle.push_back(x);
        x = work.base_step(x);
    }
    if (torus_dist(x, anchor.base) > 1e-9) {
        throw NotPeriodicError("leaf anchor base point is not periodic");
    }
    // The anchor fiber must close up after one acting block.
    double u = anchor.y;
    for (int j = 0; j < g.acting_block; ++j) {
        u = wrap01(work.fiber_lift(g.base_cycle[static_cast<std::size_t>(j % anchor.base_period)], u));
    }
    if (circle_dist(u, anchor.y) > 1e-6) {
        throw NotPeriodicError("leaf anchor fiber is not periodic over its base orbit");
    }

    build_initial_nodes(work, g, radius);
    return g;
}

LeafGraph local_leaf_segment(const SystemView& view, const PointX& anchor, LeafKind kind,
                             double radius, double max_seg, int n_back, double node_tol) {
    if (radius < 0.0) throw ValidationError("leaf radius must be >= 0");
    if (max_seg <= 0.0) throw ValidationError("max_seg must be > 0");
    view.system().ensure_certified();
    SystemView work = working_view(view, kind);

    LeafGraph g;
    g.kind = kind;
    g.anchor = anchor;
    g.periodic_anchor = false;
    g.acting_block = 1;
    g.max_seg = max_seg;
    g.n_back = n_back;
    g.node_tol = node_tol;

    // Backward orbit of the anchor: the depth-n pullback starts from its
    // n-th backward point.
    g.shadow_tail.reserve(static_cast<std::size_t>(n_back) + 1);
    PointX p = anchor;
    g.shadow_tail.push_back(p);
    for (int j = 0; j < n_back; ++j) {
        p = work.step_back(p);
        g.shadow_tail.push_back(p);
    }

    build_initial_nodes(work, g, radius);
    return g;
}

double leaf_value(const SystemView& view, const LeafGraph& graph, double t) {
    return graph_value(working_view(view, graph.kind), graph, t);
}

void extend_leaf(const SystemView& view, LeafGraph& graph, double radius) {
    if (radius <= graph.radius) return;
    SystemView work = working_view(view, graph.kind);
    std::vector<double> params;
    for (double t : ladder(graph.radius, radius, graph.max_seg)) {
        params.push_back(t);
        params.push_back(-t);
    }
    merge_nodes(graph, eval_params(work, graph, params));
    graph.radius = radius;
    subdivide(work, graph);
}

ClosureEstimate closure_estimate(const SystemView& view, LeafGraph& graph, const Grid3& grid,
                                 double stall_length, double radius_budget) {
    if (stall_length < 0.0) throw ValidationError("stall_length must be >= 0");
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(grid.total()), 0);
    std::int64_t occupied = 0;
    auto mark_all = [&]() {
        for (const LeafNode& n : graph.nodes) {
            std::uint32_t c = grid.cell_of(n.point);
            if (!seen[c]) {
                seen[c] = 1;
                ++occupied;
            }
        }
    };
    mark_all();
    double last_new_radius = graph.radius;
    const double chunk = std::max(stall_length / 4.0, 8.0 * graph.max_seg);
    bool converged = false;
    while (true) {
        if (graph.radius - last_new_radius >= stall_length) {
            converged = true;
            break;
        }
        if (graph.radius >= radius_budget) break;  // budget exhausted: partial set
        std::int64_t before = occupied;
        extend_leaf(view, graph, std::min(radius_budget, graph.radius + chunk));
        mark_all();
        if (occupied > before) last_new_radius = graph.radius;
    }
    std::vector<std::uint32_t> cells;
    for (std::size_t c = 0; c < seen.size(); ++c) {
        if (seen[c]) cells.push_back(static_cast<std::uint32_t>(c));
    }
    return ClosureEstimate{CellSet{grid, std::move(cells)}, converged, graph.radius};
}

double stable_holonomy(const SystemView& view, const PointX& z, const TorusPoint& p, int k,
                       int depth_cap, double tol) {
    view.system().ensure_certified();
    // Base cycle of p, validated before any use of its leaf.
    std::vector<TorusPoint> cycle;
    TorusPoint x = p;
    for (int j = 0; j < k; ++j) {
        cycle.push_back(x);
        x = view.base_step(x);
    }
    if (torus_dist(x, p) > 1e-9) {
        throw NotPeriodicError("holonomy target base point is not periodic");
    }
    // Locate base(z) on the stable leaf of p: some integer translate of the
    // difference vector must be parallel to the contracting direction; its
    // projection gives the leaf parameter s0.
    Vec2 vs = view.contracting_direction();
    const double rate_s = 1.0 / view.inverse().expanding_rate_signed();
    bool on_leaf = false;
    double s0 = 0.0;
    for (int n1 = -64; n1 <= 64 && !on_leaf; ++n1) {
        for (int n2 = -64; n2 <= 64; ++n2) {
            double d1 = z.base.x1 - p.x1 + static_cast<double>(n1);
            double d2 = z.base.x2 - p.x2 + static_cast<double>(n2);
            if (std::fabs(d1 * vs.x2 - d2 * vs.x1) < 1e-9) {
                on_leaf = true;
                s0 = d1 * vs.x1 + d2 * vs.x2;
                break;
            }
        }
    }
    if (!on_leaf) {
        throw NotOnStableLeafError("point is not on the stable leaf of the base orbit");
    }
    // Forward fiber chain of z over its base orbit, which is written in
    // closed form along the leaf (cycle point + s0 * rate^n * v_s).  Direct
    // iteration of the total map would amplify roundoff along the expanding
    // base direction by the reciprocal rate per step and destroy the
    // shadowing before the pullback converges.  y_m pulls the current fiber
    // value back through the inverse fiber chain over p's orbit; rounds of k
    // steps stop when successive values agree within tol.
    double w = z.y;
    double s = s0;
    int n = 0;
    double prev = 0.0;
    bool have_prev = false;
    for (int m = 1; m * k <= depth_cap; ++m) {
        for (int j = 0; j < k; ++j) {
            const TorusPoint& c = cycle[static_cast<std::size_t>(n % k)];
            TorusPoint zx = wrap_point(c.x1 + s * vs.x1, c.x2 + s * vs.x2);
            w = wrap01(view.fiber_lift(zx, w));
            s *= rate_s;
            ++n;
        }
        double y = w;
        for (int j = n - 1; j >= 0; --j) {
            y = view.fiber_invert(cycle[static_cast<std::size_t>(j % k)], y);
        }
        if (have_prev && circle_dist(y, prev) < tol) return y;
        prev = y;
        have_prev = true;
    }
    throw NoConvergenceError("stable holonomy did not converge within depth cap");
}

StabilityProbeReport lyapunov_stability_probe(const SystemView& view, const CellSet& K,
                                              const StabilityProbeParams& params) {
    if (K.members.empty()) throw ValidationError("stability probe needs a nonempty cell set");
    if (params.n_steps < 1) throw ValidationError("probe n_steps must be >= 1");
    if (params.n_boundary_samples < 1) throw ValidationError("probe needs samples");
    view.system().ensure_certified();

    // Distance lookup: refine each cell into fine_factor^3 subcells marked
    // as sources, then take the exact transform on the fine grid.  An orbit
    // point is declared escaped only when the fine-cell value clears eps by
    // twice the fine half-diagonal, which covers both lookup offsets, so no
    // point within eps of the cell region is ever flagged.
    const int f = std::max(1, params.fine_factor);
    Grid3 fine(K.grid.n_base * f, K.grid.n_fiber * f);
    std::vector<std::uint32_t> src;
    src.reserve(K.members.size() * static_cast<std::size_t>(f) * f * f);
    for (std::uint32_t m : K.members) {
        int i, j, kk;
        K.grid.decompose(m, i, j, kk);
        for (int a = 0; a < f; ++a) {
            for (int b = 0; b < f; ++b) {
                for (int c = 0; c < f; ++c) {
                    src.push_back(static_cast<std::uint32_t>(
                        (static_cast<std::int64_t>(i * f + a) * fine.n_base + (j * f + b)) *
                            fine.n_fiber +
                        (kk * f + c)));
                }
            }
        }
    }
    std::vector<double> dist_sq = distance_transform_sq(CellSet::from_unsorted(fine, std::move(src)));
    const double cushion = fine.cell_diagonal();  // 2 * half-diagonal

    StabilityProbeReport report;
    int eps_idx = 0;
    for (double eps : params.eps_list) {
        StabilityResult res;
        res.eps = eps;
        const double cut = (eps + cushion) * (eps + cushion);
        double delta = eps;
        int iter = 0;
        std::optional<EscapeWitness> last_witness;
        while (delta >= params.delta_floor) {
            const int n = params.n_boundary_samples;
            std::vector<std::int64_t> escape_step(static_cast<std::size_t>(n), -1);
            std::vector<PointX> escape_point(static_cast<std::size_t>(n));
            std::vector<PointX> starts(static_cast<std::size_t>(n));
            parallel_for(n, params.exec, [&](std::int64_t si) {
                Rng rng(derive_seed(params.seed, RngTag::probe_sample,
                                    (static_cast<std::uint64_t>(eps_idx) * 64 +
                                     static_cast<std::uint64_t>(iter)) *
                                            1000003ULL +
                                        static_cast<std::uint64_t>(si)));
                PointX c = K.grid.center(K.members[rng.uniform_index(K.members.size())]);
                // Uniform direction on the sphere, radius delta.
                double zc = 1.0 - 2.0 * rng.uniform01();
                double ph = kTwoPi * rng.uniform01();
                double rxy = std::sqrt(std::max(0.0, 1.0 - zc * zc));
                PointX p{wrap_point(c.base.x1 + delta * rxy * std::cos(ph),
                                    c.base.x2 + delta * rxy * std::sin(ph)),
                         wrap01(c.y + delta * zc)};
                starts[static_cast<std::size_t>(si)] = p;
                for (std::int64_t t = 1; t <= params.n_steps; ++t) {
                    p = view.step(p);
                    if (dist_sq[fine.cell_of(p)] > cut) {
                        escape_step[static_cast<std::size_t>(si)] = t;
                        escape_point[static_cast<std::size_t>(si)] = p;
                        break;
                    }
                }
            });
            int first = -1;
            for (int si = 0; si < n; ++si) {
                if (escape_step[static_cast<std::size_t>(si)] >= 0) {
                    first = si;
                    break;
                }
            }
            if (first < 0) {
                res.delta_found = delta;
                break;
            }
            EscapeWitness w;
            w.start = starts[static_cast<std::size_t>(first)];
            w.delta = delta;
            w.escape_step = escape_step[static_cast<std::size_t>(first)];
            w.escape_point = escape_point[static_cast<std::size_t>(first)];
            w.escape_distance = std::sqrt(dist_sq[fine.cell_of(w.escape_point)]);
            last_witness = w;
            delta *= 0.5;
            ++iter;
        }
        res.witness = last_witness;
        report.results.push_back(res);
        ++eps_idx;
    }
    return report;
}

SaturationReport saturation_check(const SystemView& view, const CellSet& s,
                                  const SaturationParams& params) {
    if (s.members.empty()) throw ValidationError("saturation check needs a nonempty cell set");
    view.system().ensure_certified();
    CellSet fattened = s.fatten(params.fatten);
    const Grid3& grid = s.grid;
    double max_seg = params.max_seg > 0.0 ? params.max_seg : 1.0 / (4.0 * grid.n_base);

    // Seeded distinct member cells (all of them when the set is small).
    std::vector<std::uint32_t> probes;
    if (static_cast<std::int64_t>(s.members.size()) <= params.n_probe) {
        probes = s.members;
    } else {
        std::vector<std::uint8_t> taken(s.members.size(), 0);
        Rng rng(derive_seed(params.seed, RngTag::saturation_probe, 0));
        int guard = 0;
        while (static_cast<int>(probes.size()) < params.n_probe &&
               guard < 64 * params.n_probe) {
            std::size_t idx = rng.uniform_index(s.members.size());
            ++guard;
            if (taken[idx]) continue;
            taken[idx] = 1;
            probes.push_back(s.members[idx]);
        }
        std::sort(probes.begin(), probes.end());
    }

    std::vector<std::vector<SaturationViolation>> per_probe(probes.size());
    std::vector<std::int64_t> node_counts(probes.size(), 0);
    std::vector<std::exception_ptr> errs(probes.size());
    parallel_for(static_cast<std::int64_t>(probes.size()), params.exec, [&](std::int64_t pi) {
        try {
            PointX anchor = grid.center(probes[static_cast<std::size_t>(pi)]);
            LeafGraph g = local_leaf_segment(view, anchor, LeafKind::unstable,
                                             params.leaf_radius, max_seg, params.n_back,
                                             params.node_tol);
            node_counts[static_cast<std::size_t>(pi)] =
                static_cast<std::int64_t>(g.nodes.size());
            for (const LeafNode& n : g.nodes) {
                std::uint32_t c = grid.cell_of(n.point);
                if (!fattened.contains(c)) {
                    per_probe[static_cast<std::size_t>(pi)].push_back(
                        {static_cast<int>(pi), c, n.t, n.point});
                }
            }
        } catch (...) {
            errs[static_cast<std::size_t>(pi)] = std::current_exception();
        }
    });
    for (const auto& e : errs) {
        if (e) std::rethrow_exception(e);
    }
    SaturationReport report;
    report.n_probe = static_cast<int>(probes.size());
    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
        report.nodes_checked += node_counts[pi];
        for (const auto& v : per_probe[pi]) report.violations.push_back(v);
    }
    return report;
}

}  // namespace attractorlab
