#include "attractorlab/cli.hpp"

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "attractorlab/artifacts.hpp"
#include "attractorlab/config.hpp"
#include "attractorlab/errors.hpp"
#include "attractorlab/experiments.hpp"
#include "attractorlab/limit_sets.hpp"
#include "attractorlab/manifolds.hpp"

namespace attractorlab {

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 2;
constexpr int kExitInconclusive = 3;
constexpr int kExitUsage = 64;

struct GlobalFlags {
    std::string system_path;
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    bool out_set = false;
    int grid = 0;
    bool quiet = false;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

RunConfig load_config(const GlobalFlags& g) {
    std::string path = g.system_path.empty() ? g.config_path : g.system_path;
    RunConfig cfg = parse_config(path);
    if (g.seed_set) cfg.experiment.seed = g.seed;
    if (g.out_set) cfg.out = g.out;
    if (g.grid > 0) {
        if (g.grid < 8) throw ValidationError("--grid must be >= 8");
        cfg.experiment.grid = Grid3{g.grid, g.grid};
    }
    cfg.experiment.propagate();
    return cfg;
}

// Run directory for this config: <out root>/<config hash>.
std::string run_dir_for(const RunConfig& cfg) {
    std::string root = cfg.out.empty() ? "runs" : cfg.out;
    return root + "/" + config_hash(cfg);
}

void print_entry(const CheckEntry& e, bool quiet) {
    if (quiet) return;
    std::string line = e.name + ": " + to_cstring(e.status);
    for (const auto& [key, value] : e.metrics) line += " " + key + "=" + fmt(value);
    std::cout << line << "\n";
    for (const auto& [key, value] : e.notes)
        std::cout << "  " << key << ": " << value << "\n";
}

int status_code(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return kExitPass;
        case CheckStatus::fail: return kExitFail;
        default: return kExitInconclusive;
    }
}

int finish_report(const SuiteReport& rep, const RunConfig& cfg, bool quiet) {
    std::string dir = run_dir_for(cfg);
    std::string echo = serialize_config(cfg);
    atomic_write(dir + "/config.json", echo);
    atomic_write(dir + "/report.json", report_json(rep, echo));
    for (const auto& e : rep.entries) print_entry(e, quiet);
    CheckStatus agg = rep.aggregate();
    if (!quiet) {
        std::cout << "status: " << to_cstring(agg) << "\n";
        std::cout << "report: " << dir << "/report.json\n";
    }
    return status_code(agg);
}

SuiteReport wrap_entry(const SkewProduct& sys, const RunConfig& cfg, CheckEntry entry) {
    SuiteReport rep;
    rep.system_description = describe_system(sys);
    rep.seed = cfg.experiment.seed;
    rep.entries.push_back(std::move(entry));
    return rep;
}

TorusPoint base_fixed_point(const SystemView& view) {
    auto pts = view.system().base().periodic_points(1);
    if (pts.empty()) throw NoneFoundError("base automorphism has no fixed point");
    return pts[0];
}

FiberPeriodicPoint anchor_orbit(const SystemView& view, const TorusPoint& p,
                                bool repelling) {
    auto pts = fiberwise_periodic_points(view, p, 1);
    for (const auto& fp : pts)
        if (fp.attracting != repelling) return fp;
    throw NoPeriodicOrbitsError(repelling ? "no repelling fiberwise periodic orbit over p"
                                          : "no attracting fiberwise periodic orbit over p");
}

int cmd_certify(const GlobalFlags& g) {
    RunConfig cfg = load_config(g);
    SkewProduct sys = build_system(cfg.system);
    const HyperbolicityCertificate& cert = sys.certificate();
    std::string dir = run_dir_for(cfg);
    atomic_write(dir + "/certificate.json", certificate_json(cert));
    if (!g.quiet) {
        if (cert.ok) {
            std::cout << "certificate: pass derivative in [" << fmt(cert.inf_certified)
                      << ", " << fmt(cert.sup_certified) << "] margins stable="
                      << fmt(cert.margin_stable) << " unstable=" << fmt(cert.margin_unstable)
                      << "\n";
        } else {
            std::cout << "certificate: fail violated_side=" << cert.violated_side
                      << " certified range [" << fmt(cert.inf_certified) << ", "
                      << fmt(cert.sup_certified) << "]\n";
        }
        std::cout << "report: " << dir << "/certificate.json\n";
    }
    return cert.ok ? kExitPass : kExitFail;
}

int cmd_orbit(const GlobalFlags& g, std::int64_t steps, std::int64_t burn_in,
              const std::vector<double>& start, bool inverse) {
    RunConfig cfg = load_config(g);
    SkewProduct sys = build_system(cfg.system);
    PointX p0;
    if (!start.empty()) {
        p0 = PointX{wrap_point(start[0], start[1]), wrap01(start[2])};
    } else {
        p0 = random_point(cfg.experiment.seed, RngTag::generic, 0);
    }
    auto pts = sys.orbit(p0, steps, burn_in, inverse);
    std::string dir = run_dir_for(cfg);
    atomic_write(dir + "/orbit.csv", csv_orbit(pts));
    if (!g.quiet && !pts.empty()) {
        const PointX& last = pts.back();
        std::cout << "orbit: " << pts.size() << " points, last (" << fmt(last.base.x1)
                  << ", " << fmt(last.base.x2) << ", " << fmt(last.y) << ")\n";
        std::cout << "report: " << dir << "/orbit.csv\n";
    }
    return kExitPass;
}

int cmd_attractor(const GlobalFlags& g, const std::string& kind_name) {
    RunConfig cfg = load_config(g);
    SkewProduct sys = build_system(cfg.system);
    SystemView view(sys);
    AttractorKind kind =
        kind_name == "milnor" ? AttractorKind::milnor : AttractorKind::statistical;
    AttractorEstimate est =
        attractor_estimate(view, kind, cfg.experiment.grid, cfg.experiment.attractor);
    std::string dir = run_dir_for(cfg);
    atomic_write(dir + "/cells.csv", csv_cells(est.union_set));
    atomic_write(dir + "/heatmap.ppm", ppm_heatmap(est.union_set));
    SuiteReport rep;
    rep.system_description = describe_system(sys);
    rep.seed = cfg.experiment.seed;
    CheckEntry e;
    e.name = std::string("attractor_") + kind_name;
    e.metric("cells", static_cast<double>(est.union_set.count()));
    e.metric("fraction", est.union_set.fraction());
    e.artifacts = {"cells.csv", "heatmap.ppm"};
    rep.entries.push_back(e);
    atomic_write(dir + "/summary.json", report_json(rep, serialize_config(cfg)));
    if (!g.quiet) {
        std::cout << "attractor (" << kind_name << "): " << est.union_set.count()
                  << " cells, fraction " << fmt(est.union_set.fraction()) << "\n";
        std::cout << "report: " << dir << "/summary.json\n";
    }
    return kExitPass;
}

int cmd_manifold(const GlobalFlags& g, const std::string& kind_name, bool repeller,
                 double radius, bool closure) {
    RunConfig cfg = load_config(g);
    SkewProduct sys = build_system(cfg.system);
    SystemView view(sys);
    LeafKind kind = kind_name == "stable" ? LeafKind::stable : LeafKind::unstable;
    TorusPoint p = base_fixed_point(view);
    FiberPeriodicPoint anchor = anchor_orbit(view, p, repeller);
    double max_seg = 1.0 / (4.0 * cfg.experiment.grid.n_base);
    LeafGraph graph = leaf_graph(view, anchor, kind, radius, max_seg,
                                 cfg.experiment.closure.n_back,
                                 cfg.experiment.closure.node_tol);
    std::string dir = run_dir_for(cfg);
    atomic_write(dir + "/leaf.csv", csv_leaf(graph));
    if (!g.quiet)
        std::cout << "leaf: " << graph.nodes.size() << " nodes over (" << fmt(p.x1) << ", "
                  << fmt(p.x2) << ") fiber " << fmt(anchor.y) << "\n";
    if (closure) {
        ClosureEstimate ce =
            closure_estimate(view, graph, cfg.experiment.grid,
                             cfg.experiment.closure.stall_length,
                             cfg.experiment.closure.radius_budget);
        atomic_write(dir + "/closure.csv", csv_cells(ce.cells));
        atomic_write(dir + "/closure.ppm", ppm_heatmap(ce.cells));
        if (!g.quiet)
            std::cout << "closure: " << ce.cells.count() << " cells, converged "
                      << (ce.converged ? "yes" : "no") << ", radius "
                      << fmt(ce.reached_radius) << "\n";
    }
    if (!g.quiet) std::cout << "report: " << dir << "/leaf.csv\n";
    return kExitPass;
}

int cmd_stability(const GlobalFlags& g) {
    RunConfig cfg = load_config(g);
    SkewProduct sys = build_system(cfg.system);
    SystemView view(sys);
    AttractorEstimate est = attractor_estimate(view, AttractorKind::statistical,
                                               cfg.experiment.grid, cfg.experiment.attractor);
    StabilityProbeReport probe =
        lyapunov_stability_probe(view, est.union_set, cfg.experiment.stability);
    std::string dir = run_dir_for(cfg);
    atomic_write(dir + "/stability.json", probe_json(probe));
    bool all_ok = true;
    for (const auto& r : probe.results) {
        bool ok = !r.witness.has_value() &&
                  r.delta_found >= r.eps / cfg.experiment.thresholds.stability_ratio;
        all_ok = all_ok && ok;
        if (!g.quiet) {
            if (r.witness) {
                std::cout << "eps=" << fmt(r.eps) << ": escape witness at step "
                          << r.witness->escape_step << "\n";
            } else {
                std::cout << "eps=" << fmt(r.eps) << ": no escape found at resolution delta="
                          << fmt(r.delta_found) << "\n";
            }
        }
    }
    if (!g.quiet) std::cout << "report: " << dir << "/stability.json\n";
    return all_ok ? kExitPass : kExitFail;
}

int cmd_assumption1(const GlobalFlags& g) {
    RunConfig cfg = load_config(g);
    SkewProduct sys = build_system(cfg.system);
    SystemView view(sys);
    TorusPoint p = base_fixed_point(view);
    ArtifactSink sink{run_dir_for(cfg)};
    Assumption1Result res = assumption1_check(view, p, 1, cfg.experiment, sink);
    return finish_report(wrap_entry(sys, cfg, res.entry), cfg, g.quiet);
}

int cmd_decompose(const GlobalFlags& g) {
    RunConfig cfg = load_config(g);
    SkewProduct sys = build_system(cfg.system);
    SystemView view(sys);
    TorusPoint p = base_fixed_point(view);
    ArtifactSink sink{run_dir_for(cfg)};
    DecompositionResult res = attractor_decomposition(view, p, 1, cfg.experiment, sink);
    return finish_report(wrap_entry(sys, cfg, res.entry), cfg, g.quiet);
}

int cmd_theorem_a(const GlobalFlags& g) {
    RunConfig cfg = load_config(g);
    SkewProduct sys = build_system(cfg.system);
    SystemView view(sys);
    ArtifactSink sink{run_dir_for(cfg)};
    TheoremAResult res = theoremA_suite(view, cfg.experiment, sink);
    return finish_report(res.report, cfg, g.quiet);
}

int cmd_corollary_b(const GlobalFlags& g) {
    RunConfig cfg = load_config(g);
    SkewProduct sys = build_system(cfg.system);
    SystemView view(sys);
    ArtifactSink sink{run_dir_for(cfg)};
    TheoremAResult ta = theoremA_suite(view, cfg.experiment, sink);
    CorollaryBResult cb = corollaryB_check(view, cfg.experiment, ta.branch, sink);
    SuiteReport rep = ta.report;
    rep.entries.push_back(cb.entry);
    return finish_report(rep, cfg, g.quiet);
}

int cmd_perturb_scan(const GlobalFlags& g, double b_max, int b_count, double t_probe) {
    RunConfig cfg = load_config(g);
    if (b_count < 2) throw ValidationError("--b-count must be >= 2");
    SkewProduct sys = build_system(cfg.system);
    SystemView view(sys);
    TorusPoint p = base_fixed_point(view);
    FiberPeriodicPoint anchor = anchor_orbit(view, p, false);
    Vec2 v = view.expanding_direction();
    TorusPoint q = wrap_point(p.x1 + t_probe * v.x1, p.x2 + t_probe * v.x2);
    std::vector<double> b_values;
    for (int i = 0; i < b_count; ++i)
        b_values.push_back(b_max * static_cast<double>(i) / (b_count - 1));
    ArtifactSink sink{run_dir_for(cfg)};
    PerturbationScanResult res =
        perturbation_scan(view, anchor, b_values, q, cfg.experiment, sink);
    return finish_report(wrap_entry(sys, cfg, res.entry), cfg, g.quiet);
}

int cmd_inverse_suite(const GlobalFlags& g) {
    RunConfig cfg = load_config(g);
    SkewProduct sys = build_system(cfg.system);
    SystemView view(sys);
    ArtifactSink sink{run_dir_for(cfg)};
    TheoremAResult ta = theoremA_suite(view, cfg.experiment, sink);
    InverseSuiteResult res = inverse_system_suite(view, cfg.experiment, ta.branch, sink);
    SuiteReport rep = ta.report;
    rep.entries.push_back(res.entry);
    return finish_report(rep, cfg, g.quiet);
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args) {
    CLI::App app{"numerical laboratory for skew products over toral automorphisms"};
    app.require_subcommand(0, 1);

    GlobalFlags g;
    app.add_option("--system", g.system_path, "system preset or config file (JSON)");
    app.add_option("--config", g.config_path, "full run config file (JSON)");
    auto* seed_opt = app.add_option("--seed", g.seed, "global 64-bit seed override");
    auto* out_opt = app.add_option("--out", g.out, "output root directory");
    app.add_option("--grid", g.grid, "cubic grid resolution override");
    app.add_flag("--quiet", g.quiet, "suppress progress output");

    auto* certify = app.add_subcommand("certify", "partial-hyperbolicity certificate");
    auto* orbit = app.add_subcommand("orbit", "iterate one orbit and export it");
    std::int64_t orbit_steps = 1000;
    std::int64_t orbit_burn = 0;
    std::vector<double> orbit_start;
    bool orbit_inverse = false;
    orbit->add_option("--steps", orbit_steps, "recorded steps");
    orbit->add_option("--burn-in", orbit_burn, "discarded transient steps");
    orbit->add_option("--start", orbit_start, "start point x1 x2 y")->expected(3);
    orbit->add_flag("--inverse", orbit_inverse, "iterate the inverse system");

    auto* attractor = app.add_subcommand("attractor", "limit-set estimate on a grid");
    std::string attractor_kind = "statistical";
    attractor->add_option("--kind", attractor_kind, "estimate kind")
        ->check(CLI::IsMember({"milnor", "statistical"}));

    auto* manifold = app.add_subcommand("manifold", "invariant leaf graph and closure");
    std::string manifold_kind = "unstable";
    bool manifold_repeller = false;
    double manifold_radius = 5.0;
    bool manifold_closure = false;
    manifold->add_option("--kind", manifold_kind, "leaf kind")
        ->check(CLI::IsMember({"unstable", "stable"}));
    manifold->add_flag("--repeller", manifold_repeller, "anchor at a repelling orbit");
    manifold->add_option("--radius", manifold_radius, "graph radius (base arclength)");
    manifold->add_flag("--closure", manifold_closure, "also grow the closure estimate");

    auto* stability = app.add_subcommand("stability", "Lyapunov stability probe");
    auto* assumption1 = app.add_subcommand("assumption1", "repeller-transport check");
    auto* decompose = app.add_subcommand("decompose", "attractor decomposition check");
    auto* theorem_a = app.add_subcommand("theorem-a", "full verification suite");
    auto* corollary_b = app.add_subcommand("corollary-b", "nonwandering/density check");

    auto* perturb = app.add_subcommand("perturb-scan", "fiber-rotation monotonicity scan");
    double b_max = 0.01;
    int b_count = 6;
    double t_probe = 0.3;
    perturb->add_option("--b-max", b_max, "largest rotation parameter");
    perturb->add_option("--b-count", b_count, "number of scan points");
    perturb->add_option("--t", t_probe, "probe parameter on the base unstable leaf");

    auto* inverse_suite = app.add_subcommand("inverse-suite", "forward/backward comparison");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return kExitUsage;
    }
    if (g.system_path.empty() == g.config_path.empty()) {
        std::cerr << "exactly one of --system or --config is required\n";
        return kExitUsage;
    }
    g.seed_set = seed_opt->count() > 0;
    g.out_set = out_opt->count() > 0;

    try {
        if (certify->parsed()) return cmd_certify(g);
        if (orbit->parsed())
            return cmd_orbit(g, orbit_steps, orbit_burn, orbit_start, orbit_inverse);
        if (attractor->parsed()) return cmd_attractor(g, attractor_kind);
        if (manifold->parsed())
            return cmd_manifold(g, manifold_kind, manifold_repeller, manifold_radius,
                                manifold_closure);
        if (stability->parsed()) return cmd_stability(g);
        if (assumption1->parsed()) return cmd_assumption1(g);
        if (decompose->parsed()) return cmd_decompose(g);
        if (theorem_a->parsed()) return cmd_theorem_a(g);
        if (corollary_b->parsed()) return cmd_corollary_b(g);
        if (perturb->parsed()) return cmd_perturb_scan(g, b_max, b_count, t_probe);
        if (inverse_suite->parsed()) return cmd_inverse_suite(g);
    } catch (const CertificateFailedError& e) {
        std::cerr << "certificate failed: " << e.what() << "\n";
        return kExitFail;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitFail;
    } catch (const ValidationError& e) {
        std::cerr << "invalid value: " << e.what() << "\n";
        return kExitFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}

}  // namespace attractorlab
