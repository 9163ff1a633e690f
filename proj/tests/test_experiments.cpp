#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "attractorlab/experiments.hpp"
#include "attractorlab/manifolds.hpp"

using namespace attractorlab;
namespace fs = std::filesystem;

namespace {

ToralAutomorphism cat() { return ToralAutomorphism(2, 1, 1, 1); }

SkewProduct product_system() {
    return SkewProduct(cat(), FiberFamily(CircleMap(0.0, {{1, 0.08, 0.0}}), {}));
}

SkewProduct modulated_system() {
    Modulation m1{{ModulationTarget::Kind::c0, 0}, 1, 0, 0.01, 0.0};
    Modulation m2{{ModulationTarget::Kind::c0, 0}, 0, 1, 0.01, 0.0};
    return SkewProduct(cat(), FiberFamily(CircleMap(0.0, {{1, 0.08, 0.0}}), {m1, m2}));
}

SkewProduct rotation_system() {
    Modulation m1{{ModulationTarget::Kind::c0, 0}, 1, 0, 0.01, 0.0};
    Modulation m2{{ModulationTarget::Kind::c0, 0}, 0, 1, 0.01, 0.0};
    return SkewProduct(cat(),
                       FiberFamily(CircleMap(0.6180339887498949, {{1, 0.02, 0.0}}), {m1, m2}));
}

// Desk-scale configuration so every suite finishes in seconds.
ExperimentConfig small_config() {
    ExperimentConfig c;
    c.grid = Grid3{16, 16};
    c.attractor.n_samples = 16;
    c.attractor.n_steps = 20000;
    c.attractor.burn_in = 2000;
    c.stability.eps_list = {0.05};
    c.stability.n_steps = 2000;
    c.stability.n_boundary_samples = 16;
    c.saturation.n_probe = 30;
    c.saturation.leaf_radius = 3.0;
    c.nw_grid = Grid3{16, 16};
    c.nw_n_steps = 20000;
    c.nonwander.steps_per_cell = 2000;
    c.nonwander.horizon = 1000;
    c.seed = 5;
    c.propagate();
    return c;
}

int fiber_row(const Grid3& g, std::uint32_t cell) {
    int i, j, k;
    g.decompose(cell, i, j, k);
    return k;
}

const CheckEntry* find_entry(const SuiteReport& rep, const std::string& name) {
    for (const auto& e : rep.entries)
        if (e.name == name) return &e;
    return nullptr;
}

double metric_of(const CheckEntry& e, const std::string& key) {
    for (const auto& kv : e.metrics)
        if (kv.first == key) return kv.second;
    FAIL("missing metric ", key);
    return 0.0;
}

}  // namespace

TEST_CASE("leaf_parameter recovers arclength through integer wraps") {
    SkewProduct sys = product_system();
    SystemView view(sys);
    Vec2 vu = cat().v_u();
    Vec2 vs = cat().v_s();
    TorusPoint origin{0.0, 0.0};
    for (double t : {0.3, -1.7, 4.0}) {
        TorusPoint q = wrap_point(t * vu.x1, t * vu.x2);
        auto got = leaf_parameter(view, origin, q, LeafKind::unstable);
        REQUIRE(got.has_value());
        CHECK(*got == doctest::Approx(t).epsilon(1e-9));
    }
    TorusPoint qs = wrap_point(0.7 * vs.x1, 0.7 * vs.x2);
    auto got_s = leaf_parameter(view, origin, qs, LeafKind::stable);
    REQUIRE(got_s.has_value());
    CHECK(*got_s == doctest::Approx(0.7).epsilon(1e-9));
    // Off the leaf, and beyond the shift horizon.
    CHECK_FALSE(leaf_parameter(view, origin, {0.5, 0.5}, LeafKind::unstable).has_value());
    TorusPoint far = wrap_point(4.0 * vu.x1, 4.0 * vu.x2);
    CHECK_FALSE(leaf_parameter(view, origin, far, LeafKind::unstable, 1).has_value());
}

TEST_CASE("system descriptions are stable and distinguish presets") {
    std::string a = describe_system(product_system());
    std::string b = describe_system(modulated_system());
    CHECK_FALSE(a.empty());
    CHECK(a != b);
    CHECK(a.find("base") != std::string::npos);
    CHECK(describe_system(product_system()) == a);
}

TEST_CASE("artifact sink writes through a temp file or stays silent") {
    ArtifactSink silent;
    CHECK(silent.write("x.csv", "data\n").empty());

    fs::path dir = fs::temp_directory_path() / "alab_exp_sink";
    fs::remove_all(dir);
    fs::create_directories(dir);
    ArtifactSink sink{dir.string()};
    std::string name = sink.write("x.csv", "a,b\n1,2\n");
    CHECK(name == "x.csv");
    std::ifstream in(dir / "x.csv");
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == "a,b\n1,2\n");
    CHECK_FALSE(fs::exists(dir / "x.csv.tmp"));
    fs::remove_all(dir);
}

TEST_CASE("repeller transport distance vanishes for the product system") {
    SkewProduct sys = product_system();
    SystemView view(sys);
    fs::path dir = fs::temp_directory_path() / "alab_exp_a1";
    fs::remove_all(dir);
    fs::create_directories(dir);
    Assumption1Result res =
        assumption1_check(view, {0.0, 0.0}, 1, small_config(), ArtifactSink{dir.string()});
    CHECK(res.entry.status == CheckStatus::fail);
    CHECK(res.n_repellers == 1);
    CHECK_FALSE(res.vacuous);
    CHECK(res.min_distance < 1e-9);
    REQUIRE(res.entry.artifacts.size() == 1);
    CHECK(fs::exists(dir / res.entry.artifacts[0]));
    fs::remove_all(dir);
}

TEST_CASE("repeller transport distance is macroscopic for the modulated system") {
    SkewProduct sys = modulated_system();
    SystemView view(sys);
    Assumption1Result res = assumption1_check(view, {0.0, 0.0}, 1, small_config());
    CHECK(res.entry.status == CheckStatus::pass);
    CHECK(res.min_distance > 5e-3);
    CHECK(res.min_distance < 0.5);
}

TEST_CASE("decomposition matches every sample to the single attractor closure") {
    SkewProduct sys = product_system();
    SystemView view(sys);
    DecompositionResult res = attractor_decomposition(view, {0.0, 0.0}, 1, small_config());
    CHECK(res.entry.status == CheckStatus::pass);
    REQUIRE(res.closures.size() == 1);
    CHECK(res.matched == std::vector<int>{0});
    CHECK(res.max_match_distance <= metric_of(res.entry, "tolerance"));
    CHECK(res.union_hausdorff <= metric_of(res.entry, "tolerance"));
    // The closure is the full attracting sheet.
    CHECK(res.closures[0].count() == 256);
    for (std::uint32_t cell : res.closures[0].members)
        CHECK(fiber_row(res.closures[0].grid, cell) == 8);
}

TEST_CASE("verification suite passes on the product system and takes the thin branch") {
    SkewProduct sys = product_system();
    SystemView view(sys);
    TheoremAResult res = theoremA_suite(view, small_config());
    const char* names[6] = {"certificate", "coincidence", "containment",
                            "stability",   "dichotomy",   "saturation"};
    REQUIRE(res.report.entries.size() == 6);
    for (int i = 0; i < 6; ++i) {
        CHECK(res.report.entries[static_cast<std::size_t>(i)].name == names[i]);
        CHECK(res.report.entries[static_cast<std::size_t>(i)].status == CheckStatus::pass);
    }
    CHECK(res.report.aggregate() == CheckStatus::pass);
    CHECK(res.branch == DichotomyBranch::zero_measure);

    const CheckEntry* dich = find_entry(res.report, "dichotomy");
    REQUIRE(dich != nullptr);
    CHECK(metric_of(*dich, "fraction_coarse") == doctest::Approx(256.0 / 4096.0));
    CHECK(metric_of(*dich, "fraction_fine") == doctest::Approx(1024.0 / 32768.0));
    CHECK(metric_of(*dich, "shrink_ratio") == doctest::Approx(2.0));

    CHECK(res.pair.statistical.union_set.count() == 256);
    const CheckEntry* coin = find_entry(res.report, "coincidence");
    REQUIRE(coin != nullptr);
    CHECK(metric_of(*coin, "hausdorff") <= metric_of(*coin, "tolerance"));
}

TEST_CASE("verification suite output is reproducible") {
    SkewProduct sys = modulated_system();
    SystemView view(sys);
    TheoremAResult a = theoremA_suite(view, small_config());
    TheoremAResult b = theoremA_suite(view, small_config());
    REQUIRE(a.report.entries.size() == b.report.entries.size());
    for (std::size_t i = 0; i < a.report.entries.size(); ++i) {
        CHECK(a.report.entries[i].name == b.report.entries[i].name);
        CHECK(a.report.entries[i].status == b.report.entries[i].status);
        CHECK(a.report.entries[i].metrics == b.report.entries[i].metrics);
    }
    CHECK(a.branch == b.branch);
}

TEST_CASE("fiber rotation scan grows the graph value by at least the rotation") {
    SkewProduct sys = product_system();
    SystemView view(sys);
    auto pts = fiberwise_periodic_points(view, {0.0, 0.0}, 1);
    REQUIRE(pts[1].attracting);
    Vec2 vu = cat().v_u();
    TorusPoint q = wrap_point(0.3 * vu.x1, 0.3 * vu.x2);
    std::vector<double> bs = {0.0, 0.002, 0.004, 0.006, 0.008, 0.01};
    PerturbationScanResult res = perturbation_scan(view, pts[1], bs, q, small_config());
    CHECK(res.entry.status == CheckStatus::pass);
    CHECK_FALSE(res.continuation_lost);
    REQUIRE(res.points.size() == 6);
    CHECK(std::fabs(res.points[0].z_hat - 0.5) < 1e-8);
    for (std::size_t i = 1; i < res.points.size(); ++i) {
        double db = res.points[i].b - res.points[i - 1].b;
        CHECK(res.points[i].z_hat - res.points[i - 1].z_hat >= db - 1e-6);
    }
    // The product response has slope asin'(0)/(2 pi) / 0.08 ~ 1.99.
    double slope = (res.points.back().z_hat - res.points.front().z_hat) / 0.01;
    CHECK(slope == doctest::Approx(1.989).epsilon(0.05));
}

TEST_CASE("fiber rotation scan reports loss of continuation past the saddle-node") {
    SkewProduct sys = product_system();
    SystemView view(sys);
    auto pts = fiberwise_periodic_points(view, {0.0, 0.0}, 1);
    Vec2 vu = cat().v_u();
    TorusPoint q = wrap_point(0.3 * vu.x1, 0.3 * vu.x2);
    PerturbationScanResult res =
        perturbation_scan(view, pts[1], {0.0, 0.04, 0.09}, q, small_config());
    CHECK(res.continuation_lost);
    CHECK(res.critical_b == doctest::Approx(0.09));
    CHECK(res.points.size() == 2);
    CHECK(res.entry.status == CheckStatus::fail);
}

TEST_CASE("fiber rotation scan validates its inputs") {
    SkewProduct sys = product_system();
    SystemView view(sys);
    auto pts = fiberwise_periodic_points(view, {0.0, 0.0}, 1);
    Vec2 vu = cat().v_u();
    TorusPoint q = wrap_point(0.3 * vu.x1, 0.3 * vu.x2);
    ExperimentConfig cfg = small_config();
    CHECK_THROWS_AS(perturbation_scan(view, pts[1], {}, q, cfg), ValidationError);
    CHECK_THROWS_AS(perturbation_scan(view, pts[1], {0.01, 0.005}, q, cfg), ValidationError);
    CHECK_THROWS_AS(perturbation_scan(view, pts[1], {-0.01, 0.0}, q, cfg), ValidationError);
    CHECK_THROWS_AS(perturbation_scan(view, pts[1], {0.0, 0.01}, {0.5, 0.5}, cfg),
                    ValidationError);
}

TEST_CASE("thin-branch nonwandering check is small and inside the fattened hull") {
    SkewProduct sys = modulated_system();
    SystemView view(sys);
    CorollaryBResult res =
        corollaryB_check(view, small_config(), DichotomyBranch::zero_measure);
    CHECK(res.entry.status == CheckStatus::pass);
    CHECK(res.fraction < 0.2);
    CHECK(res.fraction > 0.0);
    CHECK(metric_of(res.entry, "cells_outside_hull") == 0.0);
}

TEST_CASE("full-branch density check sees one orbit fill the grid") {
    SkewProduct sys = rotation_system();
    SystemView view(sys);
    CorollaryBResult res = corollaryB_check(view, small_config(), DichotomyBranch::full);
    CHECK(res.entry.status == CheckStatus::pass);
    CHECK(res.fraction >= 0.95);
}

TEST_CASE("inconclusive branch propagates without running estimates") {
    SkewProduct sys = product_system();
    SystemView view(sys);
    CorollaryBResult res =
        corollaryB_check(view, small_config(), DichotomyBranch::inconclusive);
    CHECK(res.entry.status == CheckStatus::inconclusive);
    InverseSuiteResult inv =
        inverse_system_suite(view, small_config(), DichotomyBranch::inconclusive);
    CHECK(inv.entry.status == CheckStatus::inconclusive);
}

TEST_CASE("forward and backward limit sets of the modulated system are disjoint bands") {
    SkewProduct sys = modulated_system();
    SystemView view(sys);
    InverseSuiteResult res =
        inverse_system_suite(view, small_config(), DichotomyBranch::zero_measure);
    CHECK(res.entry.status == CheckStatus::pass);
    CHECK(res.forward_set.count() > 0);
    CHECK(res.backward_set.count() > 0);
    CHECK(res.intersection_fraction == 0.0);
    // Attracting band lives near y = 1/2, repelling band near y = 0.
    for (std::uint32_t cell : res.forward_set.members) {
        int r = fiber_row(res.forward_set.grid, cell);
        CHECK(r >= 7);
        CHECK(r <= 10);
    }
    for (std::uint32_t cell : res.backward_set.members) {
        int r = fiber_row(res.backward_set.grid, cell);
        CHECK((r >= 14 || r <= 1));
    }
}

TEST_CASE("the inverse view swaps the forward and backward sets verbatim") {
    SkewProduct sys = modulated_system();
    SystemView view(sys);
    InverseSuiteResult fwd =
        inverse_system_suite(view, small_config(), DichotomyBranch::zero_measure);
    InverseSuiteResult bwd =
        inverse_system_suite(view.inverse(), small_config(), DichotomyBranch::zero_measure);
    CHECK(fwd.forward_set.members == bwd.backward_set.members);
    CHECK(fwd.backward_set.members == bwd.forward_set.members);
}

TEST_CASE("full-branch inverse comparison overlaps and notes vacuous closures") {
    SkewProduct sys = rotation_system();
    SystemView view(sys);
    InverseSuiteResult res = inverse_system_suite(view, small_config(), DichotomyBranch::full);
    CHECK(res.entry.status == CheckStatus::pass);
    CHECK(res.intersection_fraction > 0.5);
    bool noted = false;
    for (const auto& kv : res.entry.notes)
        if (kv.first == "closures" && kv.second.find("vacuous") != std::string::npos)
            noted = true;
    CHECK(noted);
}

TEST_CASE("aggregate status realises fail > inconclusive > pass") {
    SuiteReport rep;
    CheckEntry a;
    a.name = "a";
    a.status = CheckStatus::pass;
    rep.entries.push_back(a);
    CHECK(rep.aggregate() == CheckStatus::pass);
    CheckEntry b;
    b.name = "b";
    b.status = CheckStatus::inconclusive;
    rep.entries.push_back(b);
    CHECK(rep.aggregate() == CheckStatus::inconclusive);
    CheckEntry c;
    c.name = "c";
    c.status = CheckStatus::fail;
    rep.entries.push_back(c);
    CHECK(rep.aggregate() == CheckStatus::fail);
    CHECK(std::string(to_cstring(CheckStatus::pass)) == "pass");
    CHECK(std::string(to_cstring(DichotomyBranch::zero_measure)) == "zero_measure");
}
