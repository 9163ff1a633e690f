#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "attractorlab/limit_sets.hpp"

using namespace attractorlab;

namespace {

// Product system: cat map below, y + 0.08 sin(2 pi y) on every fiber.  The
// attracting circle y = 1/2 and the repelling circle y = 0 are invariant
// sheets, and the fiber coordinate is exactly constant on each.
SkewProduct product_system() {
    return SkewProduct(ToralAutomorphism(2, 1, 1, 1),
                       FiberFamily(CircleMap(0.0, {{1, 0.08, 0.0}}), {}));
}

SkewProduct modulated_system() {
    Modulation m1{{ModulationTarget::Kind::c0, 0}, 1, 0, 0.01, 0.0};
    Modulation m2{{ModulationTarget::Kind::c0, 0}, 0, 1, 0.01, 0.0};
    return SkewProduct(ToralAutomorphism(2, 1, 1, 1),
                       FiberFamily(CircleMap(0.0, {{1, 0.08, 0.0}}), {m1, m2}));
}

int fiber_row(const Grid3& g, std::uint32_t cell) {
    int i, j, k;
    g.decompose(cell, i, j, k);
    return k;
}

AttractorParams small_params(std::uint64_t seed = 7) {
    AttractorParams p;
    p.n_samples = 16;
    p.n_steps = 20000;
    p.burn_in = 2000;
    p.seed = seed;
    return p;
}

}  // namespace

TEST_CASE("random_point is deterministic, tagged and in range") {
    PointX a = random_point(5, RngTag::attractor_sample, 3);
    PointX b = random_point(5, RngTag::attractor_sample, 3);
    CHECK(dist_x(a, b) == 0.0);
    PointX c = random_point(5, RngTag::attractor_sample, 4);
    CHECK(dist_x(a, c) > 0.0);
    PointX d = random_point(5, RngTag::probe_sample, 3);
    CHECK(dist_x(a, d) > 0.0);
    PointX e = random_point(6, RngTag::attractor_sample, 3);
    CHECK(dist_x(a, e) > 0.0);
    for (const PointX& p : {a, c, d, e}) {
        CHECK(p.base.x1 >= 0.0);
        CHECK(p.base.x1 < 1.0);
        CHECK(p.base.x2 >= 0.0);
        CHECK(p.base.x2 < 1.0);
        CHECK(p.y >= 0.0);
        CHECK(p.y < 1.0);
    }
}

TEST_CASE("visit histogram records every post-burn-in step on the invariant sheet") {
    SkewProduct sys = product_system();
    SystemView view(sys);
    Grid3 g{16, 16};
    VisitHistogram h = visit_histogram(view, {{0.2, 0.7}, 0.5}, 5000, 100, g);
    CHECK(h.total == 5000);
    CellSet occ = h.occupied();
    CHECK(occ.count() > 0);
    for (std::uint32_t cell : occ.members) CHECK(fiber_row(g, cell) == 8);
}

TEST_CASE("omega limit estimate keeps the orbit tail") {
    SkewProduct sys = product_system();
    SystemView view(sys);
    Grid3 g{16, 16};
    // A start on the repelling sheet stays on it (invariant circle y = 0).
    CellSet rep = omega_limit_estimate(view, {{0.3, 0.4}, 0.0}, 4000, 0.5, g);
    CHECK(rep.count() > 0);
    for (std::uint32_t cell : rep.members) CHECK(fiber_row(g, cell) == 0);
    // The total-space fixed point gives a single cell.
    CellSet fp = omega_limit_estimate(view, {{0.0, 0.0}, 0.0}, 1000, 0.5, g);
    CHECK(fp.count() == 1);
    CHECK(fp.members[0] == g.cell_of({{0.0, 0.0}, 0.0}));
    CHECK_THROWS_AS(omega_limit_estimate(view, {{0.0, 0.0}, 0.0}, 1000, 1.5, g),
                    ValidationError);
}

TEST_CASE("statistical estimate of the product system is exactly the attracting sheet") {
    SkewProduct sys = product_system();
    SystemView view(sys);
    Grid3 g{16, 16};
    AttractorEstimate est =
        attractor_estimate(view, AttractorKind::statistical, g, small_params());
    // All 256 base cells at the fiber row of y = 1/2, and nothing else.
    CHECK(est.union_set.count() == 256);
    for (std::uint32_t cell : est.union_set.members) CHECK(fiber_row(g, cell) == 8);
    REQUIRE(est.per_sample.size() == 16);
    for (const CellSet& s : est.per_sample) {
        CHECK(s.count() > 0);
        CHECK(s.subset_of(est.union_set));
    }
}

TEST_CASE("milnor estimate contains the statistical estimate from the same seeds") {
    SkewProduct sys = product_system();
    SystemView view(sys);
    Grid3 g{16, 16};
    AttractorEstimate mil = attractor_estimate(view, AttractorKind::milnor, g, small_params());
    AttractorEstimate stat =
        attractor_estimate(view, AttractorKind::statistical, g, small_params());
    CHECK(stat.union_set.subset_of(mil.union_set));
}

TEST_CASE("pair estimate shares orbits: statistical inside milnor cell for cell") {
    SkewProduct sys = modulated_system();
    SystemView view(sys);
    Grid3 g{16, 16};
    AttractorPairEstimate pair = attractor_pair_estimate(view, g, small_params());
    CHECK(pair.statistical.union_set.subset_of(pair.milnor.union_set));
    REQUIRE(pair.statistical.per_sample.size() == pair.milnor.per_sample.size());
    for (std::size_t i = 0; i < pair.statistical.per_sample.size(); ++i) {
        CHECK(pair.statistical.per_sample[i].subset_of(pair.milnor.per_sample[i]));
    }
    // The Milnor half of the pair equals the standalone Milnor estimate with
    // a full recorded window (both record n_steps cells after burn-in).
    AttractorParams mp = small_params();
    mp.tail_fraction = 1.0;
    AttractorEstimate mil = attractor_estimate(view, AttractorKind::milnor, g, mp);
    CHECK(pair.milnor.union_set.members == mil.union_set.members);
}

TEST_CASE("serial and parallel execution produce identical sets") {
    SkewProduct sys = modulated_system();
    SystemView view(sys);
    Grid3 g{16, 16};
    AttractorParams ser = small_params();
    ser.exec = ExecMode::serial;
    AttractorParams par = small_params();
    par.exec = ExecMode::openmp;
    AttractorEstimate a = attractor_estimate(view, AttractorKind::statistical, g, ser);
    AttractorEstimate b = attractor_estimate(view, AttractorKind::statistical, g, par);
    CHECK(a.union_set.members == b.union_set.members);
    REQUIRE(a.per_sample.size() == b.per_sample.size());
    for (std::size_t i = 0; i < a.per_sample.size(); ++i)
        CHECK(a.per_sample[i].members == b.per_sample[i].members);

    NonwanderingParams ns;
    ns.steps_per_cell = 400;
    ns.horizon = 200;
    ns.exec = ExecMode::serial;
    NonwanderingParams np = ns;
    np.exec = ExecMode::openmp;
    CellSet nw_s = nonwandering_estimate(view, g, ns);
    CellSet nw_p = nonwandering_estimate(view, g, np);
    CHECK(nw_s.members == nw_p.members);
}

TEST_CASE("estimates are reproducible for a fixed seed") {
    SkewProduct sys = modulated_system();
    SystemView view(sys);
    Grid3 g{16, 16};
    AttractorEstimate a =
        attractor_estimate(view, AttractorKind::statistical, g, small_params(11));
    AttractorEstimate b =
        attractor_estimate(view, AttractorKind::statistical, g, small_params(11));
    CHECK(a.union_set.members == b.union_set.members);
    for (std::size_t i = 0; i < a.per_sample.size(); ++i)
        CHECK(a.per_sample[i].members == b.per_sample[i].members);
}

TEST_CASE("raising the frequency cut shrinks the statistical set") {
    SkewProduct sys = product_system();
    SystemView view(sys);
    Grid3 g{16, 16};
    VisitHistogram h = visit_histogram(view, {{0.2, 0.7}, 0.5}, 20000, 1000, g);
    CellSet lo = omega_stat_estimate(h, 1e-5);
    CellSet mid = omega_stat_estimate(h, 0.003);
    CellSet hi = omega_stat_estimate(h, 0.02);
    CHECK(mid.subset_of(lo));
    CHECK(hi.subset_of(mid));
    CHECK(hi.count() < lo.count());
}

TEST_CASE("nonwandering estimate contains both invariant sheets of the product system") {
    SkewProduct sys = product_system();
    SystemView view(sys);
    Grid3 g{16, 16};
    NonwanderingParams np;
    np.steps_per_cell = 2000;
    np.horizon = 1000;
    CellSet nw = nonwandering_estimate(view, g, np);
    // Cell corners on the sheets are exact fixed fibers over rational base
    // points, so every sheet cell re-enters through its corner start.
    for (int i = 0; i < 16; ++i) {
        for (int j = 0; j < 16; ++j) {
            std::uint32_t lower = static_cast<std::uint32_t>((i * 16 + j) * 16 + 0);
            std::uint32_t upper = static_cast<std::uint32_t>((i * 16 + j) * 16 + 8);
            CHECK(nw.contains(lower));
            CHECK(nw.contains(upper));
        }
    }
    CHECK(nw.fraction() < 0.5);
}

TEST_CASE("estimator parameter validation") {
    SkewProduct sys = product_system();
    SystemView view(sys);
    Grid3 g{16, 16};
    AttractorParams p = small_params();
    p.n_samples = 8;
    CHECK_THROWS_AS(attractor_estimate(view, AttractorKind::statistical, g, p),
                    ValidationError);
    NonwanderingParams np;
    np.horizon = 0;
    CHECK_THROWS_AS(nonwandering_estimate(view, g, np), ValidationError);
}
