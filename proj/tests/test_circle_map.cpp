#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "attractorlab/circle_map.hpp"

using namespace attractorlab;

namespace {

// The default fiber template of the laboratory: h(y) = y + b + 0.08 sin(2 pi y).
CircleMap sine_map(double b) { return CircleMap(b, {{1, 0.08, 0.0}}); }

constexpr double kA = 0.08;

}  // namespace

TEST_CASE("derivative range of the sine map matches the analytic endpoints") {
    CircleMap m = sine_map(0.0);
    // h'(y) = 1 + 0.16 pi cos(2 pi y): extremes at y = 0 and y = 1/2.
    const double lo = 1.0 - 0.16 * M_PI;
    const double hi = 1.0 + 0.16 * M_PI;
    CHECK(m.derivative(0.0) == doctest::Approx(hi).epsilon(1e-14));
    CHECK(m.derivative(0.5) == doctest::Approx(lo).epsilon(1e-12));
    double mn = 1e300, mx = -1e300;
    for (int i = 0; i < 100000; ++i) {
        double d = m.derivative(i / 100000.0);
        mn = std::min(mn, d);
        mx = std::max(mx, d);
    }
    CHECK(std::fabs(mn - lo) < 1e-6);
    CHECK(std::fabs(mx - hi) < 1e-6);
}

TEST_CASE("lift is a degree-one map") {
    CircleMap m = sine_map(0.37);
    for (double y : {0.0, 0.1, 0.33, 0.71, 0.999}) {
        CHECK(std::fabs(m.eval_lift(y + 1.0) - m.eval_lift(y) - 1.0) < 1e-13);
        CHECK(std::fabs(m.eval_lift(y - 2.0) - m.eval_lift(y) + 2.0) < 1e-13);
    }
    CHECK(m.eval(0.9) == doctest::Approx(wrap01(m.eval_lift(0.9))).epsilon(1e-15));
}

TEST_CASE("derivative agrees with central finite differences") {
    CircleMap m(0.1, {{1, 0.08, 0.0}, {2, -0.01, 0.02}});
    const double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        double y = 0.005 + i * 0.01;
        double fd = (m.eval_lift(y + h) - m.eval_lift(y - h)) / (2.0 * h);
        CHECK(std::fabs(fd - m.derivative(y)) < 1e-7);
    }
}

TEST_CASE("analytic coefficient bounds") {
    CircleMap m(0.1, {{1, 0.08, 0.0}, {2, 0.0, 0.01}});
    CHECK(m.trig_sup() == doctest::Approx(0.09).epsilon(1e-14));
    const double pi2 = kTwoPi;
    CHECK(m.derivative_lipschitz() ==
          doctest::Approx(pi2 * pi2 * 0.08 + 4.0 * pi2 * pi2 * 0.01).epsilon(1e-12));
}

TEST_CASE("diffeo certificate accepts the gentle map and rejects the steep one") {
    DiffeoCertificate ok = sine_map(0.0).diffeo_certificate();
    CHECK(ok.ok);
    CHECK(std::fabs(ok.min_derivative - (1.0 - 0.16 * M_PI)) < 1e-6);
    CHECK(ok.slack > 0.0);
    CHECK(ok.min_derivative - ok.slack > 0.0);
    // a = 0.2 gives min derivative 1 - 0.4 pi < 0: not a diffeomorphism.
    DiffeoCertificate bad = CircleMap(0.0, {{1, 0.2, 0.0}}).diffeo_certificate();
    CHECK_FALSE(bad.ok);
}

TEST_CASE("invert is a two-sided inverse") {
    CircleMap m = sine_map(0.02);
    for (double t : {0.0, 0.2, 0.49, 0.5, 0.77, 0.999}) {
        double y = m.invert(t);
        CHECK(y >= 0.0);
        CHECK(y < 1.0);
        CHECK(circle_dist(m.eval(y), t) < 1e-10);
    }
    for (double y : {0.1, 0.6, 0.93}) {
        CHECK(std::fabs(m.invert_lift(m.eval_lift(y)) - y) < 1e-10);
    }
}

TEST_CASE("add_rotation shifts the lift by exactly b") {
    CircleMap m = sine_map(0.02);
    CircleMap r = m.add_rotation(0.3);
    for (double y : {0.0, 0.25, 0.8}) {
        CHECK(std::fabs(r.eval_lift(y) - m.eval_lift(y) - 0.3) < 1e-15);
        CHECK(r.derivative(y) == doctest::Approx(m.derivative(y)).epsilon(1e-15));
    }
}

TEST_CASE("fixed points of the perturbed sine map match the arcsine oracle") {
    // b + 0.08 sin(2 pi y) = 0 has the two roots 1/2 + phi and 1 - phi with
    // phi = asin(b/0.08) / (2 pi); derivative classifies them.
    const double b = 0.02;
    CircleMap m = sine_map(b);
    const double phi = std::asin(b / kA) / kTwoPi;
    const double y_att = 0.5 + phi;
    const double y_rep = 1.0 - phi;

    MorseSmaleData ms = find_periodic_orbits(m, 8, 1e-4);
    CHECK(ms.period == 1);
    CHECK(ms.certified);
    REQUIRE(ms.orbits.size() == 2);
    const CircleOrbit& att = ms.orbits[0];
    const CircleOrbit& rep = ms.orbits[1];
    REQUIRE(att.points.size() == 1);
    REQUIRE(rep.points.size() == 1);
    CHECK(std::fabs(att.points[0] - y_att) < 1e-9);
    CHECK(std::fabs(rep.points[0] - y_rep) < 1e-9);
    CHECK(att.attracting);
    CHECK_FALSE(rep.attracting);
    CHECK(att.multiplier ==
          doctest::Approx(1.0 + 0.16 * M_PI * std::cos(kTwoPi * y_att)).epsilon(1e-9));
    CHECK(rep.multiplier ==
          doctest::Approx(1.0 + 0.16 * M_PI * std::cos(kTwoPi * y_rep)).epsilon(1e-9));
    CHECK(rep.multiplier > 1.0);
}

TEST_CASE("saddle-node parameter trips the Morse-Smale guard") {
    // At b = 0.08 the two fixed points collide at y = 3/4 with multiplier 1.
    CHECK_THROWS_AS(find_periodic_orbits(sine_map(0.08), 8, 1e-4), NotMorseSmaleError);
}

TEST_CASE("past the saddle-node there are no periodic orbits of low period") {
    CHECK_THROWS_AS(find_periodic_orbits(sine_map(0.09), 8, 1e-4), NoPeriodicOrbitsError);
}

TEST_CASE("rational rotation with every point periodic is rejected as non-hyperbolic") {
    CircleMap quarter(0.25, {});
    CHECK_THROWS_AS(find_periodic_orbits(quarter, 8, 1e-4), NotMorseSmaleError);
}

TEST_CASE("period-two orbits are found and classified") {
    // Rotation near 1/2 plus a phase-broken trig term: two period-2 orbits,
    // one attracting and one repelling.
    CircleMap m(0.5, {{1, 0.01, 0.005}});
    MorseSmaleData ms = find_periodic_orbits(m, 8, 1e-4);
    CHECK(ms.period == 2);
    REQUIRE(ms.orbits.size() == 2);
    int attracting = 0;
    for (const auto& orb : ms.orbits) {
        REQUIRE(orb.points.size() == 2);
        // Orbit closes up through the map and the residual of lift^2 is tiny.
        CHECK(circle_dist(m.eval(orb.points[0]), orb.points[1]) < 1e-9);
        double y = orb.points[0];
        CHECK(std::fabs(m.eval_lift(m.eval_lift(y)) - y - 1.0) < 1e-9);
        double mult = m.derivative(orb.points[0]) * m.derivative(orb.points[1]);
        CHECK(orb.multiplier == doctest::Approx(mult).epsilon(1e-9));
        if (orb.attracting) ++attracting;
    }
    CHECK(attracting == 1);
}

TEST_CASE("rotation number is exact on certified periodic structure") {
    RotationNumber r = rotation_number(sine_map(0.02), 100000);
    CHECK(r.exact);
    CHECK(r.value == 0.0);
    CHECK(r.error_bound == 0.0);
}

TEST_CASE("rotation number falls back to the Birkhoff average") {
    RotationNumber quarter = rotation_number(CircleMap(0.25, {}), 100000);
    CHECK_FALSE(quarter.exact);
    CHECK(std::fabs(quarter.value - 0.25) < 1e-12);

    const double golden = 0.6180339887498949;
    RotationNumber g = rotation_number(CircleMap(golden, {}), 1000000);
    CHECK_FALSE(g.exact);
    CHECK(std::fabs(g.value - golden) < 1e-5);
    CHECK(std::fabs(g.value - golden) <= g.error_bound + 1e-9);

    CHECK_THROWS_AS(rotation_number(CircleMap(golden, {}), 10), ValidationError);
}

TEST_CASE("irrational rotation admits no periodic orbits") {
    CHECK_THROWS_AS(find_periodic_orbits(CircleMap(0.6180339887498949, {}), 8, 1e-4),
                    NoPeriodicOrbitsError);
}

TEST_CASE("composite chains evaluate factor by factor") {
    CircleMap m1(0.1, {{1, 0.05, 0.0}});
    CircleMap m2(0.2, {});
    CompositeCircleMap comp({{m1, false}, {m2, false}});
    for (double y : {0.0, 0.3, 0.77}) {
        CHECK(std::fabs(comp.eval_lift(y) - m2.eval_lift(m1.eval_lift(y))) < 1e-13);
        CHECK(comp.derivative(y) ==
              doctest::Approx(m1.derivative(y) * m2.derivative(m1.eval(y))).epsilon(1e-12));
        CHECK(std::fabs(comp.invert_lift(comp.eval_lift(y)) - y) < 1e-9);
        CHECK(circle_dist(comp.invert(comp.eval(y)), y) < 1e-9);
    }
}

TEST_CASE("a forward and an inverse factor cancel") {
    CircleMap m1(0.1, {{1, 0.05, 0.0}});
    CompositeCircleMap ident({{m1, false}, {m1, true}});
    for (double y : {0.05, 0.5, 0.91}) {
        CHECK(std::fabs(ident.eval_lift(y) - y) < 1e-9);
        CHECK(ident.derivative(y) == doctest::Approx(1.0).epsilon(1e-8));
    }
}
