#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "attractorlab/errors.hpp"
#include "attractorlab/torus.hpp"

namespace attractorlab {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct FourierCoeff {
    int k = 1;       // harmonic index, >= 1
    double a = 0.0;  // sin(2 pi k y) weight
    double b = 0.0;  // cos(2 pi k y) weight
};

struct DiffeoCertificate {
    bool ok = false;
    double min_derivative = 0.0;  // minimum of h' over the certification grid
    double slack = 0.0;           // Lipschitz slack covering between-node dips
};

// Orientation-preserving circle diffeomorphism represented by the degree-one
// lift h(y) = y + c0 + sum_k [a_k sin(2 pi k y) + b_k cos(2 pi k y)].
// Trigonometric terms are evaluated at y mod 1 (exact for integer harmonics),
// which keeps full precision for large lift arguments.
class CircleMap {
public:
    CircleMap() = default;
    CircleMap(double c0, std::vector<FourierCoeff> coeffs);

    double c0() const { return c0_; }
    const std::vector<FourierCoeff>& coeffs() const { return coeffs_; }

    double eval_lift(double yhat) const {
        double yr = yhat - std::floor(yhat);
        double s = yhat + c0_;
        for (const auto& c : coeffs_) {
            double arg = kTwoPi * static_cast<double>(c.k) * yr;
            s += c.a * std::sin(arg) + c.b * std::cos(arg);
        }
        return s;
    }

    double eval(double y) const { return wrap01(eval_lift(y)); }

    // h'(y) = 1 + sum_k 2 pi k [a_k cos(2 pi k y) - b_k sin(2 pi k y)].
    double derivative(double y) const {
        double yr = y - std::floor(y);
        double d = 1.0;
        for (const auto& c : coeffs_) {
            double w = kTwoPi * static_cast<double>(c.k);
            double arg = w * yr;
            d += w * (c.a * std::cos(arg) - c.b * std::sin(arg));
        }
        return d;
    }

    // sum_k (|a_k| + |b_k|): bound on |h(y) - y - c0|.
    double trig_sup() const;
    // sum_k (2 pi k)^2 (|a_k| + |b_k|): bound on |h''|, i.e. the Lipschitz
    // constant of h'.
    double derivative_lipschitz() const;

    // h' > 0 checked on a uniform grid with the analytic slack covering dips
    // between nodes.
    DiffeoCertificate diffeo_certificate(int grid = 4096) const;

    // Solve h(y) = target exactly (to 1e-12 in lift value) with a bracketed
    // Newton iteration; h' > 0 makes the root unique.
    double invert_lift(double target) const;

    // Circle inverse: the unique y in [0, 1) with h(y) = target mod 1.
    double invert(double target) const;

    // Post-compose with the rigid rotation by b: lift becomes h + b.
    CircleMap add_rotation(double b) const;

private:
    double c0_ = 0.0;
    std::vector<FourierCoeff> coeffs_;
};

// One factor of a composite fiber map: a circle map applied forward or (for
// inverse-time systems) backward.
struct FiberStep {
    CircleMap map;
    bool inverse = false;
};

// Ordered composition g = step_n o ... o step_1, evaluated by chaining; the
// factors are never expanded into a single coefficient list.
class CompositeCircleMap {
public:
    CompositeCircleMap() = default;
    explicit CompositeCircleMap(std::vector<FiberStep> steps) : steps_(std::move(steps)) {}

    const std::vector<FiberStep>& steps() const { return steps_; }

    double eval_lift(double yhat) const {
        double y = yhat;
        for (const auto& s : steps_) y = s.inverse ? s.map.invert_lift(y) : s.map.eval_lift(y);
        return y;
    }

    double eval(double y) const { return wrap01(eval_lift(y)); }

    double derivative(double y) const {
        double v = y;
        double d = 1.0;
        for (const auto& s : steps_) {
            if (!s.inverse) {
                d *= s.map.derivative(v);
                v = s.map.eval_lift(v);
            } else {
                v = s.map.invert_lift(v);
                d /= s.map.derivative(v);
            }
        }
        return d;
    }

    double invert_lift(double target) const {
        double y = target;
        for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
            y = it->inverse ? it->map.eval_lift(y) : it->map.invert_lift(y);
        }
        return y;
    }

    double invert(double target) const;

private:
    std::vector<FiberStep> steps_;
};

// ---------------------------------------------------------------------------
// Periodic orbit structure of a circle map (generic over the lift evaluator)
// ---------------------------------------------------------------------------

struct CircleOrbit {
    int period = 1;
    std::vector<double> points;  // the orbit in dynamical order, smallest point first
    double multiplier = 0.0;     // (lift^period)' at any orbit point
    bool attracting = false;     // |multiplier| < 1
};

struct MorseSmaleData {
    std::vector<CircleOrbit> orbits;
    int period = 0;       // common minimal period of all orbits
    bool certified = false;  // no-root-skipped guarantee held on every scan cell
};

struct RotationNumber {
    double value = 0.0;
    double error_bound = 0.0;
    bool exact = false;  // true when read off a certified periodic orbit
};

namespace detail {

// q-fold lift iteration, generic over the map type.
template <typename Map>
double lift_iter(const Map& m, double y, int q) {
    for (int i = 0; i < q; ++i) y = m.eval_lift(y);
    return y;
}

template <typename Map>
double orbit_multiplier(const Map& m, double y0, int q) {
    double d = 1.0;
    double y = y0;
    for (int i = 0; i < q; ++i) {
        d *= m.derivative(y);
        y = m.eval(y);
    }
    return d;
}

}  // namespace detail

// Finds all periodic orbits up to max_period by bracketing the roots of
// lift^q(y) - y - k on a uniform grid and bisecting each sign change.  The
// multiplier classifies each orbit; a multiplier inside multiplier_tol of 1
// aborts with NotMorseSmaleError, and no orbits at all up to max_period
// aborts with NoPeriodicOrbitsError.  `certified` reports a no-skip check:
// every scan cell without a bracketed root either kept |G - k| above the
// largest possible in-cell excursion (estimated from the grid maximum of
// |G'| with a 2x safety factor) or sits within two cells of a bracketed
// root that accounts for the small endpoint values.
template <typename Map>
MorseSmaleData find_periodic_orbits(const Map& map, int max_period, double multiplier_tol,
                                    int grid = 8192) {
    if (max_period < 1) throw ValidationError("max_period must be >= 1");
    MorseSmaleData data;
    data.certified = true;
    const double h = 1.0 / static_cast<double>(grid);
    std::vector<double> g(static_cast<std::size_t>(grid) + 1);

    auto known_point = [&](double y) {
        for (const auto& orb : data.orbits) {
            for (double p : orb.points) {
                if (circle_dist(p, y) < 1e-9) return true;
            }
        }
        return false;
    };

    for (int q = 1; q <= max_period; ++q) {
        // G(y) = lift^q(y) - y is 1-periodic; roots of G - k for integer k
        // are the period-q points.
        double gmin = 1e300, gmax = -1e300, slope_max = 0.0;
        for (int i = 0; i <= grid; ++i) {
            double y = static_cast<double>(i) * h;
            g[static_cast<std::size_t>(i)] = detail::lift_iter(map, y, q) - y;
            gmin = std::min(gmin, g[static_cast<std::size_t>(i)]);
            gmax = std::max(gmax, g[static_cast<std::size_t>(i)]);
        }
        for (int i = 0; i < grid; ++i) {
            slope_max = std::max(slope_max,
                                 std::fabs(g[static_cast<std::size_t>(i) + 1] -
                                           g[static_cast<std::size_t>(i)]) / h);
        }
        const double excursion = 2.0 * slope_max * h;  // largest plausible in-cell dip

        for (std::int64_t k = static_cast<std::int64_t>(std::floor(gmin)) - 1;
             k <= static_cast<std::int64_t>(std::ceil(gmax)) + 1; ++k) {
            std::vector<int> root_cells;
            std::vector<int> shallow_cells;
            for (int i = 0; i < grid; ++i) {
                double ga = g[static_cast<std::size_t>(i)] - static_cast<double>(k);
                double gb = g[static_cast<std::size_t>(i) + 1] - static_cast<double>(k);
                double root = 0.0;
                bool have_root = false;
                if (std::fabs(ga) < 1e-13) {
                    root = static_cast<double>(i) * h;
                    have_root = true;
                } else if (ga * gb < 0.0) {
                    double lo = static_cast<double>(i) * h, hi = lo + h;
                    double flo = ga;
                    for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
                        double mid = 0.5 * (lo + hi);
                        double fm = detail::lift_iter(map, mid, q) - mid - static_cast<double>(k);
                        if (std::fabs(fm) < 1e-14) {
                            lo = hi = mid;
                            break;
                        }
                        if (flo * fm < 0.0) {
                            hi = mid;
                        } else {
                            lo = mid;
                            flo = fm;
                        }
                    }
                    root = 0.5 * (lo + hi);
                    have_root = true;
                } else if (std::min(std::fabs(ga), std::fabs(gb)) <= excursion) {
                    // A grazing pair of roots could hide here unless the
                    // small endpoint is accounted for by a nearby root.
                    shallow_cells.push_back(i);
                }
                if (!have_root) continue;
                root_cells.push_back(i);
                double y0 = wrap01(root);
                if (known_point(y0)) continue;  // lower-period orbit or already collected
                // Minimal period check: reject if some proper divisor closes
                // the orbit first.
                bool minimal = true;
                for (int d = 1; d < q; ++d) {
                    if (q % d != 0) continue;
                    if (circle_dist(wrap01(detail::lift_iter(map, y0, d)), y0) < 1e-9) {
                        minimal = false;
                        break;
                    }
                }
                if (!minimal) continue;
                CircleOrbit orb;
                orb.period = q;
                double y = y0;
                double lead = y0;
                for (int j = 0; j < q; ++j) {
                    orb.points.push_back(y);
                    lead = std::min(lead, y);
                    y = map.eval(y);
                }
                std::rotate(orb.points.begin(),
                            std::find(orb.points.begin(), orb.points.end(), lead),
                            orb.points.end());
                orb.multiplier = detail::orbit_multiplier(map, y0, q);
                if (std::fabs(orb.multiplier - 1.0) <= multiplier_tol) {
                    throw NotMorseSmaleError(
                        "periodic orbit multiplier " + std::to_string(orb.multiplier) +
                        " within tolerance of neutral at period " + std::to_string(q));
                }
                orb.attracting = std::fabs(orb.multiplier) < 1.0;
                data.orbits.push_back(orb);
            }
            // Shallow approaches right next to a bracketed root are explained
            // by that root; anything farther out could hide a grazing pair
            // below grid resolution.
            for (int i : shallow_cells) {
                bool near_root = false;
                for (int r : root_cells) {
                    int d = i > r ? i - r : r - i;
                    if (std::min(d, grid - d) <= 2) {
                        near_root = true;
                        break;
                    }
                }
                if (!near_root) data.certified = false;
            }
        }
        if (!data.orbits.empty()) {
            // A hyperbolic circle map has all its periodic orbits at one
            // minimal period; later q are iterates of these orbits.
            data.period = q;
            break;
        }
    }
    if (data.orbits.empty()) {
        throw NoPeriodicOrbitsError("no periodic orbits up to period " +
                                    std::to_string(max_period));
    }
    std::sort(data.orbits.begin(), data.orbits.end(),
              [](const CircleOrbit& a, const CircleOrbit& b) {
                  return a.points.front() < b.points.front();
              });
    return data;
}

// Rotation number of an orientation-preserving circle map.  When a certified
// periodic orbit exists the value is the exact rational p/q; otherwise it is
// the Birkhoff average lift^n(0)/n, with an error estimate combining the 1/n
// a-priori bound and a two-window difference.
template <typename Map>
RotationNumber rotation_number(const Map& map, std::int64_t n_iter, int max_period = 8,
                               double multiplier_tol = 1e-4) {
    if (n_iter < 1000) throw ValidationError("rotation number needs n_iter >= 1000");
    try {
        MorseSmaleData ms = find_periodic_orbits(map, max_period, multiplier_tol);
        double y0 = ms.orbits.front().points.front();
        double p = detail::lift_iter(map, y0, ms.period) - y0;
        RotationNumber r;
        r.value = std::nearbyint(p) / static_cast<double>(ms.period);
        r.error_bound = 0.0;
        r.exact = true;
        return r;
    } catch (const NotMorseSmaleError&) {
    } catch (const NoPeriodicOrbitsError&) {
    }
    // Long-orbit estimate, accumulating the integer winding separately so
    // precision does not degrade with orbit length.
    double y = 0.0;
    std::int64_t winding = 0;
    double half_value = 0.0;
    for (std::int64_t n = 0; n < n_iter; ++n) {
        double z = map.eval_lift(y);
        double w = std::floor(z);
        winding += static_cast<std::int64_t>(w);
        y = z - w;
        if (y >= 1.0) {
            y -= 1.0;
            winding += 1;
        }
        if (n + 1 == n_iter / 2) {
            half_value = (static_cast<double>(winding) + y) / static_cast<double>(n + 1);
        }
    }
    RotationNumber r;
    r.value = (static_cast<double>(winding) + y) / static_cast<double>(n_iter);
    r.error_bound = 1.0 / static_cast<double>(n_iter) + std::fabs(r.value - half_value);
    r.exact = false;
    return r;
}

}  // namespace attractorlab
