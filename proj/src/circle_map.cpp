#include "attractorlab/circle_map.hpp"

#include <cmath>

namespace attractorlab {

namespace {

// Unique y in [0, 1) with lift(y) = target mod 1: shift the target into
// [lift(0), lift(0) + 1) and solve there; monotonicity makes the preimage
// unique.
template <typename Map>
double circle_invert(const Map& m, double target) {
    double base = m.eval_lift(0.0);
    double k = std::ceil(base - target);
    double y = m.invert_lift(target + k);
    return wrap01(y);
}

}  // namespace

CircleMap::CircleMap(double c0, std::vector<FourierCoeff> coeffs)
    : c0_(c0), coeffs_(std::move(coeffs)) {
    for (const auto& c : coeffs_) {
        if (c.k < 1) throw ValidationError("harmonic index must be >= 1");
    }
}

double CircleMap::trig_sup() const {
    double s = 0.0;
    for (const auto& c : coeffs_) s += std::fabs(c.a) + std::fabs(c.b);
    return s;
}

double CircleMap::derivative_lipschitz() const {
    double s = 0.0;
    for (const auto& c : coeffs_) {
        double w = kTwoPi * static_cast<double>(c.k);
        s += w * w * (std::fabs(c.a) + std::fabs(c.b));
    }
    return s;
}

DiffeoCertificate CircleMap::diffeo_certificate(int grid) const {
    if (grid < 2) throw ValidationError("certificate grid must be >= 2");
    DiffeoCertificate cert;
    double dmin = 1e300;
    for (int i = 0; i < grid; ++i) {
        dmin = std::min(dmin, derivative(static_cast<double>(i) / static_cast<double>(grid)));
    }
    // Between neighbouring nodes h' can dip by at most Lip(h') * h/2 below
    // the smaller node value.
    cert.min_derivative = dmin;
    cert.slack = derivative_lipschitz() * 0.5 / static_cast<double>(grid);
    cert.ok = dmin - cert.slack > 0.0;
    return cert;
}

double CircleMap::invert_lift(double target) const {
    double v = trig_sup();
    double lo = target - c0_ - v - 1e-9;
    double hi = target - c0_ + v + 1e-9;
    double y = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double f = eval_lift(y) - target;
        if (std::fabs(f) < 1e-12) return y;
        if (f < 0.0) {
            lo = y;
        } else {
            hi = y;
        }
        double d = derivative(y);
        double ynext = d > 1e-12 ? y - f / d : 0.5 * (lo + hi);
        if (ynext <= lo || ynext >= hi) ynext = 0.5 * (lo + hi);
        y = ynext;
    }
    return y;
}

double CircleMap::invert(double target) const { return circle_invert(*this, target); }

CircleMap CircleMap::add_rotation(double b) const { return CircleMap(c0_ + b, coeffs_); }

double CompositeCircleMap::invert(double target) const { return circle_invert(*this, target); }

}  // namespace attractorlab
