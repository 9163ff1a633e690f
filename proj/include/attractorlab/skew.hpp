#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "attractorlab/circle_map.hpp"
#include "attractorlab/errors.hpp"
#include "attractorlab/torus.hpp"

namespace attractorlab {

// Point of the total space: base on the 2-torus, fiber on the circle.
struct PointX {
    TorusPoint base;
    double y = 0.0;
};

// Exact flat metric on the total space (all three axes periodic).
inline double dist_x(const PointX& a, const PointX& b) {
    double d1 = circle_dist(a.base.x1, b.base.x1);
    double d2 = circle_dist(a.base.x2, b.base.x2);
    double d3 = circle_dist(a.y, b.y);
    return std::sqrt(d1 * d1 + d2 * d2 + d3 * d3);
}

// Which coefficient slot of the fiber template a modulation acts on.
struct ModulationTarget {
    enum class Kind { c0, a, b } kind = Kind::c0;
    int harmonic = 0;  // ignored for c0
};

// Additive base-dependent term amp * cos(2 pi (m1 x1 + m2 x2) + phase)
// applied to one coefficient slot.
struct Modulation {
    ModulationTarget target;
    int m1 = 0;
    int m2 = 0;
    double amp = 0.0;
    double phase = 0.0;

    double value(const TorusPoint& x) const {
        return amp * std::cos(kTwoPi * (static_cast<double>(m1) * x.x1 +
                                        static_cast<double>(m2) * x.x2) +
                              phase);
    }
};

// Family x -> f_x of circle diffeomorphisms: a fiber template whose
// coefficients (including c0) vary with the base point through cosine
// modulations.  The hot paths evaluate the modulated lift directly, with no
// temporary map object.
class FiberFamily {
public:
    FiberFamily() = default;
    FiberFamily(CircleMap fiber_template, std::vector<Modulation> mods);

    const CircleMap& fiber_template() const { return template_; }
    const std::vector<Modulation>& modulations() const { return mods_; }

    double c0_at(const TorusPoint& x) const {
        double c = template_.c0();
        for (const auto& m : c0_mods_) c += m.value(x);
        return c;
    }

    // Lift of f_x evaluated at yhat.
    double lift_at(const TorusPoint& x, double yhat) const {
        double yr = yhat - std::floor(yhat);
        double s = yhat + c0_at(x);
        const auto& coeffs = template_.coeffs();
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            double ai = coeffs[i].a, bi = coeffs[i].b;
            for (const auto& m : coeff_mods_[i]) {
                double v = m.value(x);
                if (m.target.kind == ModulationTarget::Kind::a) {
                    ai += v;
                } else {
                    bi += v;
                }
            }
            double arg = kTwoPi * static_cast<double>(coeffs[i].k) * yr;
            s += ai * std::sin(arg) + bi * std::cos(arg);
        }
        return s;
    }

    // d f_x / dy, 1-periodic in y.
    double derivative_at(const TorusPoint& x, double y) const {
        double yr = y - std::floor(y);
        double d = 1.0;
        const auto& coeffs = template_.coeffs();
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            double ai = coeffs[i].a, bi = coeffs[i].b;
            for (const auto& m : coeff_mods_[i]) {
                double v = m.value(x);
                if (m.target.kind == ModulationTarget::Kind::a) {
                    ai += v;
                } else {
                    bi += v;
                }
            }
            double w = kTwoPi * static_cast<double>(coeffs[i].k);
            double arg = w * yr;
            d += w * (ai * std::cos(arg) - bi * std::sin(arg));
        }
        return d;
    }

    // The unique y with f_x(y) = target mod 1 (bracketed Newton, no
    // allocation).
    double invert_at(const TorusPoint& x, double target) const;
    // Lift-level inverse: solve lift_at(x, y) = target.
    double invert_lift_at(const TorusPoint& x, double target) const;

    // Materialized circle map above one base point (for orbit analysis and
    // composites; not used in stepping loops).
    CircleMap fiber_map_at(const TorusPoint& x) const;

    // Worst-case |a_k| + |b_k| including modulation amplitudes, summed with
    // the (2 pi k)^2 weights: Lipschitz bound for the y-derivative in y.
    double derivative_lipschitz_y() const;
    // Lipschitz bounds of the y-derivative in the two base coordinates
    // (modulations on a/b slots only; c0 does not enter the derivative).
    double derivative_lipschitz_x1() const;
    double derivative_lipschitz_x2() const;

private:
    CircleMap template_;
    std::vector<Modulation> mods_;
    std::vector<Modulation> c0_mods_;
    std::vector<std::vector<Modulation>> coeff_mods_;  // parallel to template coeffs
};

struct HyperbolicityCertificate {
    bool ok = false;
    int grid_n = 0;
    double inf_derivative = 0.0;  // observed grid extremes of d f_x / dy
    double sup_derivative = 0.0;
    double inf_certified = 0.0;  // extremes widened by the analytic slack
    double sup_certified = 0.0;
    double slack = 0.0;
    double margin_stable = 0.0;    // inf_certified - lambda_s
    double margin_unstable = 0.0;  // lambda_u - sup_certified
    std::string violated_side;     // "", "stable", "unstable" or "both"
};

// Skew product F(x, y) = (A x, f_x(y)) over a hyperbolic toral automorphism.
class SkewProduct {
public:
    SkewProduct(ToralAutomorphism base, FiberFamily fibers)
        : base_(std::move(base)), fibers_(std::move(fibers)) {}

    const ToralAutomorphism& base() const { return base_; }
    const FiberFamily& fibers() const { return fibers_; }

    PointX step(const PointX& p, bool inverse = false) const {
        if (!inverse) {
            return {base_.apply(p.base), wrap01(fibers_.lift_at(p.base, p.y))};
        }
        TorusPoint b0 = base_.apply(p.base, true);
        return {b0, fibers_.invert_at(b0, p.y)};
    }

    // Orbit with the first burn_in steps discarded; n recorded points.
    std::vector<PointX> orbit(const PointX& start, std::int64_t n, std::int64_t burn_in,
                              bool inverse = false) const;

    CircleMap fiber_map_at(const TorusPoint& x) const { return fibers_.fiber_map_at(x); }

    // Composite fiber map over the k-periodic base point p:
    // g_p = f_{A^{k-1} p} o ... o f_p, chained without coefficient
    // expansion.  Throws NotPeriodicError unless A^k p returns to p within
    // 1e-9.
    CompositeCircleMap composite_fiber_map(const TorusPoint& p, int k) const;

    // Grid certificate lambda_s < inf df/dy <= sup df/dy < lambda_u with the
    // analytic Lipschitz slack covering between-node values.  Cached per
    // grid size; call from a single thread before entering parallel regions.
    const HyperbolicityCertificate& certificate(int grid_n = 128) const;

    // Throws CertificateFailedError naming the violated side.
    void ensure_certified(int grid_n = 128) const;

    // Compose every fiber map with the rigid rotation by b (template c0
    // shifted; modulations untouched).
    SkewProduct add_fiber_rotation(double b) const;

private:
    ToralAutomorphism base_;
    FiberFamily fibers_;
    mutable std::optional<HyperbolicityCertificate> cert_cache_;
};

// Forward or inverse view of a skew product.  Estimators and manifold
// builders take a view, so running them on the inverse system is the same
// code path; inverting twice hands back the forward view.
class SystemView {
public:
    SystemView(const SkewProduct& sys, bool inverted = false)
        : sys_(&sys), inverted_(inverted) {}

    const SkewProduct& system() const { return *sys_; }
    bool inverted() const { return inverted_; }
    SystemView inverse() const { return SystemView(*sys_, !inverted_); }

    PointX step(const PointX& p) const { return sys_->step(p, inverted_); }
    PointX step_back(const PointX& p) const { return sys_->step(p, !inverted_); }

    // Base map of the view and its expanding line: for the inverse view the
    // roles of the eigen-directions swap and the signed rate is the
    // reciprocal of the contracting one.
    TorusPoint base_step(const TorusPoint& x, bool back = false) const {
        return sys_->base().apply(x, back ? !inverted_ : inverted_);
    }
    Vec2 expanding_direction() const {
        return inverted_ ? sys_->base().v_s() : sys_->base().v_u();
    }
    double expanding_rate_signed() const {
        return inverted_ ? 1.0 / sys_->base().lambda_s_signed()
                         : sys_->base().lambda_u_signed();
    }
    Vec2 contracting_direction() const {
        return inverted_ ? sys_->base().v_u() : sys_->base().v_s();
    }

    // Lift of the one-step fiber map of the view above base point x (for the
    // inverse view this is the inverse of the fiber map above A^{-1} x).
    double fiber_lift(const TorusPoint& x, double yhat) const {
        if (!inverted_) return sys_->fibers().lift_at(x, yhat);
        TorusPoint b0 = sys_->base().apply(x, true);
        return sys_->fibers().invert_lift_at(b0, yhat);
    }

    // Circle-level inverse of the view's one-step fiber map above x.
    double fiber_invert(const TorusPoint& x, double target) const {
        if (!inverted_) return sys_->fibers().invert_at(x, target);
        TorusPoint b0 = sys_->base().apply(x, true);
        return wrap01(sys_->fibers().lift_at(b0, target));
    }

    // Fiber derivative of the view's one-step map at (x, y).
    double fiber_derivative(const TorusPoint& x, double y) const {
        if (!inverted_) return sys_->fibers().derivative_at(x, y);
        TorusPoint b0 = sys_->base().apply(x, true);
        double y0 = sys_->fibers().invert_at(b0, y);
        return 1.0 / sys_->fibers().derivative_at(b0, y0);
    }

    // g_p of the view over a k-periodic base point.
    CompositeCircleMap composite_fiber_map(const TorusPoint& p, int k) const;

private:
    const SkewProduct* sys_;
    bool inverted_;
};

}  // namespace attractorlab
