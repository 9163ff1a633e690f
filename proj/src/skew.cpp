#include "attractorlab/skew.hpp"

#include <algorithm>
#include <cmath>

namespace attractorlab {

FiberFamily::FiberFamily(CircleMap fiber_template, std::vector<Modulation> mods)
    : template_(std::move(fiber_template)), mods_(std::move(mods)) {
    coeff_mods_.resize(template_.coeffs().size());
    for (const auto& m : mods_) {
        if (m.target.kind == ModulationTarget::Kind::c0) {
            c0_mods_.push_back(m);
            continue;
        }
        bool placed = false;
        for (std::size_t i = 0; i < template_.coeffs().size(); ++i) {
            if (template_.coeffs()[i].k == m.target.harmonic) {
                coeff_mods_[i].push_back(m);
                placed = true;
                break;
            }
        }
        if (!placed) {
            throw ValidationError("modulation targets harmonic " +
                                  std::to_string(m.target.harmonic) +
                                  " absent from the fiber template");
        }
    }
}

double FiberFamily::invert_lift_at(const TorusPoint& x, double target) const {
    // Bracketed Newton on the lift; the trig part bounds |lift - y - c0|.
    double v = template_.trig_sup();
    for (const auto& m : mods_) {
        if (m.target.kind != ModulationTarget::Kind::c0) v += std::fabs(m.amp);
    }
    double c = c0_at(x);
    double lo = target - c - v - 1e-9;
    double hi = target - c + v + 1e-9;
    double y = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double f = lift_at(x, y) - target;
        if (std::fabs(f) < 1e-12) return y;
        if (f < 0.0) {
            lo = y;
        } else {
            hi = y;
        }
        double d = derivative_at(x, y);
        double ynext = d > 1e-12 ? y - f / d : 0.5 * (lo + hi);
        if (ynext <= lo || ynext >= hi) ynext = 0.5 * (lo + hi);
        y = ynext;
    }
    return y;
}

double FiberFamily::invert_at(const TorusPoint& x, double target) const {
    double base = lift_at(x, 0.0);
    double k = std::ceil(base - target);
    return wrap01(invert_lift_at(x, target + k));
}

CircleMap FiberFamily::fiber_map_at(const TorusPoint& x) const {
    std::vector<FourierCoeff> coeffs = template_.coeffs();
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        for (const auto& m : coeff_mods_[i]) {
            double v = m.value(x);
            if (m.target.kind == ModulationTarget::Kind::a) {
                coeffs[i].a += v;
            } else {
                coeffs[i].b += v;
            }
        }
    }
    return CircleMap(c0_at(x), std::move(coeffs));
}

double FiberFamily::derivative_lipschitz_y() const {
    double s = 0.0;
    for (std::size_t i = 0; i < template_.coeffs().size(); ++i) {
        const auto& c = template_.coeffs()[i];
        double amax = std::fabs(c.a), bmax = std::fabs(c.b);
        for (const auto& m : coeff_mods_[i]) {
            if (m.target.kind == ModulationTarget::Kind::a) {
                amax += std::fabs(m.amp);
            } else {
                bmax += std::fabs(m.amp);
            }
        }
        double w = kTwoPi * static_cast<double>(c.k);
        s += w * w * (amax + bmax);
    }
    return s;
}

double FiberFamily::derivative_lipschitz_x1() const {
    double s = 0.0;
    for (std::size_t i = 0; i < template_.coeffs().size(); ++i) {
        double w = kTwoPi * static_cast<double>(template_.coeffs()[i].k);
        for (const auto& m : coeff_mods_[i]) {
            s += w * std::fabs(m.amp) * kTwoPi * std::fabs(static_cast<double>(m.m1));
        }
    }
    return s;
}

double FiberFamily::derivative_lipschitz_x2() const {
    double s = 0.0;
    for (std::size_t i = 0; i < template_.coeffs().size(); ++i) {
        double w = kTwoPi * static_cast<double>(template_.coeffs()[i].k);
        for (const auto& m : coeff_mods_[i]) {
            s += w * std::fabs(m.amp) * kTwoPi * std::fabs(static_cast<double>(m.m2));
        }
    }
    return s;
}

std::vector<PointX> SkewProduct::orbit(const PointX& start, std::int64_t n,
                                       std::int64_t burn_in, bool inverse) const {
    if (n < 0 || burn_in < 0) throw ValidationError("orbit lengths must be >= 0");
    std::vector<PointX> out;
    out.reserve(static_cast<std::size_t>(n));
    PointX p = start;
    for (std::int64_t i = 0; i < burn_in; ++i) p = step(p, inverse);
    for (std::int64_t i = 0; i < n; ++i) {
        out.push_back(p);
        p = step(p, inverse);
    }
    return out;
}

CompositeCircleMap SkewProduct::composite_fiber_map(const TorusPoint& p, int k) const {
    return SystemView(*this).composite_fiber_map(p, k);
}

const HyperbolicityCertificate& SkewProduct::certificate(int grid_n) const {
    if (grid_n < 8) throw ValidationError("certificate grid must be >= 8");
    if (cert_cache_ && cert_cache_->grid_n == grid_n) return *cert_cache_;
    HyperbolicityCertificate cert;
    cert.grid_n = grid_n;
    double inf = 1e300, sup = -1e300;
    const double h = 1.0 / static_cast<double>(grid_n);
    for (int i = 0; i < grid_n; ++i) {
        for (int j = 0; j < grid_n; ++j) {
            TorusPoint x{static_cast<double>(i) * h, static_cast<double>(j) * h};
            for (int l = 0; l < grid_n; ++l) {
                double d = fibers_.derivative_at(x, static_cast<double>(l) * h);
                inf = std::min(inf, d);
                sup = std::max(sup, d);
            }
        }
    }
    // Analytic slack: the derivative is Lipschitz in each coordinate, so the
    // value anywhere in a grid cell differs from the nearest node by at most
    // the summed per-axis Lipschitz constants times half a cell.
    cert.slack = 0.5 * h *
                 (fibers_.derivative_lipschitz_x1() + fibers_.derivative_lipschitz_x2() +
                  fibers_.derivative_lipschitz_y());
    cert.inf_derivative = inf;
    cert.sup_derivative = sup;
    cert.inf_certified = inf - cert.slack;
    cert.sup_certified = sup + cert.slack;
    cert.margin_stable = cert.inf_certified - base_.lambda_s();
    cert.margin_unstable = base_.lambda_u() - cert.sup_certified;
    bool stable_ok = cert.margin_stable > 0.0;
    bool unstable_ok = cert.margin_unstable > 0.0;
    cert.ok = stable_ok && unstable_ok;
    if (!stable_ok && !unstable_ok) {
        cert.violated_side = "both";
    } else if (!stable_ok) {
        cert.violated_side = "stable";
    } else if (!unstable_ok) {
        cert.violated_side = "unstable";
    }
    cert_cache_ = cert;
    return *cert_cache_;
}

void SkewProduct::ensure_certified(int grid_n) const {
    const auto& cert = certificate(grid_n);
    if (!cert.ok) {
        throw CertificateFailedError("partial hyperbolicity certificate failed on the " +
                                     cert.violated_side + " side");
    }
}

SkewProduct SkewProduct::add_fiber_rotation(double b) const {
    return SkewProduct(base_, FiberFamily(fibers_.fiber_template().add_rotation(b),
                                          fibers_.modulations()));
}

CompositeCircleMap SystemView::composite_fiber_map(const TorusPoint& p, int k) const {
    if (k < 1) throw ValidationError("base period must be >= 1");
    // Verify periodicity of p under the view's base map.
    TorusPoint q = p;
    for (int i = 0; i < k; ++i) q = base_step(q);
    if (torus_dist(q, p) > 1e-9) {
        throw NotPeriodicError("base point is not periodic with period " + std::to_string(k));
    }
    std::vector<FiberStep> steps;
    steps.reserve(static_cast<std::size_t>(k));
    TorusPoint x = p;
    for (int i = 0; i < k; ++i) {
        if (!inverted_) {
            steps.push_back({sys_->fibers().fiber_map_at(x), false});
        } else {
            // One inverse-system step above x applies the inverse of the
            // fiber map anchored at A^{-1} x.
            TorusPoint b0 = sys_->base().apply(x, true);
            steps.push_back({sys_->fibers().fiber_map_at(b0), true});
        }
        x = base_step(x);
    }
    return CompositeCircleMap(std::move(steps));
}

}  // namespace attractorlab
