#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "attractorlab/errors.hpp"

namespace attractorlab {

// Reduce a real coordinate into [0, 1).  The guard after std::floor catches
// the one float pattern (tiny negative input) that rounds the remainder up
// to exactly 1.0.
inline double wrap01(double v) {
    double r = v - std::floor(v);
    if (r >= 1.0) r -= 1.0;
    if (r < 0.0) r += 1.0;
    return r;
}

// Circle distance between two coordinates already reduced to [0, 1).
inline double circle_dist(double a, double b) {
    double d = std::fabs(a - b);
    return d <= 0.5 ? d : 1.0 - d;
}

struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;
};

// Point on the 2-torus, coordinates kept in [0, 1).
struct TorusPoint {
    double x1 = 0.0;
    double x2 = 0.0;
};

inline TorusPoint wrap_point(double x1, double x2) { return {wrap01(x1), wrap01(x2)}; }

// Exact flat metric on the 2-torus.  The per-axis minimum over integer
// translates equals the minimum over the 9 translated copies of the
// difference vector, because the axes separate.
inline double torus_dist(const TorusPoint& a, const TorusPoint& b) {
    double d1 = circle_dist(a.x1, b.x1);
    double d2 = circle_dist(a.x2, b.x2);
    return std::sqrt(d1 * d1 + d2 * d2);
}

struct LeafSample {
    double t = 0.0;   // signed arclength from the segment center
    TorusPoint x;
};

struct HomoclinicPoint {
    TorusPoint x;
    double t_unstable = 0.0;  // arclength parameter along the unstable line
    double s_stable = 0.0;    // arclength parameter along the stable line
};

enum class LeafKind { unstable, stable };

// Hyperbolic automorphism of the 2-torus given by an integer matrix with
// determinant +-1 and no eigenvalue on the unit circle.  Validation and the
// eigen-decomposition run in the constructor; the eigenvalues of a 2x2
// integer matrix come straight from the characteristic polynomial.
class ToralAutomorphism {
public:
    ToralAutomorphism(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d);

    std::int64_t a() const { return m_[0][0]; }
    std::int64_t b() const { return m_[0][1]; }
    std::int64_t c() const { return m_[1][0]; }
    std::int64_t d() const { return m_[1][1]; }
    std::int64_t det() const { return det_; }

    // Moduli of the eigenvalues: lambda_u > 1 > lambda_s > 0,
    // lambda_u * lambda_s = 1.
    double lambda_u() const { return std::fabs(lam_u_signed_); }
    double lambda_s() const { return std::fabs(lam_s_signed_); }

    // Signed eigenvalues; matrix * v = lambda_signed * v exactly.
    double lambda_u_signed() const { return lam_u_signed_; }
    double lambda_s_signed() const { return lam_s_signed_; }

    // Unit eigenvectors (direction of the expanding / contracting line).
    Vec2 v_u() const { return v_u_; }
    Vec2 v_s() const { return v_s_; }

    TorusPoint apply(const TorusPoint& p, bool inverse = false) const;

    // Action on the universal cover (no reduction mod 1).
    Vec2 apply_lift(const Vec2& p, bool inverse = false) const;

    // Integer matrix power A^k for k >= 0 (entries can grow fast; int64 is
    // ample for the small k used here).
    std::array<std::array<std::int64_t, 2>, 2> power(int k) const;

    // All points of period exactly dividing k: solutions of (A^k - I) x = 0
    // mod Z^2, enumerated exactly over the integer lattice inside the
    // parallelepiped (A^k - I)[0,1)^2.  Sorted by (x1, x2); the count equals
    // |det(A^k - I)|.
    std::vector<TorusPoint> periodic_points(int k) const;

    // Straight leaf segment x = pt + t * v for t in [-radius, radius],
    // sampled at n_points equally spaced parameters and reduced mod 1.
    std::vector<LeafSample> leaf_segment(const TorusPoint& pt, LeafKind kind,
                                         double radius, int n_points) const;

    // Transverse intersections of the unstable line through a fixed point fp
    // with the integer-translated stable lines: solutions of
    // t*v_u - s*v_s = n over integer shifts |n_i| <= max_shift, |s| <=
    // local_radius, t != 0.  Sorted by |t|; throws NoneFoundError when the
    // shift horizon yields fewer than `count` points.
    std::vector<HomoclinicPoint> homoclinic_points(const TorusPoint& fp,
                                                   double local_radius, int count,
                                                   int max_shift = 50) const;

private:
    std::int64_t m_[2][2];
    std::int64_t det_ = 0;
    double lam_u_signed_ = 0.0;
    double lam_s_signed_ = 0.0;
    Vec2 v_u_, v_s_;
};

}  // namespace attractorlab
