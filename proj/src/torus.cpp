#include "attractorlab/torus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace attractorlab {

namespace {

// Unit eigenvector of the integer matrix for eigenvalue lam, taken from the
// better-conditioned row of (M - lam*I); sign fixed for determinism.
Vec2 eigenvector(const std::int64_t m[2][2], double lam) {
    // Row 1 gives v = (b, lam - a); row 2 gives v = (lam - d, c).
    double r1x = static_cast<double>(m[0][1]);
    double r1y = lam - static_cast<double>(m[0][0]);
    double r2x = lam - static_cast<double>(m[1][1]);
    double r2y = static_cast<double>(m[1][0]);
    double n1 = r1x * r1x + r1y * r1y;
    double n2 = r2x * r2x + r2y * r2y;
    double vx = n1 >= n2 ? r1x : r2x;
    double vy = n1 >= n2 ? r1y : r2y;
    double norm = std::sqrt(vx * vx + vy * vy);
    vx /= norm;
    vy /= norm;
    if (vx < 0.0 || (vx == 0.0 && vy < 0.0)) {
        vx = -vx;
        vy = -vy;
    }
    return {vx, vy};
}

}  // namespace

ToralAutomorphism::ToralAutomorphism(std::int64_t a, std::int64_t b, std::int64_t c,
                                     std::int64_t d) {
    m_[0][0] = a;
    m_[0][1] = b;
    m_[1][0] = c;
    m_[1][1] = d;
    det_ = a * d - b * c;
    if (det_ != 1 && det_ != -1) {
        throw NotUnimodularError("matrix determinant is " + std::to_string(det_) +
                                 ", expected +1 or -1");
    }
    // Hyperbolic <=> no eigenvalue on the unit circle.  With |det| = 1 this
    // reduces to exact integer conditions: the discriminant of the
    // characteristic polynomial must be positive and neither +1 nor -1 may
    // be a root.
    std::int64_t tr = a + d;
    std::int64_t disc = tr * tr - 4 * det_;
    if (disc <= 0 || (1 - tr + det_) == 0 || (1 + tr + det_) == 0) {
        throw NotHyperbolicError("matrix has an eigenvalue on the unit circle");
    }
    // Larger-modulus root first, computed without cancellation; the other
    // root follows from the product lam1 * lam2 = det.
    double trd = static_cast<double>(tr);
    double sq = std::sqrt(static_cast<double>(disc));
    double big = (trd >= 0.0) ? 0.5 * (trd + sq) : 0.5 * (trd - sq);
    lam_u_signed_ = big;
    lam_s_signed_ = static_cast<double>(det_) / big;
    v_u_ = eigenvector(m_, lam_u_signed_);
    v_s_ = eigenvector(m_, lam_s_signed_);
}

TorusPoint ToralAutomorphism::apply(const TorusPoint& p, bool inverse) const {
    Vec2 q = apply_lift({p.x1, p.x2}, inverse);
    return wrap_point(q.x1, q.x2);
}

Vec2 ToralAutomorphism::apply_lift(const Vec2& p, bool inverse) const {
    if (!inverse) {
        return {static_cast<double>(m_[0][0]) * p.x1 + static_cast<double>(m_[0][1]) * p.x2,
                static_cast<double>(m_[1][0]) * p.x1 + static_cast<double>(m_[1][1]) * p.x2};
    }
    // Integer inverse: adj(M)/det with det = +-1, so inv = det * adj(M).
    double ia = static_cast<double>(det_ * m_[1][1]);
    double ib = static_cast<double>(-det_ * m_[0][1]);
    double ic = static_cast<double>(-det_ * m_[1][0]);
    double id = static_cast<double>(det_ * m_[0][0]);
    return {ia * p.x1 + ib * p.x2, ic * p.x1 + id * p.x2};
}

std::array<std::array<std::int64_t, 2>, 2> ToralAutomorphism::power(int k) const {
    std::array<std::array<std::int64_t, 2>, 2> r = {{{1, 0}, {0, 1}}};
    for (int i = 0; i < k; ++i) {
        std::array<std::array<std::int64_t, 2>, 2> n;
        n[0][0] = r[0][0] * m_[0][0] + r[0][1] * m_[1][0];
        n[0][1] = r[0][0] * m_[0][1] + r[0][1] * m_[1][1];
        n[1][0] = r[1][0] * m_[0][0] + r[1][1] * m_[1][0];
        n[1][1] = r[1][0] * m_[0][1] + r[1][1] * m_[1][1];
        r = n;
    }
    return r;
}

std::vector<TorusPoint> ToralAutomorphism::periodic_points(int k) const {
    if (k < 1) throw ValidationError("period must be >= 1");
    auto ak = power(k);
    // M = A^k - I.  Solutions of M x = 0 mod Z^2 in [0,1)^2 correspond one
    // to one with integer vectors n inside the half-open parallelepiped
    // M [0,1)^2, via x = M^{-1} n = adj(M) n / det(M).  Membership is an
    // exact integer test: 0 <= sign(det) * (adj(M) n)_i < |det|.
    std::int64_t M[2][2] = {{ak[0][0] - 1, ak[0][1]}, {ak[1][0], ak[1][1] - 1}};
    std::int64_t D = M[0][0] * M[1][1] - M[0][1] * M[1][0];
    // D = det(A^k - I) = (lam1^k - 1)(lam2^k - 1) != 0 by hyperbolicity.
    std::int64_t absD = D < 0 ? -D : D;
    std::int64_t sgn = D < 0 ? -1 : 1;
    // Bounding box of the parallelepiped corners {0, M e1, M e2, M (e1+e2)}.
    auto corner_min = [](std::int64_t u, std::int64_t v) {
        return std::min<std::int64_t>({0, u, v, u + v});
    };
    auto corner_max = [](std::int64_t u, std::int64_t v) {
        return std::max<std::int64_t>({0, u, v, u + v});
    };
    std::int64_t lo1 = corner_min(M[0][0], M[0][1]), hi1 = corner_max(M[0][0], M[0][1]);
    std::int64_t lo2 = corner_min(M[1][0], M[1][1]), hi2 = corner_max(M[1][0], M[1][1]);

    std::vector<TorusPoint> out;
    out.reserve(static_cast<std::size_t>(absD));
    for (std::int64_t n1 = lo1; n1 <= hi1; ++n1) {
        for (std::int64_t n2 = lo2; n2 <= hi2; ++n2) {
            std::int64_t u1 = sgn * (M[1][1] * n1 - M[0][1] * n2);
            std::int64_t u2 = sgn * (-M[1][0] * n1 + M[0][0] * n2);
            if (u1 < 0 || u1 >= absD || u2 < 0 || u2 >= absD) continue;
            out.push_back({static_cast<double>(u1) / static_cast<double>(absD),
                           static_cast<double>(u2) / static_cast<double>(absD)});
        }
    }
    std::sort(out.begin(), out.end(), [](const TorusPoint& p, const TorusPoint& q) {
        return p.x1 != q.x1 ? p.x1 < q.x1 : p.x2 < q.x2;
    });
    return out;
}

std::vector<LeafSample> ToralAutomorphism::leaf_segment(const TorusPoint& pt, LeafKind kind,
                                                        double radius, int n_points) const {
    if (n_points < 1) throw ValidationError("leaf segment needs n_points >= 1");
    if (radius < 0.0) throw ValidationError("leaf segment radius must be >= 0");
    Vec2 v = kind == LeafKind::unstable ? v_u_ : v_s_;
    std::vector<LeafSample> out;
    out.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        double t = n_points == 1
                       ? 0.0
                       : -radius + 2.0 * radius * static_cast<double>(i) /
                                       static_cast<double>(n_points - 1);
        out.push_back({t, wrap_point(pt.x1 + t * v.x1, pt.x2 + t * v.x2)});
    }
    return out;
}

std::vector<HomoclinicPoint> ToralAutomorphism::homoclinic_points(const TorusPoint& fp,
                                                                  double local_radius,
                                                                  int count,
                                                                  int max_shift) const {
    if (count < 1) throw ValidationError("homoclinic point count must be >= 1");
    if (torus_dist(apply(fp), fp) > 1e-9) {
        throw NotPeriodicError("homoclinic search requires a fixed point of the base map");
    }
    // Solve t*v_u - s*v_s = n for each integer shift n.  The 2x2 system is
    // uniformly well conditioned: v_u, v_s are unit vectors spanning the
    // plane.
    double det = v_u_.x1 * (-v_s_.x2) - (-v_s_.x1) * v_u_.x2;
    std::vector<HomoclinicPoint> found;
    for (int n1 = -max_shift; n1 <= max_shift; ++n1) {
        for (int n2 = -max_shift; n2 <= max_shift; ++n2) {
            if (n1 == 0 && n2 == 0) continue;  // t = s = 0 is the fixed point itself
            double t = (static_cast<double>(n1) * (-v_s_.x2) -
                        (-v_s_.x1) * static_cast<double>(n2)) /
                       det;
            double s = (v_u_.x1 * static_cast<double>(n2) -
                        static_cast<double>(n1) * v_u_.x2) /
                       det;
            if (std::fabs(s) > local_radius || std::fabs(t) < 1e-12) continue;
            found.push_back({wrap_point(fp.x1 + t * v_u_.x1, fp.x2 + t * v_u_.x2), t, s});
        }
    }
    std::sort(found.begin(), found.end(), [](const HomoclinicPoint& a, const HomoclinicPoint& b) {
        return std::fabs(a.t_unstable) != std::fabs(b.t_unstable)
                   ? std::fabs(a.t_unstable) < std::fabs(b.t_unstable)
                   : a.t_unstable < b.t_unstable;
    });
    if (static_cast<int>(found.size()) < count) {
        throw NoneFoundError("homoclinic search horizon exhausted: found " +
                             std::to_string(found.size()) + " of " + std::to_string(count));
    }
    found.resize(static_cast<std::size_t>(count));
    return found;
}

}  // namespace attractorlab
