#pragma once

// Exact-formula primitives for the upper half-plane model: points, unit
// tangent vectors, PSL(2,R) isometries, geodesics, Fermi coordinates and
// the exponential map.

#include <array>
#include <cmath>
#include <complex>
#include <limits>

#include "hypflow/errors.hpp"

namespace hypflow {

inline constexpr double kDetTol = 1e-12;   // algebraic identities
inline constexpr double kGeomTol = 1e-9;   // geometric round-trips
inline constexpr double kTraceTol = 1e-9;  // parabolic trace band
inline constexpr double kPi = 3.14159265358979323846;

// Point of the upper half plane, y > 0.
struct PlanePoint {
    double x = 0.0;
    double y = 1.0;

    PlanePoint() = default;
    PlanePoint(double px, double py) : x(px), y(py) {
        if (!(py > 0.0) || !std::isfinite(px) || !std::isfinite(py))
            throw DomainError("PlanePoint requires finite coordinates with y > 0");
    }

    std::complex<double> z() const { return {x, y}; }
};

inline PlanePoint reference_point() { return {0.0, 1.0}; }

// d(p,q) = arccosh(1 + |p-q|^2 / (2 p.y q.y))
inline double dist(const PlanePoint& p, const PlanePoint& q) {
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    const double arg = 1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y);
    return std::acosh(std::max(arg, 1.0));
}

// Same quantity without the final arccosh; monotone in the distance, useful
// when only comparisons are needed.
inline double cosh_dist(const PlanePoint& p, const PlanePoint& q) {
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    return 1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y);
}

// Unit tangent vector: base point plus direction angle measured from the
// positive x-axis of the conformal chart, normalized to [0, 2pi).
struct UnitTangent {
    PlanePoint base;
    double angle = 0.0;

    UnitTangent() = default;
    UnitTangent(PlanePoint b, double a) : base(b), angle(normalize_angle(a)) {}

    static double normalize_angle(double a) {
        a = std::fmod(a, 2.0 * kPi);
        if (a < 0.0) a += 2.0 * kPi;
        return a;
    }
};

// The fixed reference tangent: base i, pointing up the imaginary axis.
inline UnitTangent reference_tangent() { return {reference_point(), kPi / 2.0}; }

enum class IsometryKind { Identity, Elliptic, Parabolic, Hyperbolic };

// Element of PSL(2,R): 2x2 real matrix of determinant 1, identified with its
// negative. Sign canonicalized so the first nonzero entry in row-major order
// is positive.
struct Isometry {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    Isometry() = default;

    static Isometry from_entries(double a, double b, double c, double d) {
        const double det = a * d - b * c;
        if (!std::isfinite(det) || std::fabs(det - 1.0) > 1e-9)
            throw DomainError("Isometry requires det = 1");
        // renormalize residual determinant drift
        const double s = 1.0 / std::sqrt(det);
        Isometry g;
        g.a = a * s; g.b = b * s; g.c = c * s; g.d = d * s;
        g.canonicalize();
        return g;
    }

    // Internal: trusted entries (already det 1 up to round-off).
    static Isometry unchecked(double a, double b, double c, double d) {
        Isometry g;
        g.a = a; g.b = b; g.c = c; g.d = d;
        g.canonicalize();
        return g;
    }

    void canonicalize() {
        double lead = a;
        if (lead == 0.0) lead = b;
        if (lead == 0.0) lead = c;
        if (lead == 0.0) lead = d;
        if (lead < 0.0) { a = -a; b = -b; c = -c; d = -d; }
    }

    static Isometry identity() { return {}; }

    // Translation by hyperbolic length t along the imaginary axis (upward
    // for t > 0).
    static Isometry translation(double t) {
        return unchecked(std::exp(t / 2.0), 0.0, 0.0, std::exp(-t / 2.0));
    }

    // Counterclockwise rotation by angle theta about the point i.
    static Isometry rotation(double theta) {
        const double ct = std::cos(theta / 2.0), st = std::sin(theta / 2.0);
        return unchecked(ct, st, -st, ct);
    }

    Isometry operator*(const Isometry& o) const {
        return unchecked(a * o.a + b * o.c, a * o.b + b * o.d,
                         c * o.a + d * o.c, c * o.b + d * o.d);
    }

    Isometry inverse() const { return unchecked(d, -b, -c, a); }

    double trace() const { return a + d; }

    PlanePoint apply(const PlanePoint& p) const {
        const std::complex<double> z = p.z();
        const std::complex<double> w = (a * z + b) / (c * z + d);
        return {w.real(), w.imag()};
    }

    // Ideal boundary action; accepts and returns points of R u {inf}.
    double apply_boundary(double x) const {
        if (std::isinf(x)) {
            if (c == 0.0) return x > 0 ? (a / d > 0 ? INFINITY : -INFINITY)
                                       : (a / d > 0 ? -INFINITY : INFINITY);
            return a / c;
        }
        const double den = c * x + d;
        if (den == 0.0) return (a * x + b) > 0 ? INFINITY : -INFINITY;
        return (a * x + b) / den;
    }

    UnitTangent apply(const UnitTangent& t) const {
        const PlanePoint q = apply(t.base);
        const std::complex<double> den = c * t.base.z() + d;
        // derivative of the Mobius map is 1/(cz+d)^2
        const double rot = -2.0 * std::arg(den);
        return {q, t.angle + rot};
    }

    // Max-norm distance in PSL(2,R): minimum over the sign ambiguity.
    double norm_dist(const Isometry& o) const {
        const double m1 = std::max({std::fabs(a - o.a), std::fabs(b - o.b),
                                    std::fabs(c - o.c), std::fabs(d - o.d)});
        const double m2 = std::max({std::fabs(a + o.a), std::fabs(b + o.b),
                                    std::fabs(c + o.c), std::fabs(d + o.d)});
        return std::min(m1, m2);
    }

    double norm_from_identity() const { return norm_dist(identity()); }
};

inline IsometryKind classify(const Isometry& g) {
    if (g.norm_dist(Isometry::identity()) <= kTraceTol) return IsometryKind::Identity;
    const double t = std::fabs(g.trace());
    if (std::fabs(t - 2.0) <= kTraceTol) return IsometryKind::Parabolic;
    return t < 2.0 ? IsometryKind::Elliptic : IsometryKind::Hyperbolic;
}

inline double translation_length(const Isometry& g) {
    if (classify(g) != IsometryKind::Hyperbolic)
        throw NotHyperbolic("translation_length requires a hyperbolic isometry");
    return 2.0 * std::acosh(std::fabs(g.trace()) / 2.0);
}

// Fixed points on the ideal boundary of a hyperbolic isometry, ordered
// (repelling, attracting); the axis runs from the first to the second.
inline std::array<double, 2> axis_endpoints(const Isometry& g) {
    if (classify(g) != IsometryKind::Hyperbolic)
        throw NotHyperbolic("axis_endpoints requires a hyperbolic isometry");
    const double tr = g.trace();
    // fixed points of (az+b)/(cz+d): c z^2 + (d-a) z - b = 0
    if (std::fabs(g.c) < 1e-300) {
        // one fixed point at infinity; the other at b/(a-d)
        const double other = g.b / (g.a - g.d);
        // diag-dominant: attracting at infinity iff |a| > |d|
        if (std::fabs(g.a) > std::fabs(g.d)) return {other, INFINITY};
        return {INFINITY, other};
    }
    const double disc = std::sqrt(tr * tr - 4.0);
    const double r1 = (g.a - g.d + disc) / (2.0 * g.c);
    const double r2 = (g.a - g.d - disc) / (2.0 * g.c);
    // attracting fixed point x satisfies |g'(x)| < 1, g'(x) = 1/(cx+d)^2
    const double d1 = std::fabs(g.c * r1 + g.d);
    if (d1 > 1.0) return {r2, r1};
    return {r1, r2};
}

inline double parabolic_fixed_point(const Isometry& g) {
    if (classify(g) != IsometryKind::Parabolic)
        throw DomainError("parabolic_fixed_point requires a parabolic isometry");
    if (std::fabs(g.c) < 1e-12) return INFINITY;
    return (g.a - g.d) / (2.0 * g.c);
}

// Fermi coordinates relative to an oriented geodesic with a marked origin:
// nu is arclength along the axis, rho the signed perpendicular distance,
// positive on the left of the oriented axis.
struct FermiCoords {
    double nu = 0.0;
    double rho = 0.0;
};

// An oriented geodesic with unit-speed origin, stored as the isometry
// carrying the reference axis (imaginary axis upward, origin i) onto it.
struct FermiFrame {
    Isometry chart;

    FermiFrame() = default;
    explicit FermiFrame(const Isometry& g) : chart(g) {}

    // Frame whose axis passes through the base of t in direction t.
    static FermiFrame from_tangent(const UnitTangent& t) {
        const double sy = std::sqrt(t.base.y);
        const Isometry to_point = Isometry::unchecked(sy, t.base.x / sy, 0.0, 1.0 / sy);
        return FermiFrame(to_point * Isometry::rotation(t.angle - kPi / 2.0));
    }

    // Frame on the geodesic with ideal endpoints (u, v), oriented u -> v.
    // The origin is the point of the axis closest to i, then shifted so nu=0
    // sits at the given offset from that foot.
    static FermiFrame from_endpoints(double u, double v) {
        if (u == v) throw DomainError("FermiFrame requires distinct endpoints");
        Isometry m;
        if (std::isinf(v)) {
            m = Isometry::unchecked(1.0, u, 0.0, 1.0);              // 0 -> u, inf -> inf
        } else if (std::isinf(u)) {
            m = Isometry::unchecked(v, -1.0, 1.0, 0.0);             // 0 -> inf, inf -> v
        } else {
            const double s = (v - u) > 0 ? std::sqrt(v - u) : std::sqrt(u - v);
            if (v > u)
                m = Isometry::unchecked(v / s, u / s, 1.0 / s, 1.0 / s);
            else
                m = Isometry::unchecked(-v / s, u / s, -1.0 / s, 1.0 / s);
        }
        // slide the origin to the foot of the perpendicular from i
        const PlanePoint pre = m.inverse().apply(reference_point());
        const double nu0 = std::log(std::hypot(pre.x, pre.y));
        return FermiFrame(m * Isometry::translation(nu0));
    }

    double endpoint_neg() const { return chart.apply_boundary(0.0); }
    double endpoint_pos() const { return chart.apply_boundary(INFINITY); }

    PlanePoint origin() const { return chart.apply(reference_point()); }
    UnitTangent direction() const { return chart.apply(reference_tangent()); }

    FermiFrame advanced(double nu) const {
        return FermiFrame(chart * Isometry::translation(nu));
    }

    FermiFrame reversed() const {
        return FermiFrame(chart * Isometry::rotation(kPi));
    }
};

// In the reference frame: point at arclength nu, signed distance rho
// (rho > 0 on the left of the upward imaginary axis, i.e. x < 0).
inline PlanePoint fermi_point(const FermiFrame& frame, const FermiCoords& fc) {
    const double t = std::tanh(fc.rho);
    const double s = 1.0 / std::cosh(fc.rho);
    const double e = std::exp(fc.nu);
    return frame.chart.apply(PlanePoint{-e * t, e * s});
}

inline FermiCoords fermi_coords(const FermiFrame& frame, const PlanePoint& p) {
    const PlanePoint q = frame.chart.inverse().apply(p);
    const double r = std::hypot(q.x, q.y);
    return {std::log(r), std::atanh(-q.x / r)};
}

// Unit tangent at Fermi position (nu, rho) whose direction angle is given in
// the frame's own chart before mapping.
inline UnitTangent fermi_tangent(const FermiFrame& frame, const FermiCoords& fc,
                                 double angle) {
    const double t = std::tanh(fc.rho);
    const double s = 1.0 / std::cosh(fc.rho);
    const double e = std::exp(fc.nu);
    return frame.chart.apply(UnitTangent{PlanePoint{-e * t, e * s}, angle});
}

// Geodesic flow: the point at distance t along the geodesic tangent to v.
inline PlanePoint flow(const UnitTangent& v, double t) {
    const FermiFrame f = FermiFrame::from_tangent(v);
    return f.chart.apply(PlanePoint{0.0, std::exp(t)});
}

inline UnitTangent flow_tangent(const UnitTangent& v, double t) {
    const FermiFrame f = FermiFrame::from_tangent(v);
    return f.chart.apply(UnitTangent{PlanePoint{0.0, std::exp(t)}, kPi / 2.0});
}

// Riemannian exponential map of r1*v + r2*v', where v' is v rotated
// counterclockwise by pi/2.
inline PlanePoint exp_grid(const UnitTangent& v, double r1, double r2) {
    const double r = std::hypot(r1, r2);
    if (r == 0.0) return v.base;
    const double phi = std::atan2(r2, r1);
    return flow(UnitTangent{v.base, v.angle + phi}, r);
}

// The unique isometry carrying tangent s to tangent t.
inline Isometry tangent_transport(const UnitTangent& s, const UnitTangent& t) {
    return FermiFrame::from_tangent(t).chart * FermiFrame::from_tangent(s).chart.inverse();
}

} // namespace hypflow
