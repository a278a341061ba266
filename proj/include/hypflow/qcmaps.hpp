#pragma once

// Region-correspondence data for the collar/cusp quasiconformal surgery and
// the fully explicit truncated-cusp-to-funnel cylinder map, with numeric
// dilatation estimation.
//
// Cylinder coordinates: a point of the truncated cusp cylinder is (t, s)
// with t in [0,1) the proportional horocycle parameter and e^s the horocycle
// length (chart z = t + i e^{-s}); the funnel side uses Fermi coordinates
// (nu, rho) about the core geodesic of length ell. The map sends the
// horocycle at s >= 0 to the equidistant at depth delta + s preserving t
// (explicit piece), and the band s in [log(l*), 0] to the collar of depth
// delta by the modulus-affine stretch between the two flat cylinders
// (collar-model piece).

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hypflow/errors.hpp"
#include "hypflow/hyp2.hpp"
#include "hypflow/trig.hpp"

namespace hypflow {

inline double gudermann(double x) { return std::asin(std::tanh(x)); }
inline double inv_gudermann(double y) { return std::atanh(std::sin(y)); }

struct CylinderMap {
    double ell = 0.0;    // core geodesic length, 0 < ell < 1/2
    double delta = 0.0;  // collar depth log(2/ell)
    double lstar = 0.0;  // truncation horocycle length 2 ell / pi
    double band_modulus = 0.0;    // cusp band (l*, 1): 1/l* - 1
    double collar_modulus = 0.0;  // collar (0, delta): gd(delta)/ell

    // half-plane chart of the source point (t, s)
    PlanePoint source_chart(double t, double s) const {
        return {t, std::exp(-s)};
    }

    // target Fermi coordinates of the image of (t, s)
    FermiCoords target_fermi(double t, double s) const {
        const double nu = t * ell;
        if (s >= 0.0) return {nu, delta + s};  // explicit piece
        if (s < std::log(lstar) - 1e-12)
            throw DomainError("source point beyond the truncation horocycle");
        const double u1 = std::exp(-s) - 1.0;  // flat height in the cusp band
        const double u2 = collar_modulus * (1.0 - u1 / band_modulus);
        return {nu, inv_gudermann(std::max(u2, 0.0) * ell)};
    }

    // half-plane chart of the image (core geodesic on the imaginary axis)
    PlanePoint target_chart(double t, double s) const {
        const FermiCoords fc = target_fermi(t, s);
        return fermi_point(FermiFrame(), fc);
    }
};

inline CylinderMap cylinder_map(double ell) {
    if (!(ell > 0.0) || !(ell < 0.5))
        throw DomainError("cylinder_map requires 0 < ell < 1/2");
    CylinderMap m;
    m.ell = ell;
    m.delta = std::log(2.0 / ell);
    m.lstar = 2.0 * ell / kPi;
    m.band_modulus = 1.0 / m.lstar - 1.0;
    m.collar_modulus = gudermann(m.delta) / ell;
    return m;
}

enum class RegionMode { Isometric, CollarModel, ExplicitFormula };

struct RegionMap {
    RegionMode mode = RegionMode::Isometric;
    int leg = 0;               // which boundary curve the region surrounds
    double length = 0.0;       // that curve's length (0 for a cusp)
    double width = 0.0;        // isometric: collar width eta
    double band_lo = 0.0;      // collar_model: horocycle band lengths
    double band_hi = 0.0;
    double depth = 0.0;        // collar_model: target collar depth
    double dilatation_bound = 1.0;
};

// Region decomposition of the surgery on one pants piece: pinched legs (the
// index set C) get the collar-model band map, the rest are isometric on
// their standard collars. The product of the region bounds equals the
// closed-form (1 + 2 eps^2)^{|C|} global bound.
inline std::vector<RegionMap> bmms_regions(const std::array<double, 3>& L,
                                           const std::set<int>& C) {
    double eps = 0.0;
    for (int i : C) {
        if (i < 0 || i > 2) throw DomainError("pinched index out of range");
        if (!(L[i] < 0.5))
            throw DomainError("pinched lengths must be below 1/2");
        eps = std::max(eps, L[i]);
    }
    std::vector<RegionMap> out;
    for (int i = 0; i < 3; ++i) {
        RegionMap r;
        r.leg = i;
        r.length = L[i];
        if (C.count(i) && L[i] > 0.0) {
            r.mode = RegionMode::CollarModel;
            r.band_lo = 2.0 * L[i] / kPi;
            r.band_hi = 1.0;
            r.depth = std::log(2.0 / L[i]);
            r.dilatation_bound = 1.0 + 2.0 * eps * eps;
        } else {
            r.mode = RegionMode::Isometric;
            r.width = L[i] > 0.0 ? collar_eta(L[i]).eta : kCuspEta;
            r.dilatation_bound = 1.0;
        }
        out.push_back(r);
    }
    return out;
}

inline double regions_bound(const std::vector<RegionMap>& regions) {
    double b = 1.0;
    for (const auto& r : regions) b *= r.dilatation_bound;
    return b;
}

enum class MapPiece { Collar, Explicit, Whole };

namespace detail {

// Ratio of singular values of the Jacobian of the chart map at (t, s),
// central differences with step h. Both charts are conformal for the
// respective hyperbolic metrics, so the Euclidean singular-value ratio is
// the local quasiconformal dilatation.
inline double local_dilatation(const CylinderMap& m, double t, double s,
                               double h = 1e-4) {
    auto F = [&](double x, double y) { return m.target_chart(x, -std::log(y)); };
    const PlanePoint p = m.source_chart(t, s);
    const PlanePoint fx1 = F(p.x + h, p.y), fx0 = F(p.x - h, p.y);
    const PlanePoint fy1 = F(p.x, p.y + h), fy0 = F(p.x, p.y - h);
    const double a = (fx1.x - fx0.x) / (2.0 * h), b = (fy1.x - fy0.x) / (2.0 * h);
    const double c = (fx1.y - fx0.y) / (2.0 * h), d = (fy1.y - fy0.y) / (2.0 * h);
    // singular values of [[a,b],[c,d]] via J^T J
    const double q11 = a * a + c * c, q22 = b * b + d * d, q12 = a * b + c * d;
    const double tr = q11 + q22;
    const double disc = std::sqrt(std::max((q11 - q22) * (q11 - q22) +
                                               4.0 * q12 * q12,
                                           0.0));
    const double lo = (tr - disc) / 2.0;
    if (!(lo > 0.0)) return INFINITY;
    return std::sqrt((tr + disc) / 2.0 / lo);
}

} // namespace detail

// Supremum over a (t, s) grid of the local dilatation of the cylinder map.
inline double estimate_dilatation(const CylinderMap& m, double grid,
                                  MapPiece piece = MapPiece::Whole,
                                  double s_max = 3.0) {
    if (!(grid > 0.0)) throw DomainError("grid density must be positive");
    const double margin = 10.0 * 1e-4;  // keep differences inside each piece
    double lo, hi;
    switch (piece) {
        case MapPiece::Collar:
            lo = std::log(m.lstar) + margin;
            hi = -margin;
            break;
        case MapPiece::Explicit:
            lo = margin;
            hi = s_max;
            break;
        case MapPiece::Whole:
            lo = std::log(m.lstar) + margin;
            hi = s_max;
            break;
    }
    double worst = 1.0;
    for (double s = lo; s <= hi + 1e-12; s += grid) {
        if (piece == MapPiece::Whole && std::fabs(s) < margin)
            continue;  // skip the non-smooth seam between the pieces
        for (double t = 0.0; t < 1.0; t += grid)
            worst = std::max(worst, detail::local_dilatation(m, t, s));
    }
    return worst;
}

inline double estimate_dilatation(const RegionMap& r, double grid) {
    if (r.mode == RegionMode::Isometric) return 1.0;
    if (!(r.length > 0.0))
        throw DomainError("region map lacks a pointwise formula");
    const CylinderMap m = cylinder_map(r.length);
    return estimate_dilatation(
        m, grid,
        r.mode == RegionMode::CollarModel ? MapPiece::Collar : MapPiece::Explicit);
}

// Circumference-ratio of the explicit piece at height s >= 0: length of the
// equidistant at delta + s over the horocycle length e^s.
inline double explicit_piece_ratio(const CylinderMap& m, double s) {
    return m.ell * std::cosh(m.delta + s) / std::exp(s);
}

} // namespace hypflow
