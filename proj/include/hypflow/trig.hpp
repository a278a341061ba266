#pragma once

// Closed-form hyperbolic trigonometry: the right-angled hexagon seam
// formula, collar widths, and cusp truncation constants.

#include <cmath>
#include <cstddef>
#include <vector>

#include "hypflow/errors.hpp"
#include "hypflow/hyp2.hpp"

namespace hypflow {

// Alternating side lengths of a right-angled hexagon: a_i are half-boundary
// sides, s_i the seam sides (s_i opposite a_i).
struct HexagonSpec {
    double a1 = 0.0, s3 = 0.0, a2 = 0.0, s1 = 0.0, a3 = 0.0, s2 = 0.0;
};

struct CollarSpec {
    double omega = 0.0;
    double eta = 0.0;
};

struct TruncationSpec {
    double w = 0.0;      // horocycle length 2L/pi
    double delta = 0.0;  // collar depth log(2/L)
};

// Side opposite the side of length c in the right-angled hexagon with
// alternating sides (a, ., b, ., c, .).
inline double hexagon_seam(double a, double b, double c) {
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0))
        throw DomainError("hexagon_seam requires positive side lengths");
    return std::acosh((std::cosh(c) + std::cosh(a) * std::cosh(b)) /
                      (std::sinh(a) * std::sinh(b)));
}

// Full hexagon from pants half-boundary lengths.
inline HexagonSpec hexagon_from_half_lengths(double a1, double a2, double a3) {
    HexagonSpec h;
    h.a1 = a1;
    h.a2 = a2;
    h.a3 = a3;
    h.s1 = hexagon_seam(a2, a3, a1);
    h.s2 = hexagon_seam(a3, a1, a2);
    h.s3 = hexagon_seam(a1, a2, a3);
    return h;
}

// Collar constants of a boundary geodesic of length L:
//   omega = arcsinh(1/sinh(L/2)),  eta = arctanh(tanh(omega)/cosh(L/2)).
inline CollarSpec collar_eta(double L) {
    if (!(L > 0.0)) throw DomainError("collar_eta requires L > 0");
    CollarSpec c;
    c.omega = std::asinh(1.0 / std::sinh(L / 2.0));
    c.eta = std::atanh(std::tanh(c.omega) / std::cosh(L / 2.0));
    return c;
}

// Collar width used for a cusp leg.
inline constexpr double kCuspEta = 1.0;

// Truncation constants for a pinched curve of length L < 1/2: the horocycle
// length 2L/pi removed at the cusp, and the collar depth log(2/L) it maps to.
inline TruncationSpec truncation(double L) {
    if (!(L > 0.0) || !(L < 0.5))
        throw DomainError("truncation requires 0 < L < 1/2");
    return {2.0 * L / kPi, std::log(2.0 / L)};
}

// Dilatation bound (1 + 2 eps^2)^{|C|} with eps = max pinched length.
inline double dilatation_bound(const std::vector<double>& pinched_lengths) {
    double eps = 0.0;
    for (double L : pinched_lengths) {
        if (!(L < 0.5)) throw DomainError("dilatation_bound requires lengths < 1/2");
        eps = std::max(eps, L);
    }
    return std::pow(1.0 + 2.0 * eps * eps,
                    static_cast<double>(pinched_lengths.size()));
}

} // namespace hypflow
