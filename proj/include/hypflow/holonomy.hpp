#pragma once

// Realize a SurfaceSpec as a discrete subgroup of PSL(2,R) with the base
// vector normalized to the reference tangent (i, upward); group-ball
// enumeration, injectivity radii, and Chabauty gaps.
//
// Each pants piece is realized from its boundary trace triple
// (x, y, -z) = (2cosh(L1/2), 2cosh(L2/2), -2cosh(L3/2)); the character of an
// irreducible PSL(2,R) representation of the free group on two generators is
// determined by these traces, so the matrices below are conjugate to the
// discrete pants representation. Gluings position neighbouring pants by
// matching seam-anchored leg frames, with the twist as a displacement of
// tau * L along the curve (left-positive).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypflow/errors.hpp"
#include "hypflow/hyp2.hpp"
#include "hypflow/surface.hpp"
#include "hypflow/trig.hpp"

namespace hypflow {

// ---------------------------------------------------------------------------
// Canonical pants realization

struct LegGeometry {
    bool is_cusp = false;
    double ideal_point = 0.0;      // cusp fixed point
    FermiFrame curve_frame;        // origin gamma_i(0), direction with pants on the left
    int dir_sign = 1;              // boundary element translates dir_sign * L along curve_frame
};

struct PantsRealization {
    std::array<double, 3> lengths{};
    std::array<Isometry, 3> boundary{};  // A3 A2 A1 = 1
    std::array<LegGeometry, 3> legs{};
    std::array<FermiFrame, 3> seam{};    // seam[k] joins legs k and k+1, oriented k -> k+1
    PlanePoint hex_ref;                  // interior point of hexagon H0
};

namespace detail {

// Perpendicular from an ideal point xi to the axis of `frame`, oriented from
// xi toward the axis, with origin at the foot.
inline FermiFrame drop_perpendicular(const FermiFrame& frame, double xi) {
    const Isometry inv = frame.chart.inverse();
    const double p = inv.apply_boundary(xi);
    if (std::isinf(p)) throw RealizationError("ideal point lies on the axis end");
    FermiFrame seam = FermiFrame::from_endpoints(p, -p);
    // origin of from_endpoints is the closest point to i; re-anchor at the
    // foot on the imaginary axis, which is i*|p| (nu = 0 of the semicircle)
    const double nu = fermi_coords(seam, PlanePoint{0.0, std::fabs(p)}).nu;
    seam = seam.advanced(nu);
    return FermiFrame(frame.chart * seam.chart);
}

// Common perpendicular between the axis of `frame` and the geodesic with
// ideal endpoints (u, v); oriented from the axis toward (u, v), origin at the
// foot on the axis. Throws if the geodesics meet.
inline FermiFrame common_perpendicular(const FermiFrame& frame, double u, double v) {
    const Isometry inv = frame.chart.inverse();
    const double p = inv.apply_boundary(u);
    const double q = inv.apply_boundary(v);
    if (std::isinf(p) || std::isinf(q) || p * q <= 0.0)
        throw RealizationError("geodesics admit no common perpendicular");
    const double r = std::sqrt(p * q);
    const double s = p > 0.0 ? 1.0 : -1.0;
    // semicircle |z| = r, oriented toward the side holding (p, q)
    FermiFrame seam = FermiFrame::from_endpoints(-s * r, s * r);
    const double nu = fermi_coords(seam, PlanePoint{0.0, r}).nu;
    seam = seam.advanced(nu);
    return FermiFrame(frame.chart * seam.chart);
}

// Direction angle at p of the geodesic heading toward q, from the circle
// through p and q orthogonal to the real axis.
inline double heading(const PlanePoint& p, const PlanePoint& q) {
    if (std::fabs(p.x - q.x) < 1e-14) return q.y > p.y ? kPi / 2.0 : -kPi / 2.0;
    const double c =
        (q.x * q.x + q.y * q.y - p.x * p.x - p.y * p.y) / (2.0 * (q.x - p.x));
    double theta = std::atan2(p.y, p.x - c) + kPi / 2.0;
    if ((q.x - p.x) * std::cos(theta) + (q.y - p.y) * std::sin(theta) < 0.0)
        theta += kPi;
    return theta;
}

inline PlanePoint midpoint(const PlanePoint& p, const PlanePoint& q) {
    const double d = dist(p, q);
    if (d < 1e-15) return p;
    return flow(UnitTangent{p, heading(p, q)}, d / 2.0);
}

} // namespace detail

// Reflection of a tangent across the axis of `frame`.
inline UnitTangent reflect_tangent(const FermiFrame& frame, const UnitTangent& t) {
    const UnitTangent local = frame.chart.inverse().apply(t);
    const UnitTangent mirrored{PlanePoint{-local.base.x, local.base.y},
                               kPi - local.angle};
    return frame.chart.apply(mirrored);
}

inline PlanePoint reflect_point(const FermiFrame& frame, const PlanePoint& p) {
    const PlanePoint local = frame.chart.inverse().apply(p);
    return frame.chart.apply(PlanePoint{-local.x, local.y});
}

// Canonical realization of a generalized pants with boundary lengths >= 0.
inline PantsRealization realize_pants(double l1, double l2, double l3) {
    for (double l : {l1, l2, l3})
        if (l < 0.0 || !std::isfinite(l))
            throw RealizationError("pants boundary lengths must be finite and >= 0");
    PantsRealization P;
    P.lengths = {l1, l2, l3};
    const double x = 2.0 * std::cosh(l1 / 2.0);
    const double y = 2.0 * std::cosh(l2 / 2.0);
    const double z = 2.0 * std::cosh(l3 / 2.0);
    const double c = (-z - std::sqrt(std::max(z * z - 4.0, 0.0))) / 2.0;
    const Isometry A1 = Isometry::unchecked(x, -1.0, 1.0, 0.0);
    const Isometry A2 = Isometry::unchecked(0.0, c, -1.0 / c, y);
    // A3 A2 A1 = 1: with A1, A2, A3 the products of reflections in pairs of
    // seam lines (A1 = s3 s2, A2 = s1 s3, A3 = s2 s1), the axes of all three
    // are the hexagon-adjacent boundary lifts
    const Isometry A3 = (A2 * A1).inverse();
    P.boundary = {A1, A2, A3};

    // boundary geodesics / ideal points
    std::array<FermiFrame, 3> axis;
    std::array<bool, 3> cusp{};
    for (int i = 0; i < 3; ++i) {
        if (P.lengths[i] > 0.0) {
            const auto ep = axis_endpoints(P.boundary[i]);
            axis[i] = FermiFrame::from_endpoints(ep[0], ep[1]);
        } else {
            cusp[i] = true;
            P.legs[i].is_cusp = true;
            P.legs[i].ideal_point = parabolic_fixed_point(P.boundary[i]);
        }
    }

    // seams: seam[k] joins legs k and k+1
    for (int k = 0; k < 3; ++k) {
        const int j = (k + 1) % 3;
        if (!cusp[k] && !cusp[j]) {
            P.seam[k] = detail::common_perpendicular(
                axis[k], axis[j].endpoint_neg(), axis[j].endpoint_pos());
        } else if (cusp[k] && !cusp[j]) {
            // oriented k -> j: from the ideal point toward the axis; the
            // perpendicular drop is oriented that way, origin at the foot on j
            P.seam[k] = detail::drop_perpendicular(axis[j], P.legs[k].ideal_point);
            // drop_perpendicular orients xi -> axis; origin already at foot on j
        } else if (!cusp[k] && cusp[j]) {
            FermiFrame f = detail::drop_perpendicular(axis[k], P.legs[j].ideal_point);
            // oriented j -> k; reverse to get k -> j, keep origin (foot on k)
            P.seam[k] = f.reversed();
        } else {
            P.seam[k] = FermiFrame::from_endpoints(P.legs[k].ideal_point,
                                                   P.legs[j].ideal_point);
        }
    }

    // interior reference point of hexagon H0: midpoints of seam anchors
    const PlanePoint m01 = detail::midpoint(P.seam[0].origin(), P.seam[1].origin());
    P.hex_ref = detail::midpoint(m01, P.seam[2].origin());

    // leg frames: origin gamma_i(0) = foot of seam[i] on leg i, direction
    // chosen so the pants interior is on the left
    for (int i = 0; i < 3; ++i) {
        if (cusp[i]) continue;
        // foot of seam[i] on axis i
        const PlanePoint foot = [&] {
            if (!cusp[(i + 1) % 3]) return P.seam[i].origin();
            // seam oriented toward the cusp, origin anchored on axis i already
            return P.seam[i].origin();
        }();
        const double nu = fermi_coords(axis[i], foot).nu;
        FermiFrame f = axis[i].advanced(nu);
        // interior test: rotating the axis direction by +pi/2 must point
        // toward the hexagon reference point side
        const FermiCoords rc = fermi_coords(f, P.hex_ref);
        if (rc.rho < 0.0) {
            f = f.reversed();
        }
        P.legs[i].curve_frame = f;
        // does the boundary element translate along the chosen direction?
        const PlanePoint moved = P.boundary[i].apply(f.origin());
        const FermiCoords mc = fermi_coords(f, moved);
        P.legs[i].dir_sign = mc.nu >= 0.0 ? 1 : -1;
    }
    return P;
}

// Hexagon side frame in canonical pants coordinates. Boundary sides use the
// leg frame (origin gamma_i(0)); seam sides use the seam frame.
inline FermiFrame hex_side_frame(const PantsRealization& P, HexSide side) {
    const int b = hex_side_boundary(side);
    if (b >= 0) {
        if (P.legs[b].is_cusp)
            throw RealizationError("cusp leg has no boundary side");
        return P.legs[b].curve_frame;
    }
    const auto pair = hex_side_seam(side);
    return P.seam[pair[0]];
}

// All available bounding geodesics of hexagon H0 (cusp legs contribute none),
// paired with the sign of rho on the hexagon side.
inline std::vector<std::pair<FermiFrame, double>> hex_half_planes(
    const PantsRealization& P) {
    std::vector<std::pair<FermiFrame, double>> out;
    auto push = [&](const FermiFrame& f) {
        const double s = fermi_coords(f, P.hex_ref).rho >= 0.0 ? 1.0 : -1.0;
        out.emplace_back(f, s);
    };
    for (int i = 0; i < 3; ++i)
        if (!P.legs[i].is_cusp) push(P.legs[i].curve_frame);
    for (int k = 0; k < 3; ++k) push(P.seam[k]);
    return out;
}

inline bool hex_contains(const std::vector<std::pair<FermiFrame, double>>& planes,
                         const PlanePoint& p, double tol = 1e-9) {
    for (const auto& [f, s] : planes)
        if (s * fermi_coords(f, p).rho < -tol) return false;
    return true;
}

inline bool hex_contains(const PantsRealization& P, const PlanePoint& p,
                         double tol = 1e-9) {
    return hex_contains(hex_half_planes(P), p, tol);
}

// Tangent realizing a VectorLocation in canonical pants coordinates.
inline UnitTangent realize_location(const PantsRealization& P,
                                    const VectorLocation& loc) {
    const FermiFrame side = hex_side_frame(P, loc.side);
    if (loc.hexagon == 0) return fermi_tangent(side, loc.fermi, loc.angle);
    // hexagon 1 is the mirror copy; build the mirrored location in H0 and
    // reflect across the S12 seam
    const UnitTangent in_h0 =
        fermi_tangent(side, FermiCoords{loc.fermi.nu, -loc.fermi.rho},
                      kPi - loc.angle);
    return reflect_tangent(P.seam[0], in_h0);
}

// ---------------------------------------------------------------------------
// Fuchsian groups

struct FuchsianGroup {
    std::vector<Isometry> generators;
    std::vector<std::string> labels;                // provenance per generator
    std::map<std::string, Isometry> curve_elements; // placed words, one per curve
    std::map<std::string, Isometry> pants_position; // chart position per pants
    std::map<std::string, PantsRealization> pants_geometry;
    std::map<std::string, std::array<CurveKind, 3>> leg_kinds;

    FuchsianGroup conjugated(const Isometry& h) const {
        FuchsianGroup g = *this;
        const Isometry hi = h.inverse();
        for (auto& m : g.generators) m = h * m * hi;
        for (auto& [id, m] : g.curve_elements) m = h * m * hi;
        for (auto& [id, m] : g.pants_position) m = h * m;
        return g;
    }
};

// Frame of a hexagon side in the normalized global chart.
inline FermiFrame global_side_frame(const FuchsianGroup& g,
                                    const std::string& pants_id, HexSide side) {
    const auto& P = g.pants_geometry.at(pants_id);
    return FermiFrame(g.pants_position.at(pants_id) * hex_side_frame(P, side).chart);
}

inline UnitTangent global_location(const FuchsianGroup& g, const VectorLocation& loc) {
    const auto it = g.pants_geometry.find(loc.pants_id);
    if (it == g.pants_geometry.end())
        throw LiftError("location references a pants absent from the chart");
    const UnitTangent local = realize_location(it->second, loc);
    return g.pants_position.at(loc.pants_id).apply(local);
}

namespace detail {

// Cylinder specs carry no pants chart; their base vector is read as Fermi
// coordinates plus angle relative to the reference frame (the core geodesic
// for the funnel cylinder, the vertical through the cusp for the cusp
// cylinder). Normalization carries that tangent to the reference tangent.
inline FuchsianGroup normalize_cylinder(const FuchsianGroup& g,
                                        const SurfaceSpec& spec) {
    const UnitTangent base =
        fermi_tangent(FermiFrame(), spec.base.fermi, spec.base.angle);
    return g.conjugated(FermiFrame::from_tangent(base).chart.inverse());
}

} // namespace detail

inline FuchsianGroup holonomy_from_spec(const SurfaceSpec& spec) {
    {
        const auto viol = validate(spec);
        if (!viol.empty())
            throw RealizationError("invalid surface spec: " + viol.front().rule);
    }
    FuchsianGroup g;
    switch (spec.kind) {
        case SurfaceKind::Plane:
            return g;
        case SurfaceKind::CuspCylinder:
            g.generators.push_back(Isometry::unchecked(1.0, 1.0, 0.0, 1.0));
            g.labels.push_back("cusp");
            g.curve_elements["cusp"] = g.generators.back();
            return detail::normalize_cylinder(g, spec);
        case SurfaceKind::FunnelCylinder:
            g.generators.push_back(Isometry::translation(spec.cylinder_length));
            g.labels.push_back("funnel");
            g.curve_elements["funnel"] = g.generators.back();
            return detail::normalize_cylinder(g, spec);
        case SurfaceKind::PantsGraph:
            break;
    }

    for (const auto& p : spec.pants) {
        std::array<double, 3> L{};
        std::array<CurveKind, 3> kinds{};
        for (int i = 0; i < 3; ++i) {
            const CurveSpec* c = spec.find_curve(p.legs[i]);
            L[i] = c->length;
            kinds[i] = c->kind;
        }
        g.pants_geometry.emplace(p.id, realize_pants(L[0], L[1], L[2]));
        g.leg_kinds[p.id] = kinds;
    }

    // position pants by BFS from the base pants over the pairing
    auto leg_frame = [&](const std::string& pid, int leg) -> FermiFrame {
        const auto& P = g.pants_geometry.at(pid);
        if (P.legs[leg].is_cusp)
            throw RealizationError("cannot glue along a cusp leg");
        return P.legs[leg].curve_frame;
    };
    auto glue_iso = [&](const std::string& ppid, int pleg, const std::string& qpid,
                        int qleg) -> Isometry {
        const auto* curve = spec.find_curve(spec.find_pants(ppid)->legs[pleg]);
        const double offset = curve->twist.value_or(0.0) * curve->length;
        return leg_frame(ppid, pleg).chart * Isometry::translation(offset) *
               Isometry::rotation(kPi) * leg_frame(qpid, qleg).chart.inverse();
    };

    g.pants_position[spec.base.pants_id] = Isometry::identity();
    std::deque<std::string> queue{spec.base.pants_id};
    std::vector<bool> edge_used(spec.pairing.size(), false);
    while (!queue.empty()) {
        const std::string cur = queue.front();
        queue.pop_front();
        for (size_t e = 0; e < spec.pairing.size(); ++e) {
            if (edge_used[e]) continue;
            for (int k = 0; k < 2; ++k) {
                const HalfEdge& a = spec.pairing[e][k];
                const HalfEdge& b = spec.pairing[e][1 - k];
                if (a.pants == cur && !g.pants_position.count(b.pants)) {
                    g.pants_position[b.pants] =
                        g.pants_position.at(a.pants) *
                        glue_iso(a.pants, a.leg, b.pants, b.leg);
                    edge_used[e] = true;
                    queue.push_back(b.pants);
                    break;
                }
            }
        }
    }

    // stable letters for the non-tree edges
    std::vector<Isometry> stable;
    std::vector<std::string> stable_labels;
    for (size_t e = 0; e < spec.pairing.size(); ++e) {
        if (edge_used[e]) continue;
        const HalfEdge& a = spec.pairing[e][0];
        const HalfEdge& b = spec.pairing[e][1];
        const Isometry t = g.pants_position.at(a.pants) *
                           glue_iso(a.pants, a.leg, b.pants, b.leg) *
                           g.pants_position.at(b.pants).inverse();
        stable.push_back(t);
        stable_labels.push_back("glue:" + spec.find_pants(a.pants)->legs[a.leg]);
    }

    // placed curve elements (first leg in pants order)
    for (const auto& p : spec.pants) {
        const Isometry& pos = g.pants_position.at(p.id);
        const auto& P = g.pants_geometry.at(p.id);
        for (int i = 0; i < 3; ++i) {
            const std::string& cid = p.legs[i];
            if (!g.curve_elements.count(cid))
                g.curve_elements[cid] = pos * P.boundary[i] * pos.inverse();
        }
    }

    // generator emission: root pants generators, stable letters, then extra
    // boundary elements until every pants subgroup is reachable
    std::map<std::string, bool> curve_known;
    std::map<std::string, bool> pants_covered;
    auto cover = [&](const std::string& pid) {
        pants_covered[pid] = true;
        for (const auto& leg : spec.find_pants(pid)->legs) curve_known[leg] = true;
    };
    {
        const auto& root = *spec.find_pants(spec.base.pants_id);
        const auto& P = g.pants_geometry.at(root.id);
        const Isometry& pos = g.pants_position.at(root.id);
        g.generators.push_back(pos * P.boundary[0] * pos.inverse());
        g.labels.push_back(root.id + ":" + root.legs[0]);
        g.generators.push_back(pos * P.boundary[1] * pos.inverse());
        g.labels.push_back(root.id + ":" + root.legs[1]);
        cover(root.id);
    }
    for (size_t s = 0; s < stable.size(); ++s) {
        g.generators.push_back(stable[s]);
        g.labels.push_back(stable_labels[s]);
    }
    bool progress = true;
    while (true) {
        if (progress) {
            progress = false;
            for (const auto& p : spec.pants) {
                if (pants_covered[p.id]) continue;
                int known = 0;
                for (const auto& leg : p.legs)
                    if (curve_known[leg]) known++;
                if (known >= 2) {
                    cover(p.id);
                    progress = true;
                }
            }
            if (progress) continue;
        }
        // emit one more generator from the least-covered pants
        const PantsPiece* pick = nullptr;
        int best_known = -1;
        for (const auto& p : spec.pants) {
            if (pants_covered[p.id]) continue;
            int known = 0;
            for (const auto& leg : p.legs)
                if (curve_known[leg]) known++;
            if (known > best_known) {
                best_known = known;
                pick = &p;
            }
        }
        if (!pick) break;
        for (int i = 0; i < 3; ++i) {
            if (!curve_known[pick->legs[i]]) {
                const Isometry& pos = g.pants_position.at(pick->id);
                g.generators.push_back(pos * g.pants_geometry.at(pick->id).boundary[i] *
                                       pos.inverse());
                g.labels.push_back(pick->id + ":" + pick->legs[i]);
                curve_known[pick->legs[i]] = true;
                progress = true;
                break;
            }
        }
    }

    // normalize: carry the base tangent to the reference tangent
    const UnitTangent base = global_location(g, spec.base);
    const Isometry norm = FermiFrame::from_tangent(base).chart.inverse();
    return g.conjugated(norm);
}

// ---------------------------------------------------------------------------
// Group balls

struct BallEntry {
    std::string word;  // reduced word over the working generator set
    Isometry element;
    double displacement = 0.0;
};

struct GroupBall {
    std::vector<BallEntry> elements;  // identity first, then by displacement
};

struct BallOptions {
    double margin_slack = 8.0;  // cap on the 2*max-generator-displacement slack
    size_t max_elements = 0;    // 0: use HYPFLOW_MAX_BALL or the default
};

inline size_t ball_budget(const BallOptions& opt) {
    if (opt.max_elements) return opt.max_elements;
    if (const char* env = std::getenv("HYPFLOW_MAX_BALL")) {
        const long v = std::atol(env);
        if (v > 0) return static_cast<size_t>(v);
    }
    return 200000;
}

namespace detail {

// dist(p, m p) straight from the matrix entries: conjugating by the upper
// triangular map taking i to p gives N with cosh d = ||N||_F^2 / 2. Safe for
// huge entries (returns +inf instead of overflowing the point map).
inline double displacement(const Isometry& m, const PlanePoint& p) {
    const double n11 = m.a - p.x * m.c;
    const double n12 = (m.a * p.x + m.b - p.x * (m.c * p.x + m.d)) / p.y;
    const double n21 = m.c * p.y;
    const double n22 = m.c * p.x + m.d;
    const double c = (n11 * n11 + n12 * n12 + n21 * n21 + n22 * n22) / 2.0;
    if (!std::isfinite(c)) return INFINITY;
    return std::acosh(std::max(c, 1.0));
}

// Displacement-reducing cleanup of a generating set at a basepoint: drops
// identity/duplicate generators and greedily replaces a generator by a
// shorter product when that strictly reduces displacement. Nielsen moves
// only, so the generated group is unchanged.
inline std::vector<Isometry> reduce_generators(std::vector<Isometry> gens,
                                               const PlanePoint& p) {
    auto disp = [&](const Isometry& m) { return displacement(m, p); };
    // drop identities and duplicates (also inverse-duplicates)
    std::vector<Isometry> clean;
    for (const auto& gmat : gens) {
        if (gmat.norm_from_identity() <= 1e-12) continue;
        bool dup = false;
        for (const auto& h : clean)
            if (gmat.norm_dist(h) <= 1e-12 || gmat.norm_dist(h.inverse()) <= 1e-12)
                dup = true;
        if (!dup) clean.push_back(gmat);
    }
    gens = clean;
    bool changed = true;
    int rounds = 0;
    while (changed && rounds++ < 64) {
        changed = false;
        for (size_t i = 0; i < gens.size(); ++i) {
            const double di = disp(gens[i]);
            Isometry best = gens[i];
            double best_d = di;
            for (size_t j = 0; j < gens.size(); ++j) {
                if (i == j) continue;
                for (const Isometry& gj : {gens[j], gens[j].inverse()}) {
                    for (const Isometry& cand :
                         {gens[i] * gj, gj * gens[i], gj * gens[i] * gj.inverse()}) {
                        const double dc = disp(cand);
                        if (dc < best_d - 1e-12) {
                            best_d = dc;
                            best = cand;
                        }
                    }
                }
            }
            if (best_d < di - 1e-12) {
                if (best.norm_from_identity() <= 1e-12) {
                    gens.erase(gens.begin() + static_cast<long>(i));
                    --i;
                } else {
                    bool dup = false;
                    for (size_t j = 0; j < gens.size(); ++j)
                        if (j != i && (best.norm_dist(gens[j]) <= 1e-12 ||
                                       best.norm_dist(gens[j].inverse()) <= 1e-12))
                            dup = true;
                    if (dup) {
                        gens.erase(gens.begin() + static_cast<long>(i));
                        --i;
                    } else {
                        gens[i] = best;
                    }
                }
                changed = true;
            }
        }
    }
    return gens;
}

// Approximate-equality index over isometries keyed by the sign-invariant
// Frobenius norm.
class ElementIndex {
public:
    // returns true if an element within tol was already present
    bool insert(const Isometry& m, double tol) {
        const double key = frob(m);
        const double window = tol * 8.0 * (1.0 + std::sqrt(key));
        auto lo = index_.lower_bound(key - window);
        auto hi = index_.upper_bound(key + window);
        for (auto it = lo; it != hi; ++it)
            if (elems_[it->second].norm_dist(m) <= tol) return true;
        index_.emplace(key, elems_.size());
        elems_.push_back(m);
        return false;
    }

private:
    static double frob(const Isometry& m) {
        return m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
    }
    std::multimap<double, size_t> index_;
    std::vector<Isometry> elems_;
};

} // namespace detail

inline GroupBall group_ball(const FuchsianGroup& g, double R,
                            const PlanePoint& basepoint,
                            const BallOptions& opt = {}) {
    if (!(R > 0.0)) throw DomainError("group_ball requires R > 0");
    const size_t budget = ball_budget(opt);

    std::vector<Isometry> work = detail::reduce_generators(g.generators, basepoint);
    std::vector<Isometry> step;
    std::vector<std::string> step_names;
    for (size_t i = 0; i < work.size(); ++i) {
        step.push_back(work[i]);
        step_names.push_back("g" + std::to_string(i + 1));
        step.push_back(work[i].inverse());
        step_names.push_back("G" + std::to_string(i + 1));
    }
    double max_disp = 0.0;
    for (const auto& s : step)
        max_disp = std::max(max_disp, detail::displacement(s, basepoint));
    if (!std::isfinite(max_disp)) max_disp = opt.margin_slack;
    const double margin = R + std::min(2.0 * max_disp, opt.margin_slack);

    GroupBall ball;
    detail::ElementIndex seen;
    std::deque<BallEntry> frontier;
    const BallEntry id{"", Isometry::identity(), 0.0};
    seen.insert(id.element, 1e-7);
    ball.elements.push_back(id);
    frontier.push_back(id);
    size_t explored = 1;

    while (!frontier.empty()) {
        const BallEntry cur = frontier.front();
        frontier.pop_front();
        for (size_t s = 0; s < step.size(); ++s) {
            const Isometry nxt = cur.element * step[s];
            const double d = detail::displacement(nxt, basepoint);
            if (d > margin) continue;
            if (seen.insert(nxt, 1e-7)) continue;
            BallEntry e{cur.word.empty() ? step_names[s] : cur.word + "." + step_names[s],
                        nxt, d};
            if (d <= R) {
                ball.elements.push_back(e);
                if (ball.elements.size() > budget)
                    throw BudgetExceeded("group ball exceeds element budget");
            }
            frontier.push_back(std::move(e));
            if (++explored > budget * 64)
                throw BudgetExceeded("group ball exploration exceeds budget");
        }
    }

    std::sort(ball.elements.begin() + 1, ball.elements.end(),
              [](const BallEntry& a, const BallEntry& b) {
                  if (a.displacement != b.displacement)
                      return a.displacement < b.displacement;
                  return a.word < b.word;
              });
    return ball;
}

// Geodesic distance on the quotient between two chart points, computed as the
// minimal displacement over a precomputed ball (sorted by displacement).
inline double quotient_dist(const GroupBall& ball, const PlanePoint& p,
                            const PlanePoint& q) {
    double best = cosh_dist(p, q);
    const double dp = dist(PlanePoint{0.0, 1.0}, p);
    const double dq = dist(PlanePoint{0.0, 1.0}, q);
    for (const auto& e : ball.elements) {
        if (e.displacement - dp - dq >= std::acosh(best)) break;
        best = std::min(best, cosh_dist(p, e.element.apply(q)));
    }
    return std::acosh(std::max(best, 1.0));
}

// ---------------------------------------------------------------------------
// Injectivity radius and Chabauty gap

struct InjectivityRadius {
    double value = 0.0;
    bool at_least = false;  // true: no element found, value is the cap
};

inline InjectivityRadius injectivity_radius(const FuchsianGroup& g,
                                            const PlanePoint& p, double cap,
                                            const BallOptions& opt = {}) {
    if (!(cap > 0.0)) throw DomainError("injectivity_radius requires cap > 0");
    if (g.generators.empty()) return {cap, true};
    const GroupBall ball = group_ball(g, 2.0 * cap, p, opt);
    double best = INFINITY;
    for (const auto& e : ball.elements)
        if (e.element.norm_from_identity() > 1e-9)
            best = std::min(best, e.displacement);
    if (!std::isfinite(best)) return {cap, true};
    return {best / 2.0, false};
}

inline double chabauty_gap(const FuchsianGroup& g1, const FuchsianGroup& g2,
                           double R, const BallOptions& opt = {}) {
    const PlanePoint ref = reference_point();
    const GroupBall b1 = group_ball(g1, R, ref, opt);
    const GroupBall b2 = group_ball(g2, R, ref, opt);
    auto directed = [](const GroupBall& a, const GroupBall& b) {
        double worst = 0.0;
        for (const auto& ea : a.elements) {
            double best = INFINITY;
            for (const auto& eb : b.elements)
                best = std::min(best, ea.element.norm_dist(eb.element));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(b1, b2), directed(b2, b1));
}

// Gap variant robust against elements sitting exactly at the ball cutoff:
// each R-ball is matched into the other group's (R + slack)-ball, so an
// element drifting across the radius R boundary cannot inflate the gap.
inline double chabauty_gap_slack(const GroupBall& w1, const GroupBall& w2,
                                 double R) {
    auto directed = [R](const GroupBall& a, const GroupBall& b) {
        double worst = 0.0;
        for (const auto& ea : a.elements) {
            if (ea.displacement > R) break;  // sorted by displacement
            double best = INFINITY;
            for (const auto& eb : b.elements)
                best = std::min(best, ea.element.norm_dist(eb.element));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(w1, w2), directed(w2, w1));
}

inline double chabauty_gap_slack(const FuchsianGroup& g1,
                                 const FuchsianGroup& g2, double R,
                                 double slack = 1.0,
                                 const BallOptions& opt = {}) {
    const PlanePoint ref = reference_point();
    const GroupBall w1 = group_ball(g1, R + slack, ref, opt);
    const GroupBall w2 = group_ball(g2, R + slack, ref, opt);
    return chabauty_gap_slack(w1, w2, R);
}

// Conjugation path: for each tangent, conjugate by the isometry carrying the
// tangent to the reference tangent.
inline std::vector<FuchsianGroup> conjugation_path(
    const FuchsianGroup& g, const std::vector<UnitTangent>& tangent_path) {
    if (tangent_path.empty())
        throw DomainError("conjugation_path requires a nonempty tangent path");
    std::vector<FuchsianGroup> out;
    out.reserve(tangent_path.size());
    for (const auto& t : tangent_path) {
        const Isometry h = FermiFrame::from_tangent(t).chart.inverse();
        out.push_back(g.conjugated(h));
    }
    return out;
}

} // namespace hypflow
