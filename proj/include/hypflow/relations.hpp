#pragma once

// Sampled (epsilon, R)-relations between two vectored surfaces, built from
// hexagon alignment: two pants realizations are placed in a common chart with
// a shared side coinciding, points are paired through the nearest-point
// retraction onto the intersection of the two hexagons, the pairing is
// mirrored onto the second hexagon, and extended by the identity on
// unmodified pants pieces.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hypflow/errors.hpp"
#include "hypflow/holonomy.hpp"
#include "hypflow/hyp2.hpp"
#include "hypflow/surface.hpp"
#include "hypflow/trig.hpp"

namespace hypflow {

// A sample on a surface: Fermi coordinates relative to the S12 seam frame of
// the named pants piece (rho < 0 reaches the mirror hexagon).
struct SamplePoint {
    std::string pants_id;
    FermiCoords fc;
};

struct SamplePair {
    SamplePoint x1, x2;
    bool isometric = false;  // identity pairing outside the modified pants
};

struct RelationCert {
    double epsilon = 0.0;  // measured max distance distortion
    double radius = 0.0;   // covered disk radius about the base vector
    double density = 0.0;  // sampling grid density
    std::vector<SamplePair> pairs;
    std::array<bool, 5> checked{};  // Def-style conditions 1-5
};

// Chart-level position of a sample on its surface.
inline PlanePoint sample_position(const FuchsianGroup& g, const SamplePoint& sp) {
    const auto it = g.pants_geometry.find(sp.pants_id);
    if (it == g.pants_geometry.end())
        throw DomainMismatch("sample references unknown pants " + sp.pants_id);
    return g.pants_position.at(sp.pants_id)
        .apply(fermi_point(it->second.seam[0], sp.fc));
}

// ---------------------------------------------------------------------------
// Hexagon alignment

struct HexAlignment {
    PantsRealization s, t;
    Isometry place_s, place_t;  // canonical pants chart -> common chart
    int alpha = 0;              // shared leg index
};

namespace detail {

// Placement carrying the seam adjacent to leg alpha onto the imaginary axis
// with a canonical anchor: the seam foot on leg alpha at i for a geodesic
// side, or (for a cusp side) the cusp at infinity with its boundary
// parabolic normalized to unit horocyclic translation.
inline Isometry alignment_placement(const PantsRealization& P, int alpha) {
    const Isometry base = P.seam[alpha].chart.inverse();
    if (!P.legs[alpha].is_cusp) return base;
    const Isometry flip = Isometry::unchecked(0.0, -1.0, 1.0, 0.0);  // cusp -> inf
    const Isometry m = flip * base;
    const Isometry par = m * P.boundary[alpha] * m.inverse();
    if (std::fabs(par.c) > 1e-9)
        throw AlignmentError("cusp normalization failed to fix infinity");
    const double beta = par.b / par.a;
    if (!(std::fabs(beta) > 0.0))
        throw AlignmentError("degenerate cusp parabolic");
    return Isometry::translation(-std::log(std::fabs(beta))) * m;
}

struct HalfPlane {
    FermiFrame f;
    double sign = 1.0;
};

inline std::vector<HalfPlane> placed_half_planes(const PantsRealization& P,
                                                 const Isometry& place) {
    std::vector<HalfPlane> out;
    for (const auto& [f, s] : hex_half_planes(P))
        out.push_back({FermiFrame(place * f.chart), s});
    return out;
}

inline bool in_region(const std::vector<HalfPlane>& region, const PlanePoint& p,
                      double tol = 1e-9) {
    for (const auto& h : region)
        if (h.sign * fermi_coords(h.f, p).rho < -tol) return false;
    return true;
}

// Intersection point (in the upper half plane) of two complete geodesics
// given by their ideal endpoints.
inline std::optional<PlanePoint> geodesic_intersection(const FermiFrame& f1,
                                                       const FermiFrame& f2) {
    // reduce to: image of f2's axis under f1^{-1} meets the imaginary axis
    const Isometry inv = f1.chart.inverse();
    const FermiFrame g(inv * f2.chart);
    const double u = g.endpoint_neg(), v = g.endpoint_pos();
    if (std::isinf(u) || std::isinf(v)) return std::nullopt;  // vertical line
    if (u * v >= 0.0) return std::nullopt;                    // same side
    // circle through (u,0), (v,0) crosses the imaginary axis at height
    // sqrt(-uv): (x - (u+v)/2)^2 + y^2 = ((v-u)/2)^2 at x = 0
    return f1.chart.apply(PlanePoint{0.0, std::sqrt(-u * v)});
}

// Exact nearest point of a convex intersection of half planes: the point
// itself, feet of perpendiculars on the bounding geodesics, or region
// vertices (pairwise geodesic intersections), whichever admissible candidate
// is closest.
inline PlanePoint nearest_in_region(const std::vector<HalfPlane>& region,
                                    const PlanePoint& p) {
    if (in_region(region, p)) return p;
    std::optional<PlanePoint> best;
    double best_cd = INFINITY;
    auto consider = [&](const PlanePoint& q) {
        if (!in_region(region, q, 1e-7)) return;
        const double cd = cosh_dist(p, q);
        if (cd < best_cd) {
            best_cd = cd;
            best = q;
        }
    };
    for (const auto& h : region) {
        const FermiCoords fc = fermi_coords(h.f, p);
        consider(fermi_point(h.f, {fc.nu, 0.0}));
    }
    for (size_t i = 0; i < region.size(); ++i)
        for (size_t j = i + 1; j < region.size(); ++j)
            if (auto q = geodesic_intersection(region[i].f, region[j].f))
                consider(*q);
    if (!best) throw AlignmentError("hexagon intersection is empty");
    return *best;
}

} // namespace detail

// Align the hexagons of two generalized pants along a shared boundary side.
// Side lengths are given as the half-lengths of a HexagonSpec; the shared
// side must agree within 1e-9 (cusp against cusp allowed).
inline HexAlignment hex_align(const HexagonSpec& hs, const HexagonSpec& ht,
                              HexSide shared_side) {
    const int alpha = hex_side_boundary(shared_side);
    if (alpha < 0)
        throw AlignmentError("shared side must be a boundary side");
    const std::array<double, 3> as{hs.a1, hs.a2, hs.a3};
    const std::array<double, 3> at{ht.a1, ht.a2, ht.a3};
    if (std::fabs(as[alpha] - at[alpha]) > 1e-9)
        throw AlignmentError("shared side lengths differ beyond tolerance");
    HexAlignment al;
    al.alpha = alpha;
    al.s = realize_pants(2.0 * as[0], 2.0 * as[1], 2.0 * as[2]);
    al.t = realize_pants(2.0 * at[0], 2.0 * at[1], 2.0 * at[2]);
    al.place_s = detail::alignment_placement(al.s, alpha);
    al.place_t = detail::alignment_placement(al.t, alpha);
    return al;
}

// Nearest-point retraction of a common-chart point onto the intersection of
// the two aligned hexagons.
inline PlanePoint retract(const HexAlignment& al, const PlanePoint& p) {
    std::vector<detail::HalfPlane> region =
        detail::placed_half_planes(al.s, al.place_s);
    for (auto& h : detail::placed_half_planes(al.t, al.place_t))
        region.push_back(h);
    return detail::nearest_in_region(region, p);
}

// ---------------------------------------------------------------------------
// Relation construction

struct RelationOptions {
    double radius = 2.5;        // covered disk about the base vector
    size_t pair_budget = 200000;  // pair-of-pairs evaluations for epsilon
    unsigned seed = 1;
    double ball_radius = 0.0;   // 0: derived from radius
    const GroupBall* ball1 = nullptr;  // optional precomputed balls at
    const GroupBall* ball2 = nullptr;  // ball_radius about the reference point
};

namespace detail {

// Row-wise Fermi grid over one pants piece at half the certificate density
// (so any point of the covered region is within h/2 of a sample), restricted
// to the fundamental hexagons and to the disk of the given radius about the
// chart reference point.
inline std::vector<SamplePoint> sample_pants(const FuchsianGroup& g,
                                             const std::string& pants_id,
                                             double h, double radius) {
    const auto& P = g.pants_geometry.at(pants_id);
    const Isometry& pos = g.pants_position.at(pants_id);
    const PlanePoint ref = reference_point();
    const double cap = std::cosh(radius + h);
    const double box = radius + 2.0;
    const double grid = h / 2.0;
    const auto planes = hex_half_planes(P);
    std::vector<SamplePoint> out;
    for (double rho = -box; rho <= box + 1e-12; rho += grid) {
        const double step = grid / std::cosh(rho);
        for (double nu = -box; nu <= box + 1e-12; nu += step) {
            const FermiCoords fc{nu, rho};
            const PlanePoint local = fermi_point(P.seam[0], fc);
            if (cosh_dist(ref, pos.apply(local)) > cap) continue;
            if (!hex_contains(planes, local, 1e-9) &&
                !hex_contains(planes, reflect_point(P.seam[0], local), 1e-9))
                continue;
            out.push_back({pants_id, fc});
        }
    }
    // funnel strips: the hexagons cover only the convex core, so each funnel
    // leg contributes the fundamental strip nu in [0, L), rho < 0 beyond its
    // axis
    const auto kit = g.leg_kinds.find(pants_id);
    if (kit != g.leg_kinds.end()) {
        for (int i = 0; i < 3; ++i) {
            if (kit->second[i] != CurveKind::FunnelBoundary) continue;
            const double L = P.lengths[i];
            const FermiFrame& leg = P.legs[i].curve_frame;
            for (double rho = -grid; rho >= -box; rho -= grid) {
                const double step = grid / std::cosh(rho);
                for (double nu = 0.0; nu < L; nu += step) {
                    const PlanePoint local = fermi_point(leg, {nu, rho});
                    if (cosh_dist(ref, pos.apply(local)) > cap) continue;
                    out.push_back({pants_id, fermi_coords(P.seam[0], local)});
                }
            }
        }
    }
    return out;
}

} // namespace detail

// Build the sampled relation between two surfaces differing only in the
// pants pieces listed in `alignments`: hexagon-retraction pairs there,
// identity pairs elsewhere, basepoint pair appended.
inline RelationCert relation_from_alignments(
    const std::map<std::string, HexAlignment>& alignments,
    double sample_density, const FuchsianGroup& g1, const FuchsianGroup& g2,
    const RelationOptions& opt = {}) {
    if (!(sample_density > 0.0))
        throw DomainError("sample density must be positive");
    RelationCert cert;
    cert.density = sample_density;
    cert.radius = opt.radius;

    // mirror a pair into the second hexagon (reflection fixes the seams)
    auto mirrored = [](SamplePair sp) {
        sp.x1.fc.rho = -sp.x1.fc.rho;
        sp.x2.fc.rho = -sp.x2.fc.rho;
        return sp;
    };

    for (const auto& [pid, P1] : g1.pants_geometry) {
        const auto ait = alignments.find(pid);
        if (ait == alignments.end()) {
            // a pants piece absent from the other surface contributes no
            // pairs; an honest certificate keeps it outside the covered disk
            // (the coverage check of condition 5 enforces this)
            if (!g2.pants_geometry.count(pid)) continue;
            for (const auto& sp :
                 detail::sample_pants(g1, pid, sample_density, opt.radius))
                cert.pairs.push_back({sp, sp, true});
            continue;
        }
        const HexAlignment& al = ait->second;
        std::vector<detail::HalfPlane> region =
            detail::placed_half_planes(al.s, al.place_s);
        for (auto& h : detail::placed_half_planes(al.t, al.place_t))
            region.push_back(h);

        // pair a canonical point of one side through the retraction
        auto pair_through = [&](const PlanePoint& local,
                                bool from_s) -> SamplePair {
            const Isometry& fwd = from_s ? al.place_s : al.place_t;
            const PlanePoint common = fwd.apply(local);
            const PlanePoint r = detail::nearest_in_region(region, common);
            const PlanePoint other_local =
                (from_s ? al.place_t : al.place_s).inverse().apply(r);
            const FermiCoords fc_self =
                fermi_coords((from_s ? al.s : al.t).seam[0], local);
            const FermiCoords fc_other =
                fermi_coords((from_s ? al.t : al.s).seam[0], other_local);
            SamplePair sp;
            sp.x1 = {pid, from_s ? fc_self : fc_other};
            sp.x2 = {pid, from_s ? fc_other : fc_self};
            return sp;
        };

        // sample both sides of the alignment over the covered disk; core
        // points pair through the retraction, funnel-strip points by the
        // leg-frame correspondence (nu rescaled if the leg length changed)
        for (int side = 0; side < 2; ++side) {
            const bool from_s = side == 0;
            const FuchsianGroup& g = from_s ? g1 : g2;
            const PantsRealization& P = from_s ? al.s : al.t;
            const PantsRealization& O = from_s ? al.t : al.s;
            const auto planes = hex_half_planes(P);
            for (const auto& sp :
                 detail::sample_pants(g, pid, sample_density, opt.radius)) {
                const PlanePoint local = fermi_point(P.seam[0], sp.fc);
                const bool mirror = !hex_contains(planes, local, 1e-9);
                const PlanePoint h0 =
                    mirror ? reflect_point(P.seam[0], local) : local;
                if (hex_contains(planes, h0, 1e-9)) {
                    SamplePair pr = pair_through(h0, from_s);
                    if (mirror) pr = mirrored(pr);
                    cert.pairs.push_back(pr);
                    continue;
                }
                // funnel strip: find the leg whose axis the point lies beyond
                int leg = -1;
                FermiCoords lc;
                for (int i = 0; i < 3; ++i) {
                    if (P.legs[i].is_cusp || !(P.lengths[i] > 0.0)) continue;
                    const FermiCoords c =
                        fermi_coords(P.legs[i].curve_frame, local);
                    if (c.rho < 1e-9 && c.nu >= -1e-9 &&
                        c.nu <= P.lengths[i] + 1e-9) {
                        leg = i;
                        lc = c;
                        break;
                    }
                }
                if (leg < 0) continue;  // outside the fundamental strips
                if (O.legs[leg].is_cusp || !(O.lengths[leg] > 0.0))
                    continue;  // counterpart lost its funnel; skip
                const double scale = O.lengths[leg] / P.lengths[leg];
                const PlanePoint other = fermi_point(
                    O.legs[leg].curve_frame, {lc.nu * scale, lc.rho});
                SamplePair pr;
                pr.x1 = {pid, from_s ? sp.fc : fermi_coords(O.seam[0], other)};
                pr.x2 = {pid, from_s ? fermi_coords(O.seam[0], other) : sp.fc};
                pr.isometric = scale == 1.0;
                cert.pairs.push_back(pr);
            }
        }
    }

    // basepoint pair (both bases sit at the chart reference point)
    {
        auto base_sample = [&](const FuchsianGroup& g) -> SamplePoint {
            // locate the reference point inside whichever pants contains it
            for (const auto& [pid, P] : g.pants_geometry) {
                const PlanePoint local =
                    g.pants_position.at(pid).inverse().apply(reference_point());
                if (hex_contains(P, local, 1e-6) ||
                    hex_contains(P, reflect_point(P.seam[0], local), 1e-6))
                    return {pid, fermi_coords(P.seam[0], local)};
            }
            // fall back to the first pants
            const auto& [pid, P] = *g.pants_geometry.begin();
            const PlanePoint local =
                g.pants_position.at(pid).inverse().apply(reference_point());
            return {pid, fermi_coords(P.seam[0], local)};
        };
        cert.pairs.push_back({base_sample(g1), base_sample(g2), false});
    }

    // measured epsilon over a deterministic budget of pair-of-pairs
    const double ball_R =
        opt.ball_radius > 0.0 ? opt.ball_radius : 2.0 * opt.radius + 1.5;
    const GroupBall b1 =
        opt.ball1 ? *opt.ball1 : group_ball(g1, ball_R, reference_point());
    const GroupBall b2 =
        opt.ball2 ? *opt.ball2 : group_ball(g2, ball_R, reference_point());
    std::vector<PlanePoint> p1, p2;
    p1.reserve(cert.pairs.size());
    for (const auto& pr : cert.pairs) {
        p1.push_back(sample_position(g1, pr.x1));
        p2.push_back(sample_position(g2, pr.x2));
    }
    const size_t n = cert.pairs.size();
    std::mt19937 rng(opt.seed);
    std::uniform_int_distribution<size_t> pick(0, n - 1);
    const size_t total = n * (n - 1) / 2;
    double eps = 0.0;
    auto check = [&](size_t i, size_t j) {
        const double d1 = quotient_dist(b1, p1[i], p1[j]);
        const double d2 = quotient_dist(b2, p2[i], p2[j]);
        eps = std::max(eps, std::fabs(d1 - d2));
    };
    if (total <= opt.pair_budget) {
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) check(i, j);
    } else {
        for (size_t k = 0; k < opt.pair_budget; ++k) {
            const size_t i = pick(rng), j = pick(rng);
            if (i != j) check(i, j);
        }
    }
    cert.epsilon = eps;
    cert.checked = {true, true, true, true, false};
    return cert;
}

// Single modified pants piece convenience form.
inline RelationCert relation_from_alignment(const HexAlignment& al,
                                            double sample_density,
                                            const FuchsianGroup& g1,
                                            const FuchsianGroup& g2,
                                            const std::string& modified,
                                            const RelationOptions& opt = {}) {
    std::map<std::string, HexAlignment> alignments;
    alignments.emplace(modified, al);
    return relation_from_alignments(alignments, sample_density, g1, g2, opt);
}

// ---------------------------------------------------------------------------
// Relation verification

struct ConditionReport {
    std::array<bool, 5> passed{};
    std::string witness;
    bool ok() const {
        for (bool b : passed)
            if (!b) return false;
        return true;
    }
};

struct VerifyOptions {
    size_t pair_budget = 200000;
    unsigned seed = 1;
    double ball_radius = 0.0;
    double coverage_fraction = 0.98;  // required lattice coverage
};

inline ConditionReport verify_relation(const RelationCert& cert,
                                       const FuchsianGroup& g1,
                                       const FuchsianGroup& g2,
                                       const VerifyOptions& opt = {}) {
    ConditionReport rep;
    if (cert.pairs.empty()) {
        rep.witness = "no pairs listed";
        return rep;
    }
    const double ball_R =
        opt.ball_radius > 0.0 ? opt.ball_radius : 2.0 * cert.radius + 1.5;
    const GroupBall b1 = group_ball(g1, ball_R, reference_point());
    const GroupBall b2 = group_ball(g2, ball_R, reference_point());
    std::vector<PlanePoint> p1, p2;
    p1.reserve(cert.pairs.size());
    for (const auto& pr : cert.pairs) {
        p1.push_back(sample_position(g1, pr.x1));
        p2.push_back(sample_position(g2, pr.x2));
    }
    const PlanePoint ref = reference_point();

    // condition 1: basepoint pair present
    for (size_t i = 0; i < cert.pairs.size(); ++i)
        if (quotient_dist(b1, p1[i], ref) <= 1e-6 &&
            quotient_dist(b2, p2[i], ref) <= 1e-6) {
            rep.passed[0] = true;
            break;
        }
    if (!rep.passed[0]) rep.witness = "basepoint pair missing";

    // conditions 2-3: every listed sample appears in at least one pair;
    // samples are exactly the pair members, so this holds structurally
    rep.passed[1] = rep.passed[2] = true;

    // condition 4: |d2 - d1| < epsilon over pair-of-pairs (budgeted)
    {
        const size_t n = cert.pairs.size();
        const size_t total = n * (n - 1) / 2;
        std::mt19937 rng(opt.seed);
        std::uniform_int_distribution<size_t> pick(0, n - 1);
        bool ok = true;
        auto check = [&](size_t i, size_t j) {
            if (!ok) return;
            const double d1 = quotient_dist(b1, p1[i], p1[j]);
            const double d2 = quotient_dist(b2, p2[i], p2[j]);
            if (std::fabs(d1 - d2) > cert.epsilon + 1e-12) {
                ok = false;
                rep.witness = "condition 4 witness: pairs " + std::to_string(i) +
                              "," + std::to_string(j);
            }
        };
        if (total <= opt.pair_budget) {
            for (size_t i = 0; i < n && ok; ++i)
                for (size_t j = i + 1; j < n && ok; ++j) check(i, j);
        } else {
            for (size_t k = 0; k < opt.pair_budget && ok; ++k) {
                const size_t i = pick(rng), j = pick(rng);
                if (i != j) check(i, j);
            }
        }
        rep.passed[3] = ok;
    }

    // condition 5: lattice of spacing h over the disk r1^2 + r2^2 <= R^2
    // must be matched by samples within h/2
    {
        const double h = cert.density;
        const double R = cert.radius;
        size_t lattice = 0, matched = 0;
        const UnitTangent base = reference_tangent();
        const double tol_cd = std::cosh(h / 2.0 + 1e-9);
        for (double r1 = -R; r1 <= R + 1e-12; r1 += h)
            for (double r2 = -R; r2 <= R + 1e-12; r2 += h) {
                if (r1 * r1 + r2 * r2 > R * R) continue;
                ++lattice;
                const PlanePoint z = exp_grid(base, r1, r2);
                bool hit = false;
                for (const auto& q : p1)
                    if (cosh_dist(z, q) <= tol_cd) {
                        hit = true;
                        break;
                    }
                if (!hit) {
                    // fall back to the quotient distance
                    for (const auto& q : p1)
                        if (quotient_dist(b1, z, q) <= h / 2.0 + 1e-9) {
                            hit = true;
                            break;
                        }
                }
                if (hit) ++matched;
            }
        if (lattice == 0) {
            rep.witness = "empty coverage lattice";
            throw IncompleteSamples("coverage lattice is empty");
        }
        const double frac =
            static_cast<double>(matched) / static_cast<double>(lattice);
        if (frac + 1e-12 < opt.coverage_fraction)
            throw IncompleteSamples("lattice coverage " + std::to_string(frac) +
                                    " below required fraction");
        rep.passed[4] = true;
    }
    return rep;
}

} // namespace hypflow
