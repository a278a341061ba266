#pragma once

// Discrete model of a finite-type vectored hyperbolic surface: pants graph,
// Fenchel-Nielsen coordinates, base-vector location, and the d_FN metric.
//
// Twists are stored as fractions of the curve length (displacement =
// twist * length), left-positive along the curve orientation that keeps the
// pants piece on its left.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hypflow/errors.hpp"
#include "hypflow/hyp2.hpp"

namespace hypflow {

enum class CurveKind { Interior, FunnelBoundary, Cusp };

struct CurveSpec {
    std::string id;
    CurveKind kind = CurveKind::Interior;
    double length = 0.0;
    std::optional<double> twist;  // fraction of length; interior curves only
};

struct PantsPiece {
    std::string id;
    std::array<std::string, 3> legs;  // curve ids, legs 0,1,2
};

struct HalfEdge {
    std::string pants;
    int leg = 0;
    bool operator==(const HalfEdge&) const = default;
    bool operator<(const HalfEdge& o) const {
        return pants != o.pants ? pants < o.pants : leg < o.leg;
    }
};

// The six sides of a pants hexagon: boundary halves B1..B3 alternate with
// seams; S12 joins boundaries 1 and 2 and so on.
enum class HexSide { B1, S12, B2, S23, B3, S31 };

inline int hex_side_boundary(HexSide s) {
    switch (s) {
        case HexSide::B1: return 0;
        case HexSide::B2: return 1;
        case HexSide::B3: return 2;
        default: return -1;
    }
}

// Which pair of legs a seam side joins, or {-1,-1} for boundary sides.
inline std::array<int, 2> hex_side_seam(HexSide s) {
    switch (s) {
        case HexSide::S12: return {0, 1};
        case HexSide::S23: return {1, 2};
        case HexSide::S31: return {2, 0};
        default: return {-1, -1};
    }
}

struct VectorLocation {
    std::string pants_id;
    int hexagon = 0;  // 0 or 1
    HexSide side = HexSide::S12;
    FermiCoords fermi;
    double angle = 0.0;
};

// Abelian and trivial special cases carry no pants graph.
enum class SurfaceKind { PantsGraph, Plane, CuspCylinder, FunnelCylinder };

struct SurfaceSpec {
    SurfaceKind kind = SurfaceKind::PantsGraph;
    std::vector<CurveSpec> curves;
    std::vector<PantsPiece> pants;
    std::vector<std::array<HalfEdge, 2>> pairing;
    VectorLocation base;
    double cylinder_length = 0.0;  // funnel cylinder boundary length

    const CurveSpec* find_curve(const std::string& id) const {
        for (const auto& c : curves)
            if (c.id == id) return &c;
        return nullptr;
    }
    CurveSpec* find_curve(const std::string& id) {
        for (auto& c : curves)
            if (c.id == id) return &c;
        return nullptr;
    }
    const PantsPiece* find_pants(const std::string& id) const {
        for (const auto& p : pants)
            if (p.id == id) return &p;
        return nullptr;
    }
};

struct Violation {
    std::string subject;  // curve or pants id, or "" for global rules
    std::string rule;
};

inline std::vector<Violation> validate(const SurfaceSpec& spec) {
    std::vector<Violation> out;
    if (spec.kind == SurfaceKind::Plane || spec.kind == SurfaceKind::CuspCylinder)
        return out;
    if (spec.kind == SurfaceKind::FunnelCylinder) {
        if (!(spec.cylinder_length > 0.0))
            out.push_back({"", "funnel cylinder length must be positive"});
        return out;
    }

    std::map<std::string, int> leg_count;
    std::map<std::string, const CurveSpec*> by_id;
    for (const auto& c : spec.curves) {
        if (by_id.count(c.id)) out.push_back({c.id, "duplicate curve id"});
        by_id[c.id] = &c;
        switch (c.kind) {
            case CurveKind::Interior:
                if (!(c.length > 0.0))
                    out.push_back({c.id, "interior length must be positive"});
                if (!c.twist)
                    out.push_back({c.id, "interior curve requires a twist"});
                break;
            case CurveKind::Cusp:
                if (c.length != 0.0)
                    out.push_back({c.id, "cusp length must be zero"});
                if (c.twist) out.push_back({c.id, "cusp carries no twist"});
                break;
            case CurveKind::FunnelBoundary:
                if (!(c.length > 0.0))
                    out.push_back({c.id, "funnel boundary length must be positive"});
                if (c.twist) out.push_back({c.id, "funnel boundary carries no twist"});
                break;
        }
    }

    if (spec.pants.empty()) out.push_back({"", "pants graph is empty"});
    std::set<std::string> pants_ids;
    for (const auto& p : spec.pants) {
        if (!pants_ids.insert(p.id).second)
            out.push_back({p.id, "duplicate pants id"});
        for (const auto& leg : p.legs) {
            if (!by_id.count(leg))
                out.push_back({p.id, "leg references unknown curve " + leg});
            else
                leg_count[leg]++;
        }
    }

    for (const auto& [id, curve] : by_id) {
        const int n = leg_count.count(id) ? leg_count.at(id) : 0;
        if (curve->kind == CurveKind::Interior && n != 2)
            out.push_back({id, "interior curve must bound exactly 2 legs"});
        if (curve->kind != CurveKind::Interior && n != 1)
            out.push_back({id, "boundary curve must bound exactly 1 leg"});
    }

    // pairing must be an involution on the interior half-edges
    std::set<HalfEdge> paired;
    for (const auto& pr : spec.pairing) {
        for (const auto& he : pr) {
            if (!spec.find_pants(he.pants) || he.leg < 0 || he.leg > 2) {
                out.push_back({he.pants, "pairing references invalid half-edge"});
                continue;
            }
            if (!paired.insert(he).second)
                out.push_back({he.pants, "half-edge paired twice"});
        }
        const auto* p0 = spec.find_pants(pr[0].pants);
        const auto* p1 = spec.find_pants(pr[1].pants);
        if (p0 && p1 && pr[0].leg >= 0 && pr[0].leg <= 2 && pr[1].leg >= 0 &&
            pr[1].leg <= 2) {
            if (p0->legs[pr[0].leg] != p1->legs[pr[1].leg])
                out.push_back({p0->legs[pr[0].leg],
                               "paired half-edges name different curves"});
        }
    }
    for (const auto& p : spec.pants)
        for (int l = 0; l < 3; ++l) {
            const auto* c = by_id.count(p.legs[l]) ? by_id.at(p.legs[l]) : nullptr;
            if (c && c->kind == CurveKind::Interior && !paired.count({p.id, l}))
                out.push_back({p.id, "interior half-edge missing from pairing"});
        }

    // connectivity over the pairing
    if (!spec.pants.empty()) {
        std::set<std::string> seen;
        std::vector<std::string> stack{spec.pants.front().id};
        seen.insert(stack.back());
        while (!stack.empty()) {
            const std::string cur = stack.back();
            stack.pop_back();
            for (const auto& pr : spec.pairing) {
                for (int k = 0; k < 2; ++k) {
                    if (pr[k].pants == cur && !seen.count(pr[1 - k].pants)) {
                        seen.insert(pr[1 - k].pants);
                        stack.push_back(pr[1 - k].pants);
                    }
                }
            }
        }
        if (seen.size() != pants_ids.size())
            out.push_back({"", "pants graph is not connected"});
    }

    if (!spec.find_pants(spec.base.pants_id))
        out.push_back({spec.base.pants_id, "base vector references unknown pants"});
    if (spec.base.hexagon != 0 && spec.base.hexagon != 1)
        out.push_back({spec.base.pants_id, "base hexagon index must be 0 or 1"});

    return out;
}

// Fenchel-Nielsen point: assignment of (length, twist) pairs over a finite
// curve set.
struct FNPoint {
    std::map<std::string, std::pair<double, double>> coords;  // id -> (len, twist)
};

// d_FN = max over curves of max(|log l1/l2|, |l1 t1 - l2 t2|)
inline double fn_distance(const FNPoint& a, const FNPoint& b) {
    if (a.coords.size() != b.coords.size())
        throw DomainMismatch("fn_distance requires identical curve sets");
    double best = 0.0;
    for (const auto& [id, lt] : a.coords) {
        auto it = b.coords.find(id);
        if (it == b.coords.end())
            throw DomainMismatch("fn_distance requires identical curve sets");
        const auto& [l1, t1] = lt;
        const auto& [l2, t2] = it->second;
        if (!(l1 > 0.0) || !(l2 > 0.0))
            throw DomainError("fn_distance requires positive lengths");
        best = std::max(best, std::fabs(std::log(l1 / l2)));
        best = std::max(best, std::fabs(l1 * t1 - l2 * t2));
    }
    return best;
}

inline FNPoint fn_point_of(const SurfaceSpec& spec,
                           const std::vector<std::string>& curve_ids) {
    FNPoint p;
    for (const auto& id : curve_ids) {
        const auto* c = spec.find_curve(id);
        if (!c) throw DomainError("unknown curve " + id);
        p.coords[id] = {c->length, c->twist.value_or(0.0)};
    }
    return p;
}

// Default base vector: on the S12 seam side of the first pants, half a unit
// off the seam, pointing along it.
inline VectorLocation default_base(const std::string& pants_id) {
    VectorLocation v;
    v.pants_id = pants_id;
    v.hexagon = 0;
    v.side = HexSide::S12;
    v.fermi = {0.25, 0.0};
    v.angle = kPi / 2.0;
    return v;
}

// Single generalized pants: boundary lengths >= 0, zero meaning a cusp.
inline SurfaceSpec one_holed_pants(double l1, double l2, double l3) {
    for (double l : {l1, l2, l3})
        if (l < 0.0) throw DomainError("boundary lengths must be nonnegative");
    SurfaceSpec s;
    const std::array<double, 3> ls{l1, l2, l3};
    for (int i = 0; i < 3; ++i) {
        CurveSpec c;
        c.id = "b" + std::to_string(i + 1);
        c.kind = ls[i] > 0.0 ? CurveKind::FunnelBoundary : CurveKind::Cusp;
        c.length = ls[i];
        s.curves.push_back(c);
    }
    s.pants.push_back({"P0", {"b1", "b2", "b3"}});
    s.base = default_base("P0");
    return s;
}

// The thrice-punctured sphere Y0.
inline SurfaceSpec thrice_punctured() { return one_holed_pants(0.0, 0.0, 0.0); }

// Gauss-Bonnet area 2*pi*|chi| of the convex-core surface; requires no
// funnel legs for a finite total.
inline double gauss_bonnet_area(const SurfaceSpec& spec) {
    if (spec.kind != SurfaceKind::PantsGraph)
        throw DomainError("area is defined for pants-graph surfaces");
    return 2.0 * kPi * static_cast<double>(spec.pants.size());
}

inline bool has_funnel(const SurfaceSpec& spec) {
    if (spec.kind == SurfaceKind::FunnelCylinder) return true;
    for (const auto& c : spec.curves)
        if (c.kind == CurveKind::FunnelBoundary) return true;
    return false;
}

} // namespace hypflow
