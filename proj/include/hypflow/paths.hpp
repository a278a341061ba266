#pragma once

// Discretized paths in the space of vectored surfaces: Fenchel-Nielsen
// deformation, pinching with its cusped limit surgery, base-vector motion,
// funnel escape, a planner producing a path from any spec to the hyperbolic
// plane, and numeric continuity/convergence certification of a planned path.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hypflow/errors.hpp"
#include "hypflow/holonomy.hpp"
#include "hypflow/hyp2.hpp"
#include "hypflow/relations.hpp"
#include "hypflow/surface.hpp"
#include "hypflow/trig.hpp"

namespace hypflow {

enum class StageKind { FnDeform, Pinch, MoveVector, FunnelEscape };

struct Stage {
    StageKind kind = StageKind::FnDeform;
    SurfaceSpec start;
    std::vector<std::string> curves;  // deformed / pinched curve set Q
    FNPoint target;                   // fn_deform target on Q
    std::vector<double> schedule;     // pinch length profile / escape distances
    bool reversed = false;            // pinch traversed from the limit outward
    std::vector<VectorLocation> tangents;  // move_vector nodes
    int steps = 8;
};

struct PathSchedule {
    std::vector<Stage> stages;
};

// ---------------------------------------------------------------------------
// Elementary paths

// Log-linear interpolation of (log length, length x twist) from the spec's
// coordinates to the target on Q; all other curves and the base location are
// held fixed.
inline std::vector<SurfaceSpec> fn_deform(const SurfaceSpec& spec,
                                          const std::vector<std::string>& Q,
                                          const FNPoint& target, int steps) {
    if (steps < 1) throw DomainError("fn_deform requires steps >= 1");
    struct Coord {
        std::string id;
        double l0, t0, l1, t1;
    };
    std::vector<Coord> coords;
    for (const auto& id : Q) {
        const CurveSpec* c = spec.find_curve(id);
        if (!c || c->kind != CurveKind::Interior)
            throw DomainError("fn_deform requires interior curve " + id);
        const auto it = target.coords.find(id);
        if (it == target.coords.end())
            throw DomainError("fn_deform target missing curve " + id);
        if (!(it->second.first > 0.0))
            throw DomainError("fn_deform target length must be positive");
        coords.push_back({id, c->length, c->twist.value_or(0.0),
                          it->second.first, it->second.second});
    }
    std::vector<SurfaceSpec> out;
    out.reserve(steps + 1);
    for (int k = 0; k <= steps; ++k) {
        const double s = static_cast<double>(k) / steps;
        SurfaceSpec cur = spec;
        for (const auto& c : coords) {
            const double l =
                std::exp((1.0 - s) * std::log(c.l0) + s * std::log(c.l1));
            const double lt = (1.0 - s) * c.l0 * c.t0 + s * c.l1 * c.t1;
            CurveSpec* cs = cur.find_curve(c.id);
            cs->length = l;
            cs->twist = lt / l;
        }
        out.push_back(cur);
    }
    return out;
}

namespace detail {

// Piecewise-linear resampling of a polyline of values to n samples indexed
// k = 0..n-1 over the node-index parameter.
inline std::vector<double> resample_linear(const std::vector<double>& nodes,
                                           int n) {
    if (nodes.empty()) throw DomainError("empty schedule");
    std::vector<double> out;
    out.reserve(n);
    const double span = static_cast<double>(nodes.size() - 1);
    for (int k = 0; k < n; ++k) {
        const double u = n == 1 ? span : span * k / (n - 1);
        const size_t i = std::min(static_cast<size_t>(u), nodes.size() - 2);
        const double f = u - static_cast<double>(i);
        out.push_back(nodes.size() == 1 ? nodes[0]
                                        : (1.0 - f) * nodes[i] + f * nodes[i + 1]);
    }
    return out;
}

// Connected components of the pants graph after removing the pairings of the
// curves in `cut`; returns the set of pants in the component of `seed`.
inline std::set<std::string> pants_component(const SurfaceSpec& spec,
                                             const std::set<std::string>& cut,
                                             const std::string& seed) {
    std::set<std::string> seen{seed};
    std::vector<std::string> stack{seed};
    while (!stack.empty()) {
        const std::string cur = stack.back();
        stack.pop_back();
        for (const auto& pr : spec.pairing) {
            const PantsPiece* p = spec.find_pants(pr[0].pants);
            if (p && cut.count(p->legs[pr[0].leg])) continue;
            for (int k = 0; k < 2; ++k)
                if (pr[k].pants == cur && !seen.count(pr[1 - k].pants)) {
                    seen.insert(pr[1 - k].pants);
                    stack.push_back(pr[1 - k].pants);
                }
        }
    }
    return seen;
}

// Surviving base anchor for a pinch of the curves in `qs`: a point held at
// fixed position relative to a leg of the base pants that the pinch leaves
// untouched, so the anchored base converges with the degenerating family.
// Preference: boundary side of a positive-length non-pinched leg, offset
// eta/2 into the collar; otherwise the seam joining two non-pinched cusp
// legs. Empty when the base pants keeps no such anchor (or is unaffected).
inline std::optional<VectorLocation> pinch_anchor(
    const SurfaceSpec& spec, const std::set<std::string>& qs) {
    const PantsPiece* bp = spec.find_pants(spec.base.pants_id);
    if (!bp) return std::nullopt;
    bool touched = false;
    for (const auto& l : bp->legs) touched = touched || qs.count(l) > 0;
    if (!touched) return std::nullopt;
    VectorLocation v;
    v.pants_id = bp->id;
    v.hexagon = 0;
    v.angle = kPi / 2.0;
    for (int l = 0; l < 3; ++l) {
        const CurveSpec* c = spec.find_curve(bp->legs[l]);
        if (!c || qs.count(c->id) || c->kind == CurveKind::Cusp) continue;
        v.side = l == 0 ? HexSide::B1 : l == 1 ? HexSide::B2 : HexSide::B3;
        v.fermi = {0.0, collar_eta(c->length).eta / 2.0};
        return v;
    }
    for (int k = 0; k < 3; ++k) {
        if (qs.count(bp->legs[k]) || qs.count(bp->legs[(k + 1) % 3])) continue;
        v.side = k == 0 ? HexSide::S12 : k == 1 ? HexSide::S23 : HexSide::S31;
        v.fermi = {0.25, 0.0};
        return v;
    }
    return std::nullopt;
}

} // namespace detail

inline bool is_nonseparating(const SurfaceSpec& spec, const std::string& id) {
    const CurveSpec* c = spec.find_curve(id);
    if (!c || c->kind != CurveKind::Interior) return false;
    const auto comp =
        detail::pants_component(spec, {id}, spec.pants.front().id);
    return comp.size() == spec.pants.size();
}

// Limit surgery: each curve of Q is replaced by cusp legs on its adjacent
// pants, the component containing the base pants survives, and the base is
// relocated only when its side sat on a pinched leg (to the perpendicular of
// a surviving leg alpha at distance eta/2).
inline SurfaceSpec pinch_limit(const SurfaceSpec& spec,
                               const std::vector<std::string>& Q) {
    const std::set<std::string> qs(Q.begin(), Q.end());
    const std::set<std::string> kept =
        detail::pants_component(spec, qs, spec.base.pants_id);

    SurfaceSpec out;
    out.base = spec.base;

    // rewrite kept pants legs, assigning one cusp id per retained half-edge
    std::map<std::string, int> q_uses;
    std::map<std::string, std::vector<std::string>> q_names;
    for (const auto& p : spec.pants) {
        if (!kept.count(p.id)) continue;
        PantsPiece np = p;
        for (int l = 0; l < 3; ++l) {
            if (!qs.count(p.legs[l])) continue;
            const int n = q_uses[p.legs[l]]++;
            const std::string name =
                n == 0 ? p.legs[l] : p.legs[l] + "_b";
            q_names[p.legs[l]].push_back(name);
            np.legs[l] = name;
        }
        out.pants.push_back(np);
    }

    std::set<std::string> referenced;
    for (const auto& p : out.pants)
        for (const auto& l : p.legs) referenced.insert(l);

    for (const auto& c : spec.curves) {
        if (qs.count(c.id)) {
            const auto it = q_names.find(c.id);
            if (it == q_names.end()) continue;  // only on discarded pants
            for (const auto& name : it->second) {
                CurveSpec nc;
                nc.id = name;
                nc.kind = CurveKind::Cusp;
                nc.length = 0.0;
                out.curves.push_back(nc);
            }
            continue;
        }
        if (referenced.count(c.id)) out.curves.push_back(c);
    }

    for (const auto& pr : spec.pairing) {
        const PantsPiece* p = spec.find_pants(pr[0].pants);
        if (p && qs.count(p->legs[pr[0].leg])) continue;
        if (kept.count(pr[0].pants) && kept.count(pr[1].pants))
            out.pairing.push_back(pr);
    }

    // base relocation when the base side was a pinched boundary side
    const PantsPiece* bp = out.find_pants(spec.base.pants_id);
    if (!bp) throw DomainError("base pants lost by the pinch surgery");
    const int bside = hex_side_boundary(spec.base.side);
    bool on_pinched = false;
    if (bside >= 0) {
        const PantsPiece* orig = spec.find_pants(spec.base.pants_id);
        on_pinched = qs.count(orig->legs[bside]) > 0;
    }
    if (on_pinched) {
        const PantsPiece* orig = spec.find_pants(spec.base.pants_id);
        int alpha = -1;
        for (int l = 0; l < 3; ++l)
            if (!qs.count(orig->legs[l])) {
                alpha = l;
                break;
            }
        if (alpha < 0) {
            out.base = default_base(spec.base.pants_id);
        } else {
            const CurveSpec* ac = out.find_curve(bp->legs[alpha]);
            const double eta =
                ac->length > 0.0 ? collar_eta(ac->length).eta : kCuspEta;
            out.base.pants_id = spec.base.pants_id;
            out.base.hexagon = 0;
            out.base.side = alpha == 0   ? HexSide::B1
                            : alpha == 1 ? HexSide::B2
                                         : HexSide::B3;
            out.base.fermi = {0.0, eta / 2.0};
            out.base.angle = kPi / 2.0;
        }
    }
    return out;
}

// Path of specs following a decreasing length profile on Q down to the last
// positive node (resampled linearly in length to `steps` intervals), plus the
// cusped limit spec. Twist fractions on Q are held fixed, so length x twist
// tends to 0 with the length. The base is relocated once, for the whole path,
// onto the surviving anchor (a frame held fixed relative to a non-pinched
// leg), so the pointed family converges to the pointed limit.
inline std::pair<std::vector<SurfaceSpec>, SurfaceSpec> pinch(
    const SurfaceSpec& spec, const std::vector<std::string>& Q,
    const std::vector<double>& schedule, int steps) {
    if (Q.empty()) throw DomainError("pinch requires a nonempty curve set");
    if (steps < 1) throw DomainError("pinch requires steps >= 1");
    if (schedule.size() < 2 || schedule.back() != 0.0)
        throw DomainError("pinch schedule must end at 0");
    for (size_t i = 1; i < schedule.size(); ++i)
        if (!(schedule[i] < schedule[i - 1]))
            throw DomainError("pinch schedule must be strictly decreasing");

    if (spec.kind == SurfaceKind::FunnelCylinder) {
        if (std::fabs(spec.cylinder_length - schedule.front()) > 1e-9)
            throw DomainError("pinch schedule must start at the spec length");
        std::vector<double> positive(schedule.begin(), schedule.end() - 1);
        std::vector<SurfaceSpec> out;
        for (double l : detail::resample_linear(positive, steps + 1)) {
            SurfaceSpec cur = spec;
            cur.cylinder_length = l;
            out.push_back(cur);
        }
        SurfaceSpec limit = spec;
        limit.kind = SurfaceKind::CuspCylinder;
        limit.cylinder_length = 0.0;
        return {out, limit};
    }
    if (spec.kind != SurfaceKind::PantsGraph)
        throw DomainError("nothing to pinch on this surface");

    for (const auto& id : Q) {
        const CurveSpec* c = spec.find_curve(id);
        if (!c) throw DomainError("pinch references unknown curve " + id);
        if (c->kind == CurveKind::Cusp)
            throw DomainError("curve " + id + " is already a cusp");
        if (std::fabs(c->length - schedule.front()) > 1e-9)
            throw DomainError("pinch schedule must start at the spec length");
    }

    SurfaceSpec start = spec;
    if (const auto anchor =
            detail::pinch_anchor(spec, {Q.begin(), Q.end()}))
        start.base = *anchor;

    std::vector<double> positive(schedule.begin(), schedule.end() - 1);
    std::vector<SurfaceSpec> out;
    for (double l : detail::resample_linear(positive, steps + 1)) {
        SurfaceSpec cur = start;
        for (const auto& id : Q) cur.find_curve(id)->length = l;
        out.push_back(cur);
    }
    return {out, pinch_limit(start, Q)};
}

// Truncation bookkeeping along a pinch path: horocycle length and collar
// depth per step once the pinched length drops below 1/2, plus the squared-
// length slack used when some pinched curve is non-separating.
struct PinchStepRecord {
    double length = 0.0;
    double horocycle = 0.0;
    double depth = 0.0;
    double slack = 0.0;
};

inline std::vector<PinchStepRecord> pinch_records(
    const SurfaceSpec& start, const std::vector<std::string>& Q,
    const std::vector<SurfaceSpec>& specs) {
    bool nonsep = false;
    for (const auto& id : Q) nonsep = nonsep || is_nonseparating(start, id);
    std::vector<PinchStepRecord> out;
    for (const auto& s : specs) {
        double l = 0.0;
        for (const auto& id : Q) {
            const CurveSpec* c = s.find_curve(id);
            if (c) l = std::max(l, c->length);
        }
        PinchStepRecord r;
        r.length = l;
        if (l > 0.0 && l < 0.5) {
            const TruncationSpec t = truncation(l);
            r.horocycle = t.w;
            r.depth = t.delta;
        }
        r.slack = nonsep ? l * l : 0.0;
        out.push_back(r);
    }
    return out;
}

// Path of specs differing only in the base vector.
inline std::vector<SurfaceSpec> move_vector(
    const SurfaceSpec& spec, const std::vector<VectorLocation>& tangent_path) {
    if (tangent_path.empty())
        throw DomainError("move_vector requires a nonempty tangent path");
    std::vector<SurfaceSpec> out;
    out.reserve(tangent_path.size());
    for (const auto& loc : tangent_path) {
        if (spec.kind == SurfaceKind::PantsGraph && !spec.find_pants(loc.pants_id))
            throw LiftError("location references a pants absent from the spec");
        SurfaceSpec cur = spec;
        cur.base = loc;
        out.push_back(cur);
    }
    return out;
}

// Re-express a base location of a pants piece relative to another hexagon
// side frame of the same piece (same realized tangent, new coordinates).
inline VectorLocation reframe_location(const SurfaceSpec& spec,
                                       const VectorLocation& loc,
                                       HexSide side) {
    const PantsPiece* p = spec.find_pants(loc.pants_id);
    if (!p) throw LiftError("location references an unknown pants piece");
    std::array<double, 3> L{};
    for (int i = 0; i < 3; ++i) L[i] = spec.find_curve(p->legs[i])->length;
    const PantsRealization P = realize_pants(L[0], L[1], L[2]);
    const UnitTangent t = realize_location(P, loc);
    const FermiFrame f = hex_side_frame(P, side);
    const UnitTangent local = f.chart.inverse().apply(t);
    VectorLocation out;
    out.pants_id = loc.pants_id;
    out.hexagon = 0;
    out.side = side;
    out.fermi = fermi_coords(FermiFrame(), local.base);
    out.angle = local.angle;
    return out;
}

namespace detail {

// First funnel end of a spec: pants id and leg index, if any.
inline std::optional<std::pair<std::string, int>> escape_leg(
    const SurfaceSpec& spec) {
    for (const auto& p : spec.pants)
        for (int l = 0; l < 3; ++l) {
            const CurveSpec* c = spec.find_curve(p.legs[l]);
            if (c && c->kind == CurveKind::FunnelBoundary)
                return std::make_pair(p.id, l);
        }
    return std::nullopt;
}

inline HexSide boundary_side(int leg) {
    return leg == 0 ? HexSide::B1 : leg == 1 ? HexSide::B2 : HexSide::B3;
}

inline VectorLocation escape_location(const SurfaceSpec& spec, double d) {
    VectorLocation loc;
    loc.hexagon = 0;
    loc.angle = kPi / 2.0;
    switch (spec.kind) {
        case SurfaceKind::CuspCylinder:
            loc.fermi = {-d, 0.0};  // down the flaring end of the vertical
            return loc;
        case SurfaceKind::FunnelCylinder:
            loc.fermi = {0.0, -d};  // out either funnel of the core geodesic
            return loc;
        default:
            break;
    }
    const auto leg = escape_leg(spec);
    if (!leg) throw DomainError("no funnel end to escape through");
    loc.pants_id = leg->first;
    loc.side = boundary_side(leg->second);
    loc.fermi = {0.0, -d};
    return loc;
}

} // namespace detail

// Base vector moved out a funnel end (or down a cylinder end) along the
// perpendicular at the listed distances; the unmoved spec leads the path.
inline std::vector<SurfaceSpec> funnel_escape(
    const SurfaceSpec& spec, const std::vector<double>& distances) {
    if (spec.kind == SurfaceKind::Plane)
        throw DomainError("nothing to escape; the surface is already a plane");
    if (distances.empty())
        throw DomainError("funnel_escape requires a distance schedule");
    for (size_t i = 0; i < distances.size(); ++i) {
        if (!(distances[i] > 0.0))
            throw DomainError("escape distances must be positive");
        if (i > 0 && !(distances[i] > distances[i - 1]))
            throw DomainError("escape distances must be strictly increasing");
    }
    std::vector<SurfaceSpec> out{spec};
    for (double d : distances) {
        SurfaceSpec cur = spec;
        cur.base = detail::escape_location(spec, d);
        out.push_back(cur);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Stage realization

namespace detail {

// Piecewise-linear interpolation of locations sharing one coordinate frame.
inline std::vector<VectorLocation> lerp_locations(
    const std::vector<VectorLocation>& nodes, int steps) {
    if (nodes.empty()) throw DomainError("empty tangent path");
    for (const auto& n : nodes)
        if (n.pants_id != nodes.front().pants_id ||
            n.hexagon != nodes.front().hexagon || n.side != nodes.front().side) {
            if (static_cast<size_t>(steps) + 1 == nodes.size()) return nodes;
            throw DomainError(
                "tangent path nodes must share a frame to be refined");
        }
    std::vector<double> nu, rho, ang;
    for (const auto& n : nodes) {
        nu.push_back(n.fermi.nu);
        rho.push_back(n.fermi.rho);
        ang.push_back(n.angle);
    }
    const auto rnu = resample_linear(nu, steps + 1);
    const auto rrho = resample_linear(rho, steps + 1);
    const auto rang = resample_linear(ang, steps + 1);
    std::vector<VectorLocation> out;
    for (int k = 0; k <= steps; ++k) {
        VectorLocation loc = nodes.front();
        loc.fermi = {rnu[k], rrho[k]};
        loc.angle = rang[k];
        out.push_back(loc);
    }
    return out;
}

// The full-length spec a reversed pinch stage grows toward.
inline SurfaceSpec unpinched_start(const Stage& st) {
    SurfaceSpec full = st.start;
    for (const auto& id : st.curves) {
        CurveSpec* c = full.find_curve(id);
        if (!c) throw DomainError("stage references unknown curve " + id);
        c->kind = CurveKind::FunnelBoundary;
        c->length = st.schedule.front();
        c->twist.reset();
    }
    return full;
}

} // namespace detail

// Spec path of one stage at the given step count. Pinch stages include the
// limit spec as their final (or, reversed, initial) entry.
inline std::vector<SurfaceSpec> realize_stage(const Stage& st, int steps) {
    switch (st.kind) {
        case StageKind::FnDeform:
            return fn_deform(st.start, st.curves, st.target, steps);
        case StageKind::Pinch: {
            if (!st.reversed) {
                auto pr = pinch(st.start, st.curves, st.schedule, steps);
                pr.first.push_back(pr.second);
                return pr.first;
            }
            auto pr = pinch(detail::unpinched_start(st), st.curves, st.schedule,
                            steps);
            std::vector<SurfaceSpec> out;
            out.push_back(pr.second);
            out.insert(out.end(), pr.first.rbegin(), pr.first.rend());
            return out;
        }
        case StageKind::MoveVector:
            return move_vector(st.start,
                               detail::lerp_locations(st.tangents, steps));
        case StageKind::FunnelEscape: {
            // resample from a zero origin so refinement subdivides the first
            // move instead of keeping the coarse schedule's first distance
            std::vector<double> nodes{0.0};
            nodes.insert(nodes.end(), st.schedule.begin(), st.schedule.end());
            auto dists = detail::resample_linear(nodes, steps + 1);
            dists.erase(dists.begin());
            return funnel_escape(st.start, dists);
        }
    }
    throw DomainError("unknown stage kind");
}

inline std::vector<SurfaceSpec> realize_stage(const Stage& st) {
    return realize_stage(st, st.steps);
}

// ---------------------------------------------------------------------------
// Planner

namespace detail {

inline double escape_target_distance(double funnel_length, double inj_goal) {
    const double c = std::sinh(inj_goal) / std::sinh(funnel_length / 2.0);
    return c > 1.0 ? std::acosh(c) : 1.0;
}

inline std::vector<double> escape_distances(double d_end, int n) {
    std::vector<double> out;
    for (int k = 1; k <= n; ++k) out.push_back(d_end * k / n);
    return out;
}

// Linear length profile from l0 down to lmin, then the limit value 0. Step
// distortion scales with the length decrement, so uniform decrements keep the
// per-step relation epsilon uniform along the stage.
inline std::vector<double> pinch_profile(double l0, double lmin) {
    std::vector<double> out;
    const int nodes = 24;
    for (int k = 0; k <= nodes; ++k)
        out.push_back(l0 + (lmin - l0) * static_cast<double>(k) / nodes);
    out.push_back(0.0);
    return out;
}

// Equality of base locations up to numeric noise.
inline bool same_location(const VectorLocation& a, const VectorLocation& b) {
    return a.pants_id == b.pants_id && a.hexagon == b.hexagon &&
           a.side == b.side && std::fabs(a.fermi.nu - b.fermi.nu) < 1e-12 &&
           std::fabs(a.fermi.rho - b.fermi.rho) < 1e-12 &&
           std::fabs(a.angle - b.angle) < 1e-12;
}

// Walk the base to `goal` through a short MoveVector stage (skipped when the
// base is already there), keeping consecutive stage boundaries continuous.
inline void append_base_move(PathSchedule& plan, SurfaceSpec& cur,
                             const VectorLocation& goal) {
    if (same_location(cur.base, goal)) {
        cur.base = goal;
        return;
    }
    Stage st;
    st.kind = StageKind::MoveVector;
    st.start = cur;
    st.tangents = {reframe_location(cur, cur.base, goal.side), goal};
    st.steps = 8;
    plan.stages.push_back(std::move(st));
    cur.base = goal;
}

// Sequential pinch stages, one interior curve at a time, ending at the cusped
// component of the base pants. Each stage is preceded by a base walk onto the
// anchor that survives its pinch.
inline SurfaceSpec append_pinch_stages(PathSchedule& plan, SurfaceSpec cur,
                                       double lmin) {
    for (;;) {
        std::string q;
        for (const auto& c : cur.curves)
            if (c.kind == CurveKind::Interior) {
                q = c.id;
                break;
            }
        if (q.empty()) return cur;
        if (const auto anchor = pinch_anchor(cur, {q}))
            append_base_move(plan, cur, *anchor);
        Stage st;
        st.kind = StageKind::Pinch;
        st.start = cur;
        st.curves = {q};
        const double l0 = cur.find_curve(q)->length;
        st.schedule = pinch_profile(l0, std::min(lmin, l0 / 2.0));
        st.steps = 32;
        cur = pinch(cur, st.curves, st.schedule, st.steps).second;
        plan.stages.push_back(std::move(st));
    }
}

} // namespace detail

// Stage plan carrying the spec to the hyperbolic plane: pinch all interior
// curves down to the cusped component of the base pants, regrow its cusps
// into unit-length funnels, move the base onto the escape funnel, and run out
// the funnel until the injectivity radius clears the goal.
inline PathSchedule plan_to_plane(const SurfaceSpec& spec) {
    constexpr double kInjGoal = 11.0;
    constexpr int kEscapeSteps = 15;
    PathSchedule plan;
    if (spec.kind == SurfaceKind::Plane) return plan;
    if (spec.kind == SurfaceKind::CuspCylinder ||
        spec.kind == SurfaceKind::FunnelCylinder) {
        const double d_end =
            spec.kind == SurfaceKind::CuspCylinder
                ? std::log(2.0 * std::sinh(kInjGoal))
                : detail::escape_target_distance(spec.cylinder_length, kInjGoal);
        Stage st;
        st.kind = StageKind::FunnelEscape;
        st.start = spec;
        st.schedule = detail::escape_distances(d_end, kEscapeSteps);
        st.steps = kEscapeSteps;
        plan.stages.push_back(std::move(st));
        return plan;
    }

    SurfaceSpec cur = detail::append_pinch_stages(plan, spec, 1e-2);

    // regrow each cusp leg of the remaining single pants into a unit funnel
    for (const auto& p : cur.pants) {
        for (int l = 0; l < 3; ++l) {
            const std::string id = p.legs[l];
            if (cur.find_curve(id)->kind != CurveKind::Cusp) continue;
            SurfaceSpec full = cur;
            {
                CurveSpec* c = full.find_curve(id);
                c->kind = CurveKind::FunnelBoundary;
                c->length = 1.0;
                c->twist.reset();
            }
            if (const auto anchor = detail::pinch_anchor(full, {id}))
                detail::append_base_move(plan, cur, *anchor);
            Stage st;
            st.kind = StageKind::Pinch;
            st.reversed = true;
            st.start = cur;
            st.curves = {id};
            st.schedule = detail::pinch_profile(1.0, 1e-2);
            st.steps = 32;
            plan.stages.push_back(st);
            cur = full;
            cur.base = plan.stages.back().start.base;
        }
    }

    const auto leg = detail::escape_leg(cur);
    if (!leg) throw DomainError("plan reached a spec with no funnel end");
    const HexSide side = detail::boundary_side(leg->second);

    // walk the base onto the escape funnel's boundary frame
    {
        Stage st;
        st.kind = StageKind::MoveVector;
        st.start = cur;
        VectorLocation goal;
        goal.pants_id = leg->first;
        goal.hexagon = 0;
        goal.side = side;
        goal.fermi = {0.0, 0.0};
        goal.angle = kPi / 2.0;
        st.tangents = {reframe_location(cur, cur.base, side), goal};
        st.steps = 8;
        plan.stages.push_back(st);
        cur.base = goal;
    }

    {
        const double l = cur.find_curve(cur.find_pants(leg->first)
                                            ->legs[leg->second])
                             ->length;
        Stage st;
        st.kind = StageKind::FunnelEscape;
        st.start = cur;
        st.schedule = detail::escape_distances(
            detail::escape_target_distance(l, kInjGoal), kEscapeSteps);
        st.steps = kEscapeSteps;
        plan.stages.push_back(std::move(st));
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Certification

struct StepRecord {
    int stage = 0;
    double epsilon = 0.0;  // relation epsilon (or the gap when no alignment)
    double gap = 0.0;
    double dilatation_bound = 1.0;
    double inj = 0.0;  // escape steps only
    bool alignment = false;
};

struct TerminalRecord {
    std::string criterion;  // "inj", "gap", or "none"
    double value = 0.0;
};

struct ContinuityCert {
    std::vector<StepRecord> steps;
    std::vector<RelationCert> relations;  // one per alignment-certified step
    TerminalRecord terminal;
    double eps_target = 0.0;
    double R_target = 0.0;
    double radius = 0.0;
    double density = 0.0;
    unsigned seed = 0;
};

struct CertifyOptions {
    double density = 0.1;  // relation sample density
    double radius = 2.0;   // relation covered radius
    unsigned seed = 1;
    size_t pair_budget = 200000;
    int refine_cap = 1 << 14;
    double gap_slack = 1.0;
    // relation-ball enumeration margin; kept modest so deep-pinch steps with
    // slow-growing near-parabolic powers stay enumerable
    BallOptions ball_opt{4.0, 0};
};

namespace detail {

inline std::array<std::pair<CurveKind, double>, 3> leg_data(
    const SurfaceSpec& s, const PantsPiece& p) {
    std::array<std::pair<CurveKind, double>, 3> out;
    for (int i = 0; i < 3; ++i) {
        const CurveSpec* c = s.find_curve(p.legs[i]);
        out[i] = {c->kind, c->length};
    }
    return out;
}

// Alignments for every pants piece whose legs changed between a and b, when
// each such piece keeps at least one unchanged leg to align along.
inline std::optional<std::map<std::string, HexAlignment>> step_alignments(
    const SurfaceSpec& a, const SurfaceSpec& b) {
    std::map<std::string, HexAlignment> out;
    for (const auto& p : a.pants) {
        const PantsPiece* pb = b.find_pants(p.id);
        if (!pb) continue;  // piece dropped by the limit surgery
        const auto da = leg_data(a, p), db = leg_data(b, *pb);
        bool modified = false;
        int alpha = -1;
        for (int i = 0; i < 3; ++i) {
            // a leg changing kind is the limit surgery itself: the two
            // surfaces share no hexagon decomposition to align
            if (da[i].first != db[i].first) return std::nullopt;
            if (std::fabs(da[i].second - db[i].second) > 1e-12)
                modified = true;
            else if (alpha < 0)
                alpha = i;
        }
        if (!modified) continue;
        if (alpha < 0) return std::nullopt;
        HexagonSpec hs, ht;
        hs.a1 = da[0].second / 2.0;
        hs.a2 = da[1].second / 2.0;
        hs.a3 = da[2].second / 2.0;
        ht.a1 = db[0].second / 2.0;
        ht.a2 = db[1].second / 2.0;
        ht.a3 = db[2].second / 2.0;
        out.emplace(p.id, hex_align(hs, ht, boundary_side(alpha)));
    }
    return out;
}

inline double step_dilatation_bound(const Stage& st, const SurfaceSpec& a,
                                    const SurfaceSpec& b) {
    if (st.kind != StageKind::Pinch) return 1.0;
    std::vector<double> lens;
    for (const auto& id : st.curves) {
        const CurveSpec* ca = a.find_curve(id);
        const CurveSpec* cb = b.find_curve(id);
        const double la = ca ? ca->length : 0.0;
        const double lb = cb ? cb->length : 0.0;
        lens.push_back(std::min(la, lb));
    }
    for (double l : lens)
        if (!(l < 0.5)) return 1.0;  // not yet in the surgery regime
    if (st.start.kind == SurfaceKind::FunnelCylinder) {
        const double l = std::min(a.cylinder_length, b.cylinder_length);
        return l < 0.5 ? dilatation_bound({l}) : 1.0;
    }
    return dilatation_bound(lens);
}

// Expected cyclic-subgroup injectivity radius at the escape point, used to
// size the enumeration cap.
inline double expected_escape_inj(const SurfaceSpec& s) {
    const double d = std::fabs(s.base.fermi.rho) + std::fabs(s.base.fermi.nu);
    if (s.kind == SurfaceKind::CuspCylinder)
        return std::asinh(std::exp(d) / 2.0);
    double l = s.cylinder_length;
    if (s.kind == SurfaceKind::PantsGraph) {
        const int leg = hex_side_boundary(s.base.side);
        const PantsPiece* p = s.find_pants(s.base.pants_id);
        l = leg >= 0 && p ? s.find_curve(p->legs[leg])->length : 0.0;
    }
    if (!(l > 0.0)) return 1.0;
    return std::asinh(std::cosh(d) * std::sinh(l / 2.0));
}

} // namespace detail

// Certify every consecutive spec pair of every stage: relation certificates
// plus Chabauty gaps for deformation/pinch steps, gaps alone for base-motion
// steps, injectivity radii along escapes; step counts double until every step
// epsilon meets the target. The terminal record is the final injectivity
// radius (plane-bound schedules) or the gap to the pinch limit.
inline ContinuityCert certify(const PathSchedule& schedule, double eps_target,
                              double R_target,
                              const CertifyOptions& opt = {}) {
    if (!(eps_target > 0.0) || !(R_target > 0.0))
        throw DomainError("certify requires positive targets");
    ContinuityCert cert;
    cert.eps_target = eps_target;
    cert.R_target = R_target;
    cert.radius = opt.radius;
    cert.density = opt.density;
    cert.seed = opt.seed;
    if (schedule.stages.empty()) {
        cert.terminal = {"none", 0.0};
        return cert;
    }

    const double ball_R = 2.0 * opt.radius + 1.5;
    std::optional<FuchsianGroup> prev_group;

    for (size_t si = 0; si < schedule.stages.size(); ++si) {
        const Stage& st = schedule.stages[si];
        int steps = st.steps;
        for (;;) {
            const std::vector<SurfaceSpec> specs = realize_stage(st, steps);
            std::vector<FuchsianGroup> groups;
            groups.reserve(specs.size());
            for (const auto& s : specs) groups.push_back(holonomy_from_spec(s));

            std::vector<StepRecord> records;
            std::vector<RelationCert> rels;
            const bool geometric = st.kind == StageKind::FnDeform ||
                                   st.kind == StageKind::Pinch;
            std::optional<GroupBall> ball_a;
            // gap balls are shared between consecutive steps: the second
            // group's ball this step is the first group's ball next step
            const double wide_R = R_target + opt.gap_slack;
            std::optional<GroupBall> wide_a;
            double worst = 0.0;
            for (size_t i = 0; i + 1 < specs.size(); ++i) {
                StepRecord rec;
                rec.stage = static_cast<int>(si);
                if (!wide_a)
                    wide_a = group_ball(groups[i], wide_R, reference_point(),
                                        opt.ball_opt);
                GroupBall wide_b = group_ball(groups[i + 1], wide_R,
                                              reference_point(), opt.ball_opt);
                rec.gap = chabauty_gap_slack(*wide_a, wide_b, R_target);
                wide_a = std::move(wide_b);
                rec.dilatation_bound =
                    detail::step_dilatation_bound(st, specs[i], specs[i + 1]);
                if (geometric && specs[i].kind == SurfaceKind::PantsGraph) {
                    const auto aligns =
                        detail::step_alignments(specs[i], specs[i + 1]);
                    if (aligns) {
                        RelationOptions ropt;
                        ropt.radius = opt.radius;
                        ropt.pair_budget = opt.pair_budget;
                        ropt.seed = opt.seed;
                        if (!ball_a)
                            ball_a = group_ball(groups[i], ball_R,
                                                reference_point(), opt.ball_opt);
                        GroupBall ball_b = group_ball(
                            groups[i + 1], ball_R, reference_point(),
                            opt.ball_opt);
                        ropt.ball1 = &*ball_a;
                        ropt.ball2 = &ball_b;
                        RelationCert rel = relation_from_alignments(
                            *aligns, opt.density, groups[i], groups[i + 1],
                            ropt);
                        rec.epsilon = rel.epsilon;
                        rec.alignment = true;
                        rels.push_back(std::move(rel));
                        ball_a = std::move(ball_b);
                    } else {
                        rec.epsilon = rec.gap;
                        ball_a.reset();
                    }
                } else {
                    rec.epsilon = rec.gap;
                    if (st.kind == StageKind::FunnelEscape) {
                        const double expected =
                            detail::expected_escape_inj(specs[i + 1]);
                        rec.inj = injectivity_radius(groups[i + 1],
                                                     reference_point(),
                                                     expected + 1.0,
                                                     opt.ball_opt)
                                      .value;
                    }
                }
                worst = std::max(worst, rec.epsilon);
                records.push_back(rec);
            }

            if (worst <= eps_target) {
                // stage boundary: the previous stage's end must realize the
                // same vectored surface as this stage's first spec
                if (prev_group) {
                    StepRecord rec;
                    rec.stage = static_cast<int>(si);
                    rec.gap = chabauty_gap_slack(*prev_group, groups.front(),
                                                 R_target, opt.gap_slack,
                                                 opt.ball_opt);
                    rec.epsilon = rec.gap;
                    if (rec.epsilon > eps_target)
                        throw RefinementExhausted(
                            "stage " + std::to_string(si) +
                            " does not continue the previous stage");
                    cert.steps.push_back(rec);
                }
                for (auto& r : records) cert.steps.push_back(r);
                for (auto& r : rels) cert.relations.push_back(std::move(r));
                prev_group = groups.back();

                if (si + 1 == schedule.stages.size()) {
                    if (st.kind == StageKind::FunnelEscape) {
                        const double expected =
                            detail::expected_escape_inj(specs.back());
                        cert.terminal = {
                            "inj", injectivity_radius(groups.back(),
                                                      reference_point(),
                                                      expected + 2.0,
                                                      opt.ball_opt)
                                       .value};
                        if (cert.terminal.value < R_target)
                            throw RefinementExhausted(
                                "terminal injectivity radius below target");
                    } else if (st.kind == StageKind::Pinch && !st.reversed) {
                        // the realized stage ends at the limit spec; its gap
                        // to the last pinched spec is the convergence record
                        cert.terminal = {"gap", records.back().gap};
                        if (cert.terminal.value > eps_target)
                            throw RefinementExhausted(
                                "terminal gap to the pinch limit above target");
                    } else {
                        cert.terminal = {"none", 0.0};
                    }
                }
                break;
            }
            if (2 * steps > opt.refine_cap)
                throw RefinementExhausted(
                    "stage " + std::to_string(si) + " step epsilon " +
                    std::to_string(worst) + " above target at the step cap");
            // step epsilons scale roughly inverse-linearly with the step
            // count, so jump straight to the predicted refinement level
            int next = 2 * steps;
            while (next < opt.refine_cap &&
                   static_cast<double>(next) * eps_target <
                       static_cast<double>(steps) * worst)
                next *= 2;
            steps = std::min(next, opt.refine_cap);
        }
    }
    return cert;
}

// ---------------------------------------------------------------------------
// Constrained planning

enum class PlanConstraint { SameDiffeoType, FiniteArea, AreaCap };

inline PathSchedule constrained_plan(const SurfaceSpec& spec,
                                     PlanConstraint constraint,
                                     double area_cap = 0.0) {
    PathSchedule plan;
    if (spec.kind != SurfaceKind::PantsGraph) {
        if (constraint == PlanConstraint::SameDiffeoType) return plan;
        throw ConstraintViolation(
            "area constraints require a pants-graph surface");
    }
    switch (constraint) {
        case PlanConstraint::SameDiffeoType: {
            std::vector<std::string> Q;
            FNPoint target;
            for (const auto& c : spec.curves)
                if (c.kind == CurveKind::Interior) {
                    Q.push_back(c.id);
                    target.coords[c.id] = {1.0, 0.0};
                }
            if (Q.empty()) return plan;
            Stage st;
            st.kind = StageKind::FnDeform;
            st.start = spec;
            st.curves = Q;
            st.target = target;
            st.steps = 8;
            plan.stages.push_back(std::move(st));
            return plan;
        }
        case PlanConstraint::FiniteArea:
            if (has_funnel(spec))
                throw ConstraintViolation("funnel ends carry infinite area");
            detail::append_pinch_stages(plan, spec, 1e-2);
            return plan;
        case PlanConstraint::AreaCap:
            if (has_funnel(spec))
                throw ConstraintViolation("funnel ends carry infinite area");
            if (gauss_bonnet_area(spec) > area_cap)
                throw ConstraintViolation("spec area exceeds the cap");
            detail::append_pinch_stages(plan, spec, 1e-2);
            return plan;
    }
    return plan;
}

// Reported Gauss-Bonnet areas along a realized plan, one value per spec.
inline std::vector<double> plan_areas(const PathSchedule& plan) {
    std::vector<double> out;
    for (const auto& st : plan.stages)
        for (const auto& s : realize_stage(st))
            if (s.kind == SurfaceKind::PantsGraph)
                out.push_back(gauss_bonnet_area(s));
    return out;
}

} // namespace hypflow
