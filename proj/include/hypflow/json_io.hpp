#pragma once

// JSON (de)serialization of surface documents and numeric report helpers.
//
// Document schema: top-level keys "curves", "pants", "pairing", "basevector";
// an optional "kind" selects the special surfaces ("plane", "cusp_cylinder",
// "funnel_cylinder" with "cylinder_length") that carry no pants graph.

#include <cstdio>
#include <string>

#include <nlohmann/json.hpp>

#include "hypflow/errors.hpp"
#include "hypflow/surface.hpp"

namespace hypflow {

using json = nlohmann::ordered_json;

// Round to 12 significant digits through the shortest text form, so emitted
// reports are reproducible across platforms.
inline double sig12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

inline std::string curve_kind_name(CurveKind k) {
    switch (k) {
        case CurveKind::Interior: return "interior";
        case CurveKind::FunnelBoundary: return "funnel";
        case CurveKind::Cusp: return "cusp";
    }
    return "interior";
}

inline CurveKind curve_kind_of(const std::string& s) {
    if (s == "interior") return CurveKind::Interior;
    if (s == "funnel") return CurveKind::FunnelBoundary;
    if (s == "cusp") return CurveKind::Cusp;
    throw DomainError("unknown curve kind: " + s);
}

inline std::string hex_side_name(HexSide s) {
    switch (s) {
        case HexSide::B1: return "B1";
        case HexSide::S12: return "S12";
        case HexSide::B2: return "B2";
        case HexSide::S23: return "S23";
        case HexSide::B3: return "B3";
        case HexSide::S31: return "S31";
    }
    return "S12";
}

inline HexSide hex_side_of(const std::string& s) {
    if (s == "B1") return HexSide::B1;
    if (s == "S12") return HexSide::S12;
    if (s == "B2") return HexSide::B2;
    if (s == "S23") return HexSide::S23;
    if (s == "B3") return HexSide::B3;
    if (s == "S31") return HexSide::S31;
    throw DomainError("unknown hexagon side: " + s);
}

inline json to_json(const SurfaceSpec& spec) {
    json doc;
    auto basevector = [&spec] {
        return json{{"pants", spec.base.pants_id},
                    {"hexagon", spec.base.hexagon},
                    {"side", hex_side_name(spec.base.side)},
                    {"nu", spec.base.fermi.nu},
                    {"rho", spec.base.fermi.rho},
                    {"angle", spec.base.angle}};
    };
    switch (spec.kind) {
        case SurfaceKind::Plane:
            doc["kind"] = "plane";
            return doc;
        case SurfaceKind::CuspCylinder:
            doc["kind"] = "cusp_cylinder";
            doc["basevector"] = basevector();
            return doc;
        case SurfaceKind::FunnelCylinder:
            doc["kind"] = "funnel_cylinder";
            doc["cylinder_length"] = spec.cylinder_length;
            doc["basevector"] = basevector();
            return doc;
        case SurfaceKind::PantsGraph:
            break;
    }
    doc["curves"] = json::array();
    for (const auto& c : spec.curves) {
        json jc;
        jc["id"] = c.id;
        jc["kind"] = curve_kind_name(c.kind);
        jc["length"] = c.length;
        if (c.twist) jc["twist"] = *c.twist;
        doc["curves"].push_back(jc);
    }
    doc["pants"] = json::array();
    for (const auto& p : spec.pants)
        doc["pants"].push_back({{"id", p.id},
                                {"legs", {p.legs[0], p.legs[1], p.legs[2]}}});
    doc["pairing"] = json::array();
    for (const auto& pr : spec.pairing)
        doc["pairing"].push_back({{{"pants", pr[0].pants}, {"leg", pr[0].leg}},
                                  {{"pants", pr[1].pants}, {"leg", pr[1].leg}}});
    doc["basevector"] = {{"pants", spec.base.pants_id},
                         {"hexagon", spec.base.hexagon},
                         {"side", hex_side_name(spec.base.side)},
                         {"nu", spec.base.fermi.nu},
                         {"rho", spec.base.fermi.rho},
                         {"angle", spec.base.angle}};
    return doc;
}

inline SurfaceSpec spec_from_json(const json& doc) {
    SurfaceSpec spec;
    auto read_base = [&doc](SurfaceSpec& s) {
        if (!doc.contains("basevector")) {
            s.base.angle = kPi / 2.0;  // reference tangent
            return;
        }
        const auto& jb = doc.at("basevector");
        s.base.pants_id = jb.at("pants").get<std::string>();
        s.base.hexagon = jb.at("hexagon").get<int>();
        s.base.side = hex_side_of(jb.at("side").get<std::string>());
        s.base.fermi.nu = jb.at("nu").get<double>();
        s.base.fermi.rho = jb.at("rho").get<double>();
        s.base.angle = jb.at("angle").get<double>();
    };
    if (doc.contains("kind")) {
        const std::string k = doc.at("kind").get<std::string>();
        if (k == "plane") {
            spec.kind = SurfaceKind::Plane;
            return spec;
        }
        if (k == "cusp_cylinder") {
            spec.kind = SurfaceKind::CuspCylinder;
            read_base(spec);
            return spec;
        }
        if (k == "funnel_cylinder") {
            spec.kind = SurfaceKind::FunnelCylinder;
            spec.cylinder_length = doc.at("cylinder_length").get<double>();
            read_base(spec);
            return spec;
        }
        if (k != "pants_graph") throw DomainError("unknown surface kind: " + k);
    }
    for (const auto& jc : doc.at("curves")) {
        CurveSpec c;
        c.id = jc.at("id").get<std::string>();
        c.kind = curve_kind_of(jc.at("kind").get<std::string>());
        c.length = jc.at("length").get<double>();
        if (jc.contains("twist")) c.twist = jc.at("twist").get<double>();
        spec.curves.push_back(c);
    }
    for (const auto& jp : doc.at("pants")) {
        PantsPiece p;
        p.id = jp.at("id").get<std::string>();
        const auto& legs = jp.at("legs");
        if (legs.size() != 3) throw DomainError("pants requires exactly 3 legs");
        for (int i = 0; i < 3; ++i) p.legs[i] = legs[i].get<std::string>();
        spec.pants.push_back(p);
    }
    if (doc.contains("pairing")) {
        for (const auto& jpr : doc.at("pairing")) {
            if (jpr.size() != 2) throw DomainError("pairing entry requires 2 half-edges");
            std::array<HalfEdge, 2> pr;
            for (int i = 0; i < 2; ++i) {
                pr[i].pants = jpr[i].at("pants").get<std::string>();
                pr[i].leg = jpr[i].at("leg").get<int>();
            }
            spec.pairing.push_back(pr);
        }
    }
    const auto& jb = doc.at("basevector");
    spec.base.pants_id = jb.at("pants").get<std::string>();
    spec.base.hexagon = jb.at("hexagon").get<int>();
    spec.base.side = hex_side_of(jb.at("side").get<std::string>());
    spec.base.fermi.nu = jb.at("nu").get<double>();
    spec.base.fermi.rho = jb.at("rho").get<double>();
    spec.base.angle = jb.at("angle").get<double>();
    return spec;
}

} // namespace hypflow
