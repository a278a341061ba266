// Command-line front end: document validation, geometry reports, and path
// certification. Exit codes: 0 ok, 1 domain failure, 2 parse failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hypflow/json_io.hpp"
#include "hypflow/paths.hpp"

namespace {

using hypflow::json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitParse = 2;

struct ParseFailure : std::runtime_error {
    explicit ParseFailure(const std::string& what) : std::runtime_error(what) {}
};

json load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseFailure("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseFailure(e.what());
    }
}

hypflow::SurfaceSpec parse_spec(const std::string& path) {
    const json doc = load_document(path);
    try {
        return hypflow::spec_from_json(doc);
    } catch (const json::exception& e) {
        throw ParseFailure(e.what());
    } catch (const hypflow::DomainError& e) {
        throw ParseFailure(e.what());
    }
}

int cmd_validate(const std::string& file) {
    const hypflow::SurfaceSpec spec = parse_spec(file);
    const auto violations = hypflow::validate(spec);
    for (const auto& v : violations)
        std::printf("curve %s: %s\n", v.subject.c_str(), v.rule.c_str());
    return violations.empty() ? kExitOk : kExitDomain;
}

int cmd_geom(const std::string& file, bool lengths, bool inj, double ball_R) {
    const hypflow::SurfaceSpec spec = parse_spec(file);
    if (!hypflow::validate(spec).empty()) {
        std::fprintf(stderr, "document does not validate\n");
        return kExitDomain;
    }
    const hypflow::FuchsianGroup g = hypflow::holonomy_from_spec(spec);
    if (!lengths && !inj && !(ball_R > 0.0)) lengths = inj = true;
    json report;
    if (lengths) {
        json jl = json::object();
        for (const auto& [id, m] : g.curve_elements)
            jl[id] = hypflow::sig12(hypflow::translation_length(m));
        report["lengths"] = jl;
    }
    if (inj) {
        const auto r = hypflow::injectivity_radius(
            g, hypflow::reference_point(), 6.0, {2.0, 0});
        report["inj"] = hypflow::sig12(r.value);
        report["inj_at_least"] = r.at_least;
    }
    if (ball_R > 0.0) {
        const hypflow::GroupBall ball =
            hypflow::group_ball(g, ball_R, hypflow::reference_point());
        json jb;
        jb["radius"] = hypflow::sig12(ball_R);
        jb["size"] = ball.elements.size();
        json jd = json::array();
        for (const auto& e : ball.elements)
            jd.push_back(hypflow::sig12(e.displacement));
        jb["displacements"] = jd;
        report["ball"] = jb;
    }
    std::printf("%s\n", report.dump(2).c_str());
    return kExitOk;
}

const char* stage_kind_name(hypflow::StageKind k) {
    switch (k) {
        case hypflow::StageKind::FnDeform: return "fn_deform";
        case hypflow::StageKind::Pinch: return "pinch";
        case hypflow::StageKind::MoveVector: return "move_vector";
        case hypflow::StageKind::FunnelEscape: return "funnel_escape";
    }
    return "unknown";
}

json report_of(const hypflow::PathSchedule& plan,
               const hypflow::ContinuityCert& cert) {
    json report;
    report["schedule"] = json::array();
    for (const auto& st : plan.stages) {
        json js;
        js["kind"] = stage_kind_name(st.kind);
        js["reversed"] = st.reversed;
        js["curves"] = st.curves;
        js["steps"] = st.steps;
        report["schedule"].push_back(js);
    }
    report["steps"] = json::array();
    for (const auto& s : cert.steps)
        report["steps"].push_back({{"epsilon", hypflow::sig12(s.epsilon)},
                                   {"radius", hypflow::sig12(cert.radius)},
                                   {"gap", hypflow::sig12(s.gap)},
                                   {"dilatation_bound",
                                    hypflow::sig12(s.dilatation_bound)}});
    report["terminal"] = {{"criterion", cert.terminal.criterion},
                          {"value", hypflow::sig12(cert.terminal.value)}};
    report["tolerances"] = {{"eps_target", hypflow::sig12(cert.eps_target)},
                            {"R_target", hypflow::sig12(cert.R_target)},
                            {"density", hypflow::sig12(cert.density)}};
    report["seed"] = cert.seed;
    return report;
}

int cmd_path(const std::string& sub, const std::string& file, double eps,
             double radius, int steps, unsigned seed, const std::string& out) {
    const hypflow::SurfaceSpec spec = parse_spec(file);
    if (!hypflow::validate(spec).empty()) {
        std::fprintf(stderr, "document does not validate\n");
        return kExitDomain;
    }

    hypflow::PathSchedule plan;
    if (sub == "plan") {
        plan = hypflow::plan_to_plane(spec);
    } else if (sub == "pinch") {
        plan = hypflow::constrained_plan(spec,
                                         hypflow::PlanConstraint::FiniteArea);
    } else if (sub == "deform") {
        plan = hypflow::constrained_plan(
            spec, hypflow::PlanConstraint::SameDiffeoType);
    } else {  // certify: the constant path at the document's base vector
        hypflow::Stage st;
        st.kind = hypflow::StageKind::MoveVector;
        st.start = spec;
        st.tangents = {spec.base, spec.base};
        st.steps = 1;
        plan.stages.push_back(std::move(st));
    }
    if (steps > 0)
        for (auto& st : plan.stages) st.steps = steps;

    hypflow::CertifyOptions opt;
    opt.seed = seed;
    if (steps > 0) opt.refine_cap = std::max(steps, 2);
    hypflow::ContinuityCert cert = hypflow::certify(plan, eps, radius, opt);

    const json report = report_of(plan, cert);
    std::ofstream of(out);
    if (!of) throw hypflow::DomainError("cannot write " + out);
    of << report.dump(2) << "\n";

    double max_eps = 0.0;
    for (const auto& s : cert.steps) max_eps = std::max(max_eps, s.epsilon);
    std::printf("stages=%zu max_eps=%.12g terminal=%s:%.12g\n",
                plan.stages.size(), max_eps, cert.terminal.criterion.c_str(),
                cert.terminal.value);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-type vectored hyperbolic surfaces: construction, "
                 "deformation, and continuity certification"};
    app.require_subcommand(1);

    std::string file;
    auto* validate_cmd = app.add_subcommand("validate", "check a surface document");
    validate_cmd->add_option("file", file, "surface document")->required();

    bool lengths = false, inj = false;
    double ball_R = 0.0;
    auto* geom_cmd = app.add_subcommand("geom", "geometry report");
    geom_cmd->add_option("file", file, "surface document")->required();
    geom_cmd->add_flag("--lengths", lengths, "curve lengths from holonomy");
    geom_cmd->add_flag("--inj", inj, "base-point injectivity radius");
    geom_cmd->add_option("--ball", ball_R, "group-ball census at radius R");

    std::string sub;
    double eps = 0.05, radius = 3.0;
    int steps = 0;
    unsigned seed = 1;
    std::string out = "report.json";
    auto* path_cmd = app.add_subcommand("path", "plan and certify paths");
    path_cmd->add_option("subcommand", sub, "plan|pinch|deform|certify")
        ->required()
        ->check(CLI::IsMember({"plan", "pinch", "deform", "certify"}));
    path_cmd->add_option("file", file, "surface document")->required();
    path_cmd->add_option("--eps", eps, "per-step epsilon target");
    path_cmd->add_option("--radius", radius, "comparison radius target");
    path_cmd->add_option("--steps", steps, "step-count override (also the cap)");
    path_cmd->add_option("--seed", seed, "sampling seed");
    path_cmd->add_option("--out", out, "report file");

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(validate_cmd)) return cmd_validate(file);
        if (app.got_subcommand(geom_cmd))
            return cmd_geom(file, lengths, inj, ball_R);
        return cmd_path(sub, file, eps, radius, steps, seed, out);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitParse;
    } catch (const ParseFailure& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return kExitParse;
    } catch (const hypflow::RefinementExhausted& e) {
        std::fprintf(stderr, "refinement exhausted: %s\n", e.what());
        return kExitDomain;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDomain;
    }
}
