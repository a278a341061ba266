#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "hypflow/json_io.hpp"

using namespace hypflow;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(HYPFLOW_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    EXPECT_NE(p, nullptr);
    RunResult r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::filesystem::path tmp_dir() {
    static const std::filesystem::path d = [] {
        auto p = std::filesystem::temp_directory_path() / "hypflow_cli_test";
        std::filesystem::create_directories(p);
        return p;
    }();
    return d;
}

std::string write_doc(const std::string& name, const json& doc) {
    const auto path = tmp_dir() / name;
    std::ofstream(path) << doc.dump(2) << "\n";
    return path.string();
}

SurfaceSpec genus2() {
    SurfaceSpec s;
    s.curves.push_back({"c1", CurveKind::Interior, 1.2, 0.1});
    s.curves.push_back({"c2", CurveKind::Interior, 0.9, -0.2});
    s.curves.push_back({"c3", CurveKind::Interior, 1.4, 0.3});
    s.pants.push_back({"P0", {"c1", "c2", "c3"}});
    s.pants.push_back({"P1", {"c1", "c2", "c3"}});
    for (int i = 0; i < 3; ++i)
        s.pairing.push_back({HalfEdge{"P0", i}, HalfEdge{"P1", i}});
    s.base = default_base("P0");
    return s;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST(Cli, ValidateAcceptsGoodDocument) {
    const std::string f = write_doc("good.json", to_json(genus2()));
    const RunResult r = run("validate " + f);
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "");
}

TEST(Cli, ValidateReportsViolations) {
    SurfaceSpec s = genus2();
    s.find_curve("c1")->length = -1.0;
    const std::string f = write_doc("bad.json", to_json(s));
    const RunResult r = run("validate " + f);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("curve c1: interior length must be positive"),
              std::string::npos)
        << r.out;
}

TEST(Cli, ParseFailuresExitTwo) {
    const auto garbled = tmp_dir() / "garbled.json";
    std::ofstream(garbled) << "{not json";
    EXPECT_EQ(run("validate " + garbled.string()).code, 2);
    EXPECT_EQ(run("validate " + (tmp_dir() / "missing.json").string()).code, 2);
    // structurally valid JSON that is not a surface document
    const std::string f = write_doc("notdoc.json", json{{"kind", "bogus"}});
    EXPECT_EQ(run("validate " + f).code, 2);
    // CLI misuse is a parse failure too
    EXPECT_EQ(run("frobnicate").code, 2);
}

TEST(Cli, GeomLengthsMatchFnData) {
    const SurfaceSpec s = genus2();
    const std::string f = write_doc("geom.json", to_json(s));
    const RunResult r = run("geom " + f + " --lengths");
    ASSERT_EQ(r.code, 0) << r.out;
    const json rep = json::parse(r.out);
    ASSERT_TRUE(rep.contains("lengths"));
    for (const auto& c : s.curves)
        EXPECT_NEAR(rep["lengths"][c.id].get<double>(), c.length, 1e-9);
}

TEST(Cli, GeomBallCensusOnCylinder) {
    SurfaceSpec fc;
    fc.kind = SurfaceKind::FunnelCylinder;
    fc.cylinder_length = 1.0;
    const std::string f = write_doc("cyl.json", to_json(fc));
    const RunResult r = run("geom " + f + " --ball 3");
    ASSERT_EQ(r.code, 0) << r.out;
    const json rep = json::parse(r.out);
    EXPECT_EQ(rep["ball"]["size"].get<int>(), 7);  // e, g^{±1}, g^{±2}, g^{±3}
    EXPECT_EQ(rep["ball"]["displacements"].size(), 7u);
}

TEST(Cli, GeomRejectsInvalidDocument) {
    SurfaceSpec s = genus2();
    s.find_curve("c1")->length = -1.0;
    const std::string f = write_doc("badgeom.json", to_json(s));
    EXPECT_EQ(run("geom " + f + " --lengths").code, 1);
}

TEST(Cli, PathCertifyWritesReportAndSummary) {
    const std::string f = write_doc("cert.json", to_json(genus2()));
    const std::string out = (tmp_dir() / "cert_report.json").string();
    const RunResult r =
        run("path certify " + f + " --eps 0.1 --radius 2 --out " + out);
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.out, "stages=1 max_eps=0 terminal=none:0\n");
    const json rep = json::parse(slurp(out));
    ASSERT_TRUE(rep.contains("schedule"));
    ASSERT_TRUE(rep.contains("steps"));
    ASSERT_EQ(rep["steps"].size(), 1u);
    for (const char* k : {"epsilon", "radius", "gap", "dilatation_bound"})
        EXPECT_TRUE(rep["steps"][0].contains(k)) << k;
    EXPECT_EQ(rep["terminal"]["criterion"], "none");
    EXPECT_TRUE(rep.contains("tolerances"));
    EXPECT_EQ(rep["seed"].get<unsigned>(), 1u);
}

TEST(Cli, ReportsAreByteIdenticalUnderFixedSeed) {
    const std::string f = write_doc("det.json", to_json(genus2()));
    const std::string o1 = (tmp_dir() / "det1.json").string();
    const std::string o2 = (tmp_dir() / "det2.json").string();
    const RunResult r1 =
        run("path certify " + f + " --seed 7 --eps 0.1 --out " + o1);
    const RunResult r2 =
        run("path certify " + f + " --seed 7 --eps 0.1 --out " + o2);
    ASSERT_EQ(r1.code, 0);
    ASSERT_EQ(r2.code, 0);
    EXPECT_EQ(r1.out, r2.out);
    EXPECT_EQ(slurp(o1), slurp(o2));
    EXPECT_FALSE(slurp(o1).empty());
}

TEST(Cli, PinchPlanRejectsFunnelSurfaces) {
    const std::string f =
        write_doc("y1.json", to_json(one_holed_pants(1.0, 1.0, 1.0)));
    const RunResult r = run("path pinch " + f + " --out " +
                            (tmp_dir() / "y1_report.json").string());
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, RefinementExhaustionExitsOneAndNamesStep) {
    const std::string f = write_doc("tight.json", to_json(genus2()));
    const RunResult r =
        run("path deform " + f + " --eps 1e-9 --steps 1 --out " +
            (tmp_dir() / "tight_report.json").string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("refinement exhausted"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("stage"), std::string::npos) << r.out;
}
