#include <gtest/gtest.h>

#include "hypflow/json_io.hpp"
#include "hypflow/surface.hpp"

using namespace hypflow;

namespace {

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

bool has_rule(const std::vector<Violation>& vs, const std::string& rule_part) {
    for (const auto& v : vs)
        if (v.rule.find(rule_part) != std::string::npos) return true;
    return false;
}

} // namespace

TEST(Validate, AcceptsWellFormedSpecs) {
    EXPECT_TRUE(validate(genus2()).empty());
    EXPECT_TRUE(validate(one_holed_pants(1.0, 2.0, 0.5)).empty());
    EXPECT_TRUE(validate(thrice_punctured()).empty());
    SurfaceSpec plane;
    plane.kind = SurfaceKind::Plane;
    EXPECT_TRUE(validate(plane).empty());
}

TEST(Validate, InteriorLengthMustBePositive) {
    SurfaceSpec s = genus2();
    s.find_curve("c1")->length = 0.0;
    EXPECT_TRUE(has_rule(validate(s), "interior length must be positive"));
}

TEST(Validate, InteriorCurveRequiresTwist) {
    SurfaceSpec s = genus2();
    s.find_curve("c2")->twist.reset();
    EXPECT_TRUE(has_rule(validate(s), "requires a twist"));
}

TEST(Validate, CuspRules) {
    SurfaceSpec s = one_holed_pants(1.0, 0.0, 1.0);
    s.find_curve("b2")->length = 0.3;
    EXPECT_TRUE(has_rule(validate(s), "cusp length must be zero"));
    s = one_holed_pants(1.0, 0.0, 1.0);
    s.find_curve("b2")->twist = 0.1;
    EXPECT_TRUE(has_rule(validate(s), "cusp carries no twist"));
}

TEST(Validate, FunnelBoundaryRules) {
    SurfaceSpec s = one_holed_pants(1.0, 1.0, 1.0);
    s.find_curve("b1")->twist = 0.2;
    EXPECT_TRUE(has_rule(validate(s), "funnel boundary carries no twist"));
}

TEST(Validate, DuplicateIds) {
    SurfaceSpec s = genus2();
    s.curves.push_back({"c1", CurveKind::Interior, 1.0, 0.0});
    EXPECT_TRUE(has_rule(validate(s), "duplicate curve id"));
    s = genus2();
    s.pants.push_back({"P0", {"c1", "c2", "c3"}});
    EXPECT_TRUE(has_rule(validate(s), "duplicate pants id"));
}

TEST(Validate, LegMultiplicities) {
    // interior curve bounding only one leg
    SurfaceSpec s = genus2();
    s.pants[1].legs[0] = "c2";
    EXPECT_TRUE(has_rule(validate(s), "exactly 2 legs"));
    // boundary curve bounding two legs
    SurfaceSpec y = one_holed_pants(1.0, 1.0, 1.0);
    y.pants[0].legs[1] = "b1";
    EXPECT_TRUE(has_rule(validate(y), "exactly 1 leg"));
}

TEST(Validate, PairingInvolution) {
    SurfaceSpec s = genus2();
    s.pairing.push_back({HalfEdge{"P0", 0}, HalfEdge{"P1", 0}});
    EXPECT_TRUE(has_rule(validate(s), "paired twice"));
    s = genus2();
    s.pairing.pop_back();
    EXPECT_TRUE(has_rule(validate(s), "missing from pairing"));
    s = genus2();
    s.pairing[0][1].leg = 1;
    EXPECT_FALSE(validate(s).empty());
}

TEST(Validate, Connectivity) {
    SurfaceSpec s = genus2();
    // second component: an isolated one-holed pants
    s.curves.push_back({"d1", CurveKind::FunnelBoundary, 1.0, std::nullopt});
    s.curves.push_back({"d2", CurveKind::FunnelBoundary, 1.0, std::nullopt});
    s.curves.push_back({"d3", CurveKind::FunnelBoundary, 1.0, std::nullopt});
    s.pants.push_back({"Q0", {"d1", "d2", "d3"}});
    EXPECT_TRUE(has_rule(validate(s), "not connected"));
}

TEST(Validate, BaseVector) {
    SurfaceSpec s = genus2();
    s.base.pants_id = "nope";
    EXPECT_TRUE(has_rule(validate(s), "unknown pants"));
    s = genus2();
    s.base.hexagon = 2;
    EXPECT_TRUE(has_rule(validate(s), "hexagon index"));
}

TEST(Validate, FunnelCylinder) {
    SurfaceSpec s;
    s.kind = SurfaceKind::FunnelCylinder;
    s.cylinder_length = 0.0;
    EXPECT_FALSE(validate(s).empty());
    s.cylinder_length = 1.0;
    EXPECT_TRUE(validate(s).empty());
}

TEST(FnDistance, MaxOfLogLengthAndTwistTerms) {
    FNPoint a, b;
    a.coords["c"] = {1.0, 0.25};
    b.coords["c"] = {2.0, 0.5};
    // log term log(2), twist term |1*0.25 - 2*0.5| = 0.75
    EXPECT_NEAR(fn_distance(a, b), 0.75, 1e-15);
    b.coords["c"] = {std::exp(1.0), 0.25 / std::exp(1.0)};
    EXPECT_NEAR(fn_distance(a, b), 1.0, 1e-12);
    EXPECT_NEAR(fn_distance(a, a), 0.0, 1e-15);
    EXPECT_NEAR(fn_distance(a, b), fn_distance(b, a), 1e-15);
}

TEST(FnDistance, DomainChecks) {
    FNPoint a, b;
    a.coords["c"] = {1.0, 0.0};
    EXPECT_THROW(fn_distance(a, b), DomainMismatch);
    b.coords["d"] = {1.0, 0.0};
    EXPECT_THROW(fn_distance(a, b), DomainMismatch);
}

TEST(Area, GaussBonnet) {
    EXPECT_NEAR(gauss_bonnet_area(thrice_punctured()), 2.0 * kPi, 1e-15);
    EXPECT_NEAR(gauss_bonnet_area(genus2()), 4.0 * kPi, 1e-15);
}

TEST(Json, RoundTripPantsGraph) {
    const SurfaceSpec s = genus2();
    const SurfaceSpec back = spec_from_json(to_json(s));
    EXPECT_EQ(to_json(back), to_json(s));
    EXPECT_EQ(back.curves.size(), 3u);
    EXPECT_EQ(back.pants.size(), 2u);
    EXPECT_EQ(back.pairing.size(), 3u);
    EXPECT_EQ(back.base.pants_id, "P0");
    EXPECT_EQ(back.base.side, HexSide::S12);
    ASSERT_NE(back.find_curve("c2"), nullptr);
    EXPECT_EQ(back.find_curve("c2")->twist.value(), -0.2);
}

TEST(Json, RoundTripSpecialSurfaces) {
    for (SurfaceKind k : {SurfaceKind::Plane, SurfaceKind::CuspCylinder,
                          SurfaceKind::FunnelCylinder}) {
        SurfaceSpec s;
        s.kind = k;
        if (k == SurfaceKind::FunnelCylinder) s.cylinder_length = 0.8;
        const SurfaceSpec back = spec_from_json(to_json(s));
        EXPECT_EQ(back.kind, k);
        EXPECT_EQ(back.cylinder_length, s.cylinder_length);
    }
}

TEST(Json, RoundTripCuspAndFunnelCurves) {
    const SurfaceSpec s = one_holed_pants(1.0, 0.0, 2.0);
    const SurfaceSpec back = spec_from_json(to_json(s));
    EXPECT_EQ(back.find_curve("b1")->kind, CurveKind::FunnelBoundary);
    EXPECT_EQ(back.find_curve("b2")->kind, CurveKind::Cusp);
    EXPECT_FALSE(back.find_curve("b2")->twist.has_value());
}

TEST(Json, RejectsMalformedDocuments) {
    EXPECT_THROW(spec_from_json(json::parse("{}")), json::exception);
    json doc = to_json(genus2());
    doc["curves"][0]["kind"] = "bogus";
    EXPECT_THROW(spec_from_json(doc), DomainError);
}
