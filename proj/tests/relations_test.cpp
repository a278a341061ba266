#include <cmath>

#include <gtest/gtest.h>

#include "hypflow/paths.hpp"
#include "hypflow/relations.hpp"

using namespace hypflow;

namespace {

HexAlignment align_pants(double l1a, double l1b, double shared2,
                         double shared3) {
    const HexagonSpec hs =
        hexagon_from_half_lengths(l1a / 2.0, shared2 / 2.0, shared3 / 2.0);
    const HexagonSpec ht =
        hexagon_from_half_lengths(l1b / 2.0, shared2 / 2.0, shared3 / 2.0);
    return hex_align(hs, ht, HexSide::B2);
}

} // namespace

TEST(HexAlign, SharedSideRules) {
    const HexagonSpec h = hexagon_from_half_lengths(0.5, 0.5, 0.5);
    EXPECT_THROW(hex_align(h, h, HexSide::S12), AlignmentError);
    const HexagonSpec g = hexagon_from_half_lengths(0.5, 0.7, 0.5);
    EXPECT_THROW(hex_align(h, g, HexSide::B2), AlignmentError);
    EXPECT_NO_THROW(hex_align(h, g, HexSide::B1));
}

TEST(HexAlign, PlacesSharedLegOnCommonAxis) {
    const HexAlignment al = align_pants(1.0, 1.2, 1.0, 1.0);
    // the shared-leg seam feet coincide at the canonical anchor
    const PlanePoint fs = al.place_s.apply(al.s.seam[al.alpha].origin());
    const PlanePoint ft = al.place_t.apply(al.t.seam[al.alpha].origin());
    EXPECT_NEAR(dist(fs, ft), 0.0, 1e-9);
    EXPECT_NEAR(dist(fs, reference_point()), 0.0, 1e-9);
}

TEST(Retract, FixesInteriorAndLandsInRegion) {
    const HexAlignment al = align_pants(1.0, 1.2, 1.0, 1.0);
    // a point near the shared anchor is interior to both hexagons
    const PlanePoint inside = al.place_s.apply(al.s.hex_ref);
    EXPECT_NEAR(dist(retract(al, inside), inside), 0.0, 1e-7);
    // a faraway point retracts to the region, idempotently
    const PlanePoint far{5.0, 0.01};
    const PlanePoint r = retract(al, far);
    EXPECT_NEAR(dist(r, retract(al, r)), 0.0, 1e-7);
    EXPECT_LT(dist(r, reference_point()), dist(far, reference_point()));
}

TEST(Relation, IdenticalSurfacesGiveZeroEpsilon) {
    const SurfaceSpec y1 = one_holed_pants(1.0, 1.1, 1.2);
    const FuchsianGroup g = holonomy_from_spec(y1);
    const HexAlignment al = align_pants(1.0, 1.0, 1.1, 1.2);
    RelationOptions opt;
    opt.radius = 2.0;
    const RelationCert cert = relation_from_alignment(al, 0.2, g, g, "P0", opt);
    EXPECT_GT(cert.pairs.size(), 10u);
    EXPECT_NEAR(cert.epsilon, 0.0, 1e-9);
    EXPECT_EQ(cert.radius, 2.0);
}

TEST(Relation, EpsilonScalesWithPerturbation) {
    const SurfaceSpec a = one_holed_pants(1.0, 1.0, 1.0);
    const FuchsianGroup ga = holonomy_from_spec(a);
    double prev = INFINITY;
    for (double delta : {0.2, 0.05}) {
        const SurfaceSpec b = one_holed_pants(1.0 + delta, 1.0, 1.0);
        const FuchsianGroup gb = holonomy_from_spec(b);
        const HexAlignment al = align_pants(1.0, 1.0 + delta, 1.0, 1.0);
        RelationOptions opt;
        opt.radius = 2.0;
        const RelationCert cert =
            relation_from_alignment(al, 0.2, ga, gb, "P0", opt);
        EXPECT_GT(cert.epsilon, 0.0);
        EXPECT_LT(cert.epsilon, prev);
        EXPECT_LT(cert.epsilon, 2.0 * delta);
        prev = cert.epsilon;
    }
}

TEST(Relation, StepAlignmentsDetectModifiedPants) {
    SurfaceSpec a;
    a.curves.push_back({"c1", CurveKind::Interior, 1.0, 0.1});
    a.curves.push_back({"c2", CurveKind::Interior, 1.1, 0.2});
    a.curves.push_back({"c3", CurveKind::Interior, 1.2, 0.3});
    a.pants.push_back({"P0", {"c1", "c2", "c3"}});
    a.pants.push_back({"P1", {"c1", "c2", "c3"}});
    for (int i = 0; i < 3; ++i)
        a.pairing.push_back({HalfEdge{"P0", i}, HalfEdge{"P1", i}});
    a.base = default_base("P0");

    SurfaceSpec b = a;
    b.find_curve("c1")->length = 0.9;
    const auto aligns = detail::step_alignments(a, b);
    ASSERT_TRUE(aligns.has_value());
    EXPECT_EQ(aligns->size(), 2u);  // both pants touch c1
    EXPECT_TRUE(aligns->count("P0"));
    EXPECT_TRUE(aligns->count("P1"));

    // unchanged specs produce an empty alignment set
    const auto none = detail::step_alignments(a, a);
    ASSERT_TRUE(none.has_value());
    EXPECT_TRUE(none->empty());

    // changing every leg leaves nothing to align along
    SurfaceSpec c = a;
    for (const char* id : {"c1", "c2", "c3"})
        c.find_curve(id)->length += 0.1;
    EXPECT_FALSE(detail::step_alignments(a, c).has_value());
}

TEST(Relation, VerifyConditionsOnPerturbation) {
    const SurfaceSpec a = one_holed_pants(1.0, 1.0, 1.0);
    const SurfaceSpec b = one_holed_pants(1.02, 1.0, 1.0);
    const FuchsianGroup ga = holonomy_from_spec(a);
    const FuchsianGroup gb = holonomy_from_spec(b);
    const HexAlignment al = align_pants(1.0, 1.02, 1.0, 1.0);
    RelationOptions opt;
    opt.radius = 2.0;
    const RelationCert cert =
        relation_from_alignment(al, 0.1, ga, gb, "P0", opt);
    const ConditionReport rep = verify_relation(cert, ga, gb);
    EXPECT_TRUE(rep.ok()) << rep.witness;
}

TEST(Relation, VerifyRejectsEmptyCert) {
    const SurfaceSpec a = one_holed_pants(1.0, 1.0, 1.0);
    const FuchsianGroup g = holonomy_from_spec(a);
    RelationCert empty;
    EXPECT_FALSE(verify_relation(empty, g, g).ok());
}

TEST(Relation, RejectsBadDensity) {
    const SurfaceSpec a = one_holed_pants(1.0, 1.0, 1.0);
    const FuchsianGroup g = holonomy_from_spec(a);
    const HexAlignment al = align_pants(1.0, 1.0, 1.0, 1.0);
    EXPECT_THROW(relation_from_alignment(al, 0.0, g, g, "P0"), DomainError);
}
