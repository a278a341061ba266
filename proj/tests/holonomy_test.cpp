#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "hypflow/holonomy.hpp"

using namespace hypflow;

namespace {

std::mt19937 rng(99);
double uni(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

SurfaceSpec genus2(double l1, double l2, double l3, double t1, double t2,
                   double t3) {
    SurfaceSpec s;
    s.curves.push_back({"c1", CurveKind::Interior, l1, t1});
    s.curves.push_back({"c2", CurveKind::Interior, l2, t2});
    s.curves.push_back({"c3", CurveKind::Interior, l3, t3});
    s.pants.push_back({"P0", {"c1", "c2", "c3"}});
    s.pants.push_back({"P1", {"c1", "c2", "c3"}});
    for (int i = 0; i < 3; ++i)
        s.pairing.push_back({HalfEdge{"P0", i}, HalfEdge{"P1", i}});
    s.base = default_base("P0");
    return s;
}

} // namespace

TEST(RealizePants, BoundaryTracesAndRelation) {
    for (int i = 0; i < 20; ++i) {
        const double l1 = uni(0.3, 3.0), l2 = uni(0.3, 3.0), l3 = uni(0.3, 3.0);
        const PantsRealization P = realize_pants(l1, l2, l3);
        for (int k = 0; k < 3; ++k)
            EXPECT_NEAR(std::fabs(P.boundary[k].trace()),
                        2.0 * std::cosh(P.lengths[k] / 2.0), 1e-9);
        const Isometry rel = P.boundary[2] * P.boundary[1] * P.boundary[0];
        EXPECT_NEAR(rel.norm_from_identity(), 0.0, 1e-9);
    }
}

TEST(RealizePants, CuspLegsHaveParabolicHolonomy) {
    const PantsRealization P = realize_pants(0.0, 1.0, 0.0);
    EXPECT_EQ(classify(P.boundary[0]), IsometryKind::Parabolic);
    EXPECT_EQ(classify(P.boundary[2]), IsometryKind::Parabolic);
    EXPECT_NEAR(std::fabs(P.boundary[1].trace()), 2.0 * std::cosh(0.5), 1e-9);
}

TEST(RealizePants, ContinuousAtCuspLimit) {
    // the cusp branch is the limit of short-boundary realizations
    const PantsRealization P0 = realize_pants(0.0, 1.0, 1.0);
    const PantsRealization Pe = realize_pants(1e-3, 1.0, 1.0);
    for (int k = 0; k < 3; ++k)
        EXPECT_NEAR(P0.boundary[k].norm_dist(Pe.boundary[k]), 0.0, 1e-4);
}

TEST(RealizePants, SeamsArePerpendicularFeet) {
    const PantsRealization P = realize_pants(1.0, 1.4, 0.8);
    for (int k = 0; k < 3; ++k) {
        const FermiFrame& axis_k = P.legs[k].curve_frame;
        // seam origin lies on axis k
        EXPECT_NEAR(fermi_coords(axis_k, P.seam[k].origin()).rho, 0.0, 1e-9);
        // and the seam meets it at a right angle: flowing the seam direction
        // keeps nu constant on axis k to first order
        const PlanePoint moved = flow(P.seam[k].direction(), 1e-5);
        EXPECT_NEAR(fermi_coords(axis_k, moved).nu,
                    fermi_coords(axis_k, P.seam[k].origin()).nu, 1e-9);
    }
}

TEST(RealizePants, HexRefInsideHexagon) {
    const PantsRealization P = realize_pants(1.0, 1.4, 0.8);
    EXPECT_TRUE(hex_contains(P, P.hex_ref));
}

TEST(Holonomy, CurveTracesMatchFnLengths) {
    for (int i = 0; i < 20; ++i) {
        const SurfaceSpec s = genus2(uni(0.3, 3.0), uni(0.3, 3.0), uni(0.3, 3.0),
                                     uni(-1.0, 1.0), uni(-1.0, 1.0),
                                     uni(-1.0, 1.0));
        const FuchsianGroup g = holonomy_from_spec(s);
        for (const auto& c : s.curves)
            EXPECT_NEAR(std::fabs(g.curve_elements.at(c.id).trace()),
                        2.0 * std::cosh(c.length / 2.0), 1e-9)
                << c.id;
    }
}

TEST(Holonomy, BaseNormalization) {
    // the base pants chart carries its base location to the reference tangent,
    // so the identified position of the base pants is consistent
    const SurfaceSpec s = genus2(1.2, 0.9, 1.4, 0.1, -0.2, 0.3);
    const FuchsianGroup g = holonomy_from_spec(s);
    const UnitTangent t = global_location(g, s.base);
    EXPECT_NEAR(dist(t.base, reference_point()), 0.0, 1e-9);
    EXPECT_NEAR(std::remainder(t.angle - kPi / 2.0, 2.0 * kPi), 0.0, 1e-9);
}

TEST(Holonomy, InvalidSpecThrows) {
    SurfaceSpec s = genus2(1.0, 1.0, 1.0, 0.0, 0.0, 0.0);
    s.find_curve("c1")->length = -1.0;
    EXPECT_THROW(holonomy_from_spec(s), RealizationError);
}

TEST(Holonomy, CylinderGroups) {
    SurfaceSpec fc;
    fc.kind = SurfaceKind::FunnelCylinder;
    fc.cylinder_length = 1.3;
    const FuchsianGroup g = holonomy_from_spec(fc);
    ASSERT_EQ(g.generators.size(), 1u);
    EXPECT_NEAR(translation_length(g.generators[0]), 1.3, 1e-12);

    SurfaceSpec cc;
    cc.kind = SurfaceKind::CuspCylinder;
    const FuchsianGroup h = holonomy_from_spec(cc);
    ASSERT_EQ(h.generators.size(), 1u);
    EXPECT_EQ(classify(h.generators[0]), IsometryKind::Parabolic);
}

TEST(GroupBall, CyclicCensus) {
    SurfaceSpec fc;
    fc.kind = SurfaceKind::FunnelCylinder;
    fc.cylinder_length = 1.0;
    const FuchsianGroup g = holonomy_from_spec(fc);
    const GroupBall ball = group_ball(g, 2.5, reference_point());
    // base on the core geodesic: displacements k * 1.0, so {e, g^±1, g^±2}
    ASSERT_EQ(ball.elements.size(), 5u);
    EXPECT_NEAR(ball.elements[0].displacement, 0.0, 1e-12);
    EXPECT_NEAR(ball.elements[1].displacement, 1.0, 1e-9);
    EXPECT_NEAR(ball.elements[2].displacement, 1.0, 1e-9);
    EXPECT_NEAR(ball.elements[3].displacement, 2.0, 1e-9);
    EXPECT_NEAR(ball.elements[4].displacement, 2.0, 1e-9);
}

TEST(GroupBall, MatchesBruteForceEnumeration) {
    // oracle: dedup all words of length <= 8 in the one-holed-pants group and
    // keep those displacing the reference point at most R
    const SurfaceSpec y1 = one_holed_pants(1.5, 1.8, 2.0);
    const FuchsianGroup g = holonomy_from_spec(y1);
    const double R = 4.0;
    const PlanePoint ref = reference_point();

    std::vector<Isometry> step;
    for (const auto& m : g.generators) {
        step.push_back(m);
        step.push_back(m.inverse());
    }
    std::vector<Isometry> layer{Isometry::identity()}, all{Isometry::identity()};
    for (int d = 0; d < 8; ++d) {
        std::vector<Isometry> next;
        for (const auto& w : layer)
            for (const auto& s : step) {
                const Isometry m = w * s;
                bool fresh = true;
                for (const auto& a : all)
                    if (a.norm_dist(m) < 1e-7) { fresh = false; break; }
                if (fresh) {
                    all.push_back(m);
                    next.push_back(m);
                }
            }
        layer = std::move(next);
    }
    std::vector<double> oracle;
    for (const auto& m : all) {
        const double d = dist(ref, m.apply(ref));
        if (d <= R + 1e-12) oracle.push_back(d);
    }
    std::sort(oracle.begin(), oracle.end());

    const GroupBall ball = group_ball(g, R, ref);
    ASSERT_EQ(ball.elements.size(), oracle.size());
    for (size_t i = 0; i < oracle.size(); ++i)
        EXPECT_NEAR(ball.elements[i].displacement, oracle[i], 1e-9);
}

TEST(GroupBall, DisplacementMatchesPointDistance) {
    const SurfaceSpec s = genus2(1.0, 1.1, 1.2, 0.2, 0.0, -0.1);
    const FuchsianGroup g = holonomy_from_spec(s);
    const PlanePoint ref = reference_point();
    const GroupBall ball = group_ball(g, 3.0, ref);
    EXPECT_GT(ball.elements.size(), 1u);
    for (const auto& e : ball.elements)
        EXPECT_NEAR(e.displacement, dist(ref, e.element.apply(ref)), 1e-9);
    // sorted by displacement
    for (size_t i = 1; i < ball.elements.size(); ++i)
        EXPECT_LE(ball.elements[i - 1].displacement,
                  ball.elements[i].displacement + 1e-12);
}

TEST(QuotientDist, FoldsByDeckTransformations) {
    SurfaceSpec fc;
    fc.kind = SurfaceKind::FunnelCylinder;
    fc.cylinder_length = 1.0;
    fc.base.angle = kPi / 2.0;  // base tangent along the core geodesic
    const FuchsianGroup g = holonomy_from_spec(fc);
    const GroupBall ball = group_ball(g, 6.0, reference_point());
    const PlanePoint p = reference_point();
    const PlanePoint q = g.generators[0].apply(p);
    EXPECT_NEAR(quotient_dist(ball, p, q), 0.0, 1e-9);
    // a point 2.5 along the core geodesic is 0.5 from the orbit of p
    const PlanePoint m = flow(reference_tangent(), 2.5);
    EXPECT_NEAR(quotient_dist(ball, p, m), 0.5, 1e-9);
    EXPECT_LE(quotient_dist(ball, p, m), dist(p, m) + 1e-12);
}

TEST(InjectivityRadius, CyclicClosedForm) {
    // sinh(inj) = cosh(r) sinh(l/2) at distance r from the core of a cylinder
    for (int i = 0; i < 20; ++i) {
        const double l = uni(0.3, 2.0), r = uni(0.0, 2.0);
        SurfaceSpec fc;
        fc.kind = SurfaceKind::FunnelCylinder;
        fc.cylinder_length = l;
        fc.base.angle = kPi / 2.0;  // core geodesic on the imaginary axis
        const FuchsianGroup g = holonomy_from_spec(fc);
        const PlanePoint p = fermi_point(FermiFrame(), {0.0, r});
        const double expect = std::asinh(std::cosh(r) * std::sinh(l / 2.0));
        const auto inj = injectivity_radius(g, p, expect + 1.0);
        ASSERT_FALSE(inj.at_least);
        EXPECT_NEAR(inj.value, expect, 1e-9);
    }
}

TEST(InjectivityRadius, CapReportedWhenBallEmpty) {
    SurfaceSpec fc;
    fc.kind = SurfaceKind::FunnelCylinder;
    fc.cylinder_length = 4.0;
    const FuchsianGroup g = holonomy_from_spec(fc);
    const auto inj = injectivity_radius(g, reference_point(), 0.5);
    EXPECT_TRUE(inj.at_least);
    EXPECT_EQ(inj.value, 0.5);
}

TEST(ChabautyGap, ZeroOnIdenticalGroups) {
    const SurfaceSpec s = genus2(1.0, 1.1, 1.2, 0.2, 0.0, -0.1);
    const FuchsianGroup g = holonomy_from_spec(s);
    EXPECT_NEAR(chabauty_gap(g, g, 3.0), 0.0, 1e-12);
    EXPECT_NEAR(chabauty_gap_slack(g, g, 3.0), 0.0, 1e-12);
}

TEST(ChabautyGap, SmallConjugationSmallGap) {
    const SurfaceSpec s = genus2(1.0, 1.1, 1.2, 0.2, 0.0, -0.1);
    const FuchsianGroup g = holonomy_from_spec(s);
    double prev = INFINITY;
    for (int k = 2; k <= 8; k += 2) {
        const Isometry h = Isometry::unchecked(1.0, std::ldexp(1.0, -k), 0.0, 1.0);
        const double gap = chabauty_gap(g, g.conjugated(h), 3.0);
        EXPECT_LT(gap, prev);
        prev = gap;
    }
    EXPECT_LT(prev, 0.01);
}

TEST(ChabautyGap, FullRotationConjugationReturns) {
    // conjugating by a full 2*pi rotation about the reference point is the
    // identity on the group
    const SurfaceSpec s = genus2(1.0, 1.1, 1.2, 0.2, 0.0, -0.1);
    const FuchsianGroup g = holonomy_from_spec(s);
    const FuchsianGroup h = g.conjugated(Isometry::rotation(2.0 * kPi));
    EXPECT_NEAR(chabauty_gap(g, h, 3.0), 0.0, 1e-9);
}

TEST(ConjugationPath, EndpointsMatchTangents) {
    const SurfaceSpec s = genus2(1.0, 1.1, 1.2, 0.2, 0.0, -0.1);
    const FuchsianGroup g = holonomy_from_spec(s);
    const std::vector<UnitTangent> tangents{
        reference_tangent(), {{0.1, 1.05}, kPi / 2.0 + 0.1}};
    const auto path = conjugation_path(g, tangents);
    ASSERT_EQ(path.size(), 2u);
    EXPECT_NEAR(chabauty_gap(path[0], g, 2.0), 0.0, 1e-12);
    EXPECT_GT(chabauty_gap(path[1], g, 2.0), 0.0);
    EXPECT_THROW(conjugation_path(g, {}), DomainError);
}

TEST(Displacement, MatchesPointMapEvenForLargeEntries) {
    const Isometry big = Isometry::translation(40.0);
    const PlanePoint p{0.3, 2.0};
    EXPECT_NEAR(detail::displacement(big, p), dist(p, big.apply(p)), 1e-6);
    const Isometry huge = Isometry::translation(800.0);
    EXPECT_TRUE(std::isinf(detail::displacement(huge, p)));
}
