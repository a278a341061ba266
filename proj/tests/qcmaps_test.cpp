#include <cmath>

#include <gtest/gtest.h>

#include "hypflow/qcmaps.hpp"

using namespace hypflow;

TEST(Gudermann, InverseRoundTrip) {
    for (double x = -3.0; x <= 3.0; x += 0.25)
        EXPECT_NEAR(inv_gudermann(gudermann(x)), x, 1e-9);
    EXPECT_NEAR(gudermann(0.0), 0.0, 1e-15);
}

TEST(CylinderMap, Constants) {
    const CylinderMap m = cylinder_map(0.3);
    EXPECT_EQ(m.ell, 0.3);
    EXPECT_NEAR(m.delta, std::log(2.0 / 0.3), 1e-15);
    EXPECT_NEAR(m.lstar, 2.0 * 0.3 / kPi, 1e-15);
    EXPECT_NEAR(m.band_modulus, 1.0 / m.lstar - 1.0, 1e-12);
    EXPECT_NEAR(m.collar_modulus, gudermann(m.delta) / 0.3, 1e-12);
    EXPECT_THROW(cylinder_map(0.5), DomainError);
    EXPECT_THROW(cylinder_map(0.0), DomainError);
}

TEST(CylinderMap, BoundaryBehavior) {
    const CylinderMap m = cylinder_map(0.2);
    // the horocycle s = 0 maps to the equidistant at the collar depth
    EXPECT_NEAR(m.target_fermi(0.3, 0.0).rho, m.delta, 1e-12);
    // the truncation horocycle maps to the core geodesic
    EXPECT_NEAR(m.target_fermi(0.3, std::log(m.lstar)).rho, 0.0, 1e-9);
    // t is carried proportionally to arc length along the core
    EXPECT_NEAR(m.target_fermi(0.25, 1.0).nu, 0.25 * m.ell, 1e-15);
    // beyond the truncation horocycle is out of domain
    EXPECT_THROW(m.target_fermi(0.0, std::log(m.lstar) - 0.1), DomainError);
}

TEST(CylinderMap, PiecesAgreeAtTheSeam) {
    for (double ell : {0.4, 0.25, 0.1}) {
        const CylinderMap m = cylinder_map(ell);
        const FermiCoords above = m.target_fermi(0.5, 1e-9);
        const FermiCoords below = m.target_fermi(0.5, -1e-9);
        EXPECT_NEAR(above.rho, below.rho, 1e-5);
        EXPECT_NEAR(above.nu, below.nu, 1e-12);
    }
}

TEST(CylinderMap, ExplicitPieceRatioOracle) {
    // the explicit piece stretches each horocycle onto an equidistant curve;
    // its dilatation is exactly the circumference ratio
    for (double ell : {0.4, 0.25, 0.1, 0.01}) {
        const CylinderMap m = cylinder_map(ell);
        for (double s : {0.0, 0.5, 1.5, 3.0}) {
            const double ratio = explicit_piece_ratio(m, s);
            EXPECT_GE(ratio, 1.0 - 1e-9);
            EXPECT_LE(ratio, 1.0 + ell * ell / 4.0 + 1e-9) << "ell=" << ell;
            if (s >= 0.05) {
                const double local = detail::local_dilatation(m, 0.5, s);
                EXPECT_NEAR(local, ratio, 2e-3) << "ell=" << ell << " s=" << s;
            }
        }
    }
}

TEST(CylinderMap, GridDilatationWithinQuadraticBound) {
    for (double ell : {0.4, 0.25, 0.1}) {
        const CylinderMap m = cylinder_map(ell);
        const double whole = estimate_dilatation(m, 0.05, MapPiece::Whole);
        EXPECT_LE(whole, 1.0 + 2.0 * ell * ell + 1e-3) << "ell=" << ell;
        const double expl = estimate_dilatation(m, 0.05, MapPiece::Explicit);
        EXPECT_LE(expl, 1.0 + ell * ell / 4.0 + 1e-3) << "ell=" << ell;
    }
}

TEST(Regions, PinchedLegsGetCollarModel) {
    const auto regions = bmms_regions({0.3, 1.0, 0.0}, {0});
    ASSERT_EQ(regions.size(), 3u);
    EXPECT_EQ(regions[0].mode, RegionMode::CollarModel);
    EXPECT_NEAR(regions[0].band_lo, 2.0 * 0.3 / kPi, 1e-15);
    EXPECT_NEAR(regions[0].depth, std::log(2.0 / 0.3), 1e-15);
    EXPECT_NEAR(regions[0].dilatation_bound, 1.0 + 2.0 * 0.09, 1e-12);
    EXPECT_EQ(regions[1].mode, RegionMode::Isometric);
    EXPECT_NEAR(regions[1].width, collar_eta(1.0).eta, 1e-15);
    EXPECT_EQ(regions[2].mode, RegionMode::Isometric);
    EXPECT_EQ(regions[2].width, kCuspEta);
}

TEST(Regions, BoundMatchesClosedForm) {
    const auto regions = bmms_regions({0.3, 0.2, 1.0}, {0, 1});
    const double eps = 0.3;
    EXPECT_NEAR(regions_bound(regions),
                (1.0 + 2.0 * eps * eps) * (1.0 + 2.0 * eps * eps), 1e-12);
    EXPECT_NEAR(regions_bound(bmms_regions({1.0, 1.0, 1.0}, {})), 1.0, 1e-15);
    EXPECT_THROW(bmms_regions({1.0, 1.0, 1.0}, {0}), DomainError);
    EXPECT_THROW(bmms_regions({0.3, 1.0, 1.0}, {4}), DomainError);
}

TEST(Regions, EstimateRespectsMode) {
    const auto regions = bmms_regions({0.2, 1.0, 0.0}, {0});
    EXPECT_EQ(estimate_dilatation(regions[1], 0.05), 1.0);
    const double collar = estimate_dilatation(regions[0], 0.05);
    EXPECT_LE(collar, regions[0].dilatation_bound + 1e-3);
    // the cusp leg stays isometric when it is not being pinched
    EXPECT_EQ(estimate_dilatation(regions[2], 0.05), 1.0);
}
