#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ldg/grid.hpp"
#include "ldg/parameters.hpp"
#include "ldg/state.hpp"
#include "support.hpp"

using namespace ldg;

TEST(Parameters, SPlusAtSpecialTemperatureIsBOverC) {
    const Parameters p = default_parameters();
    EXPECT_NEAR(p.s_plus, kDefaultB / kDefaultC, 1e-14);
    EXPECT_NEAR(p.s_plus, 1.8285714285714285, 1e-12);
    EXPECT_TRUE(p.at_special_temperature());
}

TEST(Parameters, SPlusAtVanishingTemperatureIsHalfBOverC) {
    const Parameters p = make_parameters(-1e-300, 6400, 3500, 0, 1, 0.05);
    EXPECT_DOUBLE_EQ(p.s_plus, 6400.0 / (2 * 3500.0));
}

TEST(Parameters, SPlusSolvesItsQuadratic) {
    for (double A : {-10.0, -1000.0, -3900.952, -2e4}) {
        const Parameters p = make_parameters(A, 6400, 3500, 0, 1, 0.05);
        const double s = p.s_plus;
        const double res = 2 * p.C * s * s - p.B * s + 3 * A;
        EXPECT_LE(std::abs(res), 1e-12 * (2 * p.C * s * s + p.B * s + 3 * std::abs(A)));
    }
}

TEST(Parameters, RejectsNonCoerciveAndBadRanges) {
    EXPECT_THROW(make_parameters(-1, 6400, 3500, -1.0, 1, 0.05), ConfigError);
    try {
        make_parameters(-1, 6400, 3500, -1.5, 1, 0.05);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("not coercive"), std::string::npos);
    }
    EXPECT_THROW(make_parameters(-1, 6400, 0, 0, 1, 0.05), ConfigError);
    EXPECT_THROW(make_parameters(-1, 0, 3500, 0, 1, 0.05), ConfigError);
    EXPECT_THROW(make_parameters(-1, 6400, 3500, 0, -1, 0.05), ConfigError);
    EXPECT_THROW(make_parameters(-1, 6400, 3500, 0, 1, 0.0), ConfigError);
    EXPECT_THROW(make_parameters(-1, 6400, 3500, 0, 1, 0.5), ConfigError);
    EXPECT_NO_THROW(make_parameters(-1, 6400, 3500, -0.99, 0, 0.49));
}

TEST(Grid, RequiresOddSizeAtLeast17) {
    EXPECT_THROW(Grid(16), ConfigError);
    EXPECT_THROW(Grid(18), ConfigError);
    EXPECT_THROW(Grid(15), ConfigError);
    const Grid g(17);
    EXPECT_DOUBLE_EQ(g.h(), 0.125);
    EXPECT_EQ(g.centre(), 8);
    EXPECT_DOUBLE_EQ(g.x(g.centre()), 0.0);
}

TEST(Grid, BoundaryMaskAndInteriorBlock) {
    const Grid g(21);
    int boundary = 0;
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) boundary += g.is_boundary(i, j);
    EXPECT_EQ(boundary, 4 * (g.n() - 1));
    EXPECT_EQ(g.interior_size(), static_cast<std::size_t>(19 * 19));
    EXPECT_EQ(g.interior_index(1, 1), 0u);
    EXPECT_EQ(g.interior_index(g.n() - 2, g.n() - 2), g.interior_size() - 1);
}

TEST(Grid, CornerWindowFlagsBoundaryNodesNearCorners) {
    const Grid g(41);  // h = 0.05
    EXPECT_TRUE(g.in_corner_window(0, 0, 0.1));
    EXPECT_TRUE(g.in_corner_window(2, 0, 0.1));
    EXPECT_FALSE(g.in_corner_window(3, 0, 0.1));
    EXPECT_FALSE(g.in_corner_window(1, 1, 0.1));
}

TEST(Grid, TrapezoidIntegratesBilinearExactly) {
    const Grid g(17);
    const ScalarField f = sample(g, [](double x, double y) { return 1 + x + y + x * y; });
    EXPECT_NEAR(integrate(g, f), 4.0, 1e-13);
}

TEST(Boundary, TangentDataValues) {
    const Parameters p = default_parameters();
    const double s = p.s_plus;
    EXPECT_DOUBLE_EQ(boundary_value(Component::q1, 0.0, 1.0, p), s / 2);
    EXPECT_DOUBLE_EQ(boundary_value(Component::q1, 0.0, -1.0, p), s / 2);
    EXPECT_DOUBLE_EQ(boundary_value(Component::q1, 1.0, 0.3, p), -s / 2);
    EXPECT_DOUBLE_EQ(boundary_value(Component::q1, -1.0, 1.0, p), 0.0);
    EXPECT_DOUBLE_EQ(boundary_value(Component::q2, 0.2, 1.0, p), 0.0);
    for (double t : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
        EXPECT_DOUBLE_EQ(boundary_value(Component::q3, t, 1.0, p), -s / 6);
        EXPECT_DOUBLE_EQ(boundary_value(Component::q3, -1.0, t, p), -s / 6);
    }
    EXPECT_THROW(boundary_value(Component::q1, 0.0, 0.0, p), std::invalid_argument);
    EXPECT_THROW(boundary_value(Component::q1, 1.5, 0.0, p), std::invalid_argument);
}

TEST(Boundary, CornerInterpolationIsContinuous) {
    const Parameters p = default_parameters(0, 1, 0.1);
    const double s = p.s_plus;
    const double e = p.epsilon;
    EXPECT_NEAR(boundary_value(Component::q1, 1 - e, 1, p), s / 2, 1e-12);
    EXPECT_NEAR(boundary_value(Component::q1, 1 - e - 1e-9, 1, p), s / 2, 1e-12);
    EXPECT_NEAR(boundary_value(Component::q1, 1 - e + 1e-9, 1, p), s / 2, 1e-7);
    EXPECT_NEAR(boundary_value(Component::q1, 1, 1 - e, p), -s / 2, 1e-12);
    EXPECT_NEAR(boundary_value(Component::q1, 1 - e / 2, 1, p), s / 4, 1e-12);
}

TEST(Reflection, ZeroEighthGivesZeroQ1) {
    const Grid g(17);
    State eighth(g);
    for (double& v : eighth.q2.values) v = 1.0;
    const State full = reflect_eighth_to_full(g, eighth);
    EXPECT_EQ(full.q1.max_abs(), 0.0);
}

TEST(Reflection, ParitiesAndNodalZeros) {
    const Grid g(21);
    State eighth(g);
    eighth.q1 = sample(g, [](double x, double y) { return x * x - y * y + 0.3 * x; });
    eighth.q2 = sample(g, [](double x, double y) { return x * y; });
    eighth.q3 = sample(g, [](double x, double y) { return 1 + x + 2 * y; });
    const State s = reflect_eighth_to_full(g, eighth);
    const int n = g.n();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            EXPECT_DOUBLE_EQ(s.q2(n - 1 - i, j), -s.q2(i, j));
            EXPECT_DOUBLE_EQ(s.q2(i, n - 1 - j), -s.q2(i, j));
            EXPECT_DOUBLE_EQ(s.q2(j, i), s.q2(i, j));
            EXPECT_DOUBLE_EQ(s.q1(n - 1 - i, j), s.q1(i, j));
            EXPECT_DOUBLE_EQ(s.q1(i, n - 1 - j), s.q1(i, j));
            EXPECT_DOUBLE_EQ(s.q1(j, i), -s.q1(i, j));
            EXPECT_DOUBLE_EQ(s.q3(j, i), s.q3(i, j));
            EXPECT_DOUBLE_EQ(s.q3(n - 1 - i, n - 1 - j), s.q3(i, j));
        }
    const SymmetryDefect d = symmetry_defect(g, s);
    EXPECT_EQ(d.d_diag, 0.0);
    EXPECT_EQ(d.d_axes, 0.0);
    // values in the open wedge are copied verbatim
    EXPECT_DOUBLE_EQ(s.q2(15, 13), eighth.q2(15, 13));
    EXPECT_DOUBLE_EQ(s.q1(15, 13), eighth.q1(15, 13));
}

TEST(Reflection, BoundaryDataIsSymmetric) {
    const Grid g(33);
    const Parameters p = default_parameters();
    const State b = make_state(g, p);
    const State r = reflect_eighth_to_full(g, b);
    EXPECT_LE(boundary_mismatch(g, p, r), 1e-15);
}

TEST(Symmetry, DefectDetectsBrokenSymmetry) {
    const Grid g(17);
    State s(g);
    s.q1(3, 3) = 0.5;
    s.q2(8, 2) = -0.25;
    const SymmetryDefect d = symmetry_defect(g, s);
    EXPECT_DOUBLE_EQ(d.d_diag, 0.5);
    EXPECT_DOUBLE_EQ(d.d_axes, 0.25);
}

TEST(Director, ViewRangesAndValues) {
    const Grid g(17);
    const Parameters p = default_parameters();
    const State s = testing_support::random_state(g, p, 7, p.s_plus);
    const DirectorView v = director_view(g, s);
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_GE(v.s_sq.values[k], 0.0);
        EXPECT_GT(v.theta.values[k], -std::numbers::pi / 2 - 1e-15);
        EXPECT_LE(v.theta.values[k], std::numbers::pi / 2);
        const double a = s.q1.values[k], b = s.q2.values[k];
        const double r = std::sqrt(v.s_sq.values[k]);
        EXPECT_NEAR(r * std::cos(2 * v.theta.values[k]), a, 1e-12);
        EXPECT_NEAR(r * std::sin(2 * v.theta.values[k]), b, 1e-12);
    }
    // director parallel to y = +-1 edges is horizontal
    EXPECT_NEAR(v.theta(g.centre(), g.n() - 1), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(v.theta(0, g.centre())), std::numbers::pi / 2, 1e-15);
}

TEST(Mirror, IsAnInvolutionPreservingBoundary) {
    const Grid g(17);
    const Parameters p = default_parameters();
    const State s = testing_support::random_state(g, p, 3, 1.0);
    const State m = mirror_state(s);
    EXPECT_EQ(max_abs_difference(mirror_state(m), s), 0.0);
    EXPECT_EQ(boundary_mismatch(g, p, m), 0.0);
    EXPECT_DOUBLE_EQ(m.q2(4, 5), -s.q2(4, 5));
}
