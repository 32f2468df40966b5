#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "bilap/errors.hpp"
#include "bilap/fullspace.hpp"

using namespace bilap;

namespace {

constexpr double kPi = std::numbers::pi;

double expansion(int n, const Index& z) { return mangad_expansion(n, z); }

}  // namespace

TEST(Expansion, AnisotropyFactorOnAxesAndDiagonals) {
    EXPECT_DOUBLE_EQ(anisotropy_factor({7, 0, 0}), 4.0);
    EXPECT_DOUBLE_EQ(anisotropy_factor({0, -3, 0}), 4.0);
    EXPECT_DOUBLE_EQ(anisotropy_factor({5, 5, 0}), 2.0);
    EXPECT_DOUBLE_EQ(anisotropy_factor({-2, 2, 0}), 2.0);
    EXPECT_THROW(anisotropy_factor({0, 0, 0}), DomainError);
}

TEST(Expansion, ThreeDimensionalAxisClosedForm) {
    for (int k : {5, 9, 40}) {
        const double want = -k / (8 * kPi) + 1.0 / (32 * kPi * k);
        EXPECT_NEAR(expansion(3, {k, 0, 0}), want, 1e-14 * k);
        EXPECT_NEAR(expansion(3, {0, 0, -k}), want, 1e-14 * k);
    }
}

TEST(Expansion, LatticeSymmetries) {
    for (int n : {2, 3}) {
        const Index z = n == 2 ? Index{7, -3, 0} : Index{7, -3, 2};
        const double f = expansion(n, z);
        EXPECT_DOUBLE_EQ(expansion(n, {-z[0], z[1], z[2]}), f);
        EXPECT_DOUBLE_EQ(expansion(n, {z[1], z[0], z[2]}), f);
        if (n == 3) {
            EXPECT_DOUBLE_EQ(expansion(n, {z[2], z[1], z[0]}), f);
        }
    }
    EXPECT_THROW(expansion(2, {0, 0, 0}), DomainError);
}

TEST(Expansion, AnisotropyFormsDifferOnlyInThatTerm) {
    const Index z{11, 4, 0};
    const double d = mangad_expansion(2, z, AnisotropyForm::as_printed) - mangad_expansion(2, z);
    EXPECT_NEAR(d, (1.0 - 1.0 / (192 * kPi)) * anisotropy_factor(z), 1e-10);
}

// Far from the source the expansion is biharmonic up to its truncation error.
TEST(Expansion, NearlyBiharmonicFarAway) {
    for (int n : {2, 3}) {
        const Index z = n == 2 ? Index{31, 17, 0} : Index{23, -11, 9};
        const double b = expansion_difference(n, z, DifferencePattern::bilaplacian(n));
        EXPECT_LT(std::abs(b), 1e-6);
        const double direct = apply_pattern(DifferencePattern::bilaplacian(n),
                                            [&](const Index& w) { return expansion(n, w); }, z);
        EXPECT_NEAR(direct, b, 1e-8);
    }
}

// With the pattern symbol equal to sigma the integrand is exp(2 pi i z.xi).
TEST(Oracle, BilaplacianPatternReproducesPointMass) {
    for (int n : {2, 3})
        for (const Index& z : {Index{0, 0, 0}, Index{1, 0, 0}, Index{2, 1, n == 3 ? 1 : 0}}) {
            const double v = difference_oracle(n, z, DifferencePattern::bilaplacian(n));
            const double want = z == Index{0, 0, 0} ? 1.0 : 0.0;
            EXPECT_NEAR(v, want, 1e-8) << n;
        }
}

TEST(Oracle, AgreesWithExpansionFarAway) {
    for (int n : {2, 3})
        for (const Index& z : shell_points(n, 2, 20, 40, 7)) {
            const auto p = DifferencePattern::axis_fourth(1);
            const double oracle = fourth_difference_oracle(n, z, p);
            const double exp = expansion_difference(n, z, p);
            EXPECT_NEAR(oracle, exp, 1e-2 * std::abs(exp)) << n;
        }
}

TEST(Oracle, RejectsNonIntegrablePatterns) {
    EXPECT_THROW(difference_oracle(2, {3, 0, 0}, DifferencePattern::product({{0, 1}, {1, 1}})), ParameterError);
}

TEST(OracleTable, ForwardDifferencesMatchDirectOracle) {
    const OracleTable t(2, 3);
    EXPECT_TRUE(t.covers({3, -3, 0}));
    EXPECT_FALSE(t.covers({4, 0, 0}));
    const auto p = DifferencePattern::product({{0, 1}, {0, 1}, {1, 1}});
    for (const Index& z : {Index{1, 2, 0}, Index{-2, 0, 0}})
        EXPECT_NEAR(t.forward_difference({2, 1, 0}, z), difference_oracle(2, z, p), 1e-9);
    const auto q = DifferencePattern::axis_fourth(0);
    EXPECT_NEAR(t.apply(q, {1, 1, 0}), fourth_difference_oracle(2, {1, 1, 0}, q), 1e-9);
}

TEST(Patterns, StencilsAndOrders) {
    const auto a = DifferencePattern::axis_fourth(0);
    EXPECT_EQ(a.order(), 4);
    double sum = 0.0;
    for (const auto& [off, w] : a.stencil()) sum += w * off[0] * off[0];
    EXPECT_EQ(sum, 0.0);  // fourth difference kills quadratics
    EXPECT_EQ(a.stencil().size(), 5u);
    // A y-difference acts in z = x - y as minus the opposite difference.
    const auto m = DifferencePattern::mixed({{0, 1}}, {{1, 1}});
    EXPECT_EQ(m.order(), 2);
    const auto ref = DifferencePattern::product({{0, 1}, {1, -1}}, -1.0);
    auto g = [](const Index& z) { return double(z[0] * z[0] * z[1] + 3 * z[1] * z[1] * z[1] - z[0]); };
    for (const Index& z : {Index{0, 0, 0}, Index{2, -5, 0}})
        EXPECT_DOUBLE_EQ(apply_pattern(m, g, z), apply_pattern(ref, g, z));
    EXPECT_THROW(DifferencePattern::product({{0, 2}}), ParameterError);
    DifferencePattern bad;
    bad.terms = {{1.0, {{0, 1}}}, {1.0, {{0, 1}, {1, 1}}}};
    EXPECT_THROW(bad.order(), ParameterError);
}

// The |z|^2 log(h/r) part of the rescaled kernel has vanishing fourth differences.
TEST(TildeGreen, FourthDifferencesIndependentOfR) {
    const double h = 1.0 / 32;
    const TildeGreen a(2, h, 0.25), b(2, h, 0.5);
    for (const Index& z : {Index{12, 5, 0}, Index{-20, 7, 0}}) {
        for (const auto& p : {DifferencePattern::axis_fourth(0), DifferencePattern::bilaplacian(2),
                              DifferencePattern::product({{0, 1}, {0, -1}, {1, 1}, {1, -1}})})
            EXPECT_NEAR(a.difference(z, p), b.difference(z, p), 1e-12 * std::abs(a.difference(z, p)));
    }
    EXPECT_NE(a.value({12, 5, 0}), b.value({12, 5, 0}));
    EXPECT_THROW(TildeGreen(2, h, 2 * h), ParameterError);
    EXPECT_THROW(a.value({1, 1, 0}), DomainError);
}

TEST(TildeGreen, IsAFundamentalSolutionNearTheSource) {
    for (int n : {2, 3}) {
        const double h = 0.125;
        const TildeGreen g(n, h, 0.5);
        const auto p = DifferencePattern::bilaplacian(n);
        EXPECT_NEAR(g.difference({0, 0, 0}, p) * std::pow(h, n), 1.0, 1e-8);
        EXPECT_NEAR(g.difference({1, 2, 0}, p) * std::pow(h, n), 0.0, 1e-8);
    }
}

TEST(ShellPoints, DrawnInsideTheShellDeterministically) {
    for (int n : {2, 3}) {
        const auto pts = shell_points(n, 25, 20, 60, 3);
        ASSERT_EQ(pts.size(), 25u);
        for (const auto& z : pts) {
            const double r = euclidean_norm(z, n);
            EXPECT_GE(r, 20.0);
            EXPECT_LE(r, 60.0);
            for (int i = 0; i < n; ++i) EXPECT_NE(z[std::size_t(i)], 0);
            if (n == 2) {
                EXPECT_EQ(z[2], 0);
            }
        }
        EXPECT_EQ(pts, shell_points(n, 25, 20, 60, 3));
        EXPECT_NE(pts, shell_points(n, 25, 20, 60, 4));
    }
    EXPECT_TRUE(shell_points(2, 0, 20, 60, 1).empty());
    EXPECT_THROW(shell_points(4, 3, 20, 60, 1), ParameterError);
    EXPECT_THROW(shell_points(2, 3, 20, 20.5, 1), ParameterError);
    EXPECT_THROW(shell_points(2, -1, 20, 60, 1), ParameterError);
}
