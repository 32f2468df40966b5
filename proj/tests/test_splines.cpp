#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bilap/errors.hpp"
#include "bilap/operators.hpp"
#include "bilap/splines.hpp"

using namespace bilap;

namespace {

GridFunction random_phi(const LatticeDomain& d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return GridFunction::sample(d, d.interior_box(), [&](const Index&) { return u(rng); });
}

Point random_point(int n, std::mt19937_64& rng, double lo = -0.1, double hi = 1.1) {
    std::uniform_real_distribution<double> u(lo, hi);
    Point x{0, 0, 0};
    for (int i = 0; i < n; ++i) x[std::size_t(i)] = u(rng);
    return x;
}

void expect_close(std::pair<double, double> p, double tol) {
    EXPECT_NEAR(p.first, p.second, tol * std::max(1.0, std::abs(p.second)));
}

}  // namespace

TEST(BSpline, Examples) {
    EXPECT_EQ(bspline(1, 0.0), 1.0);
    EXPECT_EQ(bspline(1, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(bspline(2, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(bspline(2, 0.5), 0.5);
    EXPECT_DOUBLE_EQ(bspline(3, 1.0), 0.5);
    EXPECT_DOUBLE_EQ(bspline(3, 1.5), 0.75);
    EXPECT_NEAR(bspline(4, 2.0), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(bspline(4, 1.0), 1.0 / 6.0, 1e-15);
    EXPECT_EQ(bspline(3, -0.01), 0.0);
    EXPECT_EQ(bspline(3, 3.0), 0.0);
    EXPECT_THROW(bspline(0, 0.5), ParameterError);
    EXPECT_THROW(bspline_derivative(3, 0.5, 3), ParameterError);
}

TEST(BSpline, PartitionOfUnityAndSymmetry) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int m = 1; m <= 6; ++m)
        for (int t = 0; t < 200; ++t) {
            const double x = u(rng);
            double s = 0.0;
            for (int k = -10; k <= 10; ++k) s += bspline(m, x - k);
            EXPECT_NEAR(s, 1.0, 1e-12);
            const double y = std::abs(x);
            if (y > 0 && y < m) {
                EXPECT_NEAR(bspline(m, y), bspline(m, m - y), 1e-12);
            }
        }
}

TEST(BSpline, DerivativeIdentity) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 7.0);
    for (int m = 2; m <= 6; ++m)
        for (int t = 0; t < 200; ++t) expect_close(spline_derivative_identity_check(m, u(rng)), 1e-11);
    EXPECT_THROW(spline_derivative_identity_check(1, 0.5), ParameterError);
}

TEST(BSpline, DerivativeMatchesFiniteDifference) {
    for (double x : {0.3, 1.7, 2.4}) {
        const double e = 1e-6;
        EXPECT_NEAR(bspline_derivative(4, x, 1), (bspline(4, x + e) - bspline(4, x - e)) / (2 * e), 1e-7);
    }
}

TEST(SplineInterp, PreservesConstants) {
    for (int n : {2, 3}) {
        const LatticeDomain d(n, 8);
        const auto c = GridFunction::sample(d, d.lattice_box().grown(4), [](const Index&) { return 2.5; });
        const SplineOperator J = SplineOperator::cubic(n, d.h());
        std::mt19937_64 rng(3);
        for (int t = 0; t < 50; ++t) {
            const Point x = random_point(n, rng, 0.0, 1.0);
            EXPECT_NEAR(J.eval(c, x), 2.5, 1e-14);
            EXPECT_NEAR(J.derivative(c, MultiIndex{{1, 0, 0}}, x), 0.0, 1e-10);
        }
    }
}

// D^alpha J^mu u = J^{mu-alpha}(D_{-h}^alpha u); equivalently the forward
// differences evaluated at x - h alpha.
TEST(SplineInterp, CommutesWithBackwardDifferences) {
    std::mt19937_64 rng(4);
    for (int n : {2, 3}) {
        const LatticeDomain d(n, n == 2 ? 16 : 8);
        const double h = d.h();
        const auto u = random_phi(d, rng);
        const Index mu = n == 2 ? Index{3, 4, 1} : Index{3, 3, 4};
        const SplineOperator J(n, mu, h);
        std::uniform_int_distribution<int> a(0, 3);
        for (int t = 0; t < 100; ++t) {
            MultiIndex alpha;
            for (int i = 0; i < n; ++i) alpha.alpha[std::size_t(i)] = a(rng) % mu[std::size_t(i)];
            const Point x = random_point(n, rng);
            const auto [lhs, rhs] = commutation_check(mu, alpha, u, x);
            const double scale = std::pow(h, -alpha.order());
            EXPECT_NEAR(lhs, rhs, 1e-11 * scale);
            EXPECT_NEAR(lhs, J.derivative(u, alpha, x), 1e-11 * scale);
            Point shifted = x;
            for (int i = 0; i < n; ++i) shifted[std::size_t(i)] -= h * alpha.alpha[std::size_t(i)];
            EXPECT_NEAR(lhs, J.lowered(alpha).eval(multi_derivative(u, alpha, +1), shifted), 1e-11 * scale);
        }
    }
}

TEST(SplineInterp, HessianBridge) {
    std::mt19937_64 rng(5);
    for (int n : {2, 3}) {
        const LatticeDomain d(n, 8);
        const auto f = random_phi(d, rng);
        for (int t = 0; t < 60; ++t) {
            const Point x = random_point(n, rng);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const auto [lhs, rhs] = hessian_bridge_check(f, i, j, x);
                    EXPECT_NEAR(lhs, rhs, 1e-11 * std::pow(d.h(), -2));
                }
        }
    }
    const LatticeDomain d(2, 8);
    EXPECT_THROW(hessian_bridge_check(GridFunction::phi(d), 2, 0, {0.5, 0.5, 0}), ParameterError);
}

TEST(SplineInterp, LocalSupport) {
    const LatticeDomain d(2, 16);
    const double h = d.h();
    const Index z{5, 9, 0};
    const auto spike = GridFunction::sample(d, Box{2, z, z}, [](const Index&) { return 1.0; });
    const SplineOperator J = SplineOperator::cubic(2, h);
    // Support of the z-term is z h + [0, 3h)^2.
    EXPECT_GT(J.eval(spike, {(z[0] + 1.5) * h, (z[1] + 1.5) * h, 0}), 0.0);
    EXPECT_EQ(J.eval(spike, {(z[0] - 0.01) * h, (z[1] + 1.0) * h, 0}), 0.0);
    EXPECT_EQ(J.eval(spike, {(z[0] + 3.0) * h, (z[1] + 1.0) * h, 0}), 0.0);
    EXPECT_NEAR(J.eval(spike, {(z[0] + 1.5) * h, (z[1] + 1.5) * h, 0}), 0.75 * 0.75, 1e-15);
}

// J is convolution with a unit-mass non-negative kernel, so ||J u|| <= ||u||_h.
// Per axis the Gram symbol of N^3 is at least sum_k sinc^6(1/2 + k) = 2/15.
TEST(SplineInterp, NormEquivalenceWithLatticeNorm) {
    std::mt19937_64 rng(6);
    for (int n : {2, 3})
        for (int M : {4, 8}) {
            const LatticeDomain d(n, M);
            const SplineOperator J = SplineOperator::cubic(n, d.h());
            for (int t = 0; t < 5; ++t) {
                const auto u = random_phi(d, rng);
                const double cont = J.l2_norm(u, MultiIndex{}, {0.5, 0.5, 0.5}, 0.5 + 4 * d.h());
                const double disc = discrete_norm(u, 2.0, Region::whole());
                EXPECT_LE(cont, disc * (1 + 1e-12));
                EXPECT_GE(cont, std::pow(2.0 / 15.0, 0.5 * n) * disc * (1 - 1e-12));
            }
        }
}

TEST(SplineInterp, L2NormOfConstantOverCube) {
    const LatticeDomain d(2, 8);
    const auto c = GridFunction::sample(d, d.lattice_box().grown(4), [](const Index&) { return 3.0; });
    const SplineOperator J = SplineOperator::cubic(2, d.h());
    EXPECT_NEAR(J.l2_norm(c, MultiIndex{}, {0.5, 0.5, 0}, 0.25), 3.0 * 0.5, 1e-13);
    EXPECT_NEAR(J.l2_norm(c, MultiIndex{{0, 1, 0}}, {0.5, 0.5, 0}, 0.25), 0.0, 1e-10);
}

TEST(PiecewiseConstant, HalfOpenCells) {
    const LatticeDomain d(2, 4);
    const double h = d.h();
    const auto u = GridFunction::sample(d, d.lattice_box(), [](const Index& z) { return 10.0 * z[0] + z[1]; });
    EXPECT_EQ(pc_interp_eval(u, {2 * h, 3 * h, 0}), 23.0);
    EXPECT_EQ(pc_interp_eval(u, {2.5 * h, 3.49 * h, 0}), 33.0);
    EXPECT_EQ(pc_interp_eval(u, {1.51 * h, 2.4 * h, 0}), 22.0);
    EXPECT_EQ(pc_interp_eval(u, {-0.49 * h, 0.0, 0}), 0.0);
    EXPECT_THROW(pc_interp_eval(u, {-0.5 * h, 0.0, 0}), DomainError);
    EXPECT_THROW(pc_interp_eval(u, {4.5 * h, 0.0, 0}), DomainError);
    EXPECT_THROW(pc_interp_eval(u, {-0.51 * h, 0.0, 0}), DomainError);
}
