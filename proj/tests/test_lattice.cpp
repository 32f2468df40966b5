#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bilap/errors.hpp"
#include "bilap/lattice.hpp"
#include "bilap/operators.hpp"

using namespace bilap;

namespace {

GridFunction random_phi(const LatticeDomain& d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return GridFunction::sample(d, d.interior_box(), [&](const Index&) { return u(rng); });
}

}  // namespace

TEST(LatticeDomain, PointCounts) {
    for (int n : {2, 3})
        for (int M : {2, 3, 8}) {
            const LatticeDomain d(n, M);
            EXPECT_EQ(d.lattice_count(), std::size_t(std::pow(M + 1, n)));
            EXPECT_EQ(d.interior_count(), std::size_t(std::pow(M - 1, n)));
            EXPECT_DOUBLE_EQ(d.h(), 1.0 / M);
        }
}

TEST(LatticeDomain, RejectsInvalidParameters) {
    EXPECT_THROW(LatticeDomain(2, 1), ParameterError);
    EXPECT_THROW(LatticeDomain(4, 8), ParameterError);
    EXPECT_THROW(LatticeDomain(1, 8), ParameterError);
}

TEST(LatticeDomain, UnitSpacingKeepsIndexGeometry) {
    const LatticeDomain d = LatticeDomain::unit_spacing(2, 6);
    EXPECT_DOUBLE_EQ(d.h(), 1.0);
    EXPECT_EQ(d.interior_count(), 25u);
}

TEST(BoundaryDistance, Examples) {
    EXPECT_DOUBLE_EQ(boundary_distance(LatticeDomain(2, 8), Index{4, 4, 0}), 0.5);
    EXPECT_DOUBLE_EQ(boundary_distance(LatticeDomain(2, 8), Index{0, 3, 0}), 0.0);
    EXPECT_DOUBLE_EQ(boundary_distance(LatticeDomain(3, 6), Index{1, 2, 3}), 1.0 / 6.0);
    EXPECT_THROW(boundary_distance(LatticeDomain(2, 8), Index{9, 3, 0}), DomainError);
}

TEST(BoundaryDistance, ZeroExactlyOffTheInterior) {
    for (int n : {2, 3}) {
        const LatticeDomain d(n, 6);
        d.lattice_box().for_each([&](const Index& z) {
            EXPECT_EQ(boundary_distance(d, z) == 0.0, !d.is_interior(z));
            int m = d.M();
            for (int i = 0; i < n; ++i) m = std::min({m, z[std::size_t(i)], d.M() - z[std::size_t(i)]});
            EXPECT_DOUBLE_EQ(boundary_distance(d, z), d.h() * m);
        });
    }
}

TEST(CubeRegion, PointCountMatchesFormula) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> r(0.0, 0.4);
    for (int n : {2, 3})
        for (int t = 0; t < 50; ++t) {
            const double h = 1.0 / 16.0;
            const CubeRegion q{Index{8, 8, n == 3 ? 8 : 0}, r(rng)};
            const int k = int(std::floor(q.r / h + 1e-12));
            EXPECT_EQ(q.half_width(h), k);
            EXPECT_EQ(q.point_count(n, h), std::size_t(std::pow(2 * k + 1, n)));
            std::size_t counted = 0;
            Box::cube(n, -8, 24).for_each([&](const Index& y) { counted += q.contains(y, n, h); });
            EXPECT_EQ(counted, q.point_count(n, h));
        }
}

TEST(DiscreteNorm, Examples) {
    const LatticeDomain d4(2, 4);
    const auto ones = GridFunction::sample(d4, d4.interior_box(), [](const Index&) { return 1.0; });
    EXPECT_NEAR(discrete_norm(ones, 2.0, Region::whole()), 0.75, 1e-15);
    const auto zero = GridFunction::phi(d4);
    for (double p : {1.0, 2.0, 3.5, kInfinity}) EXPECT_EQ(discrete_norm(zero, p, Region::whole()), 0.0);
    const LatticeDomain d8(2, 8);
    const auto spike = GridFunction::sample(d8, Box{2, {3, 5, 0}, {3, 5, 0}}, [](const Index&) { return 1.0; });
    EXPECT_NEAR(discrete_norm(spike, 1.0, Region::whole()), 1.0 / 64.0, 1e-17);
    EXPECT_THROW(discrete_norm(spike, 0.5, Region::whole()), ParameterError);
    EXPECT_EQ(discrete_norm(spike, kInfinity, Region::whole()), 1.0);
}

TEST(DiscreteNorm, HomogeneousAndMonotoneInRegion) {
    std::mt19937_64 rng(5);
    const LatticeDomain d(2, 16);
    const auto f = random_phi(d, rng);
    const Index c{8, 8, 0};
    for (double p : {1.0, 2.0, 4.0, kInfinity}) {
        EXPECT_NEAR(discrete_norm(-3.7 * f, p, Region::whole()), 3.7 * discrete_norm(f, p, Region::whole()), 1e-12);
        double prev = 0.0;
        for (double r : {0.1, 0.2, 0.3, 0.5}) {
            const double v = discrete_norm(f, p, Region::cube(CubeRegion{c, r}));
            EXPECT_GE(v, prev);
            prev = v;
        }
    }
}

// On a region of total mass V = h^n |R|: ||f||_p <= V^{1/p - 1/q} ||f||_q for
// p <= q, and the lattice inverse inequality ||f||_q <= h^{n(1/q - 1/p)} ||f||_p.
TEST(DiscreteNorm, HolderAndInverseInequalitiesOnCountingMeasure) {
    std::mt19937_64 rng(11);
    for (int n : {2, 3}) {
        const LatticeDomain d(n, n == 2 ? 16 : 8);
        const double h = d.h();
        for (int t = 0; t < 20; ++t) {
            const auto f = random_phi(d, rng);
            const CubeRegion q{Index{4, 4, n == 3 ? 4 : 0}, 0.2};
            const Region R = Region::cube(q);
            const double V = std::pow(h, n) * double(q.point_count(n, h));
            for (double p : {1.0, 2.0, 3.0})
                for (double qq : {p, 4.0, kInfinity}) {
                    if (qq < p) continue;
                    const double inv_q = std::isinf(qq) ? 0.0 : 1.0 / qq;
                    const double fp = discrete_norm(f, p, R), fq = discrete_norm(f, qq, R);
                    EXPECT_LE(fp, std::pow(V, 1.0 / p - inv_q) * fq * (1 + 1e-12));
                    EXPECT_LE(fq, std::pow(h, n * (inv_q - 1.0 / p)) * fp * (1 + 1e-12));
                }
        }
    }
}

TEST(HolderSeminorm, Examples) {
    const LatticeDomain d4(2, 4);
    const auto lin = GridFunction::sample(d4, d4.lattice_box(), [&](const Index& z) { return d4.h() * z[0]; });
    EXPECT_NEAR(holder_seminorm(lin, 1.0, Region::lattice(d4)), 1.0, 1e-14);
    const auto cst = GridFunction::sample(d4, d4.lattice_box(), [](const Index&) { return 2.5; });
    EXPECT_EQ(holder_seminorm(cst, 0.5, Region::lattice(d4)), 0.0);
    const LatticeDomain d8(2, 8);
    const Index z{4, 4, 0};
    const auto spike = GridFunction::sample(d8, Box{2, z, z}, [](const Index&) { return 1.0; });
    EXPECT_NEAR(holder_seminorm(spike, 1.0, Region::cube(CubeRegion{z, d8.h()})), 8.0, 1e-12);
    EXPECT_THROW(holder_seminorm(spike, 1.0, Region::cube(CubeRegion{z, 0.0})), DomainError);
    EXPECT_THROW(holder_seminorm(spike, 0.0, Region::whole()), ParameterError);
}

// ||u||_{L^2} <= lambda_min^{-1/2} ||grad u||_{L^2} for u in Phi_h, with
// lambda_min = 4 n sin^2(pi h / 2) / h^2 the least Dirichlet eigenvalue of -Delta_h.
TEST(Poincare, ZeroDataFunctionsObeyTheSpectralBound) {
    std::mt19937_64 rng(17);
    double worst = 0.0;
    for (int M : {8, 16, 32}) {
        const LatticeDomain d(2, M);
        const double h = d.h();
        const double lambda = 2 * 4.0 * std::pow(std::sin(std::numbers::pi * h / 2), 2) / (h * h);
        const double r = aligned_radius(M / 2, h);
        const Region Q = Region::cube(CubeRegion{Index{M / 2, M / 2, 0}, r});
        for (int t = 0; t < 100; ++t) {
            const auto u = random_phi(d, rng);
            const double ratio = discrete_norm(u, 2.0, Q) / (r * discrete_norm(gradient(u, +1), 2.0, Q));
            EXPECT_LE(ratio, 1.0 / (r * std::sqrt(lambda)) * (1 + 1e-12));
            worst = std::max(worst, ratio);
        }
    }
    EXPECT_GT(worst, 0.0);
}

TEST(AlignedRadius, IsHalfIntegerMultipleBelow) {
    const double h = 0.125;
    EXPECT_DOUBLE_EQ(aligned_radius_below(0.3, h), 1.5 * h);
    EXPECT_DOUBLE_EQ(aligned_radius_below(0.32, h), 2.5 * h);
    EXPECT_DOUBLE_EQ(aligned_radius_below(2.5 * h, h), 2.5 * h);
    EXPECT_DOUBLE_EQ(aligned_radius(3, h), 3.5 * h);
}

TEST(GridFunction, ZeroExtensionAndPhiFlag) {
    const LatticeDomain d(2, 8);
    std::mt19937_64 rng(1);
    const auto u = random_phi(d, rng);
    EXPECT_TRUE(u.is_phi());
    EXPECT_EQ(u(Index{0, 3, 0}), 0.0);
    EXPECT_EQ(u(Index{-5, 40, 0}), 0.0);
    const auto wide = GridFunction::sample(d, d.lattice_box(), [](const Index&) { return 1.0; });
    EXPECT_FALSE(wide.is_phi());
}
