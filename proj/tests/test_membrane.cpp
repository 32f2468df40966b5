#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bilap/errors.hpp"
#include "bilap/membrane.hpp"
#include "bilap/operators.hpp"

using namespace bilap;

TEST(Membrane, DomainGeometry) {
    const LatticeDomain d = membrane_domain(2, 3);
    EXPECT_EQ(d.M(), 8);
    EXPECT_EQ(d.h(), 1.0);
    EXPECT_EQ(d.interior_count(), 49u);
    EXPECT_EQ(membrane_domain(3, 0).interior_count(), 1u);
    EXPECT_THROW(membrane_domain(2, -1), ParameterError);
}

TEST(Membrane, HamiltonianIsTheQuadraticForm) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int n : {2, 3}) {
        const LatticeDomain d = membrane_domain(n, 2);
        const auto psi = GridFunction::sample(d, d.interior_box(), [&](const Index&) { return u(rng); });
        const double H = hamiltonian(psi);
        EXPECT_NEAR(H, 0.5 * inner_product(bilaplacian(psi), psi), 1e-10 * H);
        EXPECT_NEAR(hamiltonian(2.0 * psi), 4.0 * H, 1e-10 * H);
    }
    const LatticeDomain one = membrane_domain(2, 0);
    auto spike = GridFunction::phi(one);
    spike.at(Index{1, 1, 0}) = 1.0;
    // Delta psi is -4 at the site and 1 at its four neighbours.
    EXPECT_DOUBLE_EQ(hamiltonian(spike), 0.5 * (16.0 + 4.0));
}

TEST(Membrane, SamplesAreReproducibleByIndex) {
    const LatticeDomain d = membrane_domain(2, 2);
    const FieldSampler s(d, 42);
    const auto a = s.draw(7), b = s.draw(7);
    EXPECT_EQ(a.index, 7u);
    EXPECT_EQ((a.psi - b.psi).max_abs(), 0.0);
    const auto many = s.draw_many(3, 6);
    EXPECT_EQ((many[1].psi - a.psi).max_abs(), 0.0);
    const Eigen::MatrixXd block = s.draw_block(5, 4);
    EXPECT_LT((block.col(2) - s.to_vector(a.psi)).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_GT((FieldSampler(d, 43).draw(7).psi - a.psi).max_abs(), 0.0);
    EXPECT_NEAR(a.energy, hamiltonian(a.psi), 1e-12 * a.energy);
    EXPECT_TRUE(a.psi.is_phi());
    const auto round = s.from_vector(s.to_vector(a.psi));
    EXPECT_EQ((round - a.psi).max_abs(), 0.0);
}

TEST(Membrane, SampleCovarianceMatchesGreen) {
    const LatticeDomain d = membrane_domain(2, 1);
    const FieldSampler s(d, 5);
    const std::size_t m = 200000;
    const Eigen::MatrixXd X = s.draw_block(0, m);
    const Eigen::MatrixXd C = X * X.transpose() / double(m);
    const Eigen::MatrixXd& G = s.green().matrix();
    const double gmax = G.cwiseAbs().maxCoeff();
    // Entry-wise standard error is at most sqrt(2/m) * max G.
    EXPECT_LT((C - G).cwiseAbs().maxCoeff(), 6.0 * std::sqrt(2.0 / double(m)) * gmax);
    const Eigen::VectorXd mean = X.rowwise().mean();
    EXPECT_LT(mean.cwiseAbs().maxCoeff(), 6.0 * std::sqrt(gmax / double(m)));
}

// The Gaussian density with covariance G equals the Gibbs weight exp(-H).
TEST(Membrane, DensityRatioEqualsEnergyDifference) {
    for (int n : {2, 3}) {
        const FieldSampler s(membrane_domain(n, 2), 9);
        for (std::uint64_t k = 0; k < 5; ++k) {
            const auto a = s.draw(k), b = s.draw(k + 100);
            EXPECT_NEAR(log_density_ratio(s, a.psi, b.psi), b.energy - a.energy, 1e-8 * (1 + std::abs(a.energy)));
            EXPECT_NEAR(gaussian_log_density(s, a.psi) - gaussian_log_density(s, b.psi), b.energy - a.energy,
                        1e-8 * (1 + std::abs(a.energy)));
        }
    }
}

TEST(Membrane, IncrementVarianceFromGreen) {
    const LatticeDomain d = membrane_domain(2, 3);
    const GreenMatrix G(d);
    const Index x{2, 3, 0}, y{5, 4, 0};
    const double want = G(x, x) - 2 * G(x, y) + G(y, y);
    EXPECT_NEAR(increment_variance(d, x, y), want, 1e-9 * want);
    const GreenFunction g(d);
    EXPECT_NEAR(increment_variance(g, x, y), want, 1e-9 * want);
    EXPECT_EQ(increment_variance(d, x, x), 0.0);
}

TEST(Membrane, ContinuityBound) {
    EXPECT_NEAR(continuity_bound(2, 8, 2.0), 4.0 * std::log(6.0), 1e-14);
    EXPECT_EQ(continuity_bound(3, 8, 2.0), 2.0);
    const auto r = continuity_report(2, {2, 4});
    EXPECT_EQ(r.grids, (std::vector<int>{2, 4}));
    for (double c : r.constant_per_grid) EXPECT_GT(c, 0.0);
}

TEST(Membrane, SingleSitePositivityIsOneHalf) {
    const auto t = entropic_repulsion_mc(2, {0}, 40000, 3);
    ASSERT_EQ(t.rows.size(), 1u);
    const auto& r = t.rows[0];
    EXPECT_EQ(r.hits_plus + r.hits_minus, r.samples);
    EXPECT_NEAR(r.p_plus, 0.5, 3.0 * std::sqrt(0.25 / 40000.0));
    EXPECT_LE(r.ci_low, r.p_plus);
    EXPECT_GE(r.ci_high, r.p_plus);
}

// psi and -psi have the same law, so the two one-sided events are equally likely.
TEST(Membrane, PositiveAndNegativeEventsBalance) {
    const auto t = entropic_repulsion_mc(2, {1}, 200000, 4);
    const auto& r = t.rows[0];
    const double se = std::sqrt(r.p_plus * (1 - r.p_plus) / double(r.samples));
    EXPECT_NEAR(r.p_plus, r.p_minus, 5.0 * std::sqrt(2.0) * se);
    EXPECT_LT(r.p_plus, 0.5);
}

TEST(Membrane, WilsonInterval) {
    const auto [lo, hi] = wilson_interval(0, 100);
    EXPECT_NEAR(lo, 0.0, 1e-15);
    EXPECT_NEAR(hi, 0.0370, 1e-3);
    const auto [a, b] = wilson_interval(50, 100);
    EXPECT_NEAR(a + b, 1.0, 1e-12);
    EXPECT_NEAR(b - a, 2 * 0.0962, 2e-3);
}

TEST(Membrane, HolderQuantilesStructure) {
    const auto q = holder_quantiles(2, 4, 0.5, 400, 1);
    EXPECT_EQ(q.values.size(), 2u);
    EXPECT_LE(q.values[0], q.values[1]);
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_LE(q.low[k], q.values[k]);
        EXPECT_GE(q.high[k], q.values[k]);
    }
}
