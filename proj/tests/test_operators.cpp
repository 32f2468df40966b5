#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "bilap/errors.hpp"
#include "bilap/lattice.hpp"
#include "bilap/operators.hpp"

using namespace bilap;

namespace {

GridFunction random_on(const LatticeDomain& d, const Box& b, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return GridFunction::sample(d, b, [&](const Index&) { return u(rng); });
}

double diff_max(const GridFunction& a, const GridFunction& b) { return (a - b).max_abs(); }

double stencil_coeff(const Stencil& s, const Index& off) {
    double c = 0.0;
    for (const auto& t : s)
        if (t.offset == off) c += t.coeff;
    return c;
}

}  // namespace

TEST(Stencils, BilaplacianCentreAndNeighbourCoefficients) {
    const Stencil b2 = bilaplacian_stencil(2);
    EXPECT_EQ(stencil_coeff(b2, {0, 0, 0}), 20.0);
    EXPECT_EQ(stencil_coeff(b2, {1, 0, 0}), -8.0);
    EXPECT_EQ(stencil_coeff(b2, {1, 1, 0}), 2.0);
    EXPECT_EQ(stencil_coeff(b2, {0, 2, 0}), 1.0);
    EXPECT_EQ(b2.size(), 13u);
    const Stencil b3 = bilaplacian_stencil(3);
    EXPECT_EQ(stencil_coeff(b3, {0, 0, 0}), 42.0);
    EXPECT_EQ(stencil_coeff(b3, {0, 0, 1}), -12.0);
    EXPECT_EQ(b3.size(), 25u);
    for (const Stencil* s : {&b2, &b3}) {
        double sum = 0.0;
        for (const auto& t : *s) sum += t.coeff;
        EXPECT_EQ(sum, 0.0);
    }
}

TEST(Stencils, ComposeIsConvolution) {
    for (int n : {2, 3}) {
        const Stencil c = compose(laplacian_stencil(n), laplacian_stencil(n));
        const Stencil b = bilaplacian_stencil(n);
        std::map<Index, double> cm, bm;
        for (const auto& t : c) cm[t.offset] += t.coeff;
        for (const auto& t : b) bm[t.offset] += t.coeff;
        for (auto it = cm.begin(); it != cm.end();) it = it->second == 0.0 ? cm.erase(it) : std::next(it);
        EXPECT_EQ(cm, bm);
    }
}

TEST(Differences, LinearAndQuadraticExamples) {
    const LatticeDomain d(2, 8);
    const double h = d.h();
    const auto q = GridFunction::sample(d, d.lattice_box(), [&](const Index& z) { return std::pow(h * z[0], 2); });
    const auto fwd = forward_diff(q, 0, +1);
    const auto bwd = forward_diff(q, 0, -1);
    d.interior_box().for_each([&](const Index& z) {
        if (z[0] == d.M() - 1) return;
        EXPECT_NEAR(fwd(z), 2 * h * z[0] + h, 1e-13);
        EXPECT_NEAR(bwd(z), 2 * h * z[0] - h, 1e-13);
    });
    const auto hs = hessian(q);
    const auto lap = laplacian(q);
    const Index c{4, 4, 0};
    EXPECT_NEAR(hs[0](c), 2.0, 1e-11);
    EXPECT_NEAR(hs[1](c), 0.0, 1e-11);
    EXPECT_NEAR(lap(c), 2.0, 1e-11);
}

TEST(Differences, HessianEntryIsBackwardOfForward) {
    std::mt19937_64 rng(2);
    const LatticeDomain d(3, 6);
    const auto f = random_on(d, d.interior_box(), rng);
    const auto H = hessian(f);
    ASSERT_EQ(H.size(), 9u);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            EXPECT_LT(diff_max(H[std::size_t(i * 3 + j)], forward_diff(forward_diff(f, j, +1), i, -1)), 1e-9);
}

TEST(Differences, ProductRule) {
    std::mt19937_64 rng(3);
    const LatticeDomain d(2, 10);
    const auto f = random_on(d, d.lattice_box(), rng);
    const auto g = random_on(d, d.lattice_box(), rng);
    const auto fg = GridFunction::sample(d, d.lattice_box(), [&](const Index& z) { return f(z) * g(z); });
    for (int i = 0; i < 2; ++i) {
        const auto lhs = forward_diff(fg, i);
        const auto tf = shift(f, i, 1);
        const auto dg = forward_diff(g, i);
        const auto df = forward_diff(f, i);
        lhs.box().for_each([&](const Index& z) {
            EXPECT_NEAR(lhs(z), tf(z) * dg(z) + g(z) * df(z), 1e-11);
        });
    }
}

TEST(Differences, SummationByParts) {
    std::mt19937_64 rng(4);
    for (int n : {2, 3}) {
        const LatticeDomain d(n, 7);
        const auto f = random_on(d, d.interior_box(), rng);
        const auto g = random_on(d, d.lattice_box(), rng);
        for (int i = 0; i < n; ++i) {
            const double lhs = inner_product(forward_diff(f, i, +1), g);
            const double rhs = -inner_product(f, forward_diff(g, i, -1));
            EXPECT_NEAR(lhs, rhs, 1e-10 * (1 + std::abs(lhs)));
        }
    }
}

TEST(Differences, DoubleDivergenceIsAdjointOfHessian) {
    std::mt19937_64 rng(5);
    for (int n : {2, 3}) {
        const LatticeDomain d(n, 6);
        const auto phi = random_on(d, d.interior_box(), rng);
        std::vector<GridFunction> g;
        for (int k = 0; k < n * n; ++k) g.push_back(random_on(d, d.lattice_box(), rng));
        const double lhs = inner_product(double_divergence(g), phi);
        const double rhs = inner_product(g, hessian(phi));
        EXPECT_NEAR(lhs, rhs, 1e-9 * (1 + std::abs(lhs)));
    }
}

// For finitely supported u: ||hess u||^2 = ||Delta u||^2 = (Delta^2 u, u).
TEST(Differences, HessianEnergyEqualsBilaplacianForm) {
    std::mt19937_64 rng(6);
    for (int n : {2, 3}) {
        const LatticeDomain d(n, 6);
        const auto u = random_on(d, d.interior_box(), rng);
        const auto H = hessian(u);
        const double e_hess = inner_product(H, H);
        const auto L = laplacian(u);
        const double e_lap = inner_product(L, L);
        const double e_form = inner_product(bilaplacian(u), u);
        EXPECT_NEAR(e_hess, e_form, 1e-10 * e_form);
        EXPECT_NEAR(e_lap, e_form, 1e-10 * e_form);
    }
}

TEST(Bilaplacian, FusedMatchesComposed) {
    std::mt19937_64 rng(7);
    for (int n : {2, 3})
        for (int M : {4, 8}) {
            const LatticeDomain d(n, M);
            const auto u = random_on(d, d.interior_box(), rng);
            const auto a = bilaplacian(u), b = bilaplacian_composed(u);
            EXPECT_LT(diff_max(a, b), 1e-12 * a.max_abs());
            EXPECT_EQ(a.box(), d.interior_box().grown(2));
        }
}

TEST(Bilaplacian, OfDeltaHasScaledStencil) {
    const LatticeDomain d(2, 8);
    const double h = d.h();
    const Index y{4, 4, 0};
    const auto b = bilaplacian(delta_function(d, y));
    EXPECT_NEAR(b(y), 20.0 / std::pow(h, 6), 1e-6);
    EXPECT_NEAR(b(Index{5, 4, 0}), -8.0 / std::pow(h, 6), 1e-6);
    EXPECT_EQ(b(Index{7, 4, 0}), 0.0);
}

TEST(Bilaplacian, AnnihilatesCubics) {
    const LatticeDomain d(2, 12);
    const double h = d.h();
    const auto c = GridFunction::sample(d, d.lattice_box(), [&](const Index& z) {
        const double x = h * z[0], y = h * z[1];
        return 1 + x - 2 * y + x * y + 3 * x * x * y - y * y * y;
    });
    const auto b = bilaplacian(c);
    Box inner = d.lattice_box();
    inner.lo = {2, 2, 0};
    inner.hi = {10, 10, 0};
    inner.for_each([&](const Index& z) { EXPECT_NEAR(b(z), 0.0, 1e-6); });
}

TEST(Delta, MassAndDomain) {
    const LatticeDomain d(3, 4);
    const Index y{1, 2, 3};
    const auto f = delta_function(d, y);
    const auto one = GridFunction::sample(d, d.lattice_box(), [](const Index&) { return 1.0; });
    EXPECT_NEAR(inner_product(f, one), 1.0, 1e-14);
    EXPECT_THROW(delta_function(d, Index{0, 2, 2}), DomainError);
}

TEST(MultiDerivative, MatchesIteratedDifferences) {
    std::mt19937_64 rng(8);
    const LatticeDomain d(3, 6);
    const auto f = random_on(d, d.interior_box(), rng);
    const MultiIndex a{{1, 0, 2}};
    for (int sign : {+1, -1}) {
        const auto ref = forward_diff(forward_diff(forward_diff(f, 0, sign), 2, sign), 2, sign);
        EXPECT_LT(diff_max(multi_derivative(f, a, sign), ref), 1e-6 * ref.max_abs());
    }
}

TEST(Shift, MovesValues) {
    const LatticeDomain d(2, 4);
    const auto f = GridFunction::sample(d, d.interior_box(), [](const Index& z) { return 10.0 * z[0] + z[1]; });
    const auto s = shift(f, 1, -1);
    EXPECT_EQ(s(Index{2, 3, 0}), f(Index{2, 2, 0}));
    EXPECT_EQ(s(Index{2, 1, 0}), 0.0);
}
