#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "bilap/errors.hpp"
#include "bilap/operators.hpp"
#include "bilap/solver.hpp"

using namespace bilap;

namespace {

GridFunction random_phi(const LatticeDomain& d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return GridFunction::sample(d, d.interior_box(), [&](const Index&) { return u(rng); });
}

double rel_sup(const GridFunction& a, const GridFunction& b) { return (a - b).max_abs() / b.max_abs(); }

}  // namespace

TEST(Solver, SingleInteriorPoint) {
    const LatticeDomain d2(2, 2), d3(3, 2);
    const auto u2 = solve_bilaplacian(d2, delta_function(d2, {1, 1, 0})).u;
    const auto u3 = solve_bilaplacian(d3, delta_function(d3, {1, 1, 1})).u;
    EXPECT_NEAR(u2(Index{1, 1, 0}), 0.25 / 20.0, 1e-15);
    EXPECT_NEAR(u3(Index{1, 1, 1}), 0.5 / 42.0, 1e-15);
    const auto A = assemble_bilaplacian_matrix(d2);
    ASSERT_EQ(A.rows(), 1);
    EXPECT_DOUBLE_EQ(A(0, 0), 20.0 * 16.0);
}

TEST(Solver, RoundTripFromKnownSolution) {
    std::mt19937_64 rng(1);
    for (int n : {2, 3})
        for (int M : {5, 8}) {
            const LatticeDomain d(n, M);
            const auto u = random_phi(d, rng);
            const auto f = bilaplacian(u).interior_part();
            EXPECT_LT(rel_sup(solve_bilaplacian(d, f).u, u), 1e-7);
            EXPECT_LT(rel_sup(dense_solve(d, f), u), 1e-10);
        }
}

TEST(Solver, CgMatchesDenseForEveryPreconditioner) {
    std::mt19937_64 rng(2);
    const LatticeDomain d(2, 12);
    const auto f = random_phi(d, rng);
    const auto ref = dense_solve(d, f);
    for (auto p : {Preconditioner::jacobi, Preconditioner::laplace_squared, Preconditioner::none}) {
        SolveOptions o;
        o.preconditioner = p;
        o.tol = 1e-12;
        const auto r = solve_bilaplacian(d, f, o);
        EXPECT_LT(rel_sup(r.u, ref), 1e-8) << to_string(p);
        EXPECT_LE(r.report.residual, 1e-12);
        EXPECT_TRUE(r.u.is_phi());
    }
    SolveOptions dense;
    dense.method = SolveMethod::dense;
    EXPECT_LT(rel_sup(solve_bilaplacian(d, f, dense).u, ref), 1e-12);
}

TEST(Solver, AssembledMatrixIsSymmetricPositiveDefinite) {
    for (int n : {2, 3}) {
        const LatticeDomain d(n, n == 2 ? 7 : 5);
        const auto A = assemble_bilaplacian_matrix(d);
        EXPECT_LT((A - A.transpose()).cwiseAbs().maxCoeff(), 1e-9 * A.cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
        EXPECT_DOUBLE_EQ(A(0, 0), InteriorBilaplacian(d).diagonal());
    }
}

TEST(Solver, MatrixFreeOperatorMatchesAssembled) {
    std::mt19937_64 rng(3);
    const LatticeDomain d(3, 5);
    const InteriorBilaplacian op(d);
    const auto A = assemble_bilaplacian_matrix(d);
    const auto u = random_phi(d, rng);
    const Eigen::VectorXd x = to_interior_vector(u);
    Eigen::VectorXd y(x.size());
    op.apply(x, y);
    EXPECT_LT((y - A * x).cwiseAbs().maxCoeff(), 1e-9 * y.cwiseAbs().maxCoeff());
    EXPECT_LT(rel_sup(from_interior_vector(d, y), bilaplacian(u).interior_part()), 1e-12);
}

// P must invert the squared Dirichlet Laplacian exactly.
TEST(Solver, LaplaceSquaredPreconditionerInvertsSquaredLaplacian) {
    std::mt19937_64 rng(4);
    for (int n : {2, 3}) {
        const LatticeDomain d(n, 6);
        const LaplaceSquaredInverse P(d);
        const auto u = random_phi(d, rng);
        const auto L2u = laplacian(laplacian(u).interior_part()).interior_part();
        Eigen::VectorXd back(Eigen::Index(d.interior_count()));
        P.apply(to_interior_vector(L2u), back);
        EXPECT_LT(rel_sup(from_interior_vector(d, back), u), 1e-10);
    }
}

TEST(Solver, EnergyEstimate) {
    std::mt19937_64 rng(5);
    for (int n : {2, 3}) {
        const LatticeDomain d(n, 6);
        const auto f = random_phi(d, rng);
        const auto u = dense_solve(d, f);
        const double energy = energy_norm(u);
        EXPECT_NEAR(energy, inner_product(f, u), 1e-10 * energy);
        // Energy minimisation: any other v in Phi_h has a larger functional.
        const auto v = u + 0.01 * random_phi(d, rng);
        EXPECT_GT(0.5 * energy_norm(v) - inner_product(f, v), 0.5 * energy - inner_product(f, u));
    }
}

TEST(Solver, IterationCapRaisesWithBestIterate) {
    std::mt19937_64 rng(6);
    const LatticeDomain d(2, 16);
    SolveOptions o;
    o.max_iterations = 2;
    try {
        solve_bilaplacian(d, random_phi(d, rng), o);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_GT(e.report().residual, o.tol);
        EXPECT_TRUE(e.best_iterate().is_phi());
    }
}

TEST(Solver, Errors) {
    const LatticeDomain d(2, 8);
    const LatticeDomain other(2, 6);
    EXPECT_THROW(solve_bilaplacian(d, GridFunction::phi(other)), Error);
    SolveOptions bad;
    bad.tol = -1.0;
    EXPECT_THROW(solve_bilaplacian(d, GridFunction::phi(d), bad), ParameterError);
    EXPECT_THROW(assemble_bilaplacian_matrix(LatticeDomain(3, 20)), SizeError);
    const auto zero = solve_bilaplacian(d, GridFunction::phi(d));
    EXPECT_EQ(zero.u.max_abs(), 0.0);
}
