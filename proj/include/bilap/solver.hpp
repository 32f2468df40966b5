#pragma once

// Solving Delta_h^2 u = f for u in Phi_h.
//
// Interior vectors are ordered like the storage of GridFunction::phi: row-major
// over [1, M-1]^n with the last axis fastest.

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <string>

#include "bilap/errors.hpp"
#include "bilap/lattice.hpp"

namespace bilap {

inline constexpr std::size_t kDefaultDenseCap = 5000;

enum class SolveMethod { cg, dense };
enum class Preconditioner { jacobi, laplace_squared, none };

std::string to_string(SolveMethod m);
std::string to_string(Preconditioner p);

struct SolveOptions {
    double tol = 1e-10;           // relative residual in the unweighted l2 norm
    long max_iterations = 0;      // 0 selects 50 * M^2
    Preconditioner preconditioner = Preconditioner::jacobi;
    SolveMethod method = SolveMethod::cg;
    std::size_t dense_cap = kDefaultDenseCap;
};

struct SolveReport {
    long iterations = 0;
    double residual = 0.0;
    SolveMethod method = SolveMethod::cg;
};

struct SolveResult {
    GridFunction u;
    SolveReport report;
};

// CG hit its iteration cap. Carries the iterate with the smallest residual.
class ConvergenceError : public NumericError {
public:
    ConvergenceError(const std::string& what, GridFunction best, SolveReport report)
        : NumericError(what), best_(std::move(best)), report_(report) {}
    const GridFunction& best_iterate() const { return best_; }
    const SolveReport& report() const { return report_; }

private:
    GridFunction best_;
    SolveReport report_;
};

// Matrix-free Delta_h^2 restricted to interior vectors (the fused stencil on a
// zero-padded scratch array).
class InteriorBilaplacian {
public:
    explicit InteriorBilaplacian(const LatticeDomain& domain);

    const LatticeDomain& domain() const { return domain_; }
    std::size_t size() const { return size_; }
    double diagonal() const { return diagonal_; }

    void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;

private:
    LatticeDomain domain_;
    std::size_t size_;
    int padded_extent_;
    double scale_;
    double diagonal_;
    std::vector<std::ptrdiff_t> offsets_;
    std::vector<double> coeffs_;
    mutable std::vector<double> scratch_;
};

// Inverse of the squared Dirichlet Laplacian on the interior, diagonalized by
// a per-axis discrete sine transform. Exact inverse of L^2 (not of Delta_h^2,
// which differs near the boundary), used only as a preconditioner.
class LaplaceSquaredInverse {
public:
    explicit LaplaceSquaredInverse(const LatticeDomain& domain);
    void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;

private:
    void transform(Eigen::VectorXd& v) const;

    LatticeDomain domain_;
    int m_;  // M - 1
    Eigen::MatrixXd sine_;
    Eigen::VectorXd inv_eigen_;
    mutable Eigen::VectorXd work_;
};

// Interior vector <-> Phi_h function.
Eigen::VectorXd to_interior_vector(const GridFunction& f);
GridFunction from_interior_vector(const LatticeDomain& domain, const Eigen::VectorXd& v);

SolveResult solve_bilaplacian(const LatticeDomain& domain, const GridFunction& f,
                              const SolveOptions& opts = {});

// Dense matrix of Delta_h^2 on interior points (column j = Delta_h^2 e_j).
Eigen::MatrixXd assemble_bilaplacian_matrix(const LatticeDomain& domain,
                                            std::size_t cap = kDefaultDenseCap);

// Cholesky factorization of the assembled matrix, reusable across right-hand sides.
class DenseBilaplacian {
public:
    explicit DenseBilaplacian(const LatticeDomain& domain, std::size_t cap = kDefaultDenseCap);
    const LatticeDomain& domain() const { return domain_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    // A^{-1} as a dense matrix.
    Eigen::MatrixXd inverse() const;

private:
    LatticeDomain domain_;
    Eigen::MatrixXd matrix_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

GridFunction dense_solve(const LatticeDomain& domain, const GridFunction& f,
                         std::size_t cap = kDefaultDenseCap);

// ||hessian(u)||^2_{L^2} summed over every lattice point where it is nonzero.
double energy_norm(const GridFunction& u);

}  // namespace bilap
