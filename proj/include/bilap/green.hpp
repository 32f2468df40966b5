#pragma once

// Clamped Green's function G_h = (Delta_h^2)^{-1} on Phi_h: G_h(., y) solves
// Delta_h^2 u = delta_{h,y}. Columns for non-interior sources are identically 0.

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "bilap/lattice.hpp"
#include "bilap/solver.hpp"

namespace bilap {

enum class GreenBackend { cg, dense };

struct GreenOptions {
    double tol = 1e-10;
    Preconditioner preconditioner = Preconditioner::laplace_squared;
    GreenBackend backend = GreenBackend::cg;
    std::filesystem::path cache_dir;  // empty: memory cache only
};

// Derivative selection for GreenFunction::derivatives.
enum DerivativeParts : unsigned {
    kGradX = 1u << 0,
    kHessX = 1u << 1,
    kGradXGradY = 1u << 2,
    kHessXGradY = 1u << 3,
    kHessXHessY = 1u << 4,
    kAllDerivatives = 0x1fu,
};

// All fields are functions of x for the fixed source y. Index layout, with
// i, j acting on x and k, l on y (y-Hessian entry (k, l) = D_{-k} D_l):
//   grad_x[i], hess_x[i*n + j], grad_x_grad_y[i*n + l],
//   hess_x_grad_y[(i*n + j)*n + l], hess_x_hess_y[((i*n + j)*n + k)*n + l].
struct GreenDerivatives {
    Index y{0, 0, 0};
    std::vector<GridFunction> grad_x;
    std::vector<GridFunction> hess_x;
    std::vector<GridFunction> grad_x_grad_y;
    std::vector<GridFunction> hess_x_grad_y;
    std::vector<GridFunction> hess_x_hess_y;
};

class GreenFunction {
public:
    explicit GreenFunction(const LatticeDomain& domain, GreenOptions opts = {});

    const LatticeDomain& domain() const { return domain_; }
    const GreenOptions& options() const { return opts_; }

    // G_h(., y) for interior y; DomainError otherwise. Thread-safe.
    std::shared_ptr<const GridFunction> column(const Index& y) const;
    // As column(), but the zero function for every non-interior y.
    std::shared_ptr<const GridFunction> column_or_zero(const Index& y) const;

    // G_h(x, y) with the zero conventions; never throws for lattice arguments.
    double value(const Index& x, const Index& y) const;

    GreenDerivatives derivatives(const Index& y, unsigned parts = kAllDerivatives) const;

    // Fill the column cache for all listed sources.
    void precompute(const std::vector<Index>& sources) const;

    std::size_t cached_columns() const;
    void clear_cache() const;

private:
    GridFunction compute_column(const Index& y) const;

    LatticeDomain domain_;
    GreenOptions opts_;
    std::shared_ptr<const GridFunction> zero_;
    mutable std::shared_ptr<const DenseBilaplacian> dense_;
    mutable std::mutex mutex_;
    mutable std::map<Index, std::shared_ptr<const GridFunction>> cache_;
};

// Dense G_h on interior points, G = A^{-1} / h^n with A the assembled Delta_h^2.
class GreenMatrix {
public:
    explicit GreenMatrix(const LatticeDomain& domain, std::size_t cap = kDefaultDenseCap);

    const LatticeDomain& domain() const { return domain_; }
    const Eigen::MatrixXd& matrix() const { return G_; }
    std::size_t size() const { return std::size_t(G_.rows()); }

    double operator()(const Index& x, const Index& y) const;

    // Lower-triangular L with L L^T = G, computed on first use.
    const Eigen::MatrixXd& cholesky_factor() const;

private:
    LatticeDomain domain_;
    Eigen::MatrixXd G_;
    mutable std::once_flag factor_once_;
    mutable Eigen::MatrixXd L_;
};

// One-shot conveniences (no shared cache).
GridFunction green_column(const LatticeDomain& domain, const Index& y, double tol = 1e-10);
double green_value(const LatticeDomain& domain, const Index& x, const Index& y);

}  // namespace bilap
