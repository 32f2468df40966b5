#pragma once

// Tensor B-spline interpolation of lattice functions.
//
// (J^mu u)(x) = sum_z u(z) prod_i N^{mu_i}((x_i - z_i)/h). Continuous
// derivatives commute with backward differences:
//   D^alpha J^mu u = J^{mu - alpha} (D_{-h}^alpha u),   alpha_i < mu_i.

#include <utility>

#include "bilap/lattice.hpp"
#include "bilap/operators.hpp"

namespace bilap {

// N^m(x); support [0, m), partition of unity. m >= 1.
double bspline(int m, double x);

// k-th derivative of the piecewise polynomial N^m (k <= m - 1), right-continuous at knots.
double bspline_derivative(int m, double x, int k = 1);

// (d/dx N^m(x), N^{m-1}(x) - N^{m-1}(x - 1)); m >= 2.
std::pair<double, double> spline_derivative_identity_check(int m, double x);

class SplineOperator {
public:
    SplineOperator(int n, const Index& mu, double h);
    // J_h = J^{(3, ..., 3)}.
    static SplineOperator cubic(int n, double h);

    int dim() const { return n_; }
    const Index& mu() const { return mu_; }
    double h() const { return h_; }

    double eval(const GridFunction& u, const Point& x) const;
    // D^alpha (J^mu u)(x) from the piecewise polynomial; alpha_i < mu_i.
    double derivative(const GridFunction& u, const MultiIndex& alpha, const Point& x) const;

    // Exact L^2(Q_s(center)) norm of D^alpha J^mu u (cell-wise Gauss-Legendre).
    double l2_norm(const GridFunction& u, const MultiIndex& alpha, const Point& center, double s) const;

    SplineOperator lowered(const MultiIndex& alpha) const;

private:
    // Lattice index range [first_i, last_i] contributing at x.
    void contributing_range(const Point& x, Index& first, Index& last) const;

    int n_;
    Index mu_;
    double h_;
};

double interp_eval(const SplineOperator& op, const GridFunction& u, const Point& x);
double interp_derivative(const SplineOperator& op, const GridFunction& u, const MultiIndex& alpha, const Point& x);

// (D^alpha J^mu u(x), J^{mu - alpha}(D_{-h}^alpha u)(x)).
std::pair<double, double> commutation_check(const Index& mu, const MultiIndex& alpha, const GridFunction& u,
                                            const Point& x);

// (d_i d_j J_h f(x), J^{(3..3) - e_i - e_j}(tau_{-j} (hessian f)_{ij})(x)). With the
// Hessian convention D_{-i} D_j, the shift tau_{-j} turns it into D_{-i} D_{-j}.
std::pair<double, double> hessian_bridge_check(const GridFunction& f, int i, int j, const Point& x);

// Value of the cell z + [-h/2, h/2)^n containing x. DomainError outside the
// open set (box)_pc.
double pc_interp_eval(const GridFunction& u, const Point& x);

}  // namespace bilap
