#pragma once

// Finite-difference calculus on (hZ)^n with implicit zero extension.
//
// Matrix-valued results are stored row-major as n*n GridFunctions, entry
// (i, j) at position i*n + j.

#include <vector>

#include "bilap/lattice.hpp"

namespace bilap {

struct StencilTerm {
    Index offset;
    double coeff;
};
using Stencil = std::vector<StencilTerm>;

// out(x) = sum_t coeff_t * f(x + offset_t). The output box is the smallest box
// outside of which out vanishes identically.
GridFunction apply_stencil(const GridFunction& f, const Stencil& s);

// Stencil of an operator given by composition (convolution) of two stencils.
Stencil compose(const Stencil& a, const Stencil& b);

// Stencils with unit spacing; multiply coefficients by h^-k as needed.
Stencil difference_stencil(int axis, int sign);
Stencil laplacian_stencil(int n);
Stencil bilaplacian_stencil(int n);  // laplacian_stencil composed with itself

struct MultiIndex {
    Index alpha{0, 0, 0};
    int order() const { return alpha[0] + alpha[1] + alpha[2]; }
};

// (tau_i^k f)(x) = f(x + k h e_i).
GridFunction shift(const GridFunction& f, int axis, int steps = 1);

// sign = +1: D_i f(x) = (f(x + h e_i) - f(x)) / h
// sign = -1: D_{-i} f(x) = (f(x) - f(x - h e_i)) / h
GridFunction forward_diff(const GridFunction& f, int axis, int sign = +1);

std::vector<GridFunction> gradient(const GridFunction& f, int sign = +1);

// Entry (i, j) = D_{-i} D_j f; in general not symmetric.
std::vector<GridFunction> hessian(const GridFunction& f);

GridFunction laplacian(const GridFunction& f);

// Fused 13-point (n = 2) or 25-point (n = 3) stencil.
GridFunction bilaplacian(const GridFunction& f);
// laplacian(laplacian(f)).
GridFunction bilaplacian_composed(const GridFunction& f);

// D^alpha_{+h} (sign = +1) or D^alpha_{-h} (sign = -1).
GridFunction multi_derivative(const GridFunction& f, const MultiIndex& alpha, int sign = +1);

// 1/h^n at y, zero elsewhere. y must be interior.
GridFunction delta_function(const LatticeDomain& domain, const Index& y);

// (f, g)_{L^2} = h^n sum f g over all of (hZ)^n.
double inner_product(const GridFunction& f, const GridFunction& g);
double inner_product(const std::vector<GridFunction>& f, const std::vector<GridFunction>& g);

// sum_i D_{sign i} g_i.
GridFunction divergence(const std::vector<GridFunction>& g, int sign);

// sum_{i,j} D_{-j} D_i g_ij: the formal adjoint of the Hessian, so that
// (double_divergence(g), phi) = (g, hessian(phi)).
GridFunction double_divergence(const std::vector<GridFunction>& g);

// Pointwise Frobenius norm of a vector/matrix field.
GridFunction pointwise_norm(const std::vector<GridFunction>& g);

}  // namespace bilap
