#pragma once

// Full-space lattice Green's function of Delta_1^2 on Z^n (n = 2, 3): the
// large-|z| expansion, a quadrature oracle for its finite differences, and the
// rescaled kernel on (hZ)^n used as a comparison function near the source.

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "bilap/lattice.hpp"

namespace bilap {

inline constexpr double kEulerGamma = 0.57721566490153286060651209;
inline constexpr double kExpansionValidityRadius = 5.0;

// Coefficient of 4(z1^4 + z2^4)/|z|^4 in the n = 2 expansion. The Fourier
// transform of the Laurent term of 1/sigma gives 1/(192 pi); the bare factor
// (coefficient 1) is kept as an alternative for comparison.
enum class AnisotropyForm { corrected, as_printed };

// 4(z1^4 + z2^4)/|z|^4 (n = 2). Equals 4 on the axes and 2 on the diagonals.
double anisotropy_factor(const Index& z);

// Closed-form expansion of F(z); z != 0 (DomainError otherwise).
double mangad_expansion(int n, const Index& z, AnisotropyForm form = AnisotropyForm::corrected);

// A linear combination of products of unit-lattice differences, sign +1 for
// D_{+a} g(z) = g(z + e_a) - g(z), sign -1 for D_{-a} g(z) = g(z) - g(z - e_a).
struct DifferenceFactor {
    int axis;
    int sign;
};

struct DifferenceTerm {
    double coeff = 1.0;
    std::vector<DifferenceFactor> factors;
};

struct DifferencePattern {
    std::vector<DifferenceTerm> terms;

    static DifferencePattern product(std::vector<DifferenceFactor> factors, double coeff = 1.0);
    // (D_a D_{-a})^2: symbol 16 sin^4(pi xi_a).
    static DifferencePattern axis_fourth(int axis);
    // Delta_1^2 = sum_{a,b} D_a D_{-a} D_b D_{-b}: symbol sigma.
    static DifferencePattern bilaplacian(int n);
    // Pattern in z = x - y of a product of x-differences and y-differences.
    // A y-difference D_{+l} acts in z as -D_{-l}, and D_{-l} as -D_{+l}.
    static DifferencePattern mixed(const std::vector<DifferenceFactor>& x_factors,
                                   const std::vector<DifferenceFactor>& y_factors);

    // Common order of all terms (ParameterError if they differ).
    int order() const;
    int max_axis() const;

    // Weighted shifts: pattern g(z) = sum_k w_k g(z + s_k).
    std::vector<std::pair<Index, double>> stencil() const;
};

// Applies the pattern to any function on Z^n.
template <class G>
double apply_pattern(const DifferencePattern& p, G&& g, const Index& z) {
    double s = 0.0;
    for (const auto& [off, w] : p.stencil()) s += w * g(z + off);
    return s;
}

struct OracleOptions {
    int nodes = 12;            // Gauss-Legendre nodes per panel
    double tol = 1e-10;        // absolute tolerance on the integral
    int min_levels = 8;
    int max_levels = 64;
};

// Integral over [-1/2, 1/2]^n of p(xi) exp(2 pi i z.xi) / sigma(xi), with p the
// symbol of the pattern. Requires order > 4 - n so the integrand is integrable.
// Throws AccuracyError when the dyadic refinement stalls above tol.
double difference_oracle(int n, const Index& z, const DifferencePattern& pattern, const OracleOptions& opts = {});

// Same, for fourth-order patterns.
double fourth_difference_oracle(int n, const Index& z, const DifferencePattern& pattern,
                                const OracleOptions& opts = {});

// Pattern applied to mangad_expansion, term by term; the |z|^2 contribution is
// differenced in exact integer arithmetic.
double expansion_difference(int n, const Index& z, const DifferencePattern& pattern,
                            AnisotropyForm form = AnisotropyForm::corrected);

// D_+^beta F(z) for every z in [-R, R]^n and every multi-index beta with
// min_order <= |beta| <= 4, computed in one pass of the oracle quadrature.
class OracleTable {
public:
    OracleTable(int n, int radius, const OracleOptions& opts = {});

    int dim() const { return n_; }
    int radius() const { return radius_; }
    int min_order() const { return min_order_; }

    bool covers(const Index& z) const;
    double forward_difference(const Index& beta, const Index& z) const;
    // Pattern at z; every stencil point must be covered.
    double apply(const DifferencePattern& p, const Index& z) const;
    double achieved_error() const { return achieved_; }

private:
    std::size_t slot(const Index& beta, const Index& z) const;

    int n_;
    int radius_;
    int min_order_;
    int span_;  // 2 * radius + 1
    double achieved_ = 0.0;
    std::vector<double> values_;
};

// `count` lattice points drawn uniformly (by volume) from the shell
// rmin <= |z| <= rmax from a seeded generator, all coordinates nonzero so no
// point lies on a coordinate hyperplane.
std::vector<Index> shell_points(int n, int count, double rmin, double rmax, std::uint64_t seed);

// Full-space kernel on (hZ)^n with Delta_h^2 G~(., y) = delta_{h,y}:
//   n = 3: G~(x, y) = h F(z),   n = 2: G~(x, y) = h^2 (F(z) + |z|^2 log(h/r) / (8 pi)),
// z = (x - y)/h. Requires r >= 4h.
class TildeGreen {
public:
    TildeGreen(int n, double h, double r, int table_radius = int(kExpansionValidityRadius) + 4,
               const OracleOptions& opts = {});

    int dim() const { return n_; }
    double h() const { return h_; }
    double r() const { return r_; }

    // Pointwise value; only for |z| >= validity radius (DomainError otherwise).
    double value(const Index& z) const;

    // Pattern applied in z, in physical scaling h^{4-n-order}. Uses the
    // oracle table when the stencil stays within it, otherwise the expansion.
    double difference(const Index& z, const DifferencePattern& pattern) const;

    const OracleTable& table() const;

private:
    int n_;
    double h_;
    double r_;
    int table_radius_;
    OracleOptions opts_;
    mutable std::shared_ptr<OracleTable> table_;
};

}  // namespace bilap
