#pragma once

// The membrane model: the centred Gaussian field on the lattice with zero data
// outside the interior and covariance G_h, i.e. Gibbs density proportional to
// exp(-H(psi)), H(psi) = 1/2 h^n sum |Delta_h psi|^2 over all lattice points.

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "bilap/green.hpp"
#include "bilap/lattice.hpp"
#include "bilap/verify.hpp"

namespace bilap {

// H(psi) = 1/2 h^n sum_x |Delta_h psi(x)|^2; equals 1/2 (Delta_h^2 psi, psi) on Phi_h.
double hamiltonian(const GridFunction& psi);

// V_N = [-N, N]^n with unit spacing: the lattice [0, 2N+2]^n, whose interior
// holds the (2N+1)^n sites of V_N. N = 0 is the single-site model.
LatticeDomain membrane_domain(int n, int N);

struct FieldSample {
    std::uint64_t seed = 0;
    std::uint64_t index = 0;  // counter of the normal stream that produced psi
    GridFunction psi;
    double energy = 0.0;  // H(psi)
};

// psi = L xi with L L^T = G (dense Cholesky) and xi i.i.d. standard normal.
// Sample k draws xi from a generator seeded by (seed, k) alone, so any batch
// of indices is reproducible independent of order and thread scheduling.
class FieldSampler {
public:
    // NumericError if G is not positive definite; SizeError above the dense cap.
    FieldSampler(const LatticeDomain& domain, std::uint64_t seed, std::size_t cap = kDefaultDenseCap);

    const LatticeDomain& domain() const { return green_->domain(); }
    const GreenMatrix& green() const { return *green_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t size() const { return green_->size(); }

    FieldSample draw(std::uint64_t index) const;
    std::vector<FieldSample> draw_many(std::size_t count, std::uint64_t first = 0) const;

    // Interior values of samples first..first+cols-1 as columns, in the
    // interior-box offset order (fast path for Monte Carlo).
    Eigen::MatrixXd draw_block(std::uint64_t first, std::size_t cols) const;

    // Standard normals of sample `index`.
    Eigen::VectorXd normals(std::uint64_t index) const;

    // Interior values of psi as a vector in interior-box offset order.
    Eigen::VectorXd to_vector(const GridFunction& psi) const;
    GridFunction from_vector(const Eigen::VectorXd& v) const;

private:
    std::shared_ptr<const GreenMatrix> green_;
    std::uint64_t seed_;
};

std::vector<FieldSample> sample_field(const LatticeDomain& domain, std::uint64_t seed, std::size_t count);

// E|psi_x - psi_y|^2 = G(x,x) - G(x,y) - G(y,x) + G(y,y), sample free.
double increment_variance(const GreenFunction& green, const Index& x, const Index& y);
double increment_variance(const LatticeDomain& domain, const Index& x, const Index& y);

// Multivariate normal log-density of the interior values of psi under N(0, G).
double gaussian_log_density(const FieldSampler& sampler, const GridFunction& psi);

// log p(psi1) - log p(psi2) from the Gaussian density; the Gibbs form
// predicts H(psi2) - H(psi1).
double log_density_ratio(const FieldSampler& sampler, const GridFunction& psi1, const GridFunction& psi2);

// ---------------------------------------------------------------- continuity

// Continuity bound at unit spacing: |x-y|^2 log(2 + N/|x-y|) (n = 2), |x-y| (n = 3).
double continuity_bound(int n, int N, double distance);

struct ContinuityOptions {
    std::uint64_t seed = 1;
    // Above this interior size the pair set is sampled: anchors plus dyadic
    // offsets along axis and diagonal directions.
    std::size_t full_pair_limit = 5000;
    int anchors = 48;
    GreenOptions green{};
};

// Sup over pairs x != y in V_N of increment_variance / continuity_bound, one
// grid per N (grids holds N, not M).
EstimateReport continuity_report(int n, const std::vector<int>& Ns, const ContinuityOptions& opts = {});

struct HolderQuantiles {
    int N = 0;
    double alpha = 0.0;
    std::size_t samples = 0;
    std::vector<double> levels;  // quantile levels
    std::vector<double> values;
    std::vector<double> low;     // distribution-free 95% band per level
    std::vector<double> high;
};

// Rescaled field psi'(x/N) = N^{n/2-2} psi_x; statistic
// sup |psi'(x/N) - psi'(y/N)| / |x/N - y/N|^alpha over dyadic offsets y - x
// (lengths 2^k along axes and diagonals). Quantiles at `levels`.
HolderQuantiles holder_quantiles(int n, int N, double alpha, std::size_t samples, std::uint64_t seed,
                                 const std::vector<double>& levels = {0.5, 0.9});

// ---------------------------------------------------------------- entropic repulsion

struct RepulsionRow {
    int N = 0;
    std::size_t samples = 0;
    std::size_t hits_plus = 0;   // all psi_x >= 0
    std::size_t hits_minus = 0;  // all psi_x <= 0
    double p_plus = 0.0;
    double p_minus = 0.0;
    double ci_low = 0.0;  // Wilson 95% interval for p_plus
    double ci_high = 0.0;
    double neg_log_p = 0.0;  // -log p_plus; -log ci_high when there are no hits
    bool lower_bound_only = false;
};

struct RepulsionTable {
    int n = 0;
    std::uint64_t seed = 0;
    std::vector<RepulsionRow> rows;
    bool monotone = false;  // -log p strictly increasing in N
    // Least squares -log p ~ c N^{n-1} through the origin, and the log-log
    // slope of -log p against N (descriptive only).
    double fit_c = 0.0;
    double fit_exponent = 0.0;
};

// Wilson score interval for k successes in m trials at normal quantile z.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t m, double z = 1.959963984540054);

RepulsionTable entropic_repulsion_mc(int n, const std::vector<int>& Ns, std::size_t samples, std::uint64_t seed);

}  // namespace bilap
