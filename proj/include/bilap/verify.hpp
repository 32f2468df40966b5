#pragma once

// Empirical constants for the quantitative estimates on G_h and on discretely
// biharmonic functions. A constant is the sup (or inf, for lower bounds) of
// quantity/bound over admissible points; "C independent of h" is
// operationalised as bounded spread of the per-grid constants.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bilap/green.hpp"
#include "bilap/lattice.hpp"

namespace bilap {

enum class Verdict { stable, growing };
std::string to_string(Verdict v);

struct RatioSample {
    int M = 0;
    int trial = -1;  // -1 for deterministic sweeps
    Index x{0, 0, 0};
    Index y{0, 0, 0};
    double quantity = 0.0;
    double bound = 0.0;
};

struct Witness {
    int M = 0;
    int trial = -1;
    Index x{0, 0, 0};
    Index y{0, 0, 0};
    double quantity = 0.0;
    double bound = 0.0;
};

struct EstimateReport {
    std::string estimate_id;
    int n = 0;
    std::vector<int> grids;
    std::vector<double> constant_per_grid;
    std::vector<std::size_t> admissible_per_grid;
    std::vector<Witness> witness_per_grid;
    double global_constant = 0.0;
    Witness witness;
    Verdict verdict = Verdict::stable;
    double stability_factor = 2.0;
    bool lower_bound = false;            // constants are infima
    bool empty = false;                  // a grid had no admissible point
    std::size_t excluded = 0;            // points with bound 0
    std::size_t exclusion_violations = 0;  // bound 0 but quantity != 0
    std::map<std::string, double> extras;
    std::vector<RatioSample> samples;

    // max/min of the per-grid constants (infinity if some constant is 0).
    double spread() const;
};

struct VerifyOptions {
    int trials = 50;
    std::uint64_t seed = 1;
    double scale = 1.0;  // multiplies every test function (homogeneity check)
    bool record_samples = false;
    std::size_t sample_stride = 1;  // keep every stride-th admissible sample
    double stability_factor = 2.0;
    GreenOptions green{};
};

// Collects quantity/bound ratios per grid and finalises a report.
class RatioAccumulator {
public:
    RatioAccumulator(std::string id, int n, bool lower_bound, const VerifyOptions& opts);

    void begin_grid(int M);
    // Bound 0 excludes the point; the quantity must then vanish (up to
    // zero_tol, an absolute threshold for roundoff-level values).
    void add(const Index& x, const Index& y, double quantity, double bound, int trial = -1, double zero_tol = 0.0);
    void end_grid();
    EstimateReport finish();
    EstimateReport& report() { return report_; }

private:
    EstimateReport report_;
    bool lower_;
    bool record_;
    std::size_t stride_;
    std::size_t seen_ = 0;
    int M_ = 0;
    double best_ = 0.0;
    bool have_ = false;
    std::size_t count_ = 0;
    Witness witness_;
};

// ---------------------------------------------------------------- Green bounds

// Ids: green-G, green-grad, green-hess, green-grad-grad, green-hess-grad,
// green-hess-hess (upper bounds, sup of |quantity|/bound) and green-lower
// (inf of G(x,x)/d(x)^{4-n}). All pairs x, y in Lambda_h^n.
std::vector<EstimateReport> verify_green_bounds(int n, const std::vector<int>& Ms, const VerifyOptions& opts = {});

// Bound expressions (without the constant) at x, y for mesh h.
struct GreenBoundValues {
    double G, grad, hess, grad_grad, hess_grad, hess_hess;
};
GreenBoundValues green_bound_values(int n, double h, double dx, double dy, double dist);

// ---------------------------------------------------------------- decay estimates

// Trial placement regimes for the centre x.
enum class Placement { interior, face, edge, corner };
std::string to_string(Placement p);

struct DecayTrial {
    int M = 0;
    Index x{0, 0, 0};
    double r = 0.0;
    double s = 0.0;
    Placement placement = Placement::interior;
    std::vector<Index> sources;
    std::vector<double> weights;
};

// ||hess u||^2_{Q_s} / (||u||^2_{Q_r}/(r-s)^4 + ||grad u||^2_{Q_r}/(r-s)^2), u
// biharmonic in Q_{r-h}(x), sources outside Q_r(x). Geometry infeasible for
// the coarsest grid (r - s < 4h) -> ParameterError.
EstimateReport verify_caccioppoli(int n, const std::vector<int>& Ms, const VerifyOptions& opts = {});

// sup_{z in Q_{r/2}(x)} |hess u(z)| r^{n/2} / ||hess u||_{L^2(Q_r(x))}.
EstimateReport verify_inner_decay(int n, const std::vector<int>& Ms, const VerifyOptions& opts = {});

// Two reports: outer-decay-annulus (|| hess u ||_{outside Q_s} vs (r/s)^{n/2}
// || hess u ||_{outside Q_r}, r >= d(x)) and outer-decay-pointwise.
std::vector<EstimateReport> verify_outer_decay(int n, const std::vector<int>& Ms, const VerifyOptions& opts = {});

// ---------------------------------------------------------------- corner exponent

struct CornerFit {
    int M = 0;
    double slope = 0.0;
    double theta = 0.0;  // 2 (slope - 2)
    double r_squared = 0.0;
    double slope_stderr = 0.0;
    double theta_low = 0.0;   // 95% band
    double theta_high = 0.0;
    std::vector<double> log_ratio;
    std::vector<double> log_green;
    bool accepted = false;  // r_squared >= 0.95
};

inline constexpr double kCornerThetaReference = 3.47918;

// n = 2, y = nearest lattice point to (1/2, 1/2), x = (kh, kh) with
// |y|/8 < |x| <= |y|/4. RangeError when fewer than 3 points fit.
CornerFit fit_corner_exponent(int M, const GreenOptions& green = {});
EstimateReport verify_corner(const std::vector<int>& Ms, const GreenOptions& green = {});

// ---------------------------------------------------------------- Poincare / Sobolev

// Reports: poincare-cube (p = 2), poincare-annulus (p = 2, s = r/2),
// sobolev-4-inf (q = infinity, p = 4), holder-quarter (alpha = 1/4, p = 4).
std::vector<EstimateReport> verify_poincare_sobolev(int n, const std::vector<int>& Ms,
                                                    const VerifyOptions& opts = {});

// ---------------------------------------------------------------- convergence

struct ConvergenceTable {
    int n = 0;
    Point y{0.0, 0.0, 0.0};
    std::vector<int> Ms;
    std::vector<Index> sources;        // y_h per grid
    std::vector<double> differences;   // e_k = sup |I^pc G_k - I^pc G_{k+1}|
    std::vector<double> ratios;        // e_{k+1}/e_k
};

// DomainError if y is not in (0,1)^n.
ConvergenceTable verify_convergence(int n, const Point& y, const std::vector<int>& Ms, const GreenOptions& green = {});

// y_h with y in y_h + [-h/2, h/2)^n.
Index nearest_source(const LatticeDomain& domain, const Point& y);

// sup over [0,1]^n of |I^pc f - I^pc g|, g on the refined lattice (M_g = 2 M_f).
double pc_sup_difference(const GridFunction& f, const GridFunction& g);

// ---------------------------------------------------------------- full space

// Constants for the rescaled kernel G~_h near the source (r = 1/2): the
// mixed third and fourth order bounds for |x - y|_inf <= r/2 and the order
// 3..4 annulus bound for r/2 <= |x - y|_inf <= r.
std::vector<EstimateReport> verify_fullspace(int n, const std::vector<int>& Ms, const VerifyOptions& opts = {});

}  // namespace bilap
