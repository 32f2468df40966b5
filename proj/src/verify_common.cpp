#include <algorithm>
#include <cmath>
#include <limits>

#include "bilap/errors.hpp"
#include "bilap/operators.hpp"
#include "bilap/splines.hpp"
#include "bilap/verify.hpp"
#include "verify_internal.hpp"

namespace bilap {

std::string to_string(Verdict v) { return v == Verdict::stable ? "stable" : "growing"; }

std::string to_string(Placement p) {
    switch (p) {
        case Placement::interior: return "interior";
        case Placement::face: return "face";
        case Placement::edge: return "edge";
        case Placement::corner: return "corner";
    }
    return "unknown";
}

double EstimateReport::spread() const {
    if (constant_per_grid.empty()) return kInfinity;
    double lo = kInfinity, hi = 0.0;
    for (double c : constant_per_grid) {
        if (!(c > 0.0) || !std::isfinite(c)) return kInfinity;
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    return hi / lo;
}

// ---------------------------------------------------------------- accumulator

RatioAccumulator::RatioAccumulator(std::string id, int n, bool lower_bound, const VerifyOptions& opts)
    : lower_(lower_bound), record_(opts.record_samples), stride_(std::max<std::size_t>(1, opts.sample_stride)) {
    report_.estimate_id = std::move(id);
    report_.n = n;
    report_.lower_bound = lower_bound;
    report_.stability_factor = opts.stability_factor;
}

void RatioAccumulator::begin_grid(int M) {
    M_ = M;
    best_ = 0.0;
    have_ = false;
    count_ = 0;
    witness_ = Witness{};
    witness_.M = M;
}

void RatioAccumulator::add(const Index& x, const Index& y, double quantity, double bound, int trial,
                           double zero_tol) {
    quantity = std::abs(quantity);
    if (!(bound > 0.0)) {
        ++report_.excluded;
        if (quantity > zero_tol) ++report_.exclusion_violations;
        return;
    }
    if (record_ && seen_++ % stride_ == 0) report_.samples.push_back({M_, trial, x, y, quantity, bound});
    const double ratio = quantity / bound;
    ++count_;
    if (!have_ || (lower_ ? ratio < best_ : ratio > best_)) {
        have_ = true;
        best_ = ratio;
        witness_ = Witness{M_, trial, x, y, quantity, bound};
    }
}

void RatioAccumulator::end_grid() {
    report_.grids.push_back(M_);
    report_.admissible_per_grid.push_back(count_);
    report_.witness_per_grid.push_back(witness_);
    if (!have_) {
        report_.empty = true;
        report_.constant_per_grid.push_back(std::numeric_limits<double>::quiet_NaN());
    } else {
        report_.constant_per_grid.push_back(best_);
    }
}

EstimateReport RatioAccumulator::finish() {
    bool first = true;
    for (std::size_t g = 0; g < report_.constant_per_grid.size(); ++g) {
        const double c = report_.constant_per_grid[g];
        if (!std::isfinite(c)) continue;
        if (first || (lower_ ? c < report_.global_constant : c > report_.global_constant)) {
            report_.global_constant = c;
            report_.witness = report_.witness_per_grid[g];
            first = false;
        }
    }
    report_.verdict = report_.spread() <= report_.stability_factor ? Verdict::stable : Verdict::growing;
    return report_;
}

// ---------------------------------------------------------------- convergence helpers

Index nearest_source(const LatticeDomain& domain, const Point& y) {
    for (int i = 0; i < domain.dim(); ++i)
        if (!(y[i] > 0.0 && y[i] < 1.0)) throw DomainError("source point must lie in the open unit cube");
    return detail::snap(domain, y);
}

namespace {

// I^pc of the zero extension: the value of the lattice point whose cell
// z + [-h/2, h/2)^n contains p.
double pc_value(const GridFunction& f, const Point& p) {
    const double h = f.domain().h();
    Index k{0, 0, 0};
    for (int i = 0; i < f.dim(); ++i) k[i] = int(std::floor(p[i] / h + 0.5));
    return f(k);
}

}  // namespace

double pc_sup_difference(const GridFunction& f, const GridFunction& g) {
    const int n = f.dim();
    if (g.dim() != n || g.domain().M() != 2 * f.domain().M())
        throw ParameterError("pc_sup_difference: second grid must be the refinement of the first");
    const double hg = g.domain().h();
    const Box fine = g.domain().lattice_box();
    double sup = 0.0;
    // Every piece of the common refinement contains one of the points z +- h/4.
    fine.for_each([&](const Index& z) {
        for (int mask = 0; mask < (1 << n); ++mask) {
            Point p{0.0, 0.0, 0.0};
            bool inside = true;
            for (int i = 0; i < n; ++i) {
                p[i] = z[i] * hg + (((mask >> i) & 1) ? 0.25 : -0.25) * hg;
                if (p[i] < 0.0 || p[i] > 1.0) inside = false;
            }
            if (!inside) continue;
            sup = std::max(sup, std::abs(pc_value(f, p) - pc_value(g, p)));
        }
    });
    return sup;
}

ConvergenceTable verify_convergence(int n, const Point& y, const std::vector<int>& Ms, const GreenOptions& green) {
    if (Ms.size() < 2) throw ParameterError("verify_convergence: need at least two grids");
    for (std::size_t k = 0; k + 1 < Ms.size(); ++k)
        if (Ms[k + 1] != 2 * Ms[k]) throw ParameterError("verify_convergence: grids must double");
    ConvergenceTable t;
    t.n = n;
    t.y = y;
    t.Ms = Ms;
    std::vector<GridFunction> cols;
    for (int M : Ms) {
        const LatticeDomain d(n, M);
        const Index yh = nearest_source(d, y);
        t.sources.push_back(yh);
        GreenFunction g(d, green);
        cols.push_back(g.column_or_zero(yh)->restricted(d.lattice_box()));
    }
    for (std::size_t k = 0; k + 1 < cols.size(); ++k) t.differences.push_back(pc_sup_difference(cols[k], cols[k + 1]));
    for (std::size_t k = 0; k + 1 < t.differences.size(); ++k)
        t.ratios.push_back(t.differences[k + 1] / t.differences[k]);
    return t;
}

// ---------------------------------------------------------------- trial helpers

namespace detail {

Index snap(const LatticeDomain& d, const Point& p) {
    Index z{0, 0, 0};
    for (int i = 0; i < d.dim(); ++i) z[i] = std::clamp(int(std::floor(p[i] / d.h() + 0.5)), 0, d.M());
    return z;
}

Placement placement_for_trial(int trial, int n) {
    if (n == 3) {
        static constexpr Placement cycle[] = {Placement::interior, Placement::face, Placement::edge, Placement::corner};
        return cycle[trial % 4];
    }
    static constexpr Placement cycle[] = {Placement::interior, Placement::face, Placement::corner};
    return cycle[trial % 3];
}

double uniform(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

Point draw_center(Placement p, int n, std::mt19937_64& rng) {
    int near_boundary = 0;
    switch (p) {
        case Placement::interior: near_boundary = 0; break;
        case Placement::face: near_boundary = 1; break;
        case Placement::edge: near_boundary = 2; break;
        case Placement::corner: near_boundary = n; break;
    }
    std::vector<int> axes(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) axes[std::size_t(i)] = i;
    std::shuffle(axes.begin(), axes.end(), rng);
    Point c{0.0, 0.0, 0.0};
    for (int k = 0; k < n; ++k) {
        const int i = axes[std::size_t(k)];
        if (k < near_boundary) {
            const double t = uniform(rng, 0.0, 0.08);
            c[i] = uniform(rng, 0.0, 1.0) < 0.5 ? t : 1.0 - t;
        } else {
            c[i] = uniform(rng, 0.3, 0.7);
        }
    }
    return c;
}

GridFunction combine_columns(const GreenFunction& g, const std::vector<Index>& sources,
                             const std::vector<double>& weights, double scale) {
    GridFunction u = GridFunction::phi(g.domain());
    for (std::size_t k = 0; k < sources.size(); ++k) u.axpy(scale * weights[k], *g.column_or_zero(sources[k]));
    return u;
}

void add_random_source(const LatticeDomain& d, const Index& z, std::mt19937_64& rng, std::vector<Index>& sources,
                       std::vector<double>& weights) {
    const double w = uniform(rng, 0.5, 1.5) * (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0);
    sources.push_back(z);
    weights.push_back(w);
    // Half of the sources are dipoles along a random axis.
    if (uniform(rng, 0.0, 1.0) < 0.5) {
        const int axis = int(uniform(rng, 0.0, double(d.dim()))) % d.dim();
        const Index z2 = z + unit_vector(axis);
        if (d.is_interior(z2)) {
            sources.push_back(z2);
            weights.push_back(-w);
        }
    }
}

double linf_distance(const Index& a, const Index& b, int n) {
    int m = 0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return double(m);
}

}  // namespace detail

}  // namespace bilap
