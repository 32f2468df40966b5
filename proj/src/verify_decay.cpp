#include <algorithm>
#include <cmath>

#include "bilap/errors.hpp"
#include "bilap/operators.hpp"
#include "bilap/verify.hpp"
#include "verify_internal.hpp"

namespace bilap {

namespace {

using detail::uniform;

// Trial geometry in continuum units; snapped to each grid so that per-grid
// constants measure the same configurations.
struct TrialSpec {
    Placement placement = Placement::interior;
    Point center{0.0, 0.0, 0.0};
    double r = 0.0;
    double s = 0.0;
    double r_in_h = 0.0;  // > 0: radius fixed in mesh units instead
    std::vector<Point> sources;
    std::vector<double> weights;
    std::vector<int> dipole_axis;  // -1: point mass
};

enum class SourceSide { outside, inside };

bool in_unit_margin(const Point& p, int n, double m) {
    for (int i = 0; i < n; ++i)
        if (p[i] < m || p[i] > 1.0 - m) return false;
    return true;
}

double linf(const Point& a, const Point& b, int n) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Draws 1..3 sources outside Q_{r + 0.12}(c) or inside Q_{r - 0.02}(c). The
// outer margin exceeds the snapping error on every grid with h <= 1/16, so the
// same sources survive on all grids.
bool draw_sources(TrialSpec& t, int n, SourceSide side, std::mt19937_64& rng) {
    const int count = 1 + int(uniform(rng, 0.0, 3.0)) % 3;
    for (int k = 0; k < count; ++k) {
        bool found = false;
        for (int attempt = 0; attempt < 2000 && !found; ++attempt) {
            Point p{0.0, 0.0, 0.0};
            for (int i = 0; i < n; ++i) {
                if (side == SourceSide::inside)
                    p[i] = t.center[i] + uniform(rng, -t.r, t.r);
                else
                    p[i] = uniform(rng, 0.0, 1.0);
            }
            if (!in_unit_margin(p, n, 0.03)) continue;
            const double dist = linf(p, t.center, n);
            found = side == SourceSide::outside ? dist > t.r + 0.12 : dist < t.r - 0.02;
            if (found) {
                t.sources.push_back(p);
                t.weights.push_back(uniform(rng, 0.5, 1.5) * (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0));
                t.dipole_axis.push_back(uniform(rng, 0.0, 1.0) < 0.5 ? int(uniform(rng, 0.0, n)) % n : -1);
            }
        }
        if (!found) return false;
    }
    return true;
}

enum class Kind { caccioppoli, inner, outer };

std::vector<TrialSpec> make_trials(Kind kind, int n, const VerifyOptions& opts) {
    std::mt19937_64 rng(opts.seed * 0x9E3779B97F4A7C15ull + std::uint64_t(kind) + 17u);
    std::vector<TrialSpec> trials;
    for (int t = 0; t < opts.trials; ++t) {
        TrialSpec spec;
        spec.placement = detail::placement_for_trial(t, n);
        for (int redraw = 0; redraw < 100; ++redraw) {
            spec.center = detail::draw_center(spec.placement, n, rng);
            spec.sources.clear();
            spec.weights.clear();
            spec.dipole_axis.clear();
            switch (kind) {
                case Kind::caccioppoli:
                    spec.s = uniform(rng, 0.10, 0.14);
                    spec.r = spec.s + uniform(rng, 0.32, 0.34);
                    break;
                case Kind::inner: spec.r = uniform(rng, 0.20, 0.35); break;
                case Kind::outer: spec.r = uniform(rng, 0.10, 0.20); break;
            }
            if (draw_sources(spec, n, kind == Kind::outer ? SourceSide::inside : SourceSide::outside, rng)) break;
        }
        trials.push_back(spec);
    }
    if (kind == Kind::outer) {
        // Point mass at the centre with r = 1.5 h.
        TrialSpec c;
        c.placement = Placement::interior;
        c.center = Point{0.5, 0.5, 0.5};
        c.r_in_h = 1.5;
        c.sources.push_back(c.center);
        c.weights.push_back(1.0);
        c.dipole_axis.push_back(-1);
        trials.insert(trials.begin(), c);
    }
    return trials;
}

struct SnappedTrial {
    Index x{0, 0, 0};
    double r = 0.0;
    double s = 0.0;
    std::vector<Index> sources;
    std::vector<double> weights;
};

// Sources that violate the support hypothesis on this grid are dropped.
SnappedTrial snap_trial(const TrialSpec& t, const LatticeDomain& d, SourceSide side) {
    const int n = d.dim();
    const double h = d.h();
    SnappedTrial s;
    s.x = detail::snap(d, t.center);
    s.r = t.r_in_h > 0.0 ? t.r_in_h * h : aligned_radius_below(t.r, h);
    s.s = t.s > 0.0 ? aligned_radius_below(t.s, h) : 0.0;
    for (std::size_t k = 0; k < t.sources.size(); ++k) {
        const Index z = detail::snap(d, t.sources[k]);
        std::vector<Index> pts{z};
        std::vector<double> ws{t.weights[k]};
        if (t.dipole_axis[k] >= 0) {
            pts.push_back(z + unit_vector(t.dipole_axis[k]));
            ws = {-t.weights[k] / h, t.weights[k] / h};
        }
        bool ok = true;
        for (const auto& p : pts) {
            const double dist = h * detail::linf_distance(p, s.x, n);
            if (!d.is_interior(p)) ok = false;
            if (side == SourceSide::outside && !(dist > s.r)) ok = false;
            if (side == SourceSide::inside && !(dist <= s.r)) ok = false;
        }
        if (!ok) continue;
        s.sources.insert(s.sources.end(), pts.begin(), pts.end());
        s.weights.insert(s.weights.end(), ws.begin(), ws.end());
    }
    return s;
}

double l2(const std::vector<GridFunction>& f, const Region& region) { return discrete_norm(f, 2.0, region); }

}  // namespace

EstimateReport verify_caccioppoli(int n, const std::vector<int>& Ms, const VerifyOptions& opts) {
    const auto trials = make_trials(Kind::caccioppoli, n, opts);
    RatioAccumulator acc("caccioppoli", n, false, opts);
    for (int M : Ms) {
        const LatticeDomain d(n, M);
        const double h = d.h();
        GreenFunction gf(d, opts.green);
        acc.begin_grid(M);
        for (std::size_t t = 0; t < trials.size(); ++t) {
            const SnappedTrial st = snap_trial(trials[t], d, SourceSide::outside);
            if (st.r - st.s < 4.0 * h - 1e-12 || st.s <= 0.0)
                throw ParameterError("verify_caccioppoli: r - s >= 4h violated on M=" + std::to_string(M));
            if (st.sources.empty()) continue;
            const GridFunction u = detail::combine_columns(gf, st.sources, st.weights, opts.scale);
            const Region Qr = Region::cube(CubeRegion{st.x, st.r});
            const Region Qs = Region::cube(CubeRegion{st.x, st.s});
            const double w = st.r - st.s;
            const double hs = std::pow(l2(hessian(u), Qs), 2);
            const double bound = std::pow(discrete_norm(u, 2.0, Qr), 2) / std::pow(w, 4) +
                                 std::pow(l2(gradient(u, +1), Qr), 2) / (w * w);
            acc.add(st.x, st.x, hs, bound, int(t), 1e-300);
        }
        acc.end_grid();
    }
    return acc.finish();
}

EstimateReport verify_inner_decay(int n, const std::vector<int>& Ms, const VerifyOptions& opts) {
    const auto trials = make_trials(Kind::inner, n, opts);
    RatioAccumulator acc("inner-decay", n, false, opts);
    for (int M : Ms) {
        const LatticeDomain d(n, M);
        GreenFunction gf(d, opts.green);
        acc.begin_grid(M);
        for (std::size_t t = 0; t < trials.size(); ++t) {
            const SnappedTrial st = snap_trial(trials[t], d, SourceSide::outside);
            if (st.sources.empty()) continue;
            const GridFunction u = detail::combine_columns(gf, st.sources, st.weights, opts.scale);
            const auto H = hessian(u);
            const GridFunction norm = pointwise_norm(H);
            const double energy = l2(H, Region::cube(CubeRegion{st.x, st.r}));
            const Box inner = CubeRegion{st.x, 0.5 * st.r}.box(n, d.h()).intersect(d.lattice_box());
            double best = 0.0;
            Index arg = st.x;
            inner.for_each([&](const Index& z) {
                if (norm(z) > best) {
                    best = norm(z);
                    arg = z;
                }
            });
            acc.add(st.x, arg, best, energy / std::pow(st.r, 0.5 * n), int(t), 1e-300);
        }
        acc.end_grid();
    }
    return acc.finish();
}

std::vector<EstimateReport> verify_outer_decay(int n, const std::vector<int>& Ms, const VerifyOptions& opts) {
    const auto trials = make_trials(Kind::outer, n, opts);
    RatioAccumulator annulus("outer-decay-annulus", n, false, opts);
    RatioAccumulator pointwise("outer-decay-pointwise", n, false, opts);
    for (int M : Ms) {
        const LatticeDomain d(n, M);
        const double h = d.h();
        GreenFunction gf(d, opts.green);
        annulus.begin_grid(M);
        pointwise.begin_grid(M);
        for (std::size_t t = 0; t < trials.size(); ++t) {
            const SnappedTrial st = snap_trial(trials[t], d, SourceSide::inside);
            if (st.sources.empty()) continue;
            const GridFunction u = detail::combine_columns(gf, st.sources, st.weights, opts.scale);
            const auto H = hessian(u);
            const double outer = l2(H, Region::outside(CubeRegion{st.x, st.r}));
            const double dx = distance_to_exterior(d, st.x);
            if (st.r >= dx) {
                for (double f : {1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0}) {
                    const double s = std::max(st.r, aligned_radius_below(f * st.r, h));
                    if (s > 1.0) break;
                    const double q = l2(H, Region::outside(CubeRegion{st.x, s}));
                    annulus.add(st.x, st.x, q, std::pow(st.r / s, 0.5 * n) * outer, int(t), 1e-300);
                }
            }
            const GridFunction norm = pointwise_norm(H);
            const double scale = std::pow(std::max(dx, st.r), 0.5 * n) * outer;
            double best = -1.0, best_bound = 0.0, best_q = 0.0;
            Index arg = st.x;
            d.lattice_box().for_each([&](const Index& y) {
                const double dist_inf = h * detail::linf_distance(y, st.x, n);
                if (dist_inf <= 2.0 * st.r) return;
                double e = 0.0;
                for (int i = 0; i < n; ++i) e += double(y[i] - st.x[i]) * double(y[i] - st.x[i]);
                const double bound = scale / std::pow(h * std::sqrt(e), n);
                const double q = norm(y);
                if (!(bound > 0.0)) {
                    pointwise.add(st.x, y, q, bound, int(t), 1e-300);
                    return;
                }
                if (q / bound > best) {
                    best = q / bound;
                    best_bound = bound;
                    best_q = q;
                    arg = y;
                }
            });
            if (best >= 0.0) pointwise.add(st.x, arg, best_q, best_bound, int(t), 1e-300);
        }
        annulus.end_grid();
        pointwise.end_grid();
    }
    return {annulus.finish(), pointwise.finish()};
}

}  // namespace bilap
