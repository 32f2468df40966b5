#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "bilap/errors.hpp"
#include "bilap/fullspace.hpp"
#include "bilap/verify.hpp"
#include "verify_internal.hpp"

namespace bilap {

namespace {

double sq_at(const std::vector<GridFunction>& comps, const Index& x) {
    double s = 0.0;
    for (const auto& f : comps) {
        const double v = f(x);
        s += v * v;
    }
    return s;
}

double physical_distance(const Index& a, const Index& b, int n, double h) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += double(a[i] - b[i]) * double(a[i] - b[i]);
    return h * std::sqrt(s);
}

}  // namespace

GreenBoundValues green_bound_values(int n, double h, double dx, double dy, double dist) {
    const double e = dist + h;
    const double en = std::pow(e, n);
    GreenBoundValues b{};
    b.G = std::min(std::pow(dx, 2.0 - 0.5 * n) * std::pow(dy, 2.0 - 0.5 * n), dx * dx * dy * dy / en);
    b.grad = std::min(std::pow(dy, 3.0 - n), (dx + h) * dy * dy / en);
    if (n == 2) {
        b.hess = std::log(1.0 + dy * dy / (e * e));
        b.grad_grad = std::log(1.0 + (dx + h) * (dy + h) / (e * e));
    } else {
        b.hess = std::min(1.0 / e, dy * dy / (e * e * e));
        b.grad_grad = std::min(1.0 / e, (dx + h) * (dy + h) / (e * e * e));
    }
    b.hess_grad = std::min(1.0 / std::pow(e, n - 1), (dy + h) / en);
    b.hess_hess = 1.0 / en;
    return b;
}

std::vector<EstimateReport> verify_green_bounds(int n, const std::vector<int>& Ms, const VerifyOptions& opts) {
    const char* ids[] = {"green-G", "green-grad", "green-hess", "green-grad-grad", "green-hess-grad", "green-hess-hess"};
    std::vector<RatioAccumulator> acc;
    for (const char* id : ids) acc.emplace_back(id, n, false, opts);
    RatioAccumulator lower("green-lower", n, true, opts);

    for (int M : Ms) {
        const LatticeDomain d(n, M);
        const double h = d.h();
        for (auto& a : acc) a.begin_grid(M);
        lower.begin_grid(M);
        GreenFunction gf(d, opts.green);
        std::vector<Index> interior;
        d.interior_box().for_each([&](const Index& z) { interior.push_back(z); });
        gf.precompute(interior);

        const Box lat = d.lattice_box();
        lat.for_each([&](const Index& y) {
            const auto col = gf.column_or_zero(y);
            const auto der = gf.derivatives(y, kAllDerivatives);
            const double dy = distance_to_exterior(d, y);
            lat.for_each([&](const Index& x) {
                const double dx = distance_to_exterior(d, x);
                const auto b = green_bound_values(n, h, dx, dy, physical_distance(x, y, n, h));
                acc[0].add(x, y, (*col)(x), b.G);
                acc[1].add(x, y, std::sqrt(sq_at(der.grad_x, x)), b.grad);
                acc[2].add(x, y, std::sqrt(sq_at(der.hess_x, x)), b.hess);
                acc[3].add(x, y, std::sqrt(sq_at(der.grad_x_grad_y, x)), b.grad_grad);
                acc[4].add(x, y, std::sqrt(sq_at(der.hess_x_grad_y, x)), b.hess_grad);
                acc[5].add(x, y, std::sqrt(sq_at(der.hess_x_hess_y, x)), b.hess_hess);
            });
            if (d.is_interior(y)) lower.add(y, y, (*col)(y), std::pow(dy, 4.0 - n));
        });
        for (auto& a : acc) a.end_grid();
        lower.end_grid();
    }
    std::vector<EstimateReport> out;
    for (auto& a : acc) out.push_back(a.finish());
    out.push_back(lower.finish());
    return out;
}

// ---------------------------------------------------------------- corner exponent

CornerFit fit_corner_exponent(int M, const GreenOptions& green) {
    const LatticeDomain d(2, M);
    const Index y = nearest_source(d, Point{0.5, 0.5, 0.0});
    const double h = d.h();
    const double ynorm = h * std::sqrt(double(y[0]) * y[0] + double(y[1]) * y[1]);
    GreenFunction gf(d, green);
    const auto col = gf.column(y);
    CornerFit fit;
    fit.M = M;
    // Diagonal points x = (kh, kh), |x| = d(x) sqrt 2, over the octave
    // |y|/8 < |x| <= |y|/4. Closer to the corner G changes sign (oscillating
    // corner singularity), so log|G| is not linear across that range.
    for (int k = 1; k * h * std::sqrt(2.0) <= 0.25 * ynorm; ++k) {
        if (k * h * std::sqrt(2.0) <= 0.125 * ynorm) continue;
        const double g = std::abs((*col)(Index{k, k, 0}));
        if (!(g > 0.0)) continue;
        fit.log_ratio.push_back(std::log(k * h * std::sqrt(2.0) / ynorm));
        fit.log_green.push_back(std::log(g));
    }
    const std::size_t m = fit.log_ratio.size();
    if (m < 3) throw RangeError("fit_corner_exponent: fewer than 3 points in the corner range; increase M");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += fit.log_ratio[i];
        my += fit.log_green[i];
    }
    mx /= double(m);
    my /= double(m);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double a = fit.log_ratio[i] - mx, b = fit.log_green[i] - my;
        sxx += a * a;
        sxy += a * b;
        syy += b * b;
    }
    fit.slope = sxy / sxx;
    const double sse = std::max(0.0, syy - fit.slope * sxy);
    fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    fit.theta = 2.0 * (fit.slope - 2.0);
    if (m > 2) {
        fit.slope_stderr = std::sqrt(sse / double(m - 2) / sxx);
        const boost::math::students_t dist(double(m - 2));
        const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
        fit.theta_low = 2.0 * (fit.slope - t * fit.slope_stderr - 2.0);
        fit.theta_high = 2.0 * (fit.slope + t * fit.slope_stderr - 2.0);
    }
    fit.accepted = fit.r_squared >= 0.95;
    return fit;
}

EstimateReport verify_corner(const std::vector<int>& Ms, const GreenOptions& green) {
    EstimateReport r;
    r.estimate_id = "corner";
    r.n = 2;
    r.extras["theta_reference"] = kCornerThetaReference;
    for (int M : Ms) {
        const CornerFit f = fit_corner_exponent(M, green);
        r.grids.push_back(M);
        r.constant_per_grid.push_back(f.theta);
        r.admissible_per_grid.push_back(f.log_ratio.size());
        r.witness_per_grid.push_back(Witness{M, -1, Index{}, Index{}, f.slope, f.r_squared});
        const std::string tag = "M" + std::to_string(M);
        r.extras["theta_" + tag] = f.theta;
        r.extras["r_squared_" + tag] = f.r_squared;
        r.extras["slope_" + tag] = f.slope;
        r.extras["theta_low_" + tag] = f.theta_low;
        r.extras["theta_high_" + tag] = f.theta_high;
        if (!f.accepted) r.empty = true;
    }
    r.global_constant = r.constant_per_grid.back();
    r.witness = r.witness_per_grid.back();
    r.verdict = r.spread() <= r.stability_factor ? Verdict::stable : Verdict::growing;
    return r;
}

// ---------------------------------------------------------------- full space

std::vector<EstimateReport> verify_fullspace(int n, const std::vector<int>& Ms, const VerifyOptions& opts) {
    RatioAccumulator hess_grad("fullspace-hess-grad", n, false, opts);
    RatioAccumulator hess_hess("fullspace-hess-hess", n, false, opts);
    RatioAccumulator annulus("fullspace-annulus", n, false, opts);
    const double r = 0.5;

    // Mixed patterns: x-Hessian (D_{-i} D_j) with y-gradient / y-Hessian.
    std::vector<DifferencePattern> p3, p4;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                p3.push_back(DifferencePattern::mixed({{i, -1}, {j, +1}}, {{k, +1}}));
                for (int l = 0; l < n; ++l)
                    p4.push_back(DifferencePattern::mixed({{i, -1}, {j, +1}}, {{k, -1}, {l, +1}}));
            }
    // All forward D^alpha_x D^beta_y with 3 <= |alpha| + |beta| <= 4.
    std::vector<DifferencePattern> pa;
    std::vector<int> pa_order;
    const int vars = 2 * n;
    std::vector<int> counts(std::size_t(vars), 0);
    auto rec = [&](auto&& self, int v, int remaining, int total) -> void {
        if (v == vars) {
            if (remaining != 0) return;
            std::vector<DifferenceFactor> xf, yf;
            for (int a = 0; a < vars; ++a)
                for (int c = 0; c < counts[std::size_t(a)]; ++c)
                    (a < n ? xf : yf).push_back({a % n, +1});
            pa.push_back(DifferencePattern::mixed(xf, yf));
            pa_order.push_back(total);
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            counts[std::size_t(v)] = c;
            self(self, v + 1, remaining - c, total);
        }
        counts[std::size_t(v)] = 0;
    };
    for (int total = 3; total <= 4; ++total) rec(rec, 0, total, total);

    for (int M : Ms) {
        if (M % 4 != 0) throw ParameterError("verify_fullspace: M must be a multiple of 4");
        const double h = 1.0 / M;
        const int close = M / 4, outer = M / 2;
        const TildeGreen tg(n, h, r, std::max(9, close + 1));
        hess_grad.begin_grid(M);
        hess_hess.begin_grid(M);
        annulus.begin_grid(M);
        const Index origin{0, 0, 0};
        const int stride = n == 3 ? 2 : 1;
        Box::cube(n, -outer, outer).for_each([&](const Index& z) {
            const int zi = int(linf_norm(z, n));
            const double dist = h * euclidean_norm(z, n);
            if (zi <= close) {
                double s3 = 0.0, s4 = 0.0;
                for (const auto& p : p3) s3 += std::pow(tg.difference(z, p), 2);
                for (const auto& p : p4) s4 += std::pow(tg.difference(z, p), 2);
                hess_grad.add(z, origin, opts.scale * std::sqrt(s3), 1.0 / std::pow(dist + h, n - 1));
                hess_hess.add(z, origin, opts.scale * std::sqrt(s4), 1.0 / std::pow(dist + h, n));
            }
            if (zi >= close) {
                for (int i = 0; i < n; ++i)
                    if (z[i] % stride != 0) return;
                for (std::size_t k = 0; k < pa.size(); ++k)
                    annulus.add(z, origin, opts.scale * tg.difference(z, pa[k]), std::pow(r, 4.0 - n - pa_order[k]));
            }
        });
        hess_grad.end_grid();
        hess_hess.end_grid();
        annulus.end_grid();
    }
    return {hess_grad.finish(), hess_hess.finish(), annulus.finish()};
}

}  // namespace bilap
