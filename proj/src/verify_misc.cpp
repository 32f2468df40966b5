#include <cmath>
#include <numbers>

#include "bilap/errors.hpp"
#include "bilap/operators.hpp"
#include "bilap/verify.hpp"
#include "verify_internal.hpp"

namespace bilap {

namespace {

using detail::uniform;

// Smooth profile vanishing on one face of the cube: (x_a - face) g(x) with a
// random trigonometric polynomial g, defined in continuum units.
struct FaceProfile {
    int axis = 0;
    double face = 0.0;
    double c0 = 1.0;
    std::vector<std::array<double, 5>> modes;  // amplitude, k1, k2, k3, phase

    double operator()(const Point& p, int n) const {
        double g = c0;
        for (const auto& m : modes) {
            double arg = m[4];
            for (int i = 0; i < n; ++i) arg += 2.0 * std::numbers::pi * m[std::size_t(1 + i)] * p[i];
            g += m[0] * std::cos(arg);
        }
        return (p[std::size_t(axis)] - face) * g;
    }
};

struct PoincareTrial {
    Point center{0.0, 0.0, 0.0};
    double r = 0.0;
    int axis = 0;
    int side = 1;
    FaceProfile profile;
};

std::vector<PoincareTrial> make_trials(int n, const VerifyOptions& opts) {
    std::mt19937_64 rng(opts.seed * 0xD1B54A32D192ED03ull + 99u);
    std::vector<PoincareTrial> out;
    for (int t = 0; t < opts.trials; ++t) {
        PoincareTrial p;
        for (int i = 0; i < n; ++i) p.center[i] = uniform(rng, 0.3, 0.7);
        p.r = uniform(rng, 0.25, 0.30);
        p.axis = int(uniform(rng, 0.0, n)) % n;
        p.side = uniform(rng, 0.0, 1.0) < 0.5 ? -1 : 1;
        p.profile.axis = p.axis;
        p.profile.c0 = uniform(rng, -1.0, 1.0);
        const int modes = t % 4;  // mode 0: the linear profile
        for (int m = 0; m < modes; ++m) {
            std::array<double, 5> md{};
            md[0] = uniform(rng, 0.2, 1.0);
            for (int i = 0; i < 3; ++i) md[std::size_t(1 + i)] = std::round(uniform(rng, -3.0, 3.0));
            md[4] = uniform(rng, 0.0, 2.0 * std::numbers::pi);
            p.profile.modes.push_back(md);
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace

std::vector<EstimateReport> verify_poincare_sobolev(int n, const std::vector<int>& Ms, const VerifyOptions& opts) {
    const auto trials = make_trials(n, opts);
    RatioAccumulator cube("poincare-cube", n, false, opts);
    RatioAccumulator ann("poincare-annulus", n, false, opts);
    RatioAccumulator sob("sobolev-4-inf", n, false, opts);
    RatioAccumulator hol("holder-quarter", n, false, opts);
    for (int M : Ms) {
        const LatticeDomain d(n, M);
        const double h = d.h();
        for (auto* a : {&cube, &ann, &sob, &hol}) a->begin_grid(M);
        for (std::size_t t = 0; t < trials.size(); ++t) {
            const auto& tr = trials[t];
            const Index x = detail::snap(d, tr.center);
            const double r = aligned_radius_below(tr.r, h);
            const CubeRegion Q{x, r};
            const int k = Q.half_width(h);
            if (k < 1) throw ParameterError("verify_poincare_sobolev: cube below one mesh width on M=" + std::to_string(M));
            FaceProfile prof = tr.profile;
            // The profile vanishes on the lattice face x_a = x_a +- k.
            prof.face = h * (x[std::size_t(tr.axis)] + tr.side * k);
            const Box box = Q.box(n, h).grown(1);
            const GridFunction u = GridFunction::sample(d, box, [&](const Index& z) {
                Point p{0.0, 0.0, 0.0};
                for (int i = 0; i < n; ++i) p[i] = h * z[i];
                return opts.scale * prof(p, n);
            });
            const auto g = gradient(u, +1);
            const Region Rq = Region::cube(Q);
            const double s = aligned_radius_below(0.5 * r, h);
            const Region Ra = Region::annulus(x, r, s);
            cube.add(x, x, discrete_norm(u, 2.0, Rq), r * discrete_norm(g, 2.0, Rq), int(t), 1e-300);
            ann.add(x, x, discrete_norm(u, 2.0, Ra), r * discrete_norm(g, 2.0, Ra), int(t), 1e-300);
            const double g4 = discrete_norm(g, 4.0, Rq);
            sob.add(x, x, discrete_norm(u, kInfinity, Rq), std::pow(r, 1.0 - n / 4.0) * g4, int(t), 1e-300);
            hol.add(x, x, holder_seminorm(u, 0.25, Rq), std::pow(r, 1.0 - n / 4.0 - 0.25) * g4, int(t), 1e-300);
        }
        for (auto* a : {&cube, &ann, &sob, &hol}) a->end_grid();
    }
    return {cube.finish(), ann.finish(), sob.finish(), hol.finish()};
}

}  // namespace bilap
