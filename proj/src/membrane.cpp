#include "bilap/membrane.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bilap/errors.hpp"
#include "bilap/operators.hpp"

namespace bilap {

namespace {

// SplitMix64 finaliser: a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) { return mix64(mix64(seed) ^ index); }

// Axis and diagonal directions with first nonzero component positive.
std::vector<Index> offset_directions(int n) {
    if (n == 2) return {Index{1, 0, 0}, Index{0, 1, 0}, Index{1, 1, 0}, Index{1, -1, 0}};
    return {Index{1, 0, 0},  Index{0, 1, 0},  Index{0, 0, 1},   Index{1, 1, 1},
            Index{1, 1, -1}, Index{1, -1, 1}, Index{1, -1, -1}};
}

// Dyadic offsets 2^k d with |2^k d|_inf <= max_len.
std::vector<Index> dyadic_offsets(int n, int max_len) {
    std::vector<Index> out;
    for (const Index& d : offset_directions(n))
        for (int len = 1; len <= max_len; len *= 2) {
            Index v{0, 0, 0};
            for (int i = 0; i < n; ++i) v[i] = len * d[i];
            out.push_back(v);
        }
    return out;
}

double distance(const Index& a, const Index& b, int n) { return euclidean_norm(a - b, n); }

}  // namespace

double hamiltonian(const GridFunction& psi) {
    const GridFunction lap = laplacian(psi);
    const double norm = discrete_norm(lap, 2.0, Region::whole());
    return 0.5 * norm * norm;
}

LatticeDomain membrane_domain(int n, int N) {
    if (N < 0) throw ParameterError("membrane_domain: N must be >= 0");
    return LatticeDomain::unit_spacing(n, 2 * N + 2);
}

// ---------------------------------------------------------------- sampler

FieldSampler::FieldSampler(const LatticeDomain& domain, std::uint64_t seed, std::size_t cap)
    : green_(std::make_shared<GreenMatrix>(domain, cap)), seed_(seed) {
    green_->cholesky_factor();
}

Eigen::VectorXd FieldSampler::normals(std::uint64_t index) const {
    std::mt19937_64 rng(stream_seed(seed_, index));
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXd xi(static_cast<Eigen::Index>(size()));
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = nd(rng);
    return xi;
}

Eigen::MatrixXd FieldSampler::draw_block(std::uint64_t first, std::size_t cols) const {
    Eigen::MatrixXd Z(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(cols));
    for (std::size_t c = 0; c < cols; ++c) Z.col(Eigen::Index(c)) = normals(first + c);
    return green_->cholesky_factor().triangularView<Eigen::Lower>() * Z;
}

Eigen::VectorXd FieldSampler::to_vector(const GridFunction& psi) const {
    const Box in = domain().interior_box();
    Eigen::VectorXd v(static_cast<Eigen::Index>(size()));
    in.for_each([&](const Index& x) { v[Eigen::Index(in.offset(x))] = psi(x); });
    return v;
}

GridFunction FieldSampler::from_vector(const Eigen::VectorXd& v) const {
    const Box in = domain().interior_box();
    return GridFunction::sample(domain(), in, [&](const Index& x) { return v[Eigen::Index(in.offset(x))]; });
}

FieldSample FieldSampler::draw(std::uint64_t index) const {
    GridFunction psi = from_vector(green_->cholesky_factor().triangularView<Eigen::Lower>() * normals(index));
    const double energy = hamiltonian(psi);
    return FieldSample{seed_, index, std::move(psi), energy};
}

std::vector<FieldSample> FieldSampler::draw_many(std::size_t count, std::uint64_t first) const {
    std::vector<FieldSample> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(draw(first + k));
    return out;
}

std::vector<FieldSample> sample_field(const LatticeDomain& domain, std::uint64_t seed, std::size_t count) {
    return FieldSampler(domain, seed).draw_many(count);
}

double increment_variance(const GreenFunction& green, const Index& x, const Index& y) {
    return green.value(x, x) - green.value(x, y) - green.value(y, x) + green.value(y, y);
}

double increment_variance(const LatticeDomain& domain, const Index& x, const Index& y) {
    GreenFunction g(domain);
    return increment_variance(g, x, y);
}

double gaussian_log_density(const FieldSampler& sampler, const GridFunction& psi) {
    const Eigen::MatrixXd& L = sampler.green().cholesky_factor();
    const Eigen::VectorXd w = L.triangularView<Eigen::Lower>().solve(sampler.to_vector(psi));
    const double d = double(sampler.size());
    return -0.5 * w.squaredNorm() - L.diagonal().array().log().sum() - 0.5 * d * std::log(2.0 * std::numbers::pi);
}

double log_density_ratio(const FieldSampler& sampler, const GridFunction& psi1, const GridFunction& psi2) {
    const Eigen::MatrixXd& L = sampler.green().cholesky_factor();
    const Eigen::VectorXd w1 = L.triangularView<Eigen::Lower>().solve(sampler.to_vector(psi1));
    const Eigen::VectorXd w2 = L.triangularView<Eigen::Lower>().solve(sampler.to_vector(psi2));
    return 0.5 * (w2.squaredNorm() - w1.squaredNorm());
}

// ---------------------------------------------------------------- continuity

double continuity_bound(int n, int N, double dist) {
    if (n == 2) return dist * dist * std::log(2.0 + double(N) / dist);
    return dist;
}

EstimateReport continuity_report(int n, const std::vector<int>& Ns, const ContinuityOptions& opts) {
    VerifyOptions vo;
    vo.seed = opts.seed;
    vo.green = opts.green;
    RatioAccumulator acc("continuity", n, false, vo);
    for (int N : Ns) {
        const LatticeDomain d = membrane_domain(n, N);
        GreenFunction g(d, opts.green);
        acc.begin_grid(N);
        std::vector<Index> sites;
        d.interior_box().for_each([&](const Index& x) { sites.push_back(x); });
        std::vector<std::pair<Index, Index>> pairs;
        if (sites.size() <= opts.full_pair_limit) {
            for (std::size_t a = 0; a < sites.size(); ++a)
                for (std::size_t b = a + 1; b < sites.size(); ++b) pairs.emplace_back(sites[a], sites[b]);
        } else {
            std::mt19937_64 rng(stream_seed(opts.seed, std::uint64_t(N)));
            std::uniform_int_distribution<std::size_t> pick(0, sites.size() - 1);
            std::vector<Index> anchors;
            for (int k = 0; k < opts.anchors; ++k) anchors.push_back(sites[pick(rng)]);
            for (std::size_t a = 0; a < anchors.size(); ++a)
                for (std::size_t b = a + 1; b < anchors.size(); ++b)
                    if (anchors[a] != anchors[b]) pairs.emplace_back(anchors[a], anchors[b]);
            for (const Index& a : anchors)
                for (const Index& v : dyadic_offsets(n, 2 * N))
                    for (int sign : {-1, 1}) {
                        const Index b = sign > 0 ? a + v : a - v;
                        if (d.is_interior(b)) pairs.emplace_back(a, b);
                    }
        }
        std::vector<Index> sources;
        for (const auto& [x, y] : pairs) {
            sources.push_back(x);
            sources.push_back(y);
        }
        std::sort(sources.begin(), sources.end());
        sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
        g.precompute(sources);
        for (const auto& [x, y] : pairs)
            acc.add(x, y, increment_variance(g, x, y), continuity_bound(n, N, distance(x, y, n)));
        acc.end_grid();
    }
    return acc.finish();
}

HolderQuantiles holder_quantiles(int n, int N, double alpha, std::size_t samples, std::uint64_t seed,
                                 const std::vector<double>& levels) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("holder_quantiles: alpha must lie in (0,1]");
    if (samples < 2) throw ParameterError("holder_quantiles: need at least two samples");
    const LatticeDomain d = membrane_domain(n, N);
    const FieldSampler sampler(d, stream_seed(seed, std::uint64_t(N)));
    const Box lat = d.lattice_box();
    const Box in = d.interior_box();
    const std::vector<Index> offsets = dyadic_offsets(n, 2 * N + 2);
    const double amp = std::pow(double(N), 0.5 * n - 2.0);
    // Precomputed pair list (x, x + v) within the lattice, with the rescaled distance weight.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> idx;
    std::vector<double> weight;
    const Eigen::Index outside = -1;
    auto slot = [&](const Index& x) { return in.contains(x) ? Eigen::Index(in.offset(x)) : outside; };
    lat.for_each([&](const Index& x) {
        for (const Index& v : offsets) {
            const Index y = x + v;
            if (!lat.contains(y)) continue;
            const Eigen::Index a = slot(x), b = slot(y);
            if (a == outside && b == outside) continue;
            idx.emplace_back(a, b);
            weight.push_back(amp / std::pow(euclidean_norm(v, n) / double(N), alpha));
        }
    });
    std::vector<double> stats;
    stats.reserve(samples);
    const std::size_t block = 1024;
    for (std::size_t first = 0; first < samples; first += block) {
        const std::size_t cols = std::min(block, samples - first);
        const Eigen::MatrixXd P = sampler.draw_block(first, cols);
        for (std::size_t c = 0; c < cols; ++c) {
            const auto col = P.col(Eigen::Index(c));
            double best = 0.0;
            for (std::size_t k = 0; k < idx.size(); ++k) {
                const double va = idx[k].first == outside ? 0.0 : col[idx[k].first];
                const double vb = idx[k].second == outside ? 0.0 : col[idx[k].second];
                best = std::max(best, std::abs(va - vb) * weight[k]);
            }
            stats.push_back(best);
        }
    }
    std::sort(stats.begin(), stats.end());
    HolderQuantiles q;
    q.N = N;
    q.alpha = alpha;
    q.samples = samples;
    q.levels = levels;
    const double m = double(samples);
    auto order_stat = [&](double rank) {
        const auto k = std::size_t(std::clamp(rank, 0.0, m - 1.0));
        return stats[k];
    };
    for (double p : levels) {
        if (!(p > 0.0 && p < 1.0)) throw ParameterError("holder_quantiles: levels must lie in (0,1)");
        // Order-statistic band from the normal approximation to Binomial(m, p).
        const double half = 1.959963984540054 * std::sqrt(m * p * (1.0 - p));
        q.values.push_back(order_stat(std::ceil(m * p) - 1.0));
        q.low.push_back(order_stat(std::floor(m * p - half) - 1.0));
        q.high.push_back(order_stat(std::ceil(m * p + half) - 1.0));
    }
    return q;
}

// ---------------------------------------------------------------- entropic repulsion

std::pair<double, double> wilson_interval(std::size_t k, std::size_t m, double z) {
    if (m == 0) throw ParameterError("wilson_interval: no trials");
    const double n = double(m);
    const double p = double(k) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

RepulsionTable entropic_repulsion_mc(int n, const std::vector<int>& Ns, std::size_t samples, std::uint64_t seed) {
    if (samples == 0) throw ParameterError("entropic_repulsion_mc: samples must be positive");
    RepulsionTable t;
    t.n = n;
    t.seed = seed;
    for (int N : Ns) {
        const FieldSampler sampler(membrane_domain(n, N), stream_seed(seed, std::uint64_t(N)));
        RepulsionRow row;
        row.N = N;
        row.samples = samples;
        const std::size_t block = 8192;
        for (std::size_t first = 0; first < samples; first += block) {
            const std::size_t cols = std::min(block, samples - first);
            const Eigen::MatrixXd P = sampler.draw_block(first, cols);
            for (std::size_t c = 0; c < cols; ++c) {
                const auto col = P.col(Eigen::Index(c));
                if (col.minCoeff() >= 0.0) ++row.hits_plus;
                if (col.maxCoeff() <= 0.0) ++row.hits_minus;
            }
        }
        row.p_plus = double(row.hits_plus) / double(samples);
        row.p_minus = double(row.hits_minus) / double(samples);
        std::tie(row.ci_low, row.ci_high) = wilson_interval(row.hits_plus, samples);
        row.lower_bound_only = row.hits_plus == 0;
        row.neg_log_p = row.lower_bound_only ? -std::log(row.ci_high) : -std::log(row.p_plus);
        t.rows.push_back(row);
    }
    t.monotone = true;
    for (std::size_t k = 0; k + 1 < t.rows.size(); ++k)
        if (!(t.rows[k + 1].neg_log_p > t.rows[k].neg_log_p) || t.rows[k + 1].lower_bound_only) t.monotone = false;
    double sxy = 0.0, sxx = 0.0;
    std::vector<double> lx, ly;
    for (const auto& r : t.rows) {
        const double a = std::pow(double(r.N), n - 1);
        sxy += a * r.neg_log_p;
        sxx += a * a;
        if (r.N > 0 && r.neg_log_p > 0.0) {
            lx.push_back(std::log(double(r.N)));
            ly.push_back(std::log(r.neg_log_p));
        }
    }
    t.fit_c = sxx > 0.0 ? sxy / sxx : 0.0;
    if (lx.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t k = 0; k < lx.size(); ++k) {
            mx += lx[k];
            my += ly[k];
        }
        mx /= double(lx.size());
        my /= double(lx.size());
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < lx.size(); ++k) {
            num += (lx[k] - mx) * (ly[k] - my);
            den += (lx[k] - mx) * (lx[k] - mx);
        }
        t.fit_exponent = den > 0.0 ? num / den : 0.0;
    }
    return t;
}

}  // namespace bilap
