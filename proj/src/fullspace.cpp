#include "bilap/fullspace.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>

#include "bilap/errors.hpp"

namespace bilap {

namespace {

constexpr double kPi = std::numbers::pi;

void check_dim(int n) {
    if (n != 2 && n != 3) throw ParameterError("full-space kernel: dimension must be 2 or 3");
}

long long squared_norm(const Index& z, int n) {
    long long s = 0;
    for (int i = 0; i < n; ++i) s += 1LL * z[i] * z[i];
    return s;
}

// Gauss-Legendre rule on [-1, 1].
struct Rule {
    std::vector<double> x, w;
};

template <unsigned N>
Rule make_rule() {
    using G = boost::math::quadrature::gauss<double, N>;
    Rule r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) {
            r.x.push_back(0.0);
            r.w.push_back(w[i]);
            continue;
        }
        r.x.push_back(a[i]);
        r.w.push_back(w[i]);
        r.x.push_back(-a[i]);
        r.w.push_back(w[i]);
    }
    return r;
}

const Rule& rule(int q) {
    static const Rule r8 = make_rule<8>(), r10 = make_rule<10>(), r12 = make_rule<12>(), r16 = make_rule<16>(),
                      r20 = make_rule<20>();
    switch (q) {
        case 8: return r8;
        case 10: return r10;
        case 12: return r12;
        case 16: return r16;
        case 20: return r20;
    }
    throw ParameterError("oracle quadrature supports 8, 10, 12, 16 or 20 nodes per panel");
}

// Composite rule on [a, b] with panels short enough that a wave of the given
// frequency (cycles per unit length) completes at most one period per panel.
void axis_nodes(double a, double b, double freq, int q, std::vector<double>& x, std::vector<double>& w) {
    const Rule& r = rule(q);
    const int panels = std::max(1, int(std::ceil(freq * (b - a))));
    const double len = (b - a) / panels;
    x.clear();
    w.clear();
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * len;
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            x.push_back(mid + 0.5 * len * r.x[i]);
            w.push_back(0.5 * len * r.w[i]);
        }
    }
}

// Re[ prod_factors symbol * exp(2 pi i z xi) ] on one axis, for `plus` forward
// and `minus` backward factors: (2 sin pi xi)^m cos(2 pi xi (z + (plus - minus)/2) + m pi/2).
double axis_symbol(double xi, int z, int plus, int minus) {
    const int m = plus + minus;
    const double s = 2.0 * std::sin(kPi * xi);
    double pw = 1.0;
    for (int i = 0; i < m; ++i) pw *= s;
    return pw * std::cos(2.0 * kPi * xi * (z + 0.5 * (plus - minus)) + 0.5 * kPi * m);
}

struct AxisCounts {
    std::array<int, kMaxDim> plus{0, 0, 0};
    std::array<int, kMaxDim> minus{0, 0, 0};
};

AxisCounts counts(const DifferenceTerm& t) {
    AxisCounts c;
    for (const auto& f : t.factors) (f.sign > 0 ? c.plus : c.minus)[f.axis] += 1;
    return c;
}

// Integrate over one cube (lower corner lo, side L) of the positive orthant.
double cube_integral(int n, const Index& z, const DifferencePattern& p, const std::vector<AxisCounts>& cnt,
                     const std::array<double, kMaxDim>& lo, double L, const std::array<double, kMaxDim>& freq,
                     int q) {
    const std::size_t T = p.terms.size();
    std::array<std::vector<double>, kMaxDim> x, w, s;
    // R[axis][term][node]
    std::array<std::vector<std::vector<double>>, kMaxDim> R;
    for (int j = 0; j < n; ++j) {
        axis_nodes(lo[j], lo[j] + L, freq[j], q, x[j], w[j]);
        s[j].resize(x[j].size());
        for (std::size_t a = 0; a < x[j].size(); ++a) {
            const double sn = 2.0 * std::sin(kPi * x[j][a]);
            s[j][a] = sn * sn;
        }
        R[j].assign(T, std::vector<double>(x[j].size()));
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t a = 0; a < x[j].size(); ++a)
                R[j][t][a] = w[j][a] * axis_symbol(x[j][a], z[j], cnt[t].plus[j], cnt[t].minus[j]);
    }

    double total = 0.0;
    if (n == 2) {
        for (std::size_t a = 0; a < x[0].size(); ++a)
            for (std::size_t b = 0; b < x[1].size(); ++b) {
                const double sg = s[0][a] + s[1][b];
                const double inv = 1.0 / (sg * sg);
                double acc = 0.0;
                for (std::size_t t = 0; t < T; ++t) acc += p.terms[t].coeff * R[0][t][a] * R[1][t][b];
                total += acc * inv;
            }
        return total;
    }
    const std::size_t nc = x[2].size();
    std::vector<double> inv(nc);
    for (std::size_t a = 0; a < x[0].size(); ++a)
        for (std::size_t b = 0; b < x[1].size(); ++b) {
            const double sab = s[0][a] + s[1][b];
            for (std::size_t c = 0; c < nc; ++c) {
                const double sg = sab + s[2][c];
                inv[c] = 1.0 / (sg * sg);
            }
            for (std::size_t t = 0; t < T; ++t) {
                const double* r3 = R[2][t].data();
                double inner = 0.0;
                for (std::size_t c = 0; c < nc; ++c) inner += r3[c] * inv[c];
                total += p.terms[t].coeff * R[0][t][a] * R[1][t][b] * inner;
            }
        }
    return total;
}

}  // namespace

// ---------------------------------------------------------------- expansion

double anisotropy_factor(const Index& z) {
    const double r2 = double(squared_norm(z, 2));
    if (r2 == 0.0) throw DomainError("anisotropy_factor: z = 0");
    const double a = double(z[0]) * z[0], b = double(z[1]) * z[1];
    return 4.0 * (a * a + b * b) / (r2 * r2);
}

namespace {

double anisotropy_coeff(AnisotropyForm form) {
    return form == AnisotropyForm::corrected ? 1.0 / (192.0 * kPi) : 1.0;
}

double expansion_constant_2d() { return -12.0 * std::log(kPi) - 12.0 * kEulerGamma - 3.0; }

double expansion_3d(const Index& z) {
    const double r2 = double(squared_norm(z, 3));
    const double r = std::sqrt(r2);
    double q = 0.0;
    for (int i = 0; i < 3; ++i) q += std::pow(double(z[i]), 4);
    return -r / (8.0 * kPi) + q / (64.0 * kPi * r2 * r2 * r) + 1.0 / (64.0 * kPi * r);
}

}  // namespace

double mangad_expansion(int n, const Index& z, AnisotropyForm form) {
    check_dim(n);
    const long long r2i = squared_norm(z, n);
    if (r2i == 0) throw DomainError("mangad_expansion: singular at z = 0");
    if (n == 3) return expansion_3d(z);
    const double r2 = double(r2i);
    const double logr = 0.5 * std::log(r2);
    return r2 * logr / (8.0 * kPi) + (kEulerGamma - 1.0 + std::log(kPi)) * r2 / (8.0 * kPi) -
           logr / (16.0 * kPi) + anisotropy_coeff(form) * anisotropy_factor(z) + expansion_constant_2d();
}

// ---------------------------------------------------------------- patterns

DifferencePattern DifferencePattern::product(std::vector<DifferenceFactor> factors, double coeff) {
    for (const auto& f : factors) {
        if (f.axis < 0 || f.axis >= kMaxDim) throw ParameterError("difference factor axis out of range");
        if (f.sign != 1 && f.sign != -1) throw ParameterError("difference factor sign must be +1 or -1");
    }
    DifferencePattern p;
    p.terms.push_back({coeff, std::move(factors)});
    return p;
}

DifferencePattern DifferencePattern::axis_fourth(int axis) {
    return product({{axis, 1}, {axis, -1}, {axis, 1}, {axis, -1}});
}

DifferencePattern DifferencePattern::bilaplacian(int n) {
    check_dim(n);
    DifferencePattern p;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) p.terms.push_back({1.0, {{a, 1}, {a, -1}, {b, 1}, {b, -1}}});
    return p;
}

DifferencePattern DifferencePattern::mixed(const std::vector<DifferenceFactor>& x_factors,
                                           const std::vector<DifferenceFactor>& y_factors) {
    std::vector<DifferenceFactor> f = x_factors;
    double coeff = 1.0;
    for (const auto& g : y_factors) {
        f.push_back({g.axis, -g.sign});
        coeff = -coeff;
    }
    return product(std::move(f), coeff);
}

int DifferencePattern::order() const {
    if (terms.empty()) throw ParameterError("empty difference pattern");
    const std::size_t k = terms.front().factors.size();
    for (const auto& t : terms)
        if (t.factors.size() != k) throw ParameterError("difference pattern mixes orders");
    return int(k);
}

int DifferencePattern::max_axis() const {
    int m = -1;
    for (const auto& t : terms)
        for (const auto& f : t.factors) m = std::max(m, f.axis);
    return m;
}

std::vector<std::pair<Index, double>> DifferencePattern::stencil() const {
    std::map<Index, double> acc;
    for (const auto& t : terms) {
        std::map<Index, double> cur{{Index{0, 0, 0}, t.coeff}};
        for (const auto& f : t.factors) {
            std::map<Index, double> next;
            const Index e = unit_vector(f.axis);
            for (const auto& [off, w] : cur) {
                if (f.sign > 0) {
                    next[off + e] += w;
                    next[off] -= w;
                } else {
                    next[off] += w;
                    next[off - e] -= w;
                }
            }
            cur = std::move(next);
        }
        for (const auto& [off, w] : cur) acc[off] += w;
    }
    std::vector<std::pair<Index, double>> out;
    for (const auto& [off, w] : acc)
        if (w != 0.0) out.emplace_back(off, w);
    return out;
}

// ---------------------------------------------------------------- oracle

double difference_oracle(int n, const Index& z, const DifferencePattern& pattern, const OracleOptions& opts) {
    check_dim(n);
    const int order = pattern.order();
    if (order <= 4 - n) throw ParameterError("difference_oracle: pattern order must exceed 4 - n");
    if (pattern.max_axis() >= n) throw ParameterError("difference_oracle: pattern axis exceeds dimension");

    std::vector<AxisCounts> cnt;
    std::array<double, kMaxDim> freq{0, 0, 0};
    for (const auto& t : pattern.terms) cnt.push_back(counts(t));
    for (int j = 0; j < n; ++j) {
        int m = 0;
        for (const auto& c : cnt) m = std::max(m, c.plus[j] + c.minus[j]);
        freq[j] = std::abs(z[j]) + 0.5 * m + 1.0;
    }

    double total = 0.0;
    double prev = kInfinity;
    for (int k = 0; k < opts.max_levels; ++k) {
        const double L = std::ldexp(1.0, -k - 2);
        double level = 0.0;
        for (int mask = 1; mask < (1 << n); ++mask) {
            std::array<double, kMaxDim> lo{0, 0, 0};
            for (int j = 0; j < n; ++j) lo[j] = (mask >> j & 1) ? L : 0.0;
            level += cube_integral(n, z, pattern, cnt, lo, L, freq, opts.nodes);
        }
        level *= double(1 << n);
        total += level;
        if (k + 1 >= opts.min_levels && std::abs(level) < 0.25 * opts.tol && std::abs(prev) < 0.5 * opts.tol)
            return total;
        prev = level;
    }
    throw AccuracyError("difference_oracle: dyadic refinement did not reach tolerance", std::abs(prev));
}

double fourth_difference_oracle(int n, const Index& z, const DifferencePattern& pattern, const OracleOptions& opts) {
    if (pattern.order() != 4) throw ParameterError("fourth_difference_oracle: pattern must have order 4");
    return difference_oracle(n, z, pattern, opts);
}

double expansion_difference(int n, const Index& z, const DifferencePattern& pattern, AnisotropyForm form) {
    check_dim(n);
    const auto st = pattern.stencil();
    for (const auto& [off, w] : st)
        if (squared_norm(z + off, n) == 0) throw DomainError("expansion_difference: stencil touches z = 0");
    if (n == 3) {
        double s = 0.0;
        for (const auto& [off, w] : st) s += w * expansion_3d(z + off);
        return s;
    }
    double log_part = 0.0, r2log_part = 0.0, aniso_part = 0.0, weight_sum = 0.0;
    bool integral_weights = true;
    long long r2_int = 0;
    double r2_real = 0.0;
    for (const auto& [off, w] : st) {
        const Index p = z + off;
        const long long r2 = squared_norm(p, 2);
        const double logr = 0.5 * std::log(double(r2));
        r2log_part += w * double(r2) * logr;
        log_part += w * logr;
        aniso_part += w * anisotropy_factor(p);
        weight_sum += w;
        if (w != std::round(w)) integral_weights = false;
        r2_int += (long long)std::llround(w) * r2;
        r2_real += w * double(r2);
    }
    const double r2_part = integral_weights ? double(r2_int) : r2_real;
    return r2log_part / (8.0 * kPi) + (kEulerGamma - 1.0 + std::log(kPi)) * r2_part / (8.0 * kPi) -
           log_part / (16.0 * kPi) + anisotropy_coeff(form) * aniso_part + expansion_constant_2d() * weight_sum;
}

// ---------------------------------------------------------------- table

OracleTable::OracleTable(int n, int radius, const OracleOptions& opts)
    : n_(n), radius_(radius), min_order_(3), span_(2 * radius + 1) {
    check_dim(n);
    if (radius < 0) throw ParameterError("OracleTable: negative radius");
    const int K = 5 * span_;
    const double freq = radius + 3.0;

    auto fill_R = [&](const std::vector<double>& x, const std::vector<double>& w) {
        Eigen::MatrixXd R(Eigen::Index(x.size()), K);
        for (std::size_t a = 0; a < x.size(); ++a)
            for (int b = 0; b <= 4; ++b)
                for (int zz = -radius; zz <= radius; ++zz)
                    R(Eigen::Index(a), b * span_ + zz + radius) = w[a] * axis_symbol(x[a], zz, b, 0);
        return R;
    };
    auto svec = [](const std::vector<double>& x) {
        std::vector<double> s(x.size());
        for (std::size_t a = 0; a < x.size(); ++a) {
            const double sn = 2.0 * std::sin(kPi * x[a]);
            s[a] = sn * sn;
        }
        return s;
    };
    auto valid = [&](int k) {
        // Flattened index -> is |beta| in [min_order, 4]?
        int ord = 0;
        for (int j = n - 1; j >= 0; --j) {
            ord += (k % K) / span_;
            k /= K;
        }
        return ord >= min_order_ && ord <= 4;
    };

    const Eigen::Index total_size = n == 2 ? Eigen::Index(K) * K : Eigen::Index(K) * K * K;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(total_size);
    double prev = kInfinity;
    bool done = false;
    for (int k = 0; k < opts.max_levels && !done; ++k) {
        const double L = std::ldexp(1.0, -k - 2);
        Eigen::VectorXd level = Eigen::VectorXd::Zero(total_size);
        for (int mask = 1; mask < (1 << n); ++mask) {
            std::array<std::vector<double>, kMaxDim> x, w;
            std::array<Eigen::MatrixXd, kMaxDim> R;
            std::array<std::vector<double>, kMaxDim> s;
            for (int j = 0; j < n; ++j) {
                const double lo = (mask >> j & 1) ? L : 0.0;
                axis_nodes(lo, lo + L, freq, opts.nodes, x[j], w[j]);
                R[j] = fill_R(x[j], w[j]);
                s[j] = svec(x[j]);
            }
            if (n == 2) {
                Eigen::MatrixXd W(Eigen::Index(x[0].size()), Eigen::Index(x[1].size()));
                for (Eigen::Index a = 0; a < W.rows(); ++a)
                    for (Eigen::Index b = 0; b < W.cols(); ++b) {
                        const double sg = s[0][std::size_t(a)] + s[1][std::size_t(b)];
                        W(a, b) = 1.0 / (sg * sg);
                    }
                Eigen::MatrixXd T = R[0].transpose() * W * R[1];  // K x K, [k1, k2]
                using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
                Eigen::Map<RowMat>(level.data(), K, K) += T;
            } else {
                const Eigen::Index Na = Eigen::Index(x[0].size()), Nb = Eigen::Index(x[1].size()),
                                   Nc = Eigen::Index(x[2].size());
                Eigen::MatrixXd W(Na * Nb, Nc);
                for (Eigen::Index a = 0; a < Na; ++a)
                    for (Eigen::Index b = 0; b < Nb; ++b)
                        for (Eigen::Index c = 0; c < Nc; ++c) {
                            const double sg = s[0][std::size_t(a)] + s[1][std::size_t(b)] + s[2][std::size_t(c)];
                            W(a * Nb + b, c) = 1.0 / (sg * sg);
                        }
                const Eigen::MatrixXd U = W * R[2];  // (a,b) x k3
                using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
                RowMat V(Na, Eigen::Index(K) * K);  // a x (k2, k3)
                for (Eigen::Index a = 0; a < Na; ++a) {
                    const Eigen::MatrixXd Va = R[1].transpose() * U.middleRows(a * Nb, Nb);  // k2 x k3
                    for (Eigen::Index k2 = 0; k2 < K; ++k2) V.row(a).segment(k2 * K, K) = Va.row(k2);
                }
                RowMat T = R[0].transpose() * V;  // k1 x (k2, k3)
                level += Eigen::Map<const Eigen::VectorXd>(T.data(), T.size());
            }
        }
        level *= double(1 << n);
        acc += level;
        double worst = 0.0;
        for (Eigen::Index i = 0; i < total_size; ++i)
            if (valid(int(i))) worst = std::max(worst, std::abs(level[i]));
        if (k + 1 >= opts.min_levels && worst < 0.25 * opts.tol && prev < 0.5 * opts.tol) done = true;
        prev = worst;
    }
    if (!done) throw AccuracyError("OracleTable: dyadic refinement did not reach tolerance", prev);
    achieved_ = prev;
    values_.assign(acc.data(), acc.data() + acc.size());
}

bool OracleTable::covers(const Index& z) const {
    for (int j = 0; j < n_; ++j)
        if (std::abs(z[j]) > radius_) return false;
    return true;
}

std::size_t OracleTable::slot(const Index& beta, const Index& z) const {
    const std::size_t K = std::size_t(5 * span_);
    std::size_t idx = 0;
    for (int j = 0; j < n_; ++j) idx = idx * K + std::size_t(beta[j] * span_ + z[j] + radius_);
    return idx;
}

double OracleTable::forward_difference(const Index& beta, const Index& z) const {
    int ord = 0;
    for (int j = 0; j < n_; ++j) {
        if (beta[j] < 0 || beta[j] > 4) throw ParameterError("OracleTable: multi-index entry out of range");
        ord += beta[j];
    }
    if (ord < min_order_ || ord > 4) throw ParameterError("OracleTable: order outside the tabulated range");
    if (!covers(z)) throw DomainError("OracleTable: point outside the tabulated box");
    return values_[slot(beta, z)];
}

double OracleTable::apply(const DifferencePattern& p, const Index& z) const {
    double s = 0.0;
    for (const auto& t : p.terms) {
        Index beta{0, 0, 0};
        Index at = z;
        for (const auto& f : t.factors) {
            beta[f.axis] += 1;
            if (f.sign < 0) at[f.axis] -= 1;
        }
        s += t.coeff * forward_difference(beta, at);
    }
    return s;
}

// ---------------------------------------------------------------- rescaled kernel

TildeGreen::TildeGreen(int n, double h, double r, int table_radius, const OracleOptions& opts)
    : n_(n), h_(h), r_(r), table_radius_(table_radius), opts_(opts) {
    check_dim(n);
    if (!(h > 0.0)) throw ParameterError("TildeGreen: h must be positive");
    if (!(r >= 4.0 * h * (1.0 - 1e-12))) throw ParameterError("TildeGreen: r must satisfy r >= 4h");
    if (table_radius < 0) throw ParameterError("TildeGreen: negative table radius");
}

const OracleTable& TildeGreen::table() const {
    static std::mutex m;
    std::lock_guard lock(m);
    if (!table_) table_ = std::make_shared<OracleTable>(n_, table_radius_ + 2, opts_);
    return *table_;
}

double TildeGreen::value(const Index& z) const {
    const double r2 = double(squared_norm(z, n_));
    if (std::sqrt(r2) < kExpansionValidityRadius)
        throw DomainError("TildeGreen::value: pointwise values near the source are not available");
    if (n_ == 3) return h_ * mangad_expansion(3, z);
    return h_ * h_ * (mangad_expansion(2, z) + r2 * std::log(h_ / r_) / (8.0 * kPi));
}

double TildeGreen::difference(const Index& z, const DifferencePattern& pattern) const {
    const int order = pattern.order();
    const auto st = pattern.stencil();
    bool far = true;
    for (const auto& [off, w] : st)
        if (std::sqrt(double(squared_norm(z + off, n_))) < kExpansionValidityRadius) far = false;
    // Every forward difference the table would be asked for must be covered.
    bool tabulated = order >= 3 && order <= 4;
    for (const auto& t : pattern.terms) {
        Index at = z;
        for (const auto& f : t.factors)
            if (f.sign < 0) at[f.axis] -= 1;
        if (linf_norm(at, n_) > table_radius_ + 2) tabulated = false;
    }
    double unit;
    if (tabulated && (!far || linf_norm(z, n_) <= table_radius_)) {
        unit = table().apply(pattern, z);
    } else if (far) {
        unit = expansion_difference(n_, z, pattern);
    } else {
        throw DomainError("TildeGreen::difference: near-source differences need order 3 or 4");
    }
    if (n_ == 2) {
        long long r2 = 0;
        for (const auto& [off, w] : st) r2 += (long long)std::llround(w) * squared_norm(z + off, 2);
        unit += double(r2) * std::log(h_ / r_) / (8.0 * kPi);
    }
    return std::pow(h_, 4 - n_ - order) * unit;
}

std::vector<Index> shell_points(int n, int count, double rmin, double rmax, std::uint64_t seed) {
    if (n != 2 && n != 3) throw ParameterError("shell_points: n must be 2 or 3");
    if (count < 0 || !(rmin >= 1.0) || !(rmax >= rmin + 1.0))
        throw ParameterError("shell_points: need count >= 0 and 1 <= rmin <= rmax - 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit;
    std::vector<Index> out;
    while (int(out.size()) < count) {
        double dir[3] = {0.0, 0.0, 0.0}, norm = 0.0;
        for (int i = 0; i < n; ++i) {
            dir[i] = normal(rng);
            norm += dir[i] * dir[i];
        }
        norm = std::sqrt(norm);
        if (!(norm > 0.0)) continue;
        const double r = std::pow(std::pow(rmin, n) + unit(rng) * (std::pow(rmax, n) - std::pow(rmin, n)), 1.0 / n);
        Index z{0, 0, 0};
        bool generic = true;
        for (int i = 0; i < n; ++i) {
            z[std::size_t(i)] = int(std::lround(r * dir[i] / norm));
            if (z[std::size_t(i)] == 0) generic = false;
        }
        const double len = euclidean_norm(z, n);
        if (generic && len >= rmin && len <= rmax) out.push_back(z);
    }
    return out;
}

}  // namespace bilap
