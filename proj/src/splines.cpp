#include "bilap/splines.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <vector>

#include "bilap/errors.hpp"

namespace bilap {

namespace {

double binomial(int m, int i) {
    double b = 1.0;
    for (int k = 1; k <= i; ++k) b = b * (m - i + k) / k;
    return b;
}

double factorial(int m) {
    double f = 1.0;
    for (int k = 2; k <= m; ++k) f *= k;
    return f;
}

// (t)_+^p with (t)_+^0 = [t >= 0].
double truncated_power(double t, int p) {
    if (t < 0.0) return 0.0;
    if (p == 0) return 1.0;
    return std::pow(t, p);
}

}  // namespace

double bspline(int m, double x) { return bspline_derivative(m, x, 0); }

double bspline_derivative(int m, double x, int k) {
    if (m < 1) throw ParameterError("bspline: order must be >= 1");
    if (k < 0 || k > m - 1) throw ParameterError("bspline_derivative: derivative order must lie in [0, m-1]");
    if (x < 0.0 || x >= m) return 0.0;
    const int p = m - 1 - k;
    // d^k/dx^k (x - i)_+^{m-1} = (m-1)!/p! (x - i)_+^p
    const double falling = factorial(m - 1) / factorial(p);
    double s = 0.0;
    for (int i = 0; i <= m; ++i) {
        const double sign = (i % 2) ? -1.0 : 1.0;
        s += sign * binomial(m, i) * truncated_power(x - i, p);
    }
    return m * falling * s / factorial(m);
}

std::pair<double, double> spline_derivative_identity_check(int m, double x) {
    if (m < 2) throw ParameterError("spline_derivative_identity_check: order must be >= 2");
    return {bspline_derivative(m, x, 1), bspline(m - 1, x) - bspline(m - 1, x - 1.0)};
}

// ---------------------------------------------------------------- tensor operator

SplineOperator::SplineOperator(int n, const Index& mu, double h) : n_(n), mu_(mu), h_(h) {
    if (n != 2 && n != 3) throw ParameterError("SplineOperator: dimension must be 2 or 3");
    if (!(h > 0.0)) throw ParameterError("SplineOperator: h must be positive");
    for (int i = 0; i < n; ++i)
        if (mu[i] < 1) throw ParameterError("SplineOperator: orders must be >= 1");
    for (int i = n; i < kMaxDim; ++i) mu_[i] = 1;
}

SplineOperator SplineOperator::cubic(int n, double h) { return SplineOperator(n, Index{3, 3, 3}, h); }

SplineOperator SplineOperator::lowered(const MultiIndex& alpha) const {
    Index mu = mu_;
    for (int i = 0; i < n_; ++i) {
        if (alpha.alpha[i] < 0 || alpha.alpha[i] >= mu_[i])
            throw ParameterError("SplineOperator: multi-index must satisfy 0 <= alpha_i < mu_i");
        mu[i] -= alpha.alpha[i];
    }
    return SplineOperator(n_, mu, h_);
}

void SplineOperator::contributing_range(const Point& x, Index& first, Index& last) const {
    first = last = Index{0, 0, 0};
    for (int i = 0; i < n_; ++i) {
        const int top = int(std::floor(x[i] / h_));
        first[i] = top - mu_[i] + 1;
        last[i] = top;
    }
}

double SplineOperator::eval(const GridFunction& u, const Point& x) const {
    return derivative(u, MultiIndex{}, x);
}

double SplineOperator::derivative(const GridFunction& u, const MultiIndex& alpha, const Point& x) const {
    for (int i = 0; i < n_; ++i)
        if (alpha.alpha[i] < 0 || alpha.alpha[i] >= mu_[i])
            throw ParameterError("SplineOperator: multi-index must satisfy 0 <= alpha_i < mu_i");
    Index first, last;
    contributing_range(x, first, last);
    // Per-axis basis values, then the tensor sum.
    std::array<std::vector<double>, kMaxDim> basis;
    for (int i = 0; i < n_; ++i) {
        const double scale = std::pow(h_, -alpha.alpha[i]);
        for (int k = first[i]; k <= last[i]; ++k)
            basis[i].push_back(scale * bspline_derivative(mu_[i], x[i] / h_ - k, alpha.alpha[i]));
    }
    Box box;
    box.n = n_;
    box.lo = first;
    box.hi = last;
    double s = 0.0;
    box.for_each([&](const Index& z) {
        double w = 1.0;
        for (int i = 0; i < n_; ++i) w *= basis[i][std::size_t(z[i] - first[i])];
        s += w * u(z);
    });
    return s;
}

double SplineOperator::l2_norm(const GridFunction& u, const MultiIndex& alpha, const Point& center, double s) const {
    using G = boost::math::quadrature::gauss<double, 4>;
    std::vector<double> gx, gw;
    for (std::size_t i = 0; i < G::abscissa().size(); ++i) {
        gx.push_back(G::abscissa()[i]);
        gw.push_back(G::weights()[i]);
        gx.push_back(-G::abscissa()[i]);
        gw.push_back(G::weights()[i]);
    }
    // Break points per axis: cube faces plus every knot strictly inside.
    std::array<std::vector<double>, kMaxDim> xs, ws;
    for (int i = 0; i < n_; ++i) {
        const double a = center[i] - s, b = center[i] + s;
        std::vector<double> br{a};
        for (long k = long(std::floor(a / h_)) + 1; k * h_ < b; ++k)
            if (k * h_ > a) br.push_back(k * h_);
        br.push_back(b);
        for (std::size_t c = 0; c + 1 < br.size(); ++c) {
            const double mid = 0.5 * (br[c] + br[c + 1]), half = 0.5 * (br[c + 1] - br[c]);
            if (half <= 0.0) continue;
            for (std::size_t g = 0; g < gx.size(); ++g) {
                xs[i].push_back(mid + half * gx[g]);
                ws[i].push_back(half * gw[g]);
            }
        }
    }
    double acc = 0.0;
    Point x{0.0, 0.0, 0.0};
    if (n_ == 2) {
        for (std::size_t a = 0; a < xs[0].size(); ++a)
            for (std::size_t b = 0; b < xs[1].size(); ++b) {
                x = {xs[0][a], xs[1][b], 0.0};
                const double v = derivative(u, alpha, x);
                acc += ws[0][a] * ws[1][b] * v * v;
            }
    } else {
        for (std::size_t a = 0; a < xs[0].size(); ++a)
            for (std::size_t b = 0; b < xs[1].size(); ++b)
                for (std::size_t c = 0; c < xs[2].size(); ++c) {
                    x = {xs[0][a], xs[1][b], xs[2][c]};
                    const double v = derivative(u, alpha, x);
                    acc += ws[0][a] * ws[1][b] * ws[2][c] * v * v;
                }
    }
    return std::sqrt(acc);
}

double interp_eval(const SplineOperator& op, const GridFunction& u, const Point& x) { return op.eval(u, x); }

double interp_derivative(const SplineOperator& op, const GridFunction& u, const MultiIndex& alpha, const Point& x) {
    return op.derivative(u, alpha, x);
}

std::pair<double, double> commutation_check(const Index& mu, const MultiIndex& alpha, const GridFunction& u,
                                            const Point& x) {
    const SplineOperator op(u.dim(), mu, u.domain().h());
    const double lhs = op.derivative(u, alpha, x);
    const double rhs = op.lowered(alpha).eval(multi_derivative(u, alpha, -1), x);
    return {lhs, rhs};
}

std::pair<double, double> hessian_bridge_check(const GridFunction& f, int i, int j, const Point& x) {
    const int n = f.dim();
    if (i < 0 || i >= n || j < 0 || j >= n) throw ParameterError("hessian_bridge_check: axis out of range");
    const SplineOperator J = SplineOperator::cubic(n, f.domain().h());
    MultiIndex a;
    a.alpha[i] += 1;
    a.alpha[j] += 1;
    const double lhs = J.derivative(f, a, x);
    const auto H = hessian(f);
    const double rhs = J.lowered(a).eval(shift(H[std::size_t(i * n + j)], j, -1), x);
    return {lhs, rhs};
}

double pc_interp_eval(const GridFunction& u, const Point& x) {
    const double h = u.domain().h();
    const Box& b = u.box();
    Index k{0, 0, 0};
    for (int i = 0; i < u.dim(); ++i) {
        const double t = x[i] / h;
        if (!(t > b.lo[i] - 0.5 && t < b.hi[i] + 0.5))
            throw DomainError("pc_interp_eval: point outside the interpolation region");
        k[i] = int(std::floor(t + 0.5));
    }
    return u(k);
}

}  // namespace bilap
