#include "bilap/operators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "bilap/errors.hpp"

namespace bilap {

namespace {

// h^-k, exact for the unit-square convention h = 1/M.
double inv_h_pow(const LatticeDomain& d, int k) {
    if (d.unit_scale()) return 1.0;
    return std::pow(double(d.M()), k);
}

void check_axis(int axis, int n) {
    if (axis < 0 || axis >= n) throw ParameterError("axis out of range");
}

void check_sign(int sign) {
    if (sign != 1 && sign != -1) throw ParameterError("difference sign must be +1 or -1");
}

}  // namespace

GridFunction apply_stencil(const GridFunction& f, const Stencil& s) {
    const Box& in = f.box();
    if (in.empty() || s.empty()) return GridFunction(f.domain(), in);
    Box outbox = in.shifted(Index{0, 0, 0} - s.front().offset);
    for (const auto& t : s) outbox = outbox.hull(in.shifted(Index{0, 0, 0} - t.offset));
    GridFunction out(f.domain(), outbox);

    const auto st = outbox.strides();
    std::vector<std::ptrdiff_t> delta(s.size());
    for (std::size_t t = 0; t < s.size(); ++t) {
        std::ptrdiff_t d = 0;
        for (int i = 0; i < f.dim(); ++i) d += std::ptrdiff_t(s[t].offset[i]) * std::ptrdiff_t(st[i]);
        delta[t] = d;
    }

    auto fv = f.values();
    auto ov = out.values();
    std::size_t k = 0;
    in.for_each([&](const Index& p) {
        const double v = fv[k++];
        if (v == 0.0) return;
        const std::ptrdiff_t base = std::ptrdiff_t(outbox.offset(p));
        for (std::size_t t = 0; t < s.size(); ++t) ov[std::size_t(base - delta[t])] += s[t].coeff * v;
    });
    return out;
}

Stencil compose(const Stencil& a, const Stencil& b) {
    std::map<Index, double> acc;
    for (const auto& ta : a)
        for (const auto& tb : b) acc[ta.offset + tb.offset] += ta.coeff * tb.coeff;
    Stencil out;
    for (const auto& [off, c] : acc)
        if (c != 0.0) out.push_back({off, c});
    return out;
}

Stencil difference_stencil(int axis, int sign) {
    check_sign(sign);
    const Index e = unit_vector(axis);
    if (sign > 0) return {{e, 1.0}, {Index{0, 0, 0}, -1.0}};
    return {{Index{0, 0, 0}, 1.0}, {Index{0, 0, 0} - e, -1.0}};
}

Stencil laplacian_stencil(int n) {
    Stencil s{{Index{0, 0, 0}, -2.0 * n}};
    for (int i = 0; i < n; ++i) {
        s.push_back({unit_vector(i), 1.0});
        s.push_back({Index{0, 0, 0} - unit_vector(i), 1.0});
    }
    return s;
}

Stencil bilaplacian_stencil(int n) {
    const Stencil l = laplacian_stencil(n);
    return compose(l, l);
}

GridFunction shift(const GridFunction& f, int axis, int steps) {
    check_axis(axis, f.dim());
    Index o{0, 0, 0};
    o[axis] = steps;
    return apply_stencil(f, {{o, 1.0}});
}

GridFunction forward_diff(const GridFunction& f, int axis, int sign) {
    check_axis(axis, f.dim());
    GridFunction out = apply_stencil(f, difference_stencil(axis, sign));
    out *= inv_h_pow(f.domain(), 1);
    return out;
}

std::vector<GridFunction> gradient(const GridFunction& f, int sign) {
    std::vector<GridFunction> g;
    for (int i = 0; i < f.dim(); ++i) g.push_back(forward_diff(f, i, sign));
    return g;
}

std::vector<GridFunction> hessian(const GridFunction& f) {
    const int n = f.dim();
    const auto grad = gradient(f, +1);
    std::vector<GridFunction> H;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) H.push_back(forward_diff(grad[j], i, -1));
    return H;
}

GridFunction laplacian(const GridFunction& f) {
    GridFunction out = apply_stencil(f, laplacian_stencil(f.dim()));
    out *= inv_h_pow(f.domain(), 2);
    return out;
}

GridFunction bilaplacian(const GridFunction& f) {
    GridFunction out = apply_stencil(f, bilaplacian_stencil(f.dim()));
    out *= inv_h_pow(f.domain(), 4);
    return out;
}

GridFunction bilaplacian_composed(const GridFunction& f) { return laplacian(laplacian(f)); }

GridFunction multi_derivative(const GridFunction& f, const MultiIndex& alpha, int sign) {
    check_sign(sign);
    GridFunction out = f;
    for (int i = 0; i < kMaxDim; ++i) {
        if (alpha.alpha[i] < 0) throw ParameterError("multi-index entries must be nonnegative");
        if (alpha.alpha[i] > 0 && i >= f.dim()) throw ParameterError("multi-index exceeds dimension");
        for (int k = 0; k < alpha.alpha[i]; ++k) out = forward_diff(out, i, sign);
    }
    return out;
}

GridFunction delta_function(const LatticeDomain& domain, const Index& y) {
    if (!domain.is_interior(y)) throw DomainError("delta_function: point is not interior");
    GridFunction g = GridFunction::phi(domain);
    g.at(y) = inv_h_pow(domain, domain.dim());
    return g;
}

double inner_product(const GridFunction& f, const GridFunction& g) {
    const Box common = f.box().intersect(g.box());
    double s = 0.0;
    if (f.box() == g.box()) {
        auto a = f.values();
        auto b = g.values();
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    } else {
        common.for_each([&](const Index& p) { s += f(p) * g(p); });
    }
    return s * f.domain().cell_volume();
}

double inner_product(const std::vector<GridFunction>& f, const std::vector<GridFunction>& g) {
    if (f.size() != g.size()) throw ParameterError("inner_product: component count mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += inner_product(f[i], g[i]);
    return s;
}

GridFunction divergence(const std::vector<GridFunction>& g, int sign) {
    if (g.empty()) throw ParameterError("divergence: empty field");
    const int n = g.front().dim();
    if (int(g.size()) != n) throw ParameterError("divergence: expected n components");
    GridFunction out = forward_diff(g[0], 0, sign);
    for (int i = 1; i < n; ++i) out += forward_diff(g[i], i, sign);
    return out;
}

GridFunction double_divergence(const std::vector<GridFunction>& g) {
    if (g.empty()) throw ParameterError("double_divergence: empty field");
    const int n = g.front().dim();
    if (int(g.size()) != n * n) throw ParameterError("double_divergence: expected n*n components");
    GridFunction out(g.front().domain(), g.front().box());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out += forward_diff(forward_diff(g[i * n + j], i, +1), j, -1);
    return out;
}

GridFunction pointwise_norm(const std::vector<GridFunction>& g) {
    if (g.empty()) throw ParameterError("pointwise_norm: empty field");
    Box box = g.front().box();
    for (const auto& c : g) box = box.hull(c.box());
    return GridFunction::sample(g.front().domain(), box, [&](const Index& p) {
        double s = 0.0;
        for (const auto& c : g) s += c(p) * c(p);
        return std::sqrt(s);
    });
}

}  // namespace bilap
