#include "bilap/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "bilap/errors.hpp"

namespace bilap {

Index unit_vector(int axis) {
    Index e{0, 0, 0};
    e[axis] = 1;
    return e;
}

Index operator+(const Index& a, const Index& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Index operator-(const Index& a, const Index& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

int linf_norm(const Index& a, int n) {
    int m = 0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

double euclidean_norm(const Index& a, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += double(a[i]) * a[i];
    return std::sqrt(s);
}

// ---------------------------------------------------------------- Box

Box Box::cube(int n, int lo, int hi) {
    Box b;
    b.n = n;
    for (int i = 0; i < kMaxDim; ++i) {
        b.lo[i] = i < n ? lo : 0;
        b.hi[i] = i < n ? hi : 0;
    }
    return b;
}

bool Box::empty() const {
    for (int i = 0; i < n; ++i)
        if (hi[i] < lo[i]) return true;
    return false;
}

std::size_t Box::size() const {
    if (empty()) return 0;
    std::size_t s = 1;
    for (int i = 0; i < n; ++i) s *= std::size_t(hi[i] - lo[i] + 1);
    return s;
}

int Box::extent(int axis) const { return std::max(0, hi[axis] - lo[axis] + 1); }

bool Box::contains(const Index& p) const {
    for (int i = 0; i < n; ++i)
        if (p[i] < lo[i] || p[i] > hi[i]) return false;
    for (int i = n; i < kMaxDim; ++i)
        if (p[i] != 0) return false;
    return true;
}

std::array<std::size_t, kMaxDim> Box::strides() const {
    std::array<std::size_t, kMaxDim> s{1, 1, 1};
    for (int a = kMaxDim - 2; a >= 0; --a) s[a] = s[a + 1] * std::size_t(extent(a + 1));
    return s;
}

std::size_t Box::offset(const Index& p) const {
    const auto s = strides();
    std::size_t off = 0;
    for (int i = 0; i < n; ++i) off += std::size_t(p[i] - lo[i]) * s[i];
    return off;
}

Index Box::point(std::size_t offset) const {
    const auto s = strides();
    Index p{0, 0, 0};
    for (int i = 0; i < n; ++i) {
        p[i] = lo[i] + int(offset / s[i]);
        offset %= s[i];
    }
    return p;
}

Box Box::grown(int k) const {
    Box b = *this;
    for (int i = 0; i < n; ++i) {
        b.lo[i] -= k;
        b.hi[i] += k;
    }
    return b;
}

Box Box::shifted(const Index& by) const {
    Box b = *this;
    for (int i = 0; i < n; ++i) {
        b.lo[i] += by[i];
        b.hi[i] += by[i];
    }
    return b;
}

Box Box::intersect(const Box& other) const {
    Box b = *this;
    for (int i = 0; i < n; ++i) {
        b.lo[i] = std::max(lo[i], other.lo[i]);
        b.hi[i] = std::min(hi[i], other.hi[i]);
    }
    return b;
}

Box Box::hull(const Box& other) const {
    if (empty()) return other;
    if (other.empty()) return *this;
    Box b = *this;
    for (int i = 0; i < n; ++i) {
        b.lo[i] = std::min(lo[i], other.lo[i]);
        b.hi[i] = std::max(hi[i], other.hi[i]);
    }
    return b;
}

// ---------------------------------------------------------------- LatticeDomain

LatticeDomain::LatticeDomain(int n, int M) : LatticeDomain(n, M, 1.0 / M) {}

LatticeDomain::LatticeDomain(int n, int M, double h) : n_(n), M_(M), h_(h) {
    if (n != 2 && n != 3) throw ParameterError("lattice dimension must be 2 or 3");
    if (M < 2) throw ParameterError("M must be at least 2 (interior would be empty)");
}

LatticeDomain LatticeDomain::unit_spacing(int n, int M) { return LatticeDomain(n, M, 1.0); }

Box LatticeDomain::lattice_box() const { return Box::cube(n_, 0, M_); }
Box LatticeDomain::interior_box() const { return Box::cube(n_, 1, M_ - 1); }

bool LatticeDomain::in_lattice(const Index& k) const { return lattice_box().contains(k); }
bool LatticeDomain::is_interior(const Index& k) const { return interior_box().contains(k); }

std::size_t LatticeDomain::interior_count() const { return interior_box().size(); }
std::size_t LatticeDomain::lattice_count() const { return lattice_box().size(); }

Point LatticeDomain::coords(const Index& k) const {
    Point x{0.0, 0.0, 0.0};
    for (int i = 0; i < n_; ++i) x[i] = h_ * k[i];
    return x;
}

Index LatticeDomain::nearest_index(const Point& x) const {
    Index k{0, 0, 0};
    for (int i = 0; i < n_; ++i) k[i] = int(std::floor(x[i] / h_ + 0.5));
    return k;
}

double LatticeDomain::cell_volume() const { return std::pow(h_, n_); }

// ---------------------------------------------------------------- GridFunction

GridFunction::GridFunction(const LatticeDomain& domain, const Box& box)
    : domain_(domain), box_(box), values_(box.size(), 0.0) {
    box_.n = domain.dim();
}

GridFunction GridFunction::phi(const LatticeDomain& domain) {
    return GridFunction(domain, domain.interior_box());
}

bool GridFunction::is_phi() const {
    if (box_.empty()) return true;
    const Box in = domain_.interior_box();
    return box_.intersect(in) == box_;
}

double& GridFunction::at(const Index& p) {
    if (!box_.contains(p)) throw DomainError("GridFunction::at: point outside storage box");
    return values_[box_.offset(p)];
}

GridFunction GridFunction::restricted(const Box& box) const {
    GridFunction g(domain_, box);
    const Box common = box.intersect(box_);
    common.for_each([&](const Index& p) { g.values_[box.offset(p)] = values_[box_.offset(p)]; });
    return g;
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

GridFunction& GridFunction::axpy(double s, const GridFunction& o) {
    if (o.box_.empty()) return *this;
    if (!(box_.hull(o.box_) == box_)) *this = restricted(box_.hull(o.box_));
    if (o.box_ == box_) {
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * o.values_[i];
        return *this;
    }
    o.box_.for_each([&](const Index& p) { values_[box_.offset(p)] += s * o.values_[o.box_.offset(p)]; });
    return *this;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) { return axpy(1.0, o); }
GridFunction& GridFunction::operator-=(const GridFunction& o) { return axpy(-1.0, o); }

GridFunction& GridFunction::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }

// ---------------------------------------------------------------- regions

int CubeRegion::half_width(double h) const {
    if (r < 0.0) return -1;
    return int(std::floor(r / h + 1e-9));
}

bool CubeRegion::contains(const Index& y, int n, double h) const {
    return linf_norm(y - center, n) <= half_width(h);
}

std::size_t CubeRegion::point_count(int n, double h) const {
    const int k = half_width(h);
    if (k < 0) return 0;
    std::size_t c = 1;
    for (int i = 0; i < n; ++i) c *= std::size_t(2 * k + 1);
    return c;
}

Box CubeRegion::box(int n, double h) const {
    const int k = half_width(h);
    Box b = Box::cube(n, -k, k);
    return b.shifted(center);
}

Region Region::whole() { return Region{}; }

Region Region::lattice(const LatticeDomain& d) {
    Region r;
    r.kind_ = Kind::lattice;
    r.lattice_box_ = d.lattice_box();
    return r;
}

Region Region::cube(const CubeRegion& c) {
    Region r;
    r.kind_ = Kind::cube;
    r.center_ = c.center;
    r.r_outer_ = c.r;
    return r;
}

Region Region::outside(const CubeRegion& c) {
    Region r;
    r.kind_ = Kind::outside_cube;
    r.center_ = c.center;
    r.r_inner_ = c.r;
    return r;
}

Region Region::annulus(const Index& center, double r_outer, double r_inner) {
    Region r;
    r.kind_ = Kind::annulus;
    r.center_ = center;
    r.r_outer_ = r_outer;
    r.r_inner_ = r_inner;
    return r;
}

bool Region::contains(const Index& y, const LatticeDomain& d) const {
    const int n = d.dim();
    const double h = d.h();
    switch (kind_) {
        case Kind::whole: return true;
        case Kind::lattice: return lattice_box_.contains(y);
        case Kind::cube: return CubeRegion{center_, r_outer_}.contains(y, n, h);
        case Kind::outside_cube: return !CubeRegion{center_, r_inner_}.contains(y, n, h);
        case Kind::annulus:
            return CubeRegion{center_, r_outer_}.contains(y, n, h) &&
                   !CubeRegion{center_, r_inner_}.contains(y, n, h);
    }
    return false;
}

Box Region::support_box(const GridFunction& f) const {
    const int n = f.dim();
    const double h = f.domain().h();
    switch (kind_) {
        case Kind::whole:
        case Kind::outside_cube: return f.box();
        case Kind::lattice: return f.box().intersect(lattice_box_);
        case Kind::cube:
        case Kind::annulus: return f.box().intersect(CubeRegion{center_, r_outer_}.box(n, h));
    }
    return f.box();
}

Box Region::enumeration_box(const GridFunction& f) const {
    const int n = f.dim();
    const double h = f.domain().h();
    switch (kind_) {
        case Kind::whole:
        case Kind::outside_cube: return f.box().grown(1);
        case Kind::lattice: return lattice_box_;
        case Kind::cube:
        case Kind::annulus: return CubeRegion{center_, r_outer_}.box(n, h);
    }
    return f.box();
}

// ---------------------------------------------------------------- distances and norms

double distance_to_exterior(const LatticeDomain& domain, const Index& z) {
    if (!domain.is_interior(z)) return 0.0;
    int m = domain.M();
    for (int i = 0; i < domain.dim(); ++i) m = std::min({m, z[i], domain.M() - z[i]});
    return domain.h() * m;
}

double boundary_distance(const LatticeDomain& domain, const Index& z) {
    if (!domain.in_lattice(z)) throw DomainError("boundary_distance: point outside Lambda_h^n");
    return distance_to_exterior(domain, z);
}

double discrete_norm(const GridFunction& f, double p, const Region& region) {
    if (!(p >= 1.0)) throw ParameterError("discrete_norm: exponent p must be >= 1");
    const LatticeDomain& d = f.domain();
    const Box box = region.support_box(f);
    if (std::isinf(p)) {
        double m = 0.0;
        box.for_each([&](const Index& x) {
            if (region.contains(x, d)) m = std::max(m, std::abs(f(x)));
        });
        return m;
    }
    double s = 0.0;
    if (p == 2.0) {
        box.for_each([&](const Index& x) {
            if (region.contains(x, d)) s += f(x) * f(x);
        });
        return std::sqrt(s * d.cell_volume());
    }
    box.for_each([&](const Index& x) {
        if (region.contains(x, d)) s += std::pow(std::abs(f(x)), p);
    });
    return std::pow(s * d.cell_volume(), 1.0 / p);
}

double discrete_norm(std::span<const GridFunction> f, double p, const Region& region) {
    double s = 0.0;
    for (const auto& c : f) {
        const double v = discrete_norm(c, p, region);
        s += v * v;
    }
    return std::sqrt(s);
}

double holder_seminorm(const GridFunction& f, double alpha, const Region& region) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("holder_seminorm: alpha must lie in (0,1]");
    const LatticeDomain& d = f.domain();
    const int n = d.dim();
    std::vector<Index> pts;
    std::vector<double> vals;
    region.enumeration_box(f).for_each([&](const Index& x) {
        if (region.contains(x, d)) {
            pts.push_back(x);
            vals.push_back(f(x));
        }
    });
    if (pts.size() < 2) throw DomainError("holder_seminorm: region has fewer than two lattice points");
    double best = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            const double diff = std::abs(vals[a] - vals[b]);
            if (diff <= best * 1e-300) continue;
            const double dist = d.h() * euclidean_norm(pts[a] - pts[b], n);
            best = std::max(best, diff / std::pow(dist, alpha));
        }
    }
    return best;
}

double aligned_radius_below(double r, double h) {
    const double k = std::floor((r - 0.5 * h) / h + 1e-9);
    return (k + 0.5) * h;
}

}  // namespace bilap
