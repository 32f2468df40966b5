#pragma once

// Lattice geometry for the discrete bilaplacian on [0,1]^n with mesh h = 1/M.
//
// Points of (hZ)^n are addressed by integer index vectors k; the physical point
// is h*k. Dimensions 2 and 3 are supported; for n = 2 the third index is always 0.

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace bilap {

inline constexpr int kMaxDim = 3;

using Index = std::array<int, kMaxDim>;
using Point = std::array<double, kMaxDim>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

Index unit_vector(int axis);
Index operator+(const Index& a, const Index& b);
Index operator-(const Index& a, const Index& b);
int linf_norm(const Index& a, int n);
double euclidean_norm(const Index& a, int n);

// Axis-aligned index box [lo, hi] (inclusive) in n dimensions. Empty when
// hi < lo along any used axis. Storage order is row-major, last axis fastest.
struct Box {
    int n = 2;
    Index lo{0, 0, 0};
    Index hi{-1, -1, 0};

    static Box cube(int n, int lo, int hi);

    bool empty() const;
    std::size_t size() const;
    int extent(int axis) const;
    bool contains(const Index& p) const;
    std::size_t offset(const Index& p) const;
    Index point(std::size_t offset) const;
    std::array<std::size_t, kMaxDim> strides() const;

    Box grown(int k) const;
    Box shifted(const Index& by) const;
    Box intersect(const Box& other) const;
    Box hull(const Box& other) const;

    bool operator==(const Box&) const = default;

    template <class F>
    void for_each(F&& f) const {
        if (empty()) return;
        Index p{0, 0, 0};
        for (p[0] = lo[0]; p[0] <= hi[0]; ++p[0])
            for (p[1] = lo[1]; p[1] <= hi[1]; ++p[1])
                for (p[2] = lo[2]; p[2] <= hi[2]; ++p[2]) f(p);
    }
};

class LatticeDomain {
public:
    // Unit square/cube with mesh h = 1/M. Requires n in {2,3} and M >= 2.
    LatticeDomain(int n, int M);

    // Same index geometry with lattice spacing 1 (the membrane V_N convention:
    // M = 2N+2 gives the (2N+1)^n free sites of V_N).
    static LatticeDomain unit_spacing(int n, int M);

    int dim() const { return n_; }
    int M() const { return M_; }
    double h() const { return h_; }
    bool unit_scale() const { return h_ == 1.0; }

    Box lattice_box() const;   // Lambda_h^n = [0, M]^n
    Box interior_box() const;  // int Lambda_h^n = [1, M-1]^n

    bool in_lattice(const Index& k) const;
    bool is_interior(const Index& k) const;
    std::size_t interior_count() const;
    std::size_t lattice_count() const;

    Point coords(const Index& k) const;
    // Nearest lattice index to a physical point (half-open cell convention).
    Index nearest_index(const Point& x) const;

    double cell_volume() const;  // h^n

    bool operator==(const LatticeDomain&) const = default;

private:
    LatticeDomain(int n, int M, double h);

    int n_;
    int M_;
    double h_;
};

// Real values on an index box with implicit zero extension to all of (hZ)^n.
// A function whose box lies inside the interior box is a member of Phi_h.
class GridFunction {
public:
    GridFunction(const LatticeDomain& domain, const Box& box);

    // Zero member of Phi_h (storage on the interior box).
    static GridFunction phi(const LatticeDomain& domain);

    template <class F>
    static GridFunction sample(const LatticeDomain& domain, const Box& box, F&& f) {
        GridFunction g(domain, box);
        box.for_each([&](const Index& p) { g.values_[box.offset(p)] = f(p); });
        return g;
    }

    const LatticeDomain& domain() const { return domain_; }
    const Box& box() const { return box_; }
    int dim() const { return domain_.dim(); }
    bool is_phi() const;

    double operator()(const Index& p) const {
        return box_.contains(p) ? values_[box_.offset(p)] : 0.0;
    }
    double& at(const Index& p);

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    // Copy onto a different box (values outside the old box are zero).
    GridFunction restricted(const Box& box) const;
    GridFunction interior_part() const { return restricted(domain_.interior_box()); }

    double max_abs() const;

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(double s);
    // this += s * o; grows the box if needed.
    GridFunction& axpy(double s, const GridFunction& o);

private:
    LatticeDomain domain_;
    Box box_;
    std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double s, GridFunction a);

// Closed lattice cube Q^h_r(x) = {y : |y - x|_inf <= r}.
struct CubeRegion {
    Index center{0, 0, 0};
    double r = 0.0;

    // Largest k with k*h <= r, i.e. floor_h(r)/h.
    int half_width(double h) const;
    bool contains(const Index& y, int n, double h) const;
    std::size_t point_count(int n, double h) const;
    Box box(int n, double h) const;
};

// Region over which discrete norms are summed. Cells are attributed by their
// lattice center; for radii in hN + h/2 this matches the continuum cube
// integrals of the piecewise-constant interpolation exactly.
class Region {
public:
    enum class Kind { whole, lattice, cube, outside_cube, annulus };

    static Region whole();
    static Region lattice(const LatticeDomain& d);
    static Region cube(const CubeRegion& c);
    // Complement of the closed cube: points with |y - x|_inf > r.
    static Region outside(const CubeRegion& c);
    // Closed outer cube minus closed inner cube.
    static Region annulus(const Index& center, double r_outer, double r_inner);

    Kind kind() const { return kind_; }
    bool contains(const Index& y, const LatticeDomain& d) const;
    // Finite box that holds every region point where f can be nonzero.
    Box support_box(const GridFunction& f) const;
    // Finite box of candidate points for pairwise suprema.
    Box enumeration_box(const GridFunction& f) const;

private:
    Kind kind_ = Kind::whole;
    Index center_{0, 0, 0};
    double r_outer_ = 0.0;
    double r_inner_ = 0.0;
    Box lattice_box_{};
};

// Distance from z in Lambda_h^n to (hZ)^n \ int Lambda_h^n. Throws
// DomainError for z outside Lambda_h^n.
double boundary_distance(const LatticeDomain& domain, const Index& z);

// Same quantity as a total function: 0 for every point that is not interior.
double distance_to_exterior(const LatticeDomain& domain, const Index& z);

// (sum_{x in region} h^n |f(x)|^p)^(1/p), or the max for p = infinity.
double discrete_norm(const GridFunction& f, double p, const Region& region);
// Vector/matrix-valued functions: Euclidean norm of the component norms.
double discrete_norm(std::span<const GridFunction> f, double p, const Region& region);

// sup over distinct region points x, y of |f(x) - f(y)| / |x - y|^alpha.
double holder_seminorm(const GridFunction& f, double alpha, const Region& region);

// Radius (k + 1/2) h with k = floor_h(r - h/2)/h; cube integrals over such
// radii are exact sums over lattice points.
double aligned_radius_below(double r, double h);
inline double aligned_radius(int k, double h) { return (k + 0.5) * h; }

}  // namespace bilap
