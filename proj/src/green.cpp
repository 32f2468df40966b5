#include "bilap/green.hpp"

#include <cmath>
#include <iostream>

#include "bilap/io.hpp"
#include "bilap/operators.hpp"

namespace bilap {

namespace {

double inv_h(const LatticeDomain& d) { return d.unit_scale() ? 1.0 : double(d.M()); }

}  // namespace

GreenFunction::GreenFunction(const LatticeDomain& domain, GreenOptions opts)
    : domain_(domain), opts_(std::move(opts)),
      zero_(std::make_shared<const GridFunction>(GridFunction::phi(domain))) {}

GridFunction GreenFunction::compute_column(const Index& y) const {
    std::filesystem::path file;
    if (!opts_.cache_dir.empty()) {
        file = opts_.cache_dir / green_cache_filename(domain_, y);
        std::string problem;
        if (auto g = read_green_cache(file, domain_, y, &problem)) return std::move(*g);
        if (!problem.empty()) std::cerr << "warning: ignoring Green cache (" << problem << "), recomputing\n";
    }

    const GridFunction rhs = delta_function(domain_, y);
    GridFunction col = GridFunction::phi(domain_);
    if (opts_.backend == GreenBackend::dense) {
        std::shared_ptr<const DenseBilaplacian> dense;
        {
            std::lock_guard lock(mutex_);
            if (!dense_) dense_ = std::make_shared<const DenseBilaplacian>(domain_);
            dense = dense_;
        }
        col = from_interior_vector(domain_, dense->solve(to_interior_vector(rhs)));
    } else {
        SolveOptions so;
        so.tol = opts_.tol;
        so.preconditioner = opts_.preconditioner;
        col = solve_bilaplacian(domain_, rhs, so).u;
    }

    if (!file.empty()) {
        try {
            write_green_cache(file, col, y);
        } catch (const std::exception& e) {
            std::cerr << "warning: could not write Green cache: " << e.what() << "\n";
        }
    }
    return col;
}

std::shared_ptr<const GridFunction> GreenFunction::column(const Index& y) const {
    if (!domain_.is_interior(y)) throw DomainError("Green column requested for a non-interior source");
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(y); it != cache_.end()) return it->second;
    }
    auto col = std::make_shared<const GridFunction>(compute_column(y));
    std::lock_guard lock(mutex_);
    return cache_.emplace(y, std::move(col)).first->second;
}

std::shared_ptr<const GridFunction> GreenFunction::column_or_zero(const Index& y) const {
    return domain_.is_interior(y) ? column(y) : zero_;
}

double GreenFunction::value(const Index& x, const Index& y) const {
    if (!domain_.is_interior(x) || !domain_.is_interior(y)) return 0.0;
    return (*column(y))(x);
}

GreenDerivatives GreenFunction::derivatives(const Index& y, unsigned parts) const {
    const int n = domain_.dim();
    const double s = inv_h(domain_);
    GreenDerivatives out;
    out.y = y;

    const auto base = column_or_zero(y);
    if (parts & kGradX) out.grad_x = gradient(*base, +1);
    if (parts & kHessX) out.hess_x = hessian(*base);

    if (parts & (kGradXGradY | kHessXGradY)) {
        const GridFunction empty(domain_, Box{});
        if (parts & kGradXGradY) out.grad_x_grad_y.assign(std::size_t(n * n), empty);
        if (parts & kHessXGradY) out.hess_x_grad_y.assign(std::size_t(n * n * n), empty);
        for (int l = 0; l < n; ++l) {
            GridFunction dy = *column_or_zero(y + unit_vector(l));
            dy -= *base;
            dy *= s;
            if (parts & kGradXGradY)
                for (int i = 0; i < n; ++i) out.grad_x_grad_y[std::size_t(i * n + l)] = forward_diff(dy, i, +1);
            if (parts & kHessXGradY) {
                const auto H = hessian(dy);
                for (int ij = 0; ij < n * n; ++ij) out.hess_x_grad_y[std::size_t(ij * n + l)] = H[std::size_t(ij)];
            }
        }
    }

    if (parts & kHessXHessY) {
        out.hess_x_hess_y.assign(std::size_t(n * n * n * n), GridFunction(domain_, Box{}));
        for (int k = 0; k < n; ++k) {
            const Index ek = unit_vector(k);
            const auto back = column_or_zero(y - ek);
            for (int l = 0; l < n; ++l) {
                const Index el = unit_vector(l);
                GridFunction d2 = *column_or_zero(y + el);
                d2 -= *base;
                d2 -= *column_or_zero(y + el - ek);
                d2 += *back;
                d2 *= s * s;
                const auto H = hessian(d2);
                for (int ij = 0; ij < n * n; ++ij)
                    out.hess_x_hess_y[std::size_t((ij * n + k) * n + l)] = H[std::size_t(ij)];
            }
        }
    }
    return out;
}

void GreenFunction::precompute(const std::vector<Index>& sources) const {
    std::vector<Index> todo;
    {
        std::lock_guard lock(mutex_);
        for (const auto& y : sources)
            if (domain_.is_interior(y) && !cache_.count(y)) todo.push_back(y);
    }
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(todo.size()); ++i) column(todo[std::size_t(i)]);
}

std::size_t GreenFunction::cached_columns() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

void GreenFunction::clear_cache() const {
    std::lock_guard lock(mutex_);
    cache_.clear();
}

// ---------------------------------------------------------------- dense matrix

GreenMatrix::GreenMatrix(const LatticeDomain& domain, std::size_t cap) : domain_(domain) {
    DenseBilaplacian A(domain, cap);
    G_ = A.inverse();
    G_ *= std::pow(inv_h(domain), domain.dim());
    // Symmetrize the round-off of the triangular solves.
    G_ = (0.5 * (G_ + G_.transpose())).eval();
}

double GreenMatrix::operator()(const Index& x, const Index& y) const {
    if (!domain_.is_interior(x) || !domain_.is_interior(y)) return 0.0;
    const Box in = domain_.interior_box();
    return G_(Eigen::Index(in.offset(x)), Eigen::Index(in.offset(y)));
}

const Eigen::MatrixXd& GreenMatrix::cholesky_factor() const {
    std::call_once(factor_once_, [&] {
        Eigen::LLT<Eigen::MatrixXd> llt(G_);
        if (llt.info() != Eigen::Success) throw NumericError("Green matrix is not positive definite");
        L_ = llt.matrixL();
    });
    return L_;
}

GridFunction green_column(const LatticeDomain& domain, const Index& y, double tol) {
    if (!domain.is_interior(y)) throw DomainError("green_column: source is not interior");
    SolveOptions so;
    so.tol = tol;
    so.preconditioner = Preconditioner::laplace_squared;
    return solve_bilaplacian(domain, delta_function(domain, y), so).u;
}

double green_value(const LatticeDomain& domain, const Index& x, const Index& y) {
    if (!domain.is_interior(x) || !domain.is_interior(y)) return 0.0;
    return green_column(domain, y)(x);
}

}  // namespace bilap
