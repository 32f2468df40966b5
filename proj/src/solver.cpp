#include "bilap/solver.hpp"

#include <cmath>
#include <numbers>

#include "bilap/operators.hpp"

namespace bilap {

std::string to_string(SolveMethod m) { return m == SolveMethod::cg ? "cg" : "dense"; }

std::string to_string(Preconditioner p) {
    switch (p) {
        case Preconditioner::jacobi: return "jacobi";
        case Preconditioner::laplace_squared: return "laplace_squared";
        case Preconditioner::none: return "none";
    }
    return "?";
}

namespace {

double inv_h4(const LatticeDomain& d) { return d.unit_scale() ? 1.0 : std::pow(double(d.M()), 4); }
double inv_h2(const LatticeDomain& d) { return d.unit_scale() ? 1.0 : double(d.M()) * d.M(); }

}  // namespace

// ---------------------------------------------------------------- matrix-free operator

InteriorBilaplacian::InteriorBilaplacian(const LatticeDomain& domain)
    : domain_(domain), size_(domain.interior_count()), padded_extent_(domain.M() + 3),
      scale_(inv_h4(domain)) {
    const int n = domain.dim();
    std::size_t padded = 1;
    for (int i = 0; i < n; ++i) padded *= std::size_t(padded_extent_);
    scratch_.assign(padded, 0.0);
    diagonal_ = 0.0;
    for (const auto& t : bilaplacian_stencil(n)) {
        std::ptrdiff_t off = 0;
        for (int i = 0; i < n; ++i) off = off * padded_extent_ + t.offset[i];
        offsets_.push_back(off);
        coeffs_.push_back(t.coeff);
        if (t.offset == Index{0, 0, 0}) diagonal_ = t.coeff * scale_;
    }
}

void InteriorBilaplacian::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    const int n = domain_.dim();
    const int m = domain_.M() - 1;
    const std::ptrdiff_t P = padded_extent_;
    y.resize(Eigen::Index(size_));
    const std::size_t nt = offsets_.size();
    const std::ptrdiff_t* off = offsets_.data();
    const double* cf = coeffs_.data();
    double* s = scratch_.data();

    if (n == 2) {
        for (int i = 0; i < m; ++i) {
            double* row = s + (i + 2) * P + 2;
            for (int j = 0; j < m; ++j) row[j] = x[i * m + j];
        }
        for (int i = 0; i < m; ++i) {
            const double* row = s + (i + 2) * P + 2;
            for (int j = 0; j < m; ++j) {
                double acc = 0.0;
                for (std::size_t t = 0; t < nt; ++t) acc += cf[t] * row[j + off[t]];
                y[i * m + j] = scale_ * acc;
            }
        }
    } else {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double* row = s + ((i + 2) * P + (j + 2)) * P + 2;
                const std::ptrdiff_t base = (std::ptrdiff_t(i) * m + j) * m;
                for (int k = 0; k < m; ++k) row[k] = x[base + k];
            }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const double* row = s + ((i + 2) * P + (j + 2)) * P + 2;
                const std::ptrdiff_t base = (std::ptrdiff_t(i) * m + j) * m;
                for (int k = 0; k < m; ++k) {
                    double acc = 0.0;
                    for (std::size_t t = 0; t < nt; ++t) acc += cf[t] * row[k + off[t]];
                    y[base + k] = scale_ * acc;
                }
            }
    }
}

// ---------------------------------------------------------------- L^-2 preconditioner

LaplaceSquaredInverse::LaplaceSquaredInverse(const LatticeDomain& domain)
    : domain_(domain), m_(domain.M() - 1) {
    const int M = domain.M();
    const double pi = std::numbers::pi;
    sine_.resize(m_, m_);
    const double norm = std::sqrt(2.0 / M);
    for (int j = 0; j < m_; ++j)
        for (int k = 0; k < m_; ++k) sine_(j, k) = norm * std::sin(pi * (j + 1) * (k + 1) / M);

    Eigen::VectorXd lam1(m_);
    for (int j = 0; j < m_; ++j) {
        const double s = std::sin(pi * (j + 1) / (2.0 * M));
        lam1[j] = 4.0 * s * s * inv_h2(domain);
    }
    const int n = domain.dim();
    inv_eigen_.resize(Eigen::Index(domain.interior_count()));
    Eigen::Index idx = 0;
    if (n == 2) {
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < m_; ++j) {
                const double l = lam1[i] + lam1[j];
                inv_eigen_[idx++] = 1.0 / (l * l);
            }
    } else {
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < m_; ++j)
                for (int k = 0; k < m_; ++k) {
                    const double l = lam1[i] + lam1[j] + lam1[k];
                    inv_eigen_[idx++] = 1.0 / (l * l);
                }
    }
}

void LaplaceSquaredInverse::transform(Eigen::VectorXd& v) const {
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Index m = m_;
    if (domain_.dim() == 2) {
        Eigen::Map<RowMat> V(v.data(), m, m);
        V = (sine_ * V * sine_).eval();
        return;
    }
    Eigen::Map<RowMat> W(v.data(), m, m * m);
    W = (sine_ * W).eval();
    for (Eigen::Index i = 0; i < m; ++i) {
        Eigen::Map<RowMat> slab(v.data() + i * m * m, m, m);
        slab = (sine_ * slab * sine_).eval();
    }
}

void LaplaceSquaredInverse::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    work_ = x;
    transform(work_);
    work_.array() *= inv_eigen_.array();
    transform(work_);
    y = work_;
}

// ---------------------------------------------------------------- conversions

Eigen::VectorXd to_interior_vector(const GridFunction& f) {
    const LatticeDomain& d = f.domain();
    const Box in = d.interior_box();
    Eigen::VectorXd v(Eigen::Index(in.size()));
    if (f.box() == in) {
        auto vals = f.values();
        for (std::size_t i = 0; i < vals.size(); ++i) v[Eigen::Index(i)] = vals[i];
        return v;
    }
    std::size_t k = 0;
    in.for_each([&](const Index& p) { v[Eigen::Index(k++)] = f(p); });
    return v;
}

GridFunction from_interior_vector(const LatticeDomain& domain, const Eigen::VectorXd& v) {
    GridFunction g = GridFunction::phi(domain);
    auto vals = g.values();
    if (vals.size() != std::size_t(v.size())) throw ParameterError("interior vector has wrong length");
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = v[Eigen::Index(i)];
    return g;
}

// ---------------------------------------------------------------- dense path

Eigen::MatrixXd assemble_bilaplacian_matrix(const LatticeDomain& domain, std::size_t cap) {
    const std::size_t N = domain.interior_count();
    if (N > cap)
        throw SizeError("dense bilaplacian: " + std::to_string(N) + " interior points exceed cap " +
                        std::to_string(cap));
    const Box in = domain.interior_box();
    const Stencil st = bilaplacian_stencil(domain.dim());
    const double scale = inv_h4(domain);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(Eigen::Index(N), Eigen::Index(N));
    in.for_each([&](const Index& p) {
        const auto col = Eigen::Index(in.offset(p));
        for (const auto& t : st) {
            const Index q = p + t.offset;
            if (in.contains(q)) A(Eigen::Index(in.offset(q)), col) += t.coeff * scale;
        }
    });
    return A;
}

DenseBilaplacian::DenseBilaplacian(const LatticeDomain& domain, std::size_t cap)
    : domain_(domain), matrix_(assemble_bilaplacian_matrix(domain, cap)), llt_(matrix_) {
    if (llt_.info() != Eigen::Success) throw NumericError("dense bilaplacian: Cholesky factorization failed");
}

Eigen::VectorXd DenseBilaplacian::solve(const Eigen::VectorXd& rhs) const { return llt_.solve(rhs); }

Eigen::MatrixXd DenseBilaplacian::inverse() const {
    return llt_.solve(Eigen::MatrixXd::Identity(matrix_.rows(), matrix_.cols()));
}

GridFunction dense_solve(const LatticeDomain& domain, const GridFunction& f, std::size_t cap) {
    DenseBilaplacian A(domain, cap);
    return from_interior_vector(domain, A.solve(to_interior_vector(f)));
}

// ---------------------------------------------------------------- CG

SolveResult solve_bilaplacian(const LatticeDomain& domain, const GridFunction& f, const SolveOptions& opts) {
    if (!(opts.tol > 0.0)) throw ParameterError("solve_bilaplacian: tol must be positive");
    if (!(f.domain() == domain)) throw ParameterError("solve_bilaplacian: right-hand side lives on another domain");

    const Eigen::VectorXd b = to_interior_vector(f);
    const double bnorm = b.norm();
    if (!std::isfinite(bnorm)) throw NumericError("solve_bilaplacian: right-hand side is not finite");
    if (bnorm == 0.0) return {GridFunction::phi(domain), {0, 0.0, opts.method}};

    InteriorBilaplacian A(domain);
    if (opts.method == SolveMethod::dense) {
        DenseBilaplacian D(domain, opts.dense_cap);
        Eigen::VectorXd x = D.solve(b);
        Eigen::VectorXd Ax;
        A.apply(x, Ax);
        return {from_interior_vector(domain, x), {0, (b - Ax).norm() / bnorm, SolveMethod::dense}};
    }

    const long cap = opts.max_iterations > 0 ? opts.max_iterations : 50L * domain.M() * domain.M();
    std::unique_ptr<LaplaceSquaredInverse> lsq;
    if (opts.preconditioner == Preconditioner::laplace_squared)
        lsq = std::make_unique<LaplaceSquaredInverse>(domain);
    const double inv_diag = 1.0 / A.diagonal();
    auto precondition = [&](const Eigen::VectorXd& r, Eigen::VectorXd& z) {
        switch (opts.preconditioner) {
            case Preconditioner::jacobi: z = r * inv_diag; break;
            case Preconditioner::laplace_squared: lsq->apply(r, z); break;
            case Preconditioner::none: z = r; break;
        }
    };

    const Eigen::Index N = b.size();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd r = b;
    Eigen::VectorXd z(N), p(N), Ap(N);
    Eigen::VectorXd best = x;
    double best_res = 1.0;
    long it = 0;

    // Outer loop restarts from the true residual whenever the recursive one
    // claims convergence but the true one does not.
    while (true) {
        precondition(r, z);
        p = z;
        double rz = r.dot(z);
        double rel = r.norm() / bnorm;
        while (rel > opts.tol && it < cap) {
            A.apply(p, Ap);
            const double pAp = p.dot(Ap);
            if (!(pAp > 0.0)) throw NumericError("solve_bilaplacian: operator lost positive definiteness");
            const double alpha = rz / pAp;
            x.noalias() += alpha * p;
            r.noalias() -= alpha * Ap;
            ++it;
            rel = r.norm() / bnorm;
            if (rel < best_res) {
                best_res = rel;
                best = x;
            }
            precondition(r, z);
            const double rz_new = r.dot(z);
            p = z + (rz_new / rz) * p;
            rz = rz_new;
        }
        Eigen::VectorXd Ax(N);
        A.apply(x, Ax);
        r = b - Ax;
        const double true_rel = r.norm() / bnorm;
        if (true_rel <= opts.tol) return {from_interior_vector(domain, x), {it, true_rel, SolveMethod::cg}};
        if (it >= cap) {
            A.apply(best, Ax);
            const double best_true = (b - Ax).norm() / bnorm;
            throw ConvergenceError("solve_bilaplacian: iteration cap " + std::to_string(cap) +
                                       " reached (relative residual " + std::to_string(best_true) + ")",
                                   from_interior_vector(domain, best), {it, best_true, SolveMethod::cg});
        }
    }
}

double energy_norm(const GridFunction& u) {
    const auto H = hessian(u);
    return inner_product(H, H);
}

}  // namespace bilap
