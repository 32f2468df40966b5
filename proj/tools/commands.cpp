#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "bilap/errors.hpp"
#include "bilap/fullspace.hpp"
#include "bilap/green.hpp"
#include "bilap/io.hpp"
#include "bilap/membrane.hpp"
#include "bilap/operators.hpp"
#include "bilap/solver.hpp"
#include "bilap/verify.hpp"

namespace bilap::cli {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ParameterError(message);
}

void check_dim(const RunConfig& c) { require(c.n == 2 || c.n == 3, "--n must be 2 or 3"); }

int single_M(const RunConfig& c) {
    require(c.M.size() == 1, "--M must be a single grid size for " + c.subcommand);
    require(c.M.front() >= 2, "--M must be >= 2");
    return c.M.front();
}

std::vector<int> grid_list(const RunConfig& c, std::vector<int> fallback) {
    std::vector<int> Ms = c.M.empty() ? std::move(fallback) : c.M;
    for (int M : Ms) require(M >= 2, "grid sizes must be >= 2");
    return Ms;
}

Index lattice_index(const std::vector<int>& v, int n, const std::string& flag) {
    require(int(v.size()) == n, flag + " needs " + std::to_string(n) + " comma-separated integers");
    Index k{0, 0, 0};
    for (int i = 0; i < n; ++i) k[std::size_t(i)] = v[std::size_t(i)];
    return k;
}

Point continuum_point(const RunConfig& c) {
    Point p{0.5, 0.5, 0.5};
    if (c.point.empty()) return p;
    require(int(c.point.size()) == c.n, "--point needs n comma-separated coordinates");
    for (int i = 0; i < c.n; ++i) p[std::size_t(i)] = c.point[std::size_t(i)];
    return p;
}

GreenOptions green_options(const RunConfig& c) {
    GreenOptions g;
    g.tol = c.tol;
    g.cache_dir = c.cache_dir;
    if (!g.cache_dir.empty()) std::filesystem::create_directories(g.cache_dir);
    return g;
}

Preconditioner parse_preconditioner(const std::string& s) {
    if (s == "jacobi") return Preconditioner::jacobi;
    if (s == "laplace-squared") return Preconditioner::laplace_squared;
    if (s == "none") return Preconditioner::none;
    throw ParameterError("--precond must be jacobi, laplace-squared or none");
}

// The data CSV goes to --out (stdout by default). The JSON summary goes to
// --json, or to stdout when the CSV did not use it.
void emit_summary(const RunConfig& c, const ordered_json& j, bool csv_on_stdout) {
    if (!c.json.empty())
        emit(c.json, j.dump(2));
    else if (!csv_on_stdout)
        emit({}, j.dump(2));
}

ordered_json base_json(const RunConfig& c) {
    ordered_json j;
    j["config"] = config_json(c);
    return j;
}

DifferencePattern named_pattern(const std::string& name, int n) {
    if (name == "axis-fourth") return DifferencePattern::axis_fourth(0);
    if (name == "bilaplacian") return DifferencePattern::bilaplacian(n);
    if (name == "mixed") return DifferencePattern::product({{0, +1}, {0, -1}, {1, +1}, {1, -1}});
    throw ParameterError("--pattern must be axis-fourth, bilaplacian or mixed");
}

}  // namespace

ordered_json config_json(const RunConfig& c) {
    ordered_json j;
    j["subcommand"] = c.subcommand;
    j["n"] = c.n;
    j["M"] = c.M;
    j["N"] = c.N;
    j["y"] = c.y;
    j["point"] = c.point;
    j["z"] = c.z;
    j["id"] = c.id;
    j["rhs"] = c.rhs;
    j["method"] = c.method;
    j["precond"] = c.preconditioner;
    j["pattern"] = c.pattern;
    j["derivatives"] = c.derivatives;
    j["tol"] = c.tol;
    j["max_iter"] = c.max_iterations;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["scale"] = c.scale;
    j["stability_factor"] = c.stability_factor;
    j["csv_stride"] = c.csv_stride;
    j["samples"] = c.samples;
    j["batch"] = c.batch;
    j["count"] = c.count;
    j["rmin"] = c.rmin;
    j["rmax"] = c.rmax;
    j["doublings"] = c.doublings;
    j["jobs"] = c.jobs;
    j["out"] = c.out.string();
    j["json"] = c.json.string();
    j["csv"] = c.csv.string();
    j["cache_dir"] = c.cache_dir.string();
    return j;
}

const std::vector<std::string>& verify_ids() {
    static const std::vector<std::string> ids{"green-bounds", "caccioppoli", "inner-decay",
                                              "outer-decay",  "corner",      "poincare",
                                              "convergence",  "fullspace",   "continuity"};
    return ids;
}

// ---------------------------------------------------------------- solve

void cmd_solve(const RunConfig& c) {
    check_dim(c);
    const LatticeDomain d(c.n, single_M(c));
    require(c.tol > 0.0, "--tol must be positive");
    require(c.max_iterations >= 0, "--max-iter must be >= 0");
    require(c.method == "cg" || c.method == "dense", "--method must be cg or dense");
    SolveOptions so;
    so.tol = c.tol;
    so.max_iterations = c.max_iterations;
    so.preconditioner = parse_preconditioner(c.preconditioner);
    so.method = c.method == "cg" ? SolveMethod::cg : SolveMethod::dense;

    GridFunction f = GridFunction::phi(d);
    if (c.rhs == "delta") {
        const Index y = lattice_index(c.y, c.n, "--y");
        if (!d.is_interior(y)) throw DomainError("--y must be an interior lattice index for --rhs delta");
        f = delta_function(d, y);
    } else if (c.rhs == "ones") {
        d.interior_box().for_each([&](const Index& x) { f.at(x) = 1.0; });
    } else if (c.rhs == "random") {
        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        d.interior_box().for_each([&](const Index& x) { f.at(x) = u(rng); });
    } else {
        throw ParameterError("--rhs must be delta, ones or random");
    }

    const SolveResult r = solve_bilaplacian(d, f, so);
    {
        OutputFile out(c.out);
        write_grid_csv(out.stream(), r.u, d.lattice_box());
    }
    ordered_json j = base_json(c);
    j["method"] = to_string(r.report.method);
    j["iterations"] = r.report.iterations;
    j["residual"] = r.report.residual;
    j["energy"] = energy_norm(r.u);
    j["max_abs"] = r.u.max_abs();
    emit_summary(c, j, c.out.empty());
}

// ---------------------------------------------------------------- green

void cmd_green(const RunConfig& c) {
    check_dim(c);
    const LatticeDomain d(c.n, single_M(c));
    const Index y = lattice_index(c.y, c.n, "--y");
    if (!d.in_lattice(y)) throw DomainError("--y lies outside the lattice [0, M]^n");
    const GreenFunction g(d, green_options(c));
    const auto col = g.column_or_zero(y);
    const Box lat = d.lattice_box();
    {
        OutputFile out(c.out);
        if (!c.derivatives) {
            write_grid_csv(out.stream(), *col, lat);
        } else {
            const auto der = g.derivatives(y, kGradX | kHessX | kGradXGradY);
            std::ostream& os = out.stream();
            const char* axes[] = {"ix", "iy", "iz"};
            for (int i = 0; i < c.n; ++i) os << axes[i] << ',';
            os << "value";
            for (int i = 1; i <= c.n; ++i) os << ",grad_x" << i;
            for (int i = 1; i <= c.n; ++i)
                for (int k = 1; k <= c.n; ++k) os << ",hess_x" << i << k;
            for (int i = 1; i <= c.n; ++i)
                for (int l = 1; l <= c.n; ++l) os << ",grad_x" << i << "_grad_y" << l;
            os << '\n';
            lat.for_each([&](const Index& x) {
                for (int i = 0; i < c.n; ++i) os << x[std::size_t(i)] << ',';
                os << format_double((*col)(x));
                for (const auto& f : der.grad_x) os << ',' << format_double(f(x));
                for (const auto& f : der.hess_x) os << ',' << format_double(f(x));
                for (const auto& f : der.grad_x_grad_y) os << ',' << format_double(f(x));
                os << '\n';
            });
        }
    }
    ordered_json j = base_json(c);
    j["interior_source"] = d.is_interior(y);
    j["rows"] = lat.size();
    j["G_yy"] = (*col)(y);
    j["max_abs"] = col->max_abs();
    emit_summary(c, j, c.out.empty());
}

// ---------------------------------------------------------------- verify

void cmd_verify(const RunConfig& c) {
    check_dim(c);
    const auto& ids = verify_ids();
    if (std::find(ids.begin(), ids.end(), c.id) == ids.end()) {
        std::string list;
        for (const auto& id : ids) list += (list.empty() ? "" : ", ") + id;
        throw ParameterError("unknown estimate id '" + c.id + "'; valid ids: " + list);
    }
    require(c.trials >= 1, "--trials must be >= 1");
    require(c.stability_factor >= 1.0, "--stability-factor must be >= 1");
    require(std::isfinite(c.scale) && c.scale != 0.0, "--scale must be finite and nonzero");

    VerifyOptions o;
    o.trials = c.trials;
    o.seed = c.seed;
    o.scale = c.scale;
    o.stability_factor = c.stability_factor;
    o.record_samples = !c.csv.empty();
    o.green = green_options(c);
    o.green.preconditioner = Preconditioner::laplace_squared;

    const bool three = c.n == 3;
    std::vector<EstimateReport> reports;
    ordered_json extra;
    if (c.id == "green-bounds") {
        const auto Ms = grid_list(c, three ? std::vector<int>{6, 10, 14} : std::vector<int>{8, 16, 32});
        // Keep the ratio CSV near 10^6 rows: every pair of every grid is a sample.
        double pairs = 0.0;
        for (int M : Ms) pairs += 6.0 * std::pow(double(M + 1), 2 * c.n);
        o.sample_stride = c.csv_stride > 0 ? c.csv_stride : std::size_t(std::max(1.0, std::ceil(pairs / 1e6)));
        reports = verify_green_bounds(c.n, Ms, o);
    } else if (c.id == "caccioppoli" || c.id == "inner-decay" || c.id == "outer-decay") {
        const auto Ms = grid_list(c, three ? std::vector<int>{16, 20, 24} : std::vector<int>{16, 32, 64});
        o.sample_stride = std::max<std::size_t>(1, c.csv_stride);
        if (c.id == "caccioppoli") reports.push_back(verify_caccioppoli(c.n, Ms, o));
        if (c.id == "inner-decay") reports.push_back(verify_inner_decay(c.n, Ms, o));
        if (c.id == "outer-decay") reports = verify_outer_decay(c.n, Ms, o);
    } else if (c.id == "corner") {
        require(c.n == 2, "corner is defined for n = 2 only");
        reports.push_back(verify_corner(grid_list(c, {64}), o.green));
    } else if (c.id == "poincare") {
        o.sample_stride = std::max<std::size_t>(1, c.csv_stride);
        reports = verify_poincare_sobolev(c.n, grid_list(c, {8, 16, 32}), o);
    } else if (c.id == "fullspace") {
        o.sample_stride = std::max<std::size_t>(1, c.csv_stride);
        reports = verify_fullspace(c.n, grid_list(c, {16, 32}), o);
    } else if (c.id == "continuity") {
        ContinuityOptions co;
        co.seed = c.seed;
        co.green = o.green;
        std::vector<int> Ns = c.N.empty() ? std::vector<int>{8, 16, 32} : c.N;
        for (int N : Ns) require(N >= 1, "--N values must be >= 1");
        reports.push_back(continuity_report(c.n, Ns, co));
        reports.back().stability_factor = c.stability_factor;
        reports.back().verdict =
            reports.back().spread() <= c.stability_factor ? Verdict::stable : Verdict::growing;
    } else if (c.id == "convergence") {
        const auto Ms = grid_list(c, {8, 16, 32, 64});
        const ConvergenceTable t = verify_convergence(c.n, continuum_point(c), Ms, o.green);
        EstimateReport r;
        r.estimate_id = "convergence";
        r.n = c.n;
        r.stability_factor = 0.7;  // required contraction of successive differences
        double worst = 0.0;
        for (std::size_t k = 0; k < t.differences.size(); ++k) {
            r.grids.push_back(t.Ms[k]);
            r.constant_per_grid.push_back(t.differences[k]);
        }
        for (std::size_t k = 0; k < t.ratios.size(); ++k) {
            r.extras["ratio_" + std::to_string(k)] = t.ratios[k];
            worst = std::max(worst, t.ratios[k]);
        }
        r.extras["max_ratio"] = worst;
        r.global_constant = t.differences.empty() ? 0.0 : t.differences.front();
        r.verdict = worst <= 0.7 ? Verdict::stable : Verdict::growing;
        reports.push_back(r);
    }

    ordered_json j;
    j["estimate_id"] = c.id;
    j["n"] = c.n;
    j["grids"] = reports.front().grids;
    bool stable = true;
    for (const auto& r : reports) stable = stable && r.verdict == Verdict::stable;
    j["verdict"] = stable ? "stable" : "growing";
    if (reports.size() == 1) {
        j["constant_per_grid"] = reports.front().constant_per_grid;
        j["global_constant"] = reports.front().global_constant;
        j["witness"] = witness_json(reports.front().witness, c.n);
    }
    ordered_json arr = ordered_json::array();
    for (const auto& r : reports) arr.push_back(report_json(r));
    j["reports"] = arr;
    j["csv_stride"] = o.sample_stride;
    j["config"] = config_json(c);
    emit(c.json, j.dump(2));
    if (!c.csv.empty()) {
        OutputFile out(c.csv);
        write_samples_csv(out.stream(), reports);
    }
}

// ---------------------------------------------------------------- asymptotics

void cmd_asymptotics(const RunConfig& c) {
    check_dim(c);
    const DifferencePattern pattern = named_pattern(c.pattern, c.n);
    std::vector<Index> points;
    if (!c.z.empty()) {
        for (const auto& s : c.z) {
            std::vector<int> v;
            std::stringstream ss(s);
            std::string part;
            while (std::getline(ss, part, ',')) {
                try {
                    v.push_back(std::stoi(part));
                } catch (const std::exception&) {
                    throw ParameterError("--z entries must be comma-separated integers");
                }
            }
            points.push_back(lattice_index(v, c.n, "--z"));
        }
    } else {
        require(c.count >= 1, "--count must be >= 1");
        points = shell_points(c.n, c.count, c.rmin, c.rmax, c.seed);
    }
    ordered_json rows = ordered_json::array();
    double worst = 0.0;
    std::ostringstream csv;
    const char* names[] = {"z1", "z2", "z3"};
    for (int i = 0; i < c.n; ++i) csv << names[i] << ',';
    csv << "oracle,expansion,rel_error\n";
    for (const Index& z : points) {
        if (linf_norm(z, c.n) == 0) throw DomainError("--z must be nonzero for the expansion");
        const double oracle = fourth_difference_oracle(c.n, z, pattern);
        const double expansion = expansion_difference(c.n, z, pattern);
        const double rel = std::abs(oracle - expansion) / std::abs(oracle);
        worst = std::max(worst, rel);
        ordered_json r;
        r["z"] = index_json(z, c.n);
        r["norm"] = euclidean_norm(z, c.n);
        r["oracle"] = oracle;
        r["expansion"] = expansion;
        r["rel_error"] = rel;
        rows.push_back(r);
        for (int i = 0; i < c.n; ++i) csv << z[std::size_t(i)] << ',';
        csv << format_double(oracle) << ',' << format_double(expansion) << ',' << format_double(rel) << '\n';
    }
    ordered_json j = base_json(c);
    j["pattern"] = c.pattern;
    j["points"] = rows;
    j["max_rel_error"] = worst;
    emit(c.json, j.dump(2));
    if (!c.csv.empty()) {
        OutputFile out(c.csv);
        out.stream() << csv.str();
    }
}

// ---------------------------------------------------------------- sample

void cmd_sample(const RunConfig& c) {
    check_dim(c);
    require(c.N.size() == 1, "--N must be a single size for sample");
    require(c.N.front() >= 0, "--N must be >= 0");
    require(c.samples >= 1, "--samples must be >= 1");
    require(c.batch >= 1, "--batch must be >= 1");
    const LatticeDomain d = membrane_domain(c.n, c.N.front());
    const FieldSampler sampler(d, c.seed);
    const Box in = d.interior_box();
    const Box lat = d.lattice_box();
    const auto m = Eigen::Index(sampler.size());

    Eigen::VectorXd sum = Eigen::VectorXd::Zero(m), sumsq = Eigen::VectorXd::Zero(m);
    std::vector<double> batch_fraction;
    std::size_t positive = 0, negative = 0, in_batch = 0, batch_hits = 0;
    const bool csv_to_stdout = c.out.empty();
    OutputFile out(c.out);
    std::ostream& os = out.stream();
    const char* axes[] = {"ix", "iy", "iz"};
    os << "sample";
    for (int i = 0; i < c.n; ++i) os << ',' << axes[i];
    os << ",value\n";
    const std::size_t block = 1024;
    for (std::size_t first = 0; first < c.samples; first += block) {
        const std::size_t cols = std::min(block, c.samples - first);
        const Eigen::MatrixXd P = sampler.draw_block(first, cols);
        for (std::size_t k = 0; k < cols; ++k) {
            const auto col = P.col(Eigen::Index(k));
            sum += col;
            sumsq += col.cwiseProduct(col);
            const bool plus = col.minCoeff() >= 0.0;
            positive += plus;
            negative += col.maxCoeff() <= 0.0;
            batch_hits += plus;
            if (++in_batch == c.batch) {
                batch_fraction.push_back(double(batch_hits) / double(in_batch));
                in_batch = batch_hits = 0;
            }
            lat.for_each([&](const Index& x) {
                os << first + k;
                for (int i = 0; i < c.n; ++i) os << ',' << x[std::size_t(i)];
                os << ',' << format_double(in.contains(x) ? col[Eigen::Index(in.offset(x))] : 0.0) << '\n';
            });
        }
    }
    if (in_batch > 0) batch_fraction.push_back(double(batch_hits) / double(in_batch));
    os.flush();

    const double s = double(c.samples);
    double worst_var = 0.0, worst_mean = 0.0;
    ordered_json sites = ordered_json::array();
    in.for_each([&](const Index& x) {
        const auto k = Eigen::Index(in.offset(x));
        const double mean = sum[k] / s;
        const double var = sumsq[k] / s;  // the field is centred
        const double exact = sampler.green()(x, x);
        worst_var = std::max(worst_var, std::abs(var / exact - 1.0));
        worst_mean = std::max(worst_mean, std::abs(mean) / std::sqrt(exact / s));
        ordered_json e;
        e["x"] = index_json(x, c.n);
        e["mean"] = mean;
        e["variance"] = var;
        e["G_xx"] = exact;
        sites.push_back(e);
    });
    ordered_json j = base_json(c);
    j["sites"] = m;
    j["samples"] = c.samples;
    j["max_rel_variance_error"] = worst_var;
    j["max_mean_in_sd_units"] = worst_mean;
    j["positivity_fraction"] = double(positive) / s;
    j["negativity_fraction"] = double(negative) / s;
    j["positivity_fraction_per_batch"] = batch_fraction;
    j["per_site"] = sites;
    emit_summary(c, j, csv_to_stdout);
}

// ---------------------------------------------------------------- repulsion

void cmd_repulsion(const RunConfig& c) {
    check_dim(c);
    const std::vector<int> Ns = c.N.empty() ? std::vector<int>{2, 3, 4} : c.N;
    for (int N : Ns) require(N >= 0, "--N values must be >= 0");
    require(c.samples >= 1, "--samples must be >= 1");
    const RepulsionTable t = entropic_repulsion_mc(c.n, Ns, c.samples, c.seed);
    ordered_json rows = ordered_json::array();
    std::ostringstream csv;
    csv << "N,samples,hits_plus,hits_minus,p_plus,p_minus,ci_low,ci_high,neg_log_p,lower_bound_only\n";
    for (const auto& r : t.rows) {
        ordered_json e;
        e["N"] = r.N;
        e["samples"] = r.samples;
        e["hits_plus"] = r.hits_plus;
        e["hits_minus"] = r.hits_minus;
        e["p_plus"] = r.p_plus;
        e["p_minus"] = r.p_minus;
        e["ci_low"] = r.ci_low;
        e["ci_high"] = r.ci_high;
        e["neg_log_p"] = r.neg_log_p;
        e["lower_bound_only"] = r.lower_bound_only;
        rows.push_back(e);
        csv << r.N << ',' << r.samples << ',' << r.hits_plus << ',' << r.hits_minus << ',' << format_double(r.p_plus)
            << ',' << format_double(r.p_minus) << ',' << format_double(r.ci_low) << ',' << format_double(r.ci_high)
            << ',' << format_double(r.neg_log_p) << ',' << (r.lower_bound_only ? 1 : 0) << '\n';
    }
    ordered_json j = base_json(c);
    j["rows"] = rows;
    j["monotone"] = t.monotone;
    j["fit_c"] = t.fit_c;
    j["fit_exponent"] = t.fit_exponent;
    emit(c.json, j.dump(2));
    if (!c.csv.empty()) {
        OutputFile out(c.csv);
        out.stream() << csv.str();
    }
}

// ---------------------------------------------------------------- convergence

void cmd_convergence(const RunConfig& c) {
    check_dim(c);
    const int M0 = c.M.empty() ? 8 : single_M(c);
    require(c.doublings >= 1 && c.doublings <= 8, "--doublings must lie in [1, 8]");
    std::vector<int> Ms{M0};
    for (int k = 0; k < c.doublings; ++k) Ms.push_back(2 * Ms.back());
    GreenOptions g = green_options(c);
    g.preconditioner = Preconditioner::laplace_squared;
    const ConvergenceTable t = verify_convergence(c.n, continuum_point(c), Ms, g);
    ordered_json j = base_json(c);
    j["Ms"] = t.Ms;
    ordered_json src = ordered_json::array();
    for (const auto& s : t.sources) src.push_back(index_json(s, c.n));
    j["sources"] = src;
    j["differences"] = t.differences;
    j["ratios"] = t.ratios;
    const double worst = t.ratios.empty() ? 0.0 : *std::max_element(t.ratios.begin(), t.ratios.end());
    j["max_ratio"] = worst;
    j["contracting"] = worst <= 0.7;
    emit(c.json, j.dump(2));
    if (!c.csv.empty()) {
        OutputFile out(c.csv);
        out.stream() << "M_coarse,M_fine,difference,ratio\n";
        for (std::size_t k = 0; k < t.differences.size(); ++k)
            out.stream() << t.Ms[k] << ',' << t.Ms[k + 1] << ',' << format_double(t.differences[k]) << ','
                         << (k == 0 ? std::string() : format_double(t.ratios[k - 1])) << '\n';
    }
}

}  // namespace bilap::cli
