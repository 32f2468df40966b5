// Command-line front-end. Exit codes: 0 success, 2 usage or validation error,
// 3 numeric failure.

#include <CLI11.hpp>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bilap/errors.hpp"
#include "commands.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

using bilap::cli::RunConfig;

CLI::App* add_command(CLI::App& app, RunConfig& c, const std::string& name, const std::string& about) {
    CLI::App* sub = app.add_subcommand(name, about);
    sub->add_option("--n", c.n, "Dimension (2 or 3)")->capture_default_str();
    sub->add_option("--jobs", c.jobs, "Worker threads (0: runtime default)");
    sub->add_option("--cache-dir", c.cache_dir, "Green column cache directory")->envname("BILAP_CACHE_DIR");
    sub->add_option("--tol", c.tol, "Relative residual tolerance")->capture_default_str();
    return sub;
}

void add_outputs(CLI::App* sub, RunConfig& c, bool data_csv) {
    if (data_csv) sub->add_option("--out", c.out, "Data CSV file (stdout if omitted)");
    sub->add_option("--json", c.json, "JSON output file");
    if (!data_csv) sub->add_option("--csv", c.csv, "Tabular CSV output file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete bilaplacian laboratory: clamped Green's functions, estimate verification, membrane model"};
    app.require_subcommand(1);
    RunConfig c;

    auto* solve = add_command(app, c, "solve", "Solve Delta_h^2 u = f with zero exterior data");
    solve->add_option("--M", c.M, "Grid size (h = 1/M)")->required()->delimiter(',');
    solve->add_option("--rhs", c.rhs, "delta, ones or random")->capture_default_str();
    solve->add_option("--y", c.y, "Point-mass index for --rhs delta")->delimiter(',');
    solve->add_option("--method", c.method, "cg or dense")->capture_default_str();
    solve->add_option("--precond", c.preconditioner, "jacobi, laplace-squared or none")->capture_default_str();
    solve->add_option("--max-iter", c.max_iterations, "CG iteration cap (0: 50 M^2)");
    solve->add_option("--seed", c.seed, "Seed for --rhs random");
    add_outputs(solve, c, true);

    auto* green = add_command(app, c, "green", "Green's function column G_h(., y)");
    green->add_option("--M", c.M, "Grid size (h = 1/M)")->required()->delimiter(',');
    green->add_option("--y", c.y, "Source lattice index")->required()->delimiter(',');
    green->add_flag("--derivatives", c.derivatives, "Add x-gradient, x-Hessian and mixed gradient columns");
    add_outputs(green, c, true);

    auto* verify = add_command(app, c, "verify", "Empirical constants of an estimate across grids");
    verify->add_option("--id", c.id, "Estimate id")->required();
    verify->add_option("--M", c.M, "Grid list")->delimiter(',');
    verify->add_option("--N", c.N, "Membrane sizes for continuity")->delimiter(',');
    verify->add_option("--trials", c.trials, "Random trials per grid")->capture_default_str();
    verify->add_option("--seed", c.seed, "Trial seed")->capture_default_str();
    verify->add_option("--scale", c.scale, "Multiplier applied to every test function")->capture_default_str();
    verify->add_option("--stability-factor", c.stability_factor, "Allowed max/min of per-grid constants")
        ->capture_default_str();
    verify->add_option("--csv-stride", c.csv_stride, "Keep every k-th ratio in the CSV (0: automatic)");
    verify->add_option("--point", c.point, "Continuum source point for convergence")->delimiter(',');
    add_outputs(verify, c, false);

    auto* asym = add_command(app, c, "asymptotics", "Quadrature oracle vs large-|z| expansion of the full-space kernel");
    asym->add_option("--pattern", c.pattern, "axis-fourth, bilaplacian or mixed")->capture_default_str();
    asym->add_option("--z", c.z, "Explicit points a,b[,c] (repeatable)");
    asym->add_option("--count", c.count, "Number of shell points")->capture_default_str();
    asym->add_option("--rmin", c.rmin, "Inner shell radius")->capture_default_str();
    asym->add_option("--rmax", c.rmax, "Outer shell radius")->capture_default_str();
    asym->add_option("--seed", c.seed, "Shell point seed")->capture_default_str();
    add_outputs(asym, c, false);

    auto* sample = add_command(app, c, "sample", "Membrane field samples on V_N = [-N, N]^n");
    sample->add_option("--N", c.N, "Box size N")->required()->delimiter(',');
    sample->add_option("--samples", c.samples, "Number of samples")->capture_default_str();
    sample->add_option("--batch", c.batch, "Batch size for positivity fractions")->capture_default_str();
    sample->add_option("--seed", c.seed, "Sampler seed")->capture_default_str();
    add_outputs(sample, c, true);

    auto* rep = add_command(app, c, "repulsion", "Monte Carlo positivity probability P(all psi_x >= 0)");
    rep->add_option("--N", c.N, "Box sizes")->delimiter(',');
    rep->add_option("--samples", c.samples, "Samples per box")->capture_default_str();
    rep->add_option("--seed", c.seed, "Sampler seed")->capture_default_str();
    add_outputs(rep, c, false);

    auto* conv = add_command(app, c, "convergence", "Refinement differences of piecewise-constant Green columns");
    conv->add_option("--M", c.M, "Coarsest grid M0 (default 8)")->delimiter(',');
    conv->add_option("--doublings", c.doublings, "Number of refinements")->capture_default_str();
    conv->add_option("--point", c.point, "Continuum source point (default centre)")->delimiter(',');
    add_outputs(conv, c, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    for (auto* sub : app.get_subcommands()) c.subcommand = sub->get_name();
#ifdef _OPENMP
    if (c.jobs > 0) omp_set_num_threads(c.jobs);
#endif

    try {
        if (c.jobs < 0) throw bilap::ParameterError("--jobs must be >= 0");
        if (c.subcommand == "solve") bilap::cli::cmd_solve(c);
        if (c.subcommand == "green") bilap::cli::cmd_green(c);
        if (c.subcommand == "verify") bilap::cli::cmd_verify(c);
        if (c.subcommand == "asymptotics") bilap::cli::cmd_asymptotics(c);
        if (c.subcommand == "sample") bilap::cli::cmd_sample(c);
        if (c.subcommand == "repulsion") bilap::cli::cmd_repulsion(c);
        if (c.subcommand == "convergence") bilap::cli::cmd_convergence(c);
    } catch (const bilap::NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const bilap::AccuracyError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const bilap::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}
