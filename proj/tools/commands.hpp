#pragma once

// Subcommands of the command-line front-end. Every command validates its
// configuration before computing and throws bilap errors on failure; the
// caller maps them to exit codes.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "report.hpp"

namespace bilap::cli {

struct RunConfig {
    std::string subcommand;
    int n = 2;
    std::vector<int> M;        // single grid or grid list
    std::vector<int> N;        // membrane sizes (V_N = [-N, N]^n)
    std::vector<int> y;        // lattice source index
    std::vector<double> point; // continuum point
    std::vector<std::string> z;  // explicit full-space points "a,b[,c]"
    std::string id;            // verify estimate id
    std::string rhs = "delta";
    std::string method = "cg";
    std::string preconditioner = "jacobi";
    std::string pattern = "axis-fourth";
    bool derivatives = false;
    double tol = 1e-10;
    long max_iterations = 0;
    int trials = 50;
    std::uint64_t seed = 1;
    double scale = 1.0;
    double stability_factor = 2.0;
    std::size_t csv_stride = 0;  // 0: automatic
    std::size_t samples = 1000;
    std::size_t batch = 1000;
    int count = 10;
    double rmin = 20.0;
    double rmax = 60.0;
    int doublings = 3;
    int jobs = 0;
    std::filesystem::path out;
    std::filesystem::path json;
    std::filesystem::path csv;
    std::filesystem::path cache_dir;
};

ordered_json config_json(const RunConfig& c);

// Ids accepted by `verify --id`.
const std::vector<std::string>& verify_ids();

void cmd_solve(const RunConfig& c);
void cmd_green(const RunConfig& c);
void cmd_verify(const RunConfig& c);
void cmd_asymptotics(const RunConfig& c);
void cmd_sample(const RunConfig& c);
void cmd_repulsion(const RunConfig& c);
void cmd_convergence(const RunConfig& c);

}  // namespace bilap::cli
