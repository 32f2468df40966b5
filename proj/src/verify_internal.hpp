#pragma once

// Shared helpers of the verification harness (not installed).

#include <random>
#include <vector>

#include "bilap/green.hpp"
#include "bilap/verify.hpp"

namespace bilap::detail {

// Nearest lattice index of a continuum point (half-open cells).
Index snap(const LatticeDomain& d, const Point& p);

// Placement cycle over trials: interior, face, [edge,] corner.
Placement placement_for_trial(int trial, int n);

// Continuum centre in [0,1]^n for the placement regime.
Point draw_center(Placement p, int n, std::mt19937_64& rng);

double uniform(std::mt19937_64& rng, double a, double b);

// sum_k w_k G_h(., z_k), scaled.
GridFunction combine_columns(const GreenFunction& g, const std::vector<Index>& sources,
                             const std::vector<double>& weights, double scale);

// Point-mass or dipole weights for a random source location.
void add_random_source(const LatticeDomain& d, const Index& z, std::mt19937_64& rng, std::vector<Index>& sources,
                       std::vector<double>& weights);

double linf_distance(const Index& a, const Index& b, int n);

}  // namespace bilap::detail
