#pragma once

// On-disk Green column cache and CSV helpers.
//
// Cache layout (all integers little-endian):
//   "BILAP1" | n : u8 | M : u32 | source index : n x u32 | (M-1)^n x f64 | FNV-1a 64 of all preceding bytes

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>

#include "bilap/lattice.hpp"

namespace bilap {

std::uint64_t fnv1a64(std::span<const unsigned char> bytes);

std::string green_cache_filename(const LatticeDomain& domain, const Index& y);

// Writes atomically (temp file + rename). Column must be a Phi_h function.
void write_green_cache(const std::filesystem::path& file, const GridFunction& column, const Index& y);

// Returns nullopt when the file is missing. A present but unusable file
// (bad magic, header mismatch, wrong length, checksum failure) also yields
// nullopt and sets *problem to a description.
std::optional<GridFunction> read_green_cache(const std::filesystem::path& file, const LatticeDomain& domain,
                                             const Index& y, std::string* problem = nullptr);

// Shortest round-trip text for a double (17 significant digits).
std::string format_double(double v);

// Header "ix[,iy[,iz]],value", one row per point of box.
void write_grid_csv(std::ostream& os, const GridFunction& f, const Box& box);

}  // namespace bilap
