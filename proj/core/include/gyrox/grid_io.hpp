#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "gyrox/density_grid.hpp"

namespace gyrox {

// `dgrid` binary layout (all little-endian):
//   "DGRD" | u32 version | u32 ex, ey, ez | f64 Lx, Ly, Lz | f32 densities[ex*ey*ez], x-fastest
inline constexpr std::uint32_t kDgridVersion = 1;
inline constexpr std::size_t kDgridHeaderBytes = 4 + 4 + 3 * 4 + 3 * 8;

void write_dgrid(std::ostream& out, const DensityGrid& grid);
DensityGrid read_dgrid(std::istream& in);

/// Writes through a temporary sibling and renames, so readers never observe a partial file.
void save_dgrid(const std::filesystem::path& path, const DensityGrid& grid);
DensityGrid load_dgrid(const std::filesystem::path& path);

/// Rounds every density to the nearest f32, i.e. what a dgrid round trip yields.
DensityGrid quantize_f32(const DensityGrid& grid);

/// Legacy ASCII VTK STRUCTURED_POINTS with one cell scalar named "density".
void write_vtk(std::ostream& out, const DensityGrid& grid);
void save_vtk(const std::filesystem::path& path, const DensityGrid& grid);

/// Atomic text write (temp file + rename).
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace gyrox
