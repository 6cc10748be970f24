#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "gyrox/density_grid.hpp"

namespace gyrox {

/// Gyroid level-set parameters. Lengths in cm.
struct TpmsSpec {
  double c = 0.0;
  CellLengths lengths{};
  int mesh_points = 15;  ///< isosurface samples per axis, boundaries included

  void validate() const;
};

/// sin(2πx/Lx)cos(2πy/Ly) + sin(2πy/Ly)cos(2πz/Lz) + sin(2πz/Lz)cos(2πx/Lx) − c
double gyroid_level_set(const TpmsSpec& spec, double x, double y, double z);

/// Samples on a regular grid spanning [0, L] inclusive per axis, x-fastest.
struct ScalarField {
  std::array<int, 3> dims{};
  std::array<double, 3> spacing{};
  std::vector<double> values;

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(k));
  }
  double at(int i, int j, int k) const { return values[index(i, j, k)]; }

  /// Trilinear interpolation of the samples at a point inside the grid span.
  double interpolate(const std::array<double, 3>& p) const;
};

ScalarField sample_level_set(const TpmsSpec& spec);

using Point3 = std::array<double, 3>;

struct TriangleMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<std::size_t, 3>> triangles;

  /// Unique undirected edges (lo, hi), sorted.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;
};

/// Zero level set of `field` as a triangle mesh. Each grid cell is triangulated
/// independently: sign-change points on the cell's edges are linked face by face
/// into closed loops (face saddles resolved by the mean corner value) and each
/// loop is fan-triangulated. Vertices are shared between neighbouring cells.
/// Throws NoSurface when the field has a uniform sign.
TriangleMesh extract_isosurface(const ScalarField& field);

enum class VoxelRule {
  /// Voxel is solid when its center lies within `strut_radius` of any mesh edge.
  StrutRadius,
  /// Voxel is solid when any mesh edge touches its closed axis-aligned box.
  BoxIntersection,
};

struct VoxelOptions {
  VoxelRule rule = VoxelRule::StrutRadius;
  double strut_radius = 0.1;  ///< cm
};

/// Binary voxelization of the mesh edges over the cell [0,L]^3.
DensityGrid voxelize_surface(const TriangleMesh& mesh, Resolution resolution, CellLengths lengths,
                             const VoxelOptions& options = {});

/// Exact closed segment / closed box overlap (slab method).
bool segment_touches_box(const Point3& a, const Point3& b, const Point3& lo, const Point3& hi);

/// Full pipeline: sample, extract, voxelize.
DensityGrid voxelize_gyroid(const TpmsSpec& spec, Resolution resolution, const VoxelOptions& options = {});

}  // namespace gyrox
