#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gyrox {

/// Voxel (element) counts per axis.
struct Resolution {
  int x = 0;
  int y = 0;
  int z = 0;

  static constexpr Resolution cube(int n) { return {n, n, n}; }
  constexpr std::size_t count() const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(y) *
           static_cast<std::size_t>(z);
  }
  constexpr bool operator==(const Resolution&) const = default;
};

/// Unit-cell edge lengths in cm.
struct CellLengths {
  double x = 1.0;
  double y = 1.0;
  double z = 1.0;

  constexpr double volume() const { return x * y * z; }
  constexpr bool operator==(const CellLengths&) const = default;
};

std::string to_string(const Resolution& r);

/// Per-voxel densities in [0,1] over a periodic unit cell, x-fastest storage.
class DensityGrid {
 public:
  DensityGrid() = default;
  DensityGrid(Resolution res, CellLengths lengths, double fill = 0.0);
  DensityGrid(Resolution res, CellLengths lengths, std::vector<double> densities);

  const Resolution& resolution() const { return res_; }
  const CellLengths& cell_lengths() const { return lengths_; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(res_.x) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(res_.y) * static_cast<std::size_t>(k));
  }
  double& at(int i, int j, int k) { return data_[index(i, j, k)]; }
  double at(int i, int j, int k) const { return data_[index(i, j, k)]; }
  double& operator[](std::size_t e) { return data_[e]; }
  double operator[](std::size_t e) const { return data_[e]; }

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  /// Voxel edge lengths (cm).
  std::array<double, 3> voxel_size() const;

  bool operator==(const DensityGrid&) const = default;

 private:
  Resolution res_{};
  CellLengths lengths_{};
  std::vector<double> data_;
};

/// Mean voxel density (number of solid voxels over total for binary grids).
double relative_density(const DensityGrid& grid);

}  // namespace gyrox
