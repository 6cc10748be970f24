#pragma once

#include <cstddef>
#include <span>

#include <nlohmann/json_fwd.hpp>

#include "gyrox/density_grid.hpp"

namespace gyrox {

/// Mean over records and voxels of (pred - truth)^2.
double mse(std::span<const DensityGrid> pred, std::span<const DensityGrid> truth);

/// Mean per-record Dice coefficient of the voxel sets with density >= threshold.
/// Two empty sets count as a perfect match.
double dice(std::span<const DensityGrid> pred, std::span<const DensityGrid> truth, double threshold = 0.5);
double dice(const DensityGrid& pred, const DensityGrid& truth, double threshold = 0.5);

/// |relative_density(pred) - relative_density(truth)| in percent.
struct VolumeDeviation {
  double mean = 0.0;
  double max = 0.0;
  std::size_t argmax = 0;
};

VolumeDeviation volume_deviation(std::span<const DensityGrid> pred, std::span<const DensityGrid> truth);

struct EvalReport {
  std::size_t records = 0;
  double mse = 0.0;
  double dsc = 1.0;
  double volume_deviation_mean = 0.0;
  double volume_deviation_max = 0.0;
  std::size_t volume_deviation_argmax = 0;
};

EvalReport evaluate(std::span<const DensityGrid> pred, std::span<const DensityGrid> truth);
nlohmann::json to_json(const EvalReport& r);

}  // namespace gyrox
