#include "gyrox/metrics.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "gyrox/errors.hpp"

namespace gyrox {
namespace {

void check_shapes(std::span<const DensityGrid> pred, std::span<const DensityGrid> truth) {
  if (pred.size() != truth.size())
    throw ShapeMismatch("prediction and truth counts differ (" + std::to_string(pred.size()) + " vs " +
                        std::to_string(truth.size()) + ")");
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i].resolution() != truth[i].resolution())
      throw ShapeMismatch("record " + std::to_string(i) + ": resolution " + to_string(pred[i].resolution()) +
                          " vs " + to_string(truth[i].resolution()));
}

}  // namespace

double mse(std::span<const DensityGrid> pred, std::span<const DensityGrid> truth) {
  check_shapes(pred, truth);
  if (pred.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    double sum = 0.0;
    for (std::size_t e = 0; e < pred[i].size(); ++e) {
      const double d = pred[i][e] - truth[i][e];
      sum += d * d;
    }
    if (pred[i].size() > 0) total += sum / static_cast<double>(pred[i].size());
  }
  return total / static_cast<double>(pred.size());
}

double dice(const DensityGrid& pred, const DensityGrid& truth, double threshold) {
  if (pred.resolution() != truth.resolution()) throw ShapeMismatch("dice: grid resolutions differ");
  std::size_t both = 0, p = 0, t = 0;
  for (std::size_t e = 0; e < pred.size(); ++e) {
    const bool ps = pred[e] >= threshold, ts = truth[e] >= threshold;
    p += ps;
    t += ts;
    both += ps && ts;
  }
  if (p + t == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(p + t);
}

double dice(std::span<const DensityGrid> pred, std::span<const DensityGrid> truth, double threshold) {
  check_shapes(pred, truth);
  if (pred.empty()) return 1.0;
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) total += dice(pred[i], truth[i], threshold);
  return total / static_cast<double>(pred.size());
}

VolumeDeviation volume_deviation(std::span<const DensityGrid> pred, std::span<const DensityGrid> truth) {
  check_shapes(pred, truth);
  VolumeDeviation out;
  if (pred.empty()) return out;
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double dev = std::abs(relative_density(pred[i]) - relative_density(truth[i])) * 100.0;
    total += dev;
    if (dev > out.max) {
      out.max = dev;
      out.argmax = i;
    }
  }
  out.mean = total / static_cast<double>(pred.size());
  return out;
}

EvalReport evaluate(std::span<const DensityGrid> pred, std::span<const DensityGrid> truth) {
  EvalReport r;
  r.records = pred.size();
  r.mse = mse(pred, truth);
  r.dsc = dice(pred, truth);
  const auto vd = volume_deviation(pred, truth);
  r.volume_deviation_mean = vd.mean;
  r.volume_deviation_max = vd.max;
  r.volume_deviation_argmax = vd.argmax;
  return r;
}

nlohmann::json to_json(const EvalReport& r) {
  return {{"records", r.records},
          {"mse", r.mse},
          {"dsc", r.dsc},
          {"volume_deviation_mean", r.volume_deviation_mean},
          {"volume_deviation_max", r.volume_deviation_max},
          {"volume_deviation_argmax", r.volume_deviation_argmax}};
}

}  // namespace gyrox
