#pragma once

#include <string>
#include <vector>

#include "gyrox/topopt.hpp"

namespace gyrox {

/// Inclusive arithmetic range min, min+step, ..., max.
struct Range {
  double min = 0.0;
  double max = 0.0;
  double step = 0.0;

  void validate() const;
  std::size_t size() const;
  /// i-th value, rounded to 12 decimals so 0.25 + 7 * 0.01 prints as 0.32.
  double at(std::size_t i) const;
  std::vector<double> values() const;
};

/// "a:b:s", or "a" for a single value. The upper end is included when (b - a)
/// is a multiple of s within 1e-9.
Range parse_range(const std::string& text);

struct DoeSpec {
  Range vf{0.25, 0.45, 0.01};
  Range rmin{1.20, 2.50, 0.01};
  std::vector<Objective> objectives{Objective::Bulk, Objective::Shear};

  void validate() const;
  std::size_t points_per_objective() const { return vf.size() * rmin.size(); }
};

struct DoePoint {
  /// 1-based, row-major with V_f outer and r_min inner, restarting per objective.
  int index = 0;
  TopOptConfig config;
};

/// Objectives in the order given; each inherits everything but
/// (objective, vf, rmin) from `base`.
std::vector<DoePoint> enumerate_doe(const DoeSpec& spec, const TopOptConfig& base = {});

}  // namespace gyrox
