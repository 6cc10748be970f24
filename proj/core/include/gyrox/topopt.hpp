#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gyrox/density_grid.hpp"
#include "gyrox/filter.hpp"
#include "gyrox/homogenize.hpp"

namespace gyrox {

struct ContinuationSchedule {
  double beta_initial = 1.0;
  double beta_max = 512.0;
  int double_every = 50;
  double change_threshold = 0.01;

  void validate() const;
};

struct TopOptConfig {
  Objective objective = Objective::Bulk;
  double vf = 0.35;
  /// Filter radius in element-edge units.
  double rmin = 1.5;
  MaterialModel material;
  ContinuationSchedule schedule;
  int max_iterations = 1000;
  double change_tolerance = 0.01;
  double move_limit = 0.2;
  double damping = 0.5;
  /// Allowed |mean(rho_H) - V_f| after each update.
  double volume_tolerance = 1e-4;
  /// Floor for the positive OC ratio numerator.
  double sensitivity_floor = 1e-10;
  /// Void voxels of the initial design are raised to this value.
  double void_floor = 0.01;
  Resolution resolution = Resolution::cube(32);
  CellLengths lengths{};
  SolverOptions solver{.reuse_factorization = true};

  void validate() const;
};

struct DesignState {
  std::vector<double> eta;
  std::vector<double> rho;
  std::vector<double> rho_h;
  double beta = 1.0;
  int iteration = 0;

  /// Recomputes rho and rho_h from eta and beta.
  void update(const FilterOperator& filter);
};

struct TraceEntry {
  int iteration = 0;
  double objective = 0.0;
  double volume = 0.0;
  double change = 0.0;
  double beta = 0.0;

  bool operator==(const TraceEntry&) const = default;
};

struct OptimizationResult {
  DensityGrid final_grid;
  ElasticityTensor6 final_tensor;
  double objective_value = 0.0;
  double achieved_volume = 0.0;
  bool converged = false;
  int iterations_used = 0;
  std::vector<TraceEntry> trace;
};

struct Sensitivities {
  double objective = 0.0;
  ElasticityTensor6 tensor;
  std::vector<double> d_objective;  // dF/d eta
  std::vector<double> d_volume;     // dV/d eta
};

Sensitivities objective_and_sensitivities(const DesignState& state, Objective objective, const FilterOperator& filter,
                                          Homogenizer& homogenizer);

struct OcOptions {
  double move_limit = 0.2;
  double damping = 0.5;
  double volume_tolerance = 1e-4;
  double sensitivity_floor = 1e-10;
  double lambda_min = 1e-9;
  double lambda_max = 1e9;
  int max_bisections = 200;
};

/// Optimality-criteria step; lambda is bisected (geometrically) until the
/// projected volume mean(rho_H(W eta')) is within tolerance of vf.
std::vector<double> oc_update(std::span<const double> eta, std::span<const double> d_objective,
                              std::span<const double> d_volume, double vf, const FilterOperator& filter, double beta,
                              const OcOptions& options = {});

/// Physical volume fraction mean(rho_H(W eta)).
double projected_volume(std::span<const double> eta, const FilterOperator& filter, double beta);

/// Fraction of voxels with density strictly inside (0.05, 0.95).
double binarization_fraction(const DensityGrid& grid);

/// Voids raised to `void_floor`, then rescaled so the projected volume at
/// `beta` equals vf: eta = s * g for s <= 1, g + (s - 1)(1 - g) above.
std::vector<double> initial_design(const DensityGrid& gyroid, double vf, const FilterOperator& filter, double beta,
                                   double void_floor = 0.01);

/// Whether one move-limited OC step can bring the projected volume down to vf.
bool oc_can_reach(std::span<const double> eta, double vf, const FilterOperator& filter, double beta,
                  double move_limit);

/// eta - t clamped at 0, with t bisected so the projected volume is just below vf.
/// Used after a beta increase that one OC step could not absorb.
std::vector<double> shift_to_volume(std::span<const double> eta, double vf, const FilterOperator& filter, double beta);

using ProgressFn = std::function<void(const TraceEntry&)>;

OptimizationResult optimize(const TopOptConfig& config, const DensityGrid& initial, const ProgressFn& progress = {});

}  // namespace gyrox
