#include "gyrox/topopt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gyrox/errors.hpp"

namespace gyrox {

void ContinuationSchedule::validate() const {
  if (!(beta_initial >= 0.0)) throw InvalidArgument("initial beta must be >= 0");
  if (!(beta_initial <= beta_max)) throw InvalidArgument("initial beta exceeds beta_max");
  if (double_every < 1) throw InvalidArgument("beta doubling period must be >= 1");
  if (!(change_threshold >= 0.0)) throw InvalidArgument("continuation change threshold must be >= 0");
}

void TopOptConfig::validate() const {
  if (!(vf > 0.0 && vf < 1.0)) throw InvalidArgument("volume fraction must lie in (0, 1)");
  if (!(rmin >= 1.0) || !std::isfinite(rmin)) throw InvalidArgument("filter radius must be >= 1 element");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
  if (!(move_limit > 0.0 && move_limit <= 1.0)) throw InvalidArgument("move limit must lie in (0, 1]");
  if (!(damping > 0.0)) throw InvalidArgument("damping must be positive");
  if (!(volume_tolerance > 0.0)) throw InvalidArgument("volume tolerance must be positive");
  if (!(void_floor > 0.0 && void_floor < 1.0)) throw InvalidArgument("void floor must lie in (0, 1)");
  if (resolution.x < 1 || resolution.y < 1 || resolution.z < 1) throw InvalidArgument("resolution must be positive");
  material.validate();
  schedule.validate();
}

void DesignState::update(const FilterOperator& filter) {
  rho = filter.apply(eta);
  for (double& r : rho) r = std::clamp(r, 0.0, 1.0);
  rho_h = heaviside_project(rho, beta);
}

Sensitivities objective_and_sensitivities(const DesignState& state, Objective objective, const FilterOperator& filter,
                                          Homogenizer& homogenizer) {
  const std::size_t n = state.rho_h.size();
  if (state.rho.size() != n || filter.size() != n) throw ShapeMismatch("design state does not match the filter");

  const HomogenizationResult res = homogenizer.run(state.rho_h);
  const Matrix6 w = objective_weights(objective);
  const MaterialModel& mat = homogenizer.material();
  const double inv_volume = 1.0 / res.cell_volume;

  std::vector<double> g(n), dh(n);
  for (std::size_t e = 0; e < n; ++e) {
    const double df_drho_h = mat.modulus_derivative(state.rho_h[e]) * inv_volume * w.cwiseProduct(res.element_energies[e]).sum();
    dh[e] = heaviside_derivative(state.rho[e], state.beta);
    g[e] = dh[e] * df_drho_h;
  }
  for (double& d : dh) d /= static_cast<double>(n);

  Sensitivities out;
  out.tensor = res.tensor;
  out.objective = objective_value(objective, res.tensor);
  out.d_objective = filter.apply_transpose(g);
  out.d_volume = filter.apply_transpose(dh);
  return out;
}

double projected_volume(std::span<const double> eta, const FilterOperator& filter, double beta) {
  const std::vector<double> rho = filter.apply(eta);
  double sum = 0.0;
  for (double r : rho) sum += std::clamp(heaviside_project(std::clamp(r, 0.0, 1.0), beta), 0.0, 1.0);
  return rho.empty() ? 0.0 : sum / static_cast<double>(rho.size());
}

std::vector<double> oc_update(std::span<const double> eta, std::span<const double> d_objective,
                              std::span<const double> d_volume, double vf, const FilterOperator& filter, double beta,
                              const OcOptions& options) {
  const std::size_t n = eta.size();
  if (d_objective.size() != n || d_volume.size() != n || filter.size() != n)
    throw ShapeMismatch("OC inputs differ in length");
  for (std::size_t e = 0; e < n; ++e)
    if (!std::isfinite(d_objective[e]) || !(d_volume[e] > 0.0) || !std::isfinite(d_volume[e]))
      throw InvalidArgument("OC sensitivities must be finite with positive volume gradient");

  std::vector<double> ratio(n), lo(n), hi(n);
  for (std::size_t e = 0; e < n; ++e) {
    ratio[e] = std::max(d_objective[e], options.sensitivity_floor) / d_volume[e];
    lo[e] = std::max(0.0, eta[e] - options.move_limit);
    hi[e] = std::min(1.0, eta[e] + options.move_limit);
  }
  std::vector<double> trial(n);
  auto step = [&](double lambda) {
    for (std::size_t e = 0; e < n; ++e)
      trial[e] = std::clamp(eta[e] * std::pow(ratio[e] / lambda, options.damping), lo[e], hi[e]);
    return projected_volume(trial, filter, beta);
  };

  const double tol = options.volume_tolerance;
  double log_lo = std::log(options.lambda_min), log_hi = std::log(options.lambda_max);
  const double v_max = step(options.lambda_min);
  if (std::abs(v_max - vf) <= tol) return trial;
  const double v_min = step(options.lambda_max);
  if (std::abs(v_min - vf) <= tol) return trial;
  if (v_max < vf || v_min > vf)
    throw BisectionFailed("volume target " + std::to_string(vf) + " outside reachable range [" +
                          std::to_string(v_min) + ", " + std::to_string(v_max) + "]");
  for (int it = 0; it < options.max_bisections; ++it) {
    const double mid = 0.5 * (log_lo + log_hi);
    const double v = step(std::exp(mid));
    if (std::abs(v - vf) <= tol) return trial;
    (v > vf ? log_lo : log_hi) = mid;
  }
  throw BisectionFailed("OC multiplier bisection did not reach the volume target " + std::to_string(vf));
}

double binarization_fraction(const DensityGrid& grid) {
  if (grid.size() == 0) return 0.0;
  const auto vals = grid.values();
  const auto grey = std::count_if(vals.begin(), vals.end(), [](double v) { return v > 0.05 && v < 0.95; });
  return static_cast<double>(grey) / static_cast<double>(grid.size());
}

std::vector<double> initial_design(const DensityGrid& gyroid, double vf, const FilterOperator& filter, double beta,
                                   double void_floor) {
  if (gyroid.size() != filter.size()) throw ShapeMismatch("initial grid does not match the filter");
  if (!(vf > 0.0 && vf < 1.0)) throw InvalidArgument("volume fraction must lie in (0, 1)");
  std::vector<double> g(gyroid.values().begin(), gyroid.values().end());
  for (double& v : g) v = std::max(v, void_floor);

  std::vector<double> eta(g.size());
  auto scaled = [&](double s) {
    for (std::size_t e = 0; e < g.size(); ++e)
      eta[e] = s <= 1.0 ? std::min(1.0, s * g[e]) : g[e] + (s - 1.0) * (1.0 - g[e]);
    return projected_volume(eta, filter, beta);
  };
  double lo = 0.0, hi = 2.0;
  for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (scaled(mid) < vf ? lo : hi) = mid;
  }
  scaled(0.5 * (lo + hi));
  return eta;
}

bool oc_can_reach(std::span<const double> eta, double vf, const FilterOperator& filter, double beta,
                  double move_limit) {
  std::vector<double> lowest(eta.begin(), eta.end());
  for (double& v : lowest) v = std::max(0.0, v - move_limit);
  return projected_volume(lowest, filter, beta) <= vf;
}

std::vector<double> shift_to_volume(std::span<const double> eta, double vf, const FilterOperator& filter, double beta) {
  std::vector<double> out(eta.size());
  auto shifted = [&](double t) {
    for (std::size_t e = 0; e < eta.size(); ++e) out[e] = std::max(0.0, eta[e] - t);
    return projected_volume(out, filter, beta);
  };
  if (shifted(0.0) <= vf) return out;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    (shifted(mid) > vf ? lo : hi) = mid;
  }
  shifted(hi);
  return out;
}

OptimizationResult optimize(const TopOptConfig& config, const DensityGrid& initial, const ProgressFn& progress) {
  config.validate();
  if (initial.resolution() != config.resolution)
    throw ShapeMismatch("initial grid " + to_string(initial.resolution()) + " does not match configured " +
                        to_string(config.resolution));

  const FilterOperator filter(config.resolution, config.rmin);
  Homogenizer homogenizer(config.resolution, config.lengths, config.material, config.solver);
  const OcOptions oc{.move_limit = config.move_limit,
                     .damping = config.damping,
                     .volume_tolerance = config.volume_tolerance,
                     .sensitivity_floor = config.sensitivity_floor};
  const auto& sched = config.schedule;

  DesignState state;
  state.beta = sched.beta_initial;
  state.eta = initial_design(initial, config.vf, filter, state.beta, config.void_floor);
  state.update(filter);

  OptimizationResult result;
  int since_doubling = 0;
  for (int it = 1; it <= config.max_iterations; ++it) {
    const Sensitivities sens = objective_and_sensitivities(state, config.objective, filter, homogenizer);
    std::vector<double> next = oc_update(state.eta, sens.d_objective, sens.d_volume, config.vf, filter, state.beta, oc);
    double change = 0.0;
    for (std::size_t e = 0; e < next.size(); ++e) change = std::max(change, std::abs(next[e] - state.eta[e]));
    state.eta = std::move(next);
    state.iteration = it;
    state.update(filter);

    const double volume = std::accumulate(state.rho_h.begin(), state.rho_h.end(), 0.0) /
                          static_cast<double>(state.rho_h.size());
    result.trace.push_back({it, sens.objective, volume, change, state.beta});
    if (progress) progress(result.trace.back());
    result.iterations_used = it;

    if (state.beta >= sched.beta_max && change < config.change_tolerance) {
      result.converged = true;
      break;
    }
    // The final grid is reported at the beta of the last update, so only
    // advance beta when another iteration will follow.
    if (it == config.max_iterations) break;
    ++since_doubling;
    if (state.beta < sched.beta_max && (since_doubling >= sched.double_every || change < sched.change_threshold)) {
      state.beta = std::min(2.0 * state.beta, sched.beta_max);
      since_doubling = 0;
      if (!oc_can_reach(state.eta, config.vf, filter, state.beta, config.move_limit))
        state.eta = shift_to_volume(state.eta, config.vf, filter, state.beta);
      state.update(filter);
    }
  }

  const HomogenizationResult final_res = homogenizer.run(state.rho_h);
  result.final_grid = DensityGrid(config.resolution, config.lengths, state.rho_h);
  result.final_tensor = final_res.tensor;
  result.objective_value = objective_value(config.objective, final_res.tensor);
  result.achieved_volume = relative_density(result.final_grid);
  return result;
}

}  // namespace gyrox
