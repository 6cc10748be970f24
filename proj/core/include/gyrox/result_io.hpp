#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gyrox/topopt.hpp"

namespace gyrox {

/// Everything in a run's JSON sidecar. `error` is set for runs that threw.
struct RunSummary {
  int objective_id = 1;
  double vf = 0.0;
  double rmin = 0.0;
  Resolution resolution{};
  double objective_value = 0.0;
  double achieved_volume = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<TraceEntry> trace;
  std::optional<ElasticityTensor6> tensor;
  std::optional<std::string> error;
};

RunSummary summarize(const TopOptConfig& config, const OptimizationResult& result);

nlohmann::json to_json(const RunSummary& s);
RunSummary summary_from_json(const nlohmann::json& j);

/// Canonical sidecar text (2-space indent, trailing newline).
std::string sidecar_text(const RunSummary& s);
void save_sidecar(const std::filesystem::path& path, const RunSummary& s);
RunSummary load_sidecar(const std::filesystem::path& path);

/// Writes `<stem>.dgrid` and `<stem>.json` atomically.
void save_result(const std::filesystem::path& stem, const TopOptConfig& config, const OptimizationResult& result);

}  // namespace gyrox
