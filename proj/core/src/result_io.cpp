#include "gyrox/result_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gyrox/errors.hpp"
#include "gyrox/grid_io.hpp"

namespace gyrox {

RunSummary summarize(const TopOptConfig& config, const OptimizationResult& result) {
  RunSummary s;
  s.objective_id = static_cast<int>(config.objective);
  s.vf = config.vf;
  s.rmin = config.rmin;
  s.resolution = config.resolution;
  s.objective_value = result.objective_value;
  s.achieved_volume = result.achieved_volume;
  s.converged = result.converged;
  s.iterations = result.iterations_used;
  s.trace = result.trace;
  s.tensor = result.final_tensor;
  return s;
}

nlohmann::json to_json(const RunSummary& s) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& t : s.trace)
    trace.push_back({{"iteration", t.iteration},
                     {"objective", t.objective},
                     {"volume", t.volume},
                     {"change", t.change},
                     {"beta", t.beta}});
  nlohmann::json j = {{"objective_id", s.objective_id},
                      {"vf", s.vf},
                      {"rmin", s.rmin},
                      {"resolution", {s.resolution.x, s.resolution.y, s.resolution.z}},
                      {"objective_value", s.objective_value},
                      {"achieved_volume", s.achieved_volume},
                      {"converged", s.converged},
                      {"iterations", s.iterations},
                      {"trace", std::move(trace)}};
  j["tensor"] = s.tensor ? tensor_to_json(*s.tensor) : nlohmann::json(nullptr);
  j["error"] = s.error ? nlohmann::json(*s.error) : nlohmann::json(nullptr);
  return j;
}

RunSummary summary_from_json(const nlohmann::json& j) {
  try {
    RunSummary s;
    s.objective_id = j.at("objective_id").get<int>();
    objective_from_id(s.objective_id);
    s.vf = j.at("vf").get<double>();
    s.rmin = j.at("rmin").get<double>();
    const auto& r = j.at("resolution");
    s.resolution = {r.at(0).get<int>(), r.at(1).get<int>(), r.at(2).get<int>()};
    s.objective_value = j.at("objective_value").get<double>();
    s.achieved_volume = j.at("achieved_volume").get<double>();
    s.converged = j.at("converged").get<bool>();
    s.iterations = j.at("iterations").get<int>();
    for (const auto& t : j.at("trace"))
      s.trace.push_back({t.at("iteration").get<int>(), t.at("objective").get<double>(), t.at("volume").get<double>(),
                         t.at("change").get<double>(), t.at("beta").get<double>()});
    if (j.contains("tensor") && !j["tensor"].is_null()) s.tensor = tensor_from_json(j["tensor"]);
    if (j.contains("error") && !j["error"].is_null()) s.error = j["error"].get<std::string>();
    return s;
  } catch (const nlohmann::json::exception& err) {
    throw IoError(std::string("malformed run sidecar: ") + err.what());
  } catch (const InvalidArgument& err) {
    throw IoError(std::string("malformed run sidecar: ") + err.what());
  }
}

std::string sidecar_text(const RunSummary& s) { return to_json(s).dump(2) + "\n"; }

void save_sidecar(const std::filesystem::path& path, const RunSummary& s) { write_text_atomic(path, sidecar_text(s)); }

RunSummary load_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& err) {
    throw IoError(path.string() + ": " + err.what());
  }
  return summary_from_json(j);
}

void save_result(const std::filesystem::path& stem, const TopOptConfig& config, const OptimizationResult& result) {
  auto grid_path = stem, json_path = stem;
  grid_path += ".dgrid";
  json_path += ".json";
  save_dgrid(grid_path, result.final_grid);
  save_sidecar(json_path, summarize(config, result));
}

}  // namespace gyrox
