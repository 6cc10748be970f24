#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gyrox/doe.hpp"
#include "gyrox/result_io.hpp"

namespace gyrox {

inline constexpr int kManifestSchemaVersion = 1;

enum class RunStatus { Converged, Discarded, Failed };

std::string to_string(RunStatus s);
RunStatus run_status_from_string(const std::string& s);

struct ManifestEntry {
  /// "obj<objective id>_<index, 4 digits>"; also the file stem of the record.
  std::string id;
  int objective_id = 1;
  int index = 0;
  double vf = 0.0;
  double rmin = 0.0;
  RunStatus status = RunStatus::Discarded;
  double objective_value = 0.0;
  double achieved_volume = 0.0;
  int iterations = 0;
  /// File names relative to the dataset directory; `grid` is empty unless converged.
  std::string sidecar;
  std::string grid;
  /// "train", "val", "test", or empty (unsplit or not converged).
  std::string split;
  std::optional<std::string> error;

  bool operator==(const ManifestEntry&) const = default;
};

struct SplitInfo {
  std::uint64_t seed = 0;
  std::array<double, 3> fractions{0.9, 0.05, 0.05};

  bool operator==(const SplitInfo&) const = default;
};

struct StatusCounts {
  std::size_t total = 0;
  std::size_t converged = 0;
  /// Non-converged plus failed runs.
  std::size_t discarded = 0;
};

struct DatasetManifest {
  int schema_version = kManifestSchemaVersion;
  Resolution resolution{};
  CellLengths lengths{};
  std::vector<ManifestEntry> entries;
  std::optional<SplitInfo> split;

  /// Keyed by objective id.
  std::map<int, StatusCounts> counts() const;
  bool operator==(const DatasetManifest&) const = default;
};

nlohmann::json to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);
std::string manifest_text(const DatasetManifest& m);
/// `<dir>/manifest.json`
void save_manifest(const std::filesystem::path& dir, const DatasetManifest& m);
DatasetManifest load_manifest(const std::filesystem::path& dir);

/// Record id and file stem for a DoE point.
std::string record_id(const DoePoint& p);

struct SweepOptions {
  std::filesystem::path out_dir;
  int jobs = 1;
  /// Skip points whose sidecar (and grid, when converged) already match.
  bool resume = false;
  /// Called once per finished point, from worker threads, under an internal lock.
  std::function<void(const ManifestEntry&, double run_seconds, bool resumed)> on_done;
};

struct SweepResult {
  DatasetManifest manifest;
  /// Wall time per entry in enumeration order (0 for resumed points). Kept
  /// out of the manifest and sidecars so those stay byte-reproducible.
  std::vector<double> run_seconds;
  std::size_t resumed = 0;
};

/// Runs every point on `jobs` workers and writes `<id>.json` for each plus
/// `<id>.dgrid` for converged ones. A failing run is recorded, never fatal.
/// Output order follows `points` regardless of scheduling.
SweepResult run_dataset(const std::vector<DoePoint>& points, const DensityGrid& initial, const SweepOptions& options);

/// Shuffles the converged entries (both objectives together) with `seed` and
/// labels them train/val/test. Counts are rounded for the first two groups;
/// the last takes the remainder.
void split_dataset(DatasetManifest& m, std::array<double, 3> fractions, std::uint64_t seed);

struct DatasetRecord {
  RunSummary summary;
  DensityGrid grid;
};

/// Converged entries only.
DatasetRecord load_record(const std::filesystem::path& dir, const ManifestEntry& entry);

}  // namespace gyrox
