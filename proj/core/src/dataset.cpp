#include "gyrox/dataset.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "gyrox/errors.hpp"
#include "gyrox/grid_io.hpp"

namespace gyrox {
namespace fs = std::filesystem;

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::Discarded: return "discarded";
    case RunStatus::Failed: return "failed";
  }
  return "failed";
}

RunStatus run_status_from_string(const std::string& s) {
  if (s == "converged") return RunStatus::Converged;
  if (s == "discarded") return RunStatus::Discarded;
  if (s == "failed") return RunStatus::Failed;
  throw InvalidArgument("unknown run status '" + s + "'");
}

std::map<int, StatusCounts> DatasetManifest::counts() const {
  std::map<int, StatusCounts> out;
  for (const auto& e : entries) {
    auto& c = out[e.objective_id];
    ++c.total;
    ++(e.status == RunStatus::Converged ? c.converged : c.discarded);
  }
  return out;
}

nlohmann::json to_json(const DatasetManifest& m) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [id, c] : m.counts())
    counts[std::to_string(id)] = {{"total", c.total}, {"converged", c.converged}, {"discarded", c.discarded}};

  nlohmann::json records = nlohmann::json::array();
  for (const auto& e : m.entries) {
    records.push_back({{"id", e.id},
                       {"objective_id", e.objective_id},
                       {"index", e.index},
                       {"vf", e.vf},
                       {"rmin", e.rmin},
                       {"status", to_string(e.status)},
                       {"objective_value", e.objective_value},
                       {"achieved_volume", e.achieved_volume},
                       {"iterations", e.iterations},
                       {"sidecar", e.sidecar},
                       {"grid", e.grid.empty() ? nlohmann::json(nullptr) : nlohmann::json(e.grid)},
                       {"split", e.split.empty() ? nlohmann::json(nullptr) : nlohmann::json(e.split)},
                       {"error", e.error ? nlohmann::json(*e.error) : nlohmann::json(nullptr)}});
  }

  nlohmann::json split = nullptr;
  if (m.split) {
    std::map<std::string, std::size_t> sizes{{"train", 0}, {"val", 0}, {"test", 0}};
    for (const auto& e : m.entries)
      if (!e.split.empty()) ++sizes[e.split];
    split = {{"seed", m.split->seed},
             {"fractions", {m.split->fractions[0], m.split->fractions[1], m.split->fractions[2]}},
             {"counts", sizes}};
  }
  return {{"schema_version", m.schema_version},
          {"resolution", {m.resolution.x, m.resolution.y, m.resolution.z}},
          {"cell_lengths", {m.lengths.x, m.lengths.y, m.lengths.z}},
          {"counts", std::move(counts)},
          {"split", std::move(split)},
          {"records", std::move(records)}};
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
  try {
    DatasetManifest m;
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != kManifestSchemaVersion)
      throw IoError("unsupported manifest schema_version " + std::to_string(m.schema_version));
    const auto& r = j.at("resolution");
    m.resolution = {r.at(0).get<int>(), r.at(1).get<int>(), r.at(2).get<int>()};
    const auto& l = j.at("cell_lengths");
    m.lengths = {l.at(0).get<double>(), l.at(1).get<double>(), l.at(2).get<double>()};
    for (const auto& rec : j.at("records")) {
      ManifestEntry e;
      e.id = rec.at("id").get<std::string>();
      e.objective_id = rec.at("objective_id").get<int>();
      e.index = rec.at("index").get<int>();
      e.vf = rec.at("vf").get<double>();
      e.rmin = rec.at("rmin").get<double>();
      e.status = run_status_from_string(rec.at("status").get<std::string>());
      e.objective_value = rec.at("objective_value").get<double>();
      e.achieved_volume = rec.at("achieved_volume").get<double>();
      e.iterations = rec.at("iterations").get<int>();
      e.sidecar = rec.at("sidecar").get<std::string>();
      if (!rec.at("grid").is_null()) e.grid = rec["grid"].get<std::string>();
      if (!rec.at("split").is_null()) e.split = rec["split"].get<std::string>();
      if (!rec.at("error").is_null()) e.error = rec["error"].get<std::string>();
      m.entries.push_back(std::move(e));
    }
    if (!j.at("split").is_null()) {
      const auto& s = j["split"];
      SplitInfo info;
      info.seed = s.at("seed").get<std::uint64_t>();
      for (int i = 0; i < 3; ++i) info.fractions[static_cast<std::size_t>(i)] = s.at("fractions").at(i).get<double>();
      m.split = info;
    }
    return m;
  } catch (const nlohmann::json::exception& err) {
    throw IoError(std::string("malformed manifest: ") + err.what());
  } catch (const InvalidArgument& err) {
    throw IoError(std::string("malformed manifest: ") + err.what());
  }
}

std::string manifest_text(const DatasetManifest& m) { return to_json(m).dump(2) + "\n"; }

void save_manifest(const fs::path& dir, const DatasetManifest& m) {
  write_text_atomic(dir / "manifest.json", manifest_text(m));
}

DatasetManifest load_manifest(const fs::path& dir) {
  const auto path = dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& err) {
    throw IoError(path.string() + ": " + err.what());
  }
  return manifest_from_json(j);
}

std::string record_id(const DoePoint& p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "obj%d_%04d", static_cast<int>(p.config.objective), p.index);
  return buf;
}

namespace {

ManifestEntry entry_for(const DoePoint& p, const RunSummary& s) {
  ManifestEntry e;
  e.id = record_id(p);
  e.objective_id = static_cast<int>(p.config.objective);
  e.index = p.index;
  e.vf = p.config.vf;
  e.rmin = p.config.rmin;
  e.objective_value = s.objective_value;
  e.achieved_volume = s.achieved_volume;
  e.iterations = s.iterations;
  e.sidecar = e.id + ".json";
  e.error = s.error;
  if (s.error)
    e.status = RunStatus::Failed;
  else if (s.converged)
    e.status = RunStatus::Converged;
  else
    e.status = RunStatus::Discarded;
  if (e.status == RunStatus::Converged) e.grid = e.id + ".dgrid";
  return e;
}

// A finished record from an earlier invocation, if it matches this point.
std::optional<RunSummary> existing_record(const fs::path& dir, const DoePoint& p) {
  const auto id = record_id(p);
  try {
    if (!fs::exists(dir / (id + ".json"))) return std::nullopt;
    RunSummary s = load_sidecar(dir / (id + ".json"));
    if (s.error || s.objective_id != static_cast<int>(p.config.objective) || s.vf != p.config.vf ||
        s.rmin != p.config.rmin || s.resolution != p.config.resolution)
      return std::nullopt;
    if (s.converged && load_dgrid(dir / (id + ".dgrid")).resolution() != p.config.resolution) return std::nullopt;
    return s;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

RunSummary run_point(const fs::path& dir, const DoePoint& p, const DensityGrid& initial) {
  const auto id = record_id(p);
  RunSummary s;
  try {
    OptimizationResult res = optimize(p.config, initial);
    // Store exactly what a dgrid reader will see.
    res.final_grid = quantize_f32(res.final_grid);
    res.achieved_volume = relative_density(res.final_grid);
    s = summarize(p.config, res);
    std::error_code ec;
    if (res.converged)
      save_dgrid(dir / (id + ".dgrid"), res.final_grid);
    else
      fs::remove(dir / (id + ".dgrid"), ec);  // stale grid from an earlier sweep
  } catch (const std::exception& err) {
    s = RunSummary{};
    s.objective_id = static_cast<int>(p.config.objective);
    s.vf = p.config.vf;
    s.rmin = p.config.rmin;
    s.resolution = p.config.resolution;
    s.error = err.what();
  }
  try {
    save_sidecar(dir / (id + ".json"), s);
  } catch (const std::exception& err) {
    if (!s.error) s.error = err.what();
  }
  return s;
}

// Uniform integer in [0, n) from a 64-bit engine, identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

}  // namespace

SweepResult run_dataset(const std::vector<DoePoint>& points, const DensityGrid& initial, const SweepOptions& options) {
  if (options.jobs < 1) throw InvalidArgument("jobs must be >= 1");
  for (const auto& p : points) {
    if (p.config.resolution != initial.resolution())
      throw ShapeMismatch("DoE point resolution " + to_string(p.config.resolution) + " differs from initial grid " +
                          to_string(initial.resolution()));
    p.config.validate();
  }
  std::error_code ec;
  fs::create_directories(options.out_dir, ec);
  if (ec) throw IoError("cannot create " + options.out_dir.string() + ": " + ec.message());

  SweepResult out;
  out.manifest.resolution = initial.resolution();
  out.manifest.lengths = initial.cell_lengths();
  out.manifest.entries.resize(points.size());
  out.run_seconds.assign(points.size(), 0.0);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> resumed{0};
  std::mutex report;
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      const auto& p = points[i];
      const auto t0 = std::chrono::steady_clock::now();
      std::optional<RunSummary> s;
      if (options.resume) s = existing_record(options.out_dir, p);
      const bool was_resumed = s.has_value();
      if (!s) s = run_point(options.out_dir, p, initial);
      const double secs = was_resumed ? 0.0 : std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out.manifest.entries[i] = entry_for(p, *s);
      out.run_seconds[i] = secs;
      if (was_resumed) ++resumed;
      if (options.on_done) {
        std::lock_guard lock(report);
        options.on_done(out.manifest.entries[i], secs, was_resumed);
      }
    }
  };
  const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(options.jobs),
                                                             std::max<std::size_t>(points.size(), 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  out.resumed = resumed;
  return out;
}

void split_dataset(DatasetManifest& m, std::array<double, 3> fractions, std::uint64_t seed) {
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("split fractions must lie in [0, 1]");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("split fractions must sum to 1");

  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    m.entries[i].split.clear();
    if (m.entries[i].status == RunStatus::Converged) pool.push_back(i);
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[uniform_below(rng, i)]);

  const auto n = static_cast<double>(pool.size());
  const auto n_train = std::min(pool.size(), static_cast<std::size_t>(std::llround(fractions[0] * n)));
  const auto n_val = std::min(pool.size() - n_train, static_cast<std::size_t>(std::llround(fractions[1] * n)));
  for (std::size_t k = 0; k < pool.size(); ++k)
    m.entries[pool[k]].split = k < n_train ? "train" : (k < n_train + n_val ? "val" : "test");
  m.split = SplitInfo{seed, fractions};
}

DatasetRecord load_record(const fs::path& dir, const ManifestEntry& entry) {
  if (entry.status != RunStatus::Converged || entry.grid.empty())
    throw InvalidArgument("record " + entry.id + " has no grid (status " + to_string(entry.status) + ")");
  return {load_sidecar(dir / entry.sidecar), load_dgrid(dir / entry.grid)};
}

}  // namespace gyrox
