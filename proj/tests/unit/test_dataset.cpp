#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gyrox/dataset.hpp"
#include "gyrox/errors.hpp"
#include "gyrox/grid_io.hpp"
#include "gyrox/tpms_voxel.hpp"

using namespace gyrox;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Tiny points: beta is already at its maximum and any change counts as
// converged, so a point finishes after one OC step. Odd rmin values use a
// short iteration cap with a high beta target so they end unconverged.
std::vector<DoePoint> tiny_points(std::size_t extra_failed = 0) {
  TopOptConfig base;
  base.resolution = Resolution::cube(4);
  base.schedule.beta_initial = 1.0;
  base.schedule.beta_max = 1.0;
  base.change_tolerance = 1.0;
  DoeSpec spec;
  spec.vf = parse_range("0.3:0.4:0.05");
  spec.rmin = parse_range("1.5:1.6:0.1");
  auto points = enumerate_doe(spec, base);
  for (auto& p : points)
    if (p.config.rmin > 1.55) {
      p.config.schedule.beta_max = 64.0;
      p.config.max_iterations = 2;
    }
  for (std::size_t i = 0; i < extra_failed && i < points.size(); ++i) {
    points[i].config.solver.kind = SolverKind::Pcg;
    points[i].config.solver.max_iterations = 1;
  }
  return points;
}

DensityGrid tiny_initial() { return voxelize_gyroid(TpmsSpec{}, Resolution::cube(4)); }

}  // namespace

TEST_CASE("record ids") {
  DoePoint p;
  p.index = 7;
  p.config.objective = Objective::Shear;
  CHECK(record_id(p) == "obj2_0007");
  p.index = 2751;
  CHECK(record_id(p) == "obj2_2751");
}

TEST_CASE("run status names") {
  for (RunStatus s : {RunStatus::Converged, RunStatus::Discarded, RunStatus::Failed})
    CHECK(run_status_from_string(to_string(s)) == s);
  CHECK(to_string(RunStatus::Converged) == "converged");
  CHECK_THROWS_AS(run_status_from_string("done"), InvalidArgument);
}

TEST_CASE("sweep writes sidecars for all points and grids for converged ones") {
  TempDir dir("gyrox_sweep_basic");
  const auto points = tiny_points(1);
  std::size_t callbacks = 0;
  const SweepResult r = run_dataset(points, tiny_initial(),
                                    {.out_dir = dir.path, .jobs = 2, .on_done = [&](auto&, double, bool) { ++callbacks; }});
  CHECK(callbacks == points.size());
  REQUIRE(r.manifest.entries.size() == points.size());
  CHECK(r.run_seconds.size() == points.size());

  std::map<RunStatus, int> seen;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& e = r.manifest.entries[i];
    CHECK(e.id == record_id(points[i]));
    ++seen[e.status];
    CHECK(fs::exists(dir.path / e.sidecar));
    const RunSummary s = load_sidecar(dir.path / e.sidecar);
    CHECK(s.vf == points[i].config.vf);
    if (e.status == RunStatus::Converged) {
      CHECK(e.grid == e.id + ".dgrid");
      const DatasetRecord rec = load_record(dir.path, e);
      CHECK(rec.grid.resolution() == Resolution::cube(4));
      CHECK(relative_density(rec.grid) == doctest::Approx(s.achieved_volume).epsilon(1e-12));
      CHECK(s.tensor.has_value());
    } else {
      CHECK(e.grid.empty());
      CHECK_FALSE(fs::exists(dir.path / (e.id + ".dgrid")));
      CHECK_THROWS_AS(load_record(dir.path, e), InvalidArgument);
    }
  }
  CHECK(r.manifest.entries[0].status == RunStatus::Failed);
  CHECK(r.manifest.entries[0].error.has_value());
  CHECK(load_sidecar(dir.path / r.manifest.entries[0].sidecar).error.has_value());
  CHECK(seen[RunStatus::Converged] > 0);
  CHECK(seen[RunStatus::Discarded] > 0);

  const auto counts = r.manifest.counts();
  REQUIRE(counts.count(1));
  CHECK(counts.at(1).total == points.size() / 2);
  CHECK(counts.at(1).converged + counts.at(1).discarded == counts.at(1).total);
}

TEST_CASE("sweep output does not depend on the number of jobs") {
  TempDir a("gyrox_sweep_j1"), b("gyrox_sweep_j4");
  const auto points = tiny_points();
  const auto ra = run_dataset(points, tiny_initial(), {.out_dir = a.path, .jobs = 1});
  const auto rb = run_dataset(points, tiny_initial(), {.out_dir = b.path, .jobs = 4});
  CHECK(ra.manifest == rb.manifest);
  for (const auto& e : ra.manifest.entries) {
    CHECK(slurp(a.path / e.sidecar) == slurp(b.path / e.sidecar));
    if (!e.grid.empty()) CHECK(slurp(a.path / e.grid) == slurp(b.path / e.grid));
  }
}

TEST_CASE("resume skips finished points") {
  TempDir dir("gyrox_sweep_resume");
  const auto points = tiny_points();
  const auto first = run_dataset(points, tiny_initial(), {.out_dir = dir.path});
  CHECK(first.resumed == 0u);
  // Remove one sidecar so exactly one point reruns.
  fs::remove(dir.path / first.manifest.entries[1].sidecar);
  const auto second = run_dataset(points, tiny_initial(), {.out_dir = dir.path, .resume = true});
  CHECK(second.resumed == points.size() - 1);
  CHECK(second.manifest == first.manifest);
  CHECK(second.run_seconds[0] == 0.0);
}

TEST_CASE("sweep rejects bad input before running") {
  TempDir dir("gyrox_sweep_bad");
  auto points = tiny_points();
  CHECK_THROWS_AS(run_dataset(points, DensityGrid(Resolution::cube(3), {}, 0.5), {.out_dir = dir.path}), ShapeMismatch);
  CHECK_THROWS_AS(run_dataset(points, tiny_initial(), {.out_dir = dir.path, .jobs = 0}), InvalidArgument);
  points[0].config.vf = 2.0;
  CHECK_THROWS_AS(run_dataset(points, tiny_initial(), {.out_dir = dir.path}), InvalidArgument);
  CHECK(fs::is_empty(dir.path));
}

TEST_CASE("manifest JSON round trip and schema") {
  DatasetManifest m;
  m.resolution = Resolution::cube(16);
  ManifestEntry e;
  e.id = "obj1_0001";
  e.index = 1;
  e.vf = 0.25;
  e.rmin = 1.2;
  e.status = RunStatus::Converged;
  e.sidecar = "obj1_0001.json";
  e.grid = "obj1_0001.dgrid";
  m.entries.push_back(e);
  e.id = "obj2_0001";
  e.objective_id = 2;
  e.status = RunStatus::Failed;
  e.grid.clear();
  e.error = "boom";
  m.entries.push_back(e);
  split_dataset(m, {0.9, 0.05, 0.05}, 42);

  const auto j = to_json(m);
  CHECK(j["schema_version"] == 1);
  CHECK(manifest_from_json(j) == m);

  TempDir dir("gyrox_manifest");
  save_manifest(dir.path, m);
  CHECK(load_manifest(dir.path) == m);
  CHECK(slurp(dir.path / "manifest.json") == manifest_text(m));

  auto wrong = j;
  wrong["schema_version"] = 99;
  CHECK_THROWS_AS(manifest_from_json(wrong), IoError);
  CHECK_THROWS_AS(load_manifest(dir.path / "missing"), IoError);
}

TEST_CASE("split is seeded, covers converged entries only and rounds counts") {
  DatasetManifest m;
  for (int i = 1; i <= 45; ++i) {
    ManifestEntry e;
    e.id = "obj1_" + std::to_string(i);
    e.index = i;
    e.status = i % 9 == 0 ? RunStatus::Discarded : RunStatus::Converged;
    m.entries.push_back(e);
  }
  DatasetManifest a = m, b = m, c = m;
  split_dataset(a, {0.8, 0.1, 0.1}, 7);
  split_dataset(b, {0.8, 0.1, 0.1}, 7);
  split_dataset(c, {0.8, 0.1, 0.1}, 8);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  std::map<std::string, int> n;
  for (const auto& e : a.entries) {
    if (e.status != RunStatus::Converged) CHECK(e.split.empty());
    ++n[e.split];
  }
  // 40 converged: 32 / 4 / 4.
  CHECK(n["train"] == 32);
  CHECK(n["val"] == 4);
  CHECK(n["test"] == 4);
  CHECK(n[""] == 5);
  REQUIRE(a.split.has_value());
  CHECK(a.split->seed == 7u);
  CHECK_THROWS_AS(split_dataset(a, {0.5, 0.2, 0.2}, 1), InvalidArgument);
}

TEST_CASE("sidecar JSON keys") {
  TopOptConfig c;
  c.resolution = Resolution::cube(4);
  c.max_iterations = 1;
  const auto res = optimize(c, tiny_initial());
  const RunSummary s = summarize(c, res);
  const auto j = to_json(s);
  for (const char* key : {"objective_id", "vf", "rmin", "resolution", "objective_value", "achieved_volume", "converged",
                          "iterations", "trace", "tensor"})
    CHECK(j.contains(key));
  CHECK(j["trace"][0].contains("beta"));
  const RunSummary back = summary_from_json(j);
  CHECK(back.trace == s.trace);
  CHECK(back.tensor->entries == s.tensor->entries);
  CHECK(sidecar_text(back) == sidecar_text(s));
  CHECK_THROWS_AS(summary_from_json(nlohmann::json::object()), IoError);
}
