// gyrox: Gyroid voxelization, periodic homogenization, topology optimization
// and dataset sweeps from the command line.
//
// stdout carries key=value lines (or JSON/CSV where noted); diagnostics go to stderr.
// Exit codes: 0 ok (including non-converged runs), 2 bad input, 3 I/O, 4 solver failure.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gyrox/dataset.hpp"
#include "gyrox/errors.hpp"
#include "gyrox/grid_io.hpp"
#include "gyrox/metrics.hpp"
#include "gyrox/study.hpp"
#include "gyrox/topopt.hpp"
#include "gyrox/tpms_voxel.hpp"

namespace fs = std::filesystem;
using namespace gyrox;

namespace {

enum Exit { kOk = 0, kBadInput = 2, kIo = 3, kSolver = 4 };

struct GyroidFlags {
  double c = 0.0;
  double cell_length = 1.0;
  int mesh_points = 15;
  int resolution = 32;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--c", c, "Gyroid level-set offset")->capture_default_str();
    cmd->add_option("--cell-length", cell_length, "Unit-cell edge length (cm)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--mesh-points", mesh_points, "Level-set samples per axis for the isosurface")
        ->check(CLI::Range(2, 4096))
        ->capture_default_str();
    cmd->add_option("--resolution", resolution, "Voxels per axis")->check(CLI::Range(2, 4096))->capture_default_str();
  }

  TpmsSpec spec() const { return {c, {cell_length, cell_length, cell_length}, mesh_points}; }
  DensityGrid voxelize() const { return voxelize_gyroid(spec(), Resolution::cube(resolution)); }
};

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(10) << v;
  return out.str();
}

const char* yes_no(bool b) { return b ? "true" : "false"; }

// --------------------------------------------------------------------------

struct VoxelizeCmd {
  GyroidFlags gyroid;
  std::string out;

  int run() const {
    const DensityGrid grid = gyroid.voxelize();
    save_dgrid(out, grid);
    std::cout << "relative_density=" << fmt(relative_density(grid)) << '\n';
    return kOk;
  }
};

struct OptimizeCmd {
  GyroidFlags gyroid;
  std::string objective = "bulk";
  double vf = 0.35;
  double rmin = 1.5;
  std::string init = "gyroid";
  int max_iter = 1000;
  std::string out;
  bool verbose = false;

  int run() const {
    TopOptConfig config;
    config.objective = objective_from_string(objective);
    config.vf = vf;
    config.rmin = rmin;
    config.max_iterations = max_iter;
    config.resolution = Resolution::cube(gyroid.resolution);
    config.validate();

    const DensityGrid initial = init == "gyroid" ? gyroid.voxelize() : load_dgrid(init);
    config.resolution = initial.resolution();
    config.lengths = initial.cell_lengths();

    ProgressFn progress;
    if (verbose)
      progress = [](const TraceEntry& t) {
        std::cerr << "iter " << t.iteration << "  f " << fmt(t.objective) << "  vol " << fmt(t.volume) << "  change "
                  << fmt(t.change) << "  beta " << fmt(t.beta) << '\n';
      };
    const OptimizationResult res = optimize(config, initial, progress);
    save_result(out, config, res);
    if (!res.converged) std::cerr << "warning: not converged after " << res.iterations_used << " iterations\n";
    std::cout << "objective=" << fmt(res.objective_value) << " volume=" << fmt(res.achieved_volume)
              << " converged=" << yes_no(res.converged) << " iters=" << res.iterations_used << '\n';
    return kOk;
  }
};

std::vector<double> parse_fractions(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  for (std::string part; std::getline(in, part, ',');) out.push_back(parse_range(part).min);
  if (out.size() != 3) throw InvalidArgument("--split needs three comma-separated fractions");
  return out;
}

struct SweepCmd {
  GyroidFlags gyroid;
  std::string vf_range = "0.25:0.45:0.01";
  std::string rmin_range = "1.20:2.50:0.01";
  std::vector<std::string> objectives{"bulk", "shear"};
  int jobs = 1;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool resume = false;
  int max_iter = 1000;
  std::string split = "0.9,0.05,0.05";
  bool dry_run = false;

  int run() const {
    DoeSpec spec;
    spec.vf = parse_range(vf_range);
    spec.rmin = parse_range(rmin_range);
    spec.objectives.clear();
    for (const auto& o : objectives) spec.objectives.push_back(objective_from_string(o));
    const auto fr = parse_fractions(split);

    TopOptConfig base;
    base.max_iterations = max_iter;
    base.resolution = Resolution::cube(gyroid.resolution);
    base.lengths = gyroid.spec().lengths;
    const auto points = enumerate_doe(spec, base);
    std::cout << "configs=" << points.size() << '\n';
    if (dry_run) return kOk;

    const DensityGrid initial = gyroid.voxelize();
    SweepOptions opts;
    opts.out_dir = out_dir;
    opts.jobs = jobs;
    opts.resume = resume;
    opts.on_done = [](const ManifestEntry& e, double secs, bool resumed) {
      std::cerr << e.id << " vf=" << e.vf << " rmin=" << e.rmin << ' ' << to_string(e.status);
      if (resumed)
        std::cerr << " (resumed)";
      else
        std::cerr << " in " << std::fixed << std::setprecision(1) << secs << std::defaultfloat << " s";
      if (e.error) std::cerr << ": " << *e.error;
      std::cerr << '\n';
    };
    SweepResult res = run_dataset(points, initial, opts);
    split_dataset(res.manifest, {fr[0], fr[1], fr[2]}, seed);
    save_manifest(out_dir, res.manifest);

    std::ostringstream timings;
    timings << "id,run_seconds,resumed\n";
    for (std::size_t i = 0; i < res.manifest.entries.size(); ++i)
      timings << res.manifest.entries[i].id << ',' << res.run_seconds[i] << ','
              << (res.run_seconds[i] == 0.0 ? 1 : 0) << '\n';
    write_text_atomic(fs::path(out_dir) / "timings.csv", timings.str());

    std::size_t failed = 0;
    for (const auto& e : res.manifest.entries) failed += e.status == RunStatus::Failed;
    for (const auto& [id, c] : res.manifest.counts())
      std::cout << "objective_" << id << "_total=" << c.total << " objective_" << id << "_converged=" << c.converged
                << " objective_" << id << "_discarded=" << c.discarded << '\n';
    std::cout << "failed=" << failed << " resumed=" << res.resumed << '\n';
    return kOk;
  }
};

std::map<std::string, fs::path> grids_in(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".dgrid") out[entry.path().filename().string()] = entry.path();
  return out;
}

struct EvaluateCmd {
  std::string pred_dir;
  std::string truth_dir;

  int run() const {
    const auto pred = grids_in(pred_dir), truth = grids_in(truth_dir);
    std::vector<std::string> missing;
    for (const auto& [name, path] : truth)
      if (!pred.count(name)) missing.push_back(name);
    for (const auto& [name, path] : pred)
      if (!truth.count(name)) missing.push_back(name);
    if (!missing.empty()) {
      std::cerr << "error: record sets differ (" << missing.size() << " unmatched, first " << missing.front() << ")\n";
      return kBadInput;
    }
    if (truth.empty()) {
      std::cerr << "error: no .dgrid records in " << truth_dir << '\n';
      return kBadInput;
    }
    std::vector<DensityGrid> p, t;
    for (const auto& [name, path] : truth) {
      t.push_back(load_dgrid(path));
      p.push_back(load_dgrid(pred.at(name)));
    }
    std::cout << to_json(evaluate(p, t)).dump() << '\n';
    return kOk;
  }
};

struct StudyCmd {
  std::string kind = "mesh";
  std::vector<int> levels;
  std::string out;

  int run() const {
    const StudyKind k = study_kind_from_string(kind);
    std::vector<int> lv = levels;
    if (lv.empty()) lv = k == StudyKind::Mesh ? std::vector<int>{5, 10, 15, 20, 32} : std::vector<int>{16, 32};
    const std::string csv = study_csv(k, convergence_study(k, lv));
    if (out.empty()) {
      std::cout << csv;
    } else {
      write_text_atomic(out, csv);
      std::cout << "rows=" << lv.size() << '\n';
    }
    return kOk;
  }
};

struct ExportCmd {
  std::string in;
  std::string format = "vtk";
  std::string out;

  int run() const {
    const DensityGrid grid = load_dgrid(in);
    save_vtk(out, grid);
    std::cout << "voxels=" << grid.size() << " relative_density=" << fmt(relative_density(grid)) << '\n';
    return kOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gyroid-initialized topology optimization of periodic unit cells"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gyrox 0.1.0");

  VoxelizeCmd vox;
  auto* c_vox = app.add_subcommand("voxelize", "Voxelize the Gyroid unit cell to a dgrid file");
  vox.gyroid.add_to(c_vox);
  c_vox->add_option("--out", vox.out, "Output dgrid path")->required();

  OptimizeCmd opt;
  auto* c_opt = app.add_subcommand("optimize", "Run one topology optimization");
  opt.gyroid.add_to(c_opt);
  c_opt->add_option("--objective", opt.objective, "bulk|shear (or 1|2)")
      ->check(CLI::IsMember({"bulk", "shear", "1", "2"}))
      ->capture_default_str();
  c_opt->add_option("--vf", opt.vf, "Target volume fraction in (0,1)")->capture_default_str();
  c_opt->add_option("--rmin", opt.rmin, "Filter radius in element edges")->capture_default_str();
  c_opt->add_option("--init", opt.init, "'gyroid' or a dgrid path")->capture_default_str();
  c_opt->add_option("--max-iter", opt.max_iter, "Iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
  c_opt->add_option("--out", opt.out, "Output stem; writes <stem>.dgrid and <stem>.json")->required();
  c_opt->add_flag("-v,--verbose", opt.verbose, "Print the iteration trace to stderr");

  SweepCmd sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Full-factorial DoE sweep into a dataset directory");
  sweep.gyroid.add_to(c_sweep);
  c_sweep->add_option("--vf-range", sweep.vf_range, "a:b:s, inclusive")->capture_default_str();
  c_sweep->add_option("--rmin-range", sweep.rmin_range, "a:b:s, inclusive")->capture_default_str();
  c_sweep->add_option("--objectives", sweep.objectives, "Comma-separated subset of bulk,shear")
      ->delimiter(',')
      ->check(CLI::IsMember({"bulk", "shear", "1", "2"}))
      ->capture_default_str();
  c_sweep->add_option("--jobs", sweep.jobs, "Concurrent optimization runs")->check(CLI::PositiveNumber)->capture_default_str();
  c_sweep->add_option("--out-dir", sweep.out_dir, "Dataset directory")->required();
  c_sweep->add_option("--seed", sweep.seed, "Train/val/test shuffle seed")->capture_default_str();
  c_sweep->add_flag("--resume", sweep.resume, "Skip points with a valid record already on disk");
  c_sweep->add_option("--max-iter", sweep.max_iter, "Iteration cap per run")->check(CLI::PositiveNumber)->capture_default_str();
  c_sweep->add_option("--split", sweep.split, "train,val,test fractions")->capture_default_str();
  c_sweep->add_flag("--dry-run", sweep.dry_run, "Only enumerate and count the configurations");

  EvaluateCmd eval;
  auto* c_eval = app.add_subcommand("evaluate", "MSE, Dice and volume deviation between matching dgrid sets");
  c_eval->add_option("--pred-dir", eval.pred_dir, "Directory of predicted .dgrid files")->required();
  c_eval->add_option("--truth-dir", eval.truth_dir, "Directory of ground-truth .dgrid files")->required();

  StudyCmd study;
  auto* c_study = app.add_subcommand("study", "Mesh or voxel-resolution convergence study (CSV)");
  c_study->add_option("--kind", study.kind, "mesh|voxel")->check(CLI::IsMember({"mesh", "voxel"}))->capture_default_str();
  c_study->add_option("--levels", study.levels, "Comma-separated levels")->delimiter(',')->check(CLI::Range(2, 4096));
  c_study->add_option("--out", study.out, "CSV path (default: stdout)");

  ExportCmd exp;
  auto* c_exp = app.add_subcommand("export", "Convert a dgrid file to legacy VTK");
  c_exp->add_option("--in", exp.in, "Input dgrid")->required();
  c_exp->add_option("--format", exp.format, "Output format")->check(CLI::IsMember({"vtk"}))->capture_default_str();
  c_exp->add_option("--out", exp.out, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (*c_vox) return vox.run();
    if (*c_opt) return opt.run();
    if (*c_sweep) return sweep.run();
    if (*c_eval) return eval.run();
    if (*c_study) return study.run();
    if (*c_exp) return exp.run();
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const NoSurface& e) {
    std::cerr << "error: NoSurface: " << e.what() << '\n';
    return kBadInput;
  } catch (const ShapeMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const SolverDiverged& e) {
    std::cerr << "error: solver: " << e.what() << '\n';
    return kSolver;
  } catch (const BisectionFailed& e) {
    std::cerr << "error: optimizer: " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  return kBadInput;
}
