#include "gyrox/study.hpp"

#include <cmath>
#include <sstream>

#include "gyrox/errors.hpp"

namespace gyrox {

StudyKind study_kind_from_string(const std::string& name) {
  if (name == "mesh") return StudyKind::Mesh;
  if (name == "voxel") return StudyKind::Voxel;
  throw InvalidArgument("unknown study kind '" + name + "' (expected mesh or voxel)");
}

std::vector<StudyRow> convergence_study(StudyKind kind, const std::vector<int>& levels, const StudyOptions& options) {
  if (levels.empty()) throw InvalidArgument("study needs at least one level");
  std::vector<StudyRow> rows;
  for (int level : levels) {
    if (level < 2) throw InvalidArgument("study levels must be >= 2");
    StudyRow row;
    row.level = level;
    if (kind == StudyKind::Mesh) {
      TpmsSpec spec = options.tpms;
      spec.mesh_points = level;
      row.relative_density =
          relative_density(voxelize_gyroid(spec, Resolution::cube(options.mesh_study_resolution)));
    } else {
      const DensityGrid grid = voxelize_gyroid(options.tpms, Resolution::cube(level));
      row.relative_density = relative_density(grid);
      const auto res = homogenized_tensor(grid, options.material, options.solver);
      row.bulk = bulk_objective(res.tensor);
      row.shear = shear_objective(res.tensor);
    }
    if (!rows.empty()) row.density_change = 100.0 * (row.relative_density - rows.back().relative_density);
    rows.push_back(row);
  }
  return rows;
}

std::string study_csv(StudyKind kind, const std::vector<StudyRow>& rows) {
  std::ostringstream out;
  out.precision(10);
  if (kind == StudyKind::Mesh) {
    out << "mesh_points,relative_density,density_change_pct\n";
    for (const auto& r : rows) out << r.level << ',' << r.relative_density << ',' << r.density_change << '\n';
  } else {
    out << "resolution,relative_density,bulk_gpa,shear_gpa\n";
    for (const auto& r : rows)
      out << r.level << ',' << r.relative_density << ',' << r.bulk << ',' << r.shear << '\n';
  }
  return out.str();
}

}  // namespace gyrox
