#pragma once

#include <string>
#include <vector>

#include "gyrox/homogenize.hpp"
#include "gyrox/tpms_voxel.hpp"

namespace gyrox {

enum class StudyKind {
  /// Relative density of the voxelization vs isosurface mesh points.
  Mesh,
  /// Bulk and shear objective of the unoptimized Gyroid vs voxel resolution.
  Voxel,
};

StudyKind study_kind_from_string(const std::string& name);

struct StudyOptions {
  TpmsSpec tpms{};
  /// Voxel resolution for the mesh study.
  int mesh_study_resolution = 32;
  MaterialModel material{};
  SolverOptions solver{};
};

struct StudyRow {
  int level = 0;
  double relative_density = 0.0;
  /// Change in relative density from the previous row, in percentage points (0 for the first row).
  double density_change = 0.0;
  /// Voxel study only.
  double bulk = 0.0;
  double shear = 0.0;
};

std::vector<StudyRow> convergence_study(StudyKind kind, const std::vector<int>& levels, const StudyOptions& options = {});

/// Header plus one line per row; columns depend on the study kind.
std::string study_csv(StudyKind kind, const std::vector<StudyRow>& rows);

}  // namespace gyrox
