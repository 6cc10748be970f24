#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gyrox/density_grid.hpp"

namespace gyrox {

/// Node-to-DOF numbering of a fully periodic voxel mesh.
///
/// The (ex+1)(ey+1)(ez+1) mesh nodes collapse onto ex*ey*ez master nodes: node
/// (i, j, k) is the image of master (i mod ex, j mod ey, k mod ez). Opposite
/// faces, edges and corners are identified through the same rule. The master
/// at the origin is pinned to remove the three rigid translations, so reduced
/// equation numbers skip its DOFs.
class PeriodicDofMap {
 public:
  explicit PeriodicDofMap(Resolution resolution);

  const Resolution& resolution() const { return res_; }
  std::size_t node_count() const;  ///< all mesh nodes, (ex+1)(ey+1)(ez+1)
  std::size_t master_count() const { return res_.count(); }
  /// 3 * master_count(); DOFs of one periodic image class each.
  std::size_t n_free() const { return 3 * master_count(); }
  /// Equations left after pinning the origin master.
  std::size_t n_reduced() const { return n_free() - 3; }

  /// Master of mesh node (i, j, k), 0 <= i <= ex etc.
  std::uint32_t master_of(int i, int j, int k) const;
  /// Master of mesh node given by its flat index i + (ex+1)(j + (ey+1)k).
  std::uint32_t master_of_node(std::size_t node) const;

  /// Global (unreduced) DOFs of element e, local order per element.hpp.
  const std::array<std::uint32_t, 24>& element_dofs(std::size_t e) const { return edofs_[e]; }
  /// Reduced equation number of a global DOF, or -1 when pinned.
  std::int64_t reduced(std::uint32_t dof) const { return dof < 3 ? -1 : static_cast<std::int64_t>(dof) - 3; }

 private:
  Resolution res_;
  std::vector<std::array<std::uint32_t, 24>> edofs_;
};

}  // namespace gyrox
