#pragma once

#include <array>

#include <Eigen/Core>

namespace gyrox {

using Matrix24 = Eigen::Matrix<double, 24, 24>;
using Matrix24x6 = Eigen::Matrix<double, 24, 6>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// Local node n of a hex element sits at corner offset (n&1, (n>>1)&1, (n>>2)&1);
/// element DOFs are ordered node-major, (u, v, w) per node.
inline constexpr int kNodesPerElement = 8;
inline constexpr int kDofsPerElement = 24;

/// Isotropic stiffness in Voigt order (11, 22, 33, 12, 23, 31), engineering shear.
Matrix6 isotropic_stiffness(double youngs, double nu);

/// Unit-modulus trilinear hexahedron and the nodal displacements of the six unit test strains.
struct ElementModel {
  Matrix24 k0;
  Matrix24x6 u0;
  std::array<double, 3> size{};

  double volume() const { return size[0] * size[1] * size[2]; }
};

/// 2x2x2 Gauss integration of B^T C B over an hx*hy*hz brick with E = 1.
/// Column a of u0 holds x -> eps_a . x at the eight nodes (unit normal strains,
/// unit engineering shear strains).
ElementModel element_stiffness(double nu, std::array<double, 3> element_size);

}  // namespace gyrox
