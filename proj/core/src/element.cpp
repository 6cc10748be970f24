#include "gyrox/element.hpp"

#include <cmath>

#include "gyrox/errors.hpp"

namespace gyrox {

Matrix6 isotropic_stiffness(double youngs, double nu) {
  const double lambda = youngs * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double mu = youngs / (2.0 * (1.0 + nu));
  Matrix6 c = Matrix6::Zero();
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) c(a, b) = lambda;
    c(a, a) = lambda + 2.0 * mu;
    c(a + 3, a + 3) = mu;
  }
  return c;
}

ElementModel element_stiffness(double nu, std::array<double, 3> element_size) {
  if (!(nu >= 0.0 && nu < 0.5)) throw InvalidArgument("Poisson ratio must lie in [0, 0.5)");
  for (double h : element_size)
    if (!(h > 0.0)) throw InvalidArgument("element size must be positive");

  ElementModel model;
  model.size = element_size;
  const Matrix6 c = isotropic_stiffness(1.0, nu);
  const double g = 1.0 / std::sqrt(3.0);
  const double half[3] = {0.5 * element_size[0], 0.5 * element_size[1], 0.5 * element_size[2]};
  const double det_j = half[0] * half[1] * half[2];

  model.k0.setZero();
  for (int q = 0; q < 8; ++q) {
    const double xi[3] = {(q & 1) ? g : -g, ((q >> 1) & 1) ? g : -g, ((q >> 2) & 1) ? g : -g};
    Eigen::Matrix<double, 6, 24> b = Eigen::Matrix<double, 6, 24>::Zero();
    for (int n = 0; n < kNodesPerElement; ++n) {
      const double s[3] = {(n & 1) ? 1.0 : -1.0, ((n >> 1) & 1) ? 1.0 : -1.0, ((n >> 2) & 1) ? 1.0 : -1.0};
      // dN/dx_a = s_a/8 * prod_{b != a} (1 + s_b xi_b) / half_a
      double dn[3];
      for (int a = 0; a < 3; ++a) {
        double prod = s[a] / 8.0;
        for (int bb = 0; bb < 3; ++bb)
          if (bb != a) prod *= 1.0 + s[bb] * xi[bb];
        dn[a] = prod / half[a];
      }
      const int col = 3 * n;
      b(0, col + 0) = dn[0];
      b(1, col + 1) = dn[1];
      b(2, col + 2) = dn[2];
      b(3, col + 0) = dn[1];  // gamma_12
      b(3, col + 1) = dn[0];
      b(4, col + 1) = dn[2];  // gamma_23
      b(4, col + 2) = dn[1];
      b(5, col + 0) = dn[2];  // gamma_31
      b(5, col + 2) = dn[0];
    }
    model.k0.noalias() += b.transpose() * c * b * det_j;
  }
  model.k0 = 0.5 * (model.k0 + model.k0.transpose());

  for (int a = 0; a < 6; ++a) {
    Eigen::Matrix3d eps = Eigen::Matrix3d::Zero();
    if (a < 3) {
      eps(a, a) = 1.0;
    } else {
      const int i = a == 3 ? 0 : (a == 4 ? 1 : 2);
      const int j = a == 3 ? 1 : (a == 4 ? 2 : 0);
      eps(i, j) = eps(j, i) = 0.5;
    }
    for (int n = 0; n < kNodesPerElement; ++n) {
      const Eigen::Vector3d x{(n & 1) * element_size[0], ((n >> 1) & 1) * element_size[1],
                              ((n >> 2) & 1) * element_size[2]};
      model.u0.block<3, 1>(3 * n, a) = eps * x;
    }
  }
  return model;
}

}  // namespace gyrox
