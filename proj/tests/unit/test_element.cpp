#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "gyrox/element.hpp"

using namespace gyrox;

namespace {

// Lamé form of the isotropic stiffness, built independently of the library.
Matrix6 lame_stiffness(double e, double nu) {
  const double lambda = e * nu / ((1 + nu) * (1 - 2 * nu));
  const double mu = e / (2 * (1 + nu));
  Matrix6 c = Matrix6::Zero();
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) c(a, b) = lambda;
    c(a, a) = lambda + 2 * mu;
    c(a + 3, a + 3) = mu;
  }
  return c;
}

}  // namespace

TEST_CASE("isotropic stiffness matches the Lame form") {
  CHECK((isotropic_stiffness(2.5, 0.3) - lame_stiffness(2.5, 0.3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((isotropic_stiffness(1.0, 0.0) - lame_stiffness(1.0, 0.0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("element stiffness is symmetric with exactly six rigid modes") {
  const ElementModel m = element_stiffness(0.3, {0.25, 0.25, 0.25});
  CHECK((m.k0 - m.k0.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix24> eig(m.k0);
  const auto& ev = eig.eigenvalues();
  const double scale = ev.maxCoeff();
  int zeros = 0;
  for (int i = 0; i < 24; ++i) {
    CHECK(ev(i) > -1e-12 * scale);
    zeros += std::abs(ev(i)) < 1e-10 * scale;
  }
  CHECK(zeros == 6);
}

TEST_CASE("rigid translations and rotations produce no force") {
  const ElementModel m = element_stiffness(0.3, {1.0, 2.0, 0.5});
  for (int c = 0; c < 3; ++c) {
    Eigen::Matrix<double, 24, 1> t = Eigen::Matrix<double, 24, 1>::Zero();
    for (int n = 0; n < 8; ++n) t(3 * n + c) = 1.0;
    CHECK((m.k0 * t).norm() < 1e-10);
  }
  // Infinitesimal rotation about z: u = -y, v = x.
  Eigen::Matrix<double, 24, 1> r = Eigen::Matrix<double, 24, 1>::Zero();
  for (int n = 0; n < 8; ++n) {
    const double x = (n & 1) * 1.0, y = ((n >> 1) & 1) * 2.0;
    r(3 * n) = -y;
    r(3 * n + 1) = x;
  }
  CHECK((m.k0 * r).norm() < 1e-10);
}

TEST_CASE("energy of a uniform strain equals volume times the elastic stiffness") {
  for (auto size : {std::array<double, 3>{1.0, 1.0, 1.0}, std::array<double, 3>{0.0625, 0.125, 0.1}}) {
    const ElementModel m = element_stiffness(0.3, size);
    const Matrix6 energy = m.u0.transpose() * m.k0 * m.u0;
    const Matrix6 expected = m.volume() * lame_stiffness(1.0, 0.3);
    CHECK((energy - expected).cwiseAbs().maxCoeff() < 1e-12 * expected.cwiseAbs().maxCoeff() + 1e-15);
  }
}

TEST_CASE("test-strain displacements are the linear fields of the unit strains") {
  const ElementModel m = element_stiffness(0.3, {0.5, 0.25, 0.125});
  for (int n = 0; n < 8; ++n) {
    const double x = (n & 1) * 0.5, z = ((n >> 2) & 1) * 0.125;
    // eps_11
    CHECK(m.u0(3 * n, 0) == doctest::Approx(x));
    CHECK(m.u0(3 * n + 1, 0) == doctest::Approx(0.0));
    // eps_33
    CHECK(m.u0(3 * n + 2, 2) == doctest::Approx(z));
    // gamma_12 = du/dy + dv/dx = 1
    const Eigen::Vector3d u12 = m.u0.block<3, 1>(3 * n, 3);
    CHECK(u12(2) == doctest::Approx(0.0));
  }
  // Engineering shear: the strain-energy density of gamma_12 = 1 is mu.
  const Matrix6 energy = m.u0.transpose() * m.k0 * m.u0;
  CHECK(energy(3, 3) / m.volume() == doctest::Approx(1.0 / 2.6));
}

TEST_CASE("stiffness scales linearly with a uniform element size") {
  const ElementModel a = element_stiffness(0.3, {0.1, 0.1, 0.1});
  const ElementModel b = element_stiffness(0.3, {0.2, 0.2, 0.2});
  CHECK((b.k0 - 2.0 * a.k0).cwiseAbs().maxCoeff() < 1e-12 * b.k0.cwiseAbs().maxCoeff());
}
