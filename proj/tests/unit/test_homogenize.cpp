#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "gyrox/errors.hpp"
#include "gyrox/homogenize.hpp"

using namespace gyrox;

namespace {

Matrix6 lame(double e, double nu) {
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

DensityGrid random_grid(Resolution r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DensityGrid g(r, {}, 0.0);
  for (double& v : g.values()) v = u(rng);
  return g;
}

double rel_diff(const Matrix6& a, const Matrix6& b) { return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff(); }

double min_eigenvalue(const Matrix6& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix6>(0.5 * (m + m.transpose())).eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("objective weights") {
  ElasticityTensor6 t;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) t.entries(a, b) = 10 * a + b;
  CHECK(bulk_objective(t) == doctest::Approx(0 + 1 + 2 + 10 + 11 + 12 + 20 + 21 + 22));
  CHECK(shear_objective(t) == doctest::Approx(33 + 44 + 55));
  CHECK(objective_value(Objective::Bulk, t) == bulk_objective(t));
  CHECK(objective_value(Objective::Shear, t) == shear_objective(t));
  CHECK((objective_weights(Objective::Bulk).cwiseProduct(t.entries)).sum() == bulk_objective(t));
  CHECK(objective_from_string("shear") == Objective::Shear);
  CHECK(objective_from_id(1) == Objective::Bulk);
  CHECK_THROWS_AS(objective_from_id(3), InvalidArgument);
  CHECK_THROWS_AS(objective_from_string("volume"), InvalidArgument);
}

TEST_CASE("SIMP interpolation") {
  MaterialModel m;
  CHECK(m.modulus(0.0) == 1e-9);
  CHECK(m.modulus(1.0) == doctest::Approx(1.0));
  CHECK(m.modulus(0.5) == doctest::Approx(1e-9 + (1 - 1e-9) / 32.0));
  const double h = 1e-6;
  CHECK(m.modulus_derivative(0.7) == doctest::Approx((m.modulus(0.7 + h) - m.modulus(0.7 - h)) / (2 * h)).epsilon(1e-6));
  m.nu = 0.5;
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
}

TEST_CASE("tensor JSON round trip") {
  ElasticityTensor6 t;
  t.entries = lame(1.0, 0.3);
  const auto j = tensor_to_json(t);
  CHECK(j["voigt_order"] == "11,22,33,12,23,31");
  CHECK(j["units"] == "GPa");
  CHECK(tensor_from_json(j).entries == t.entries);
  auto bad = j;
  bad["voigt_order"] = "11,22,33,23,31,12";
  CHECK_THROWS_AS(tensor_from_json(bad), InvalidArgument);
}

TEST_CASE("solid cell reproduces the base material") {
  for (SolverKind kind : {SolverKind::Cholesky, SolverKind::Pcg}) {
    const auto res = homogenized_tensor(DensityGrid(Resolution::cube(4), {}, 1.0), MaterialModel{}, {.kind = kind});
    CHECK(rel_diff(res.tensor.entries, lame(1.0, 0.3)) < 1e-8);
    CHECK(bulk_objective(res.tensor) == doctest::Approx(7.5).epsilon(1e-8));
    CHECK(shear_objective(res.tensor) == doctest::Approx(3.0 / 2.6).epsilon(1e-8));
  }
}

TEST_CASE("layered cell matches the exact laminate stiffness") {
  // Layers normal to x; fluctuations are piecewise linear so hex8 is exact.
  MaterialModel mat;
  const Resolution r{4, 2, 2};
  DensityGrid g(r, {}, 1.0);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j) {
      g.at(1, j, k) = 0.5;
      g.at(3, j, k) = 0.5;
    }
  const Matrix6 c1 = lame(mat.modulus(1.0), mat.nu), c2 = lame(mat.modulus(0.5), mat.nu);
  auto mean = [](double a, double b) { return 0.5 * (a + b); };
  const double inv11 = mean(1 / c1(0, 0), 1 / c2(0, 0));
  const double r12 = mean(c1(0, 1) / c1(0, 0), c2(0, 1) / c2(0, 0));
  Matrix6 expected = Matrix6::Zero();
  expected(0, 0) = 1 / inv11;
  for (int b = 1; b < 3; ++b) expected(0, b) = expected(b, 0) = r12 / inv11;
  for (int a = 1; a < 3; ++a)
    for (int b = 1; b < 3; ++b)
      expected(a, b) = mean(c1(a, b) - c1(a, 0) * c1(0, b) / c1(0, 0), c2(a, b) - c2(a, 0) * c2(0, b) / c2(0, 0)) +
                       r12 * r12 / inv11;
  expected(3, 3) = expected(5, 5) = 1 / mean(1 / c1(3, 3), 1 / c2(3, 3));
  expected(4, 4) = mean(c1(4, 4), c2(4, 4));

  for (SolverKind kind : {SolverKind::Cholesky, SolverKind::Pcg}) {
    const auto res = homogenized_tensor(g, mat, {.kind = kind, .rel_tol = 1e-10});
    CHECK(rel_diff(res.tensor.entries, expected) < 1e-6);
  }
}

TEST_CASE("tensor is symmetric, positive definite and between the Reuss and Voigt bounds") {
  MaterialModel mat;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const DensityGrid g = random_grid(Resolution::cube(4), seed);
    const auto res = homogenized_tensor(g, mat);
    CHECK(res.tensor.asymmetry() <= 1e-6 * res.tensor.max_abs());
    CHECK(min_eigenvalue(res.tensor.entries) > 0.0);

    Matrix6 voigt = Matrix6::Zero(), compliance = Matrix6::Zero();
    for (double rho : g.values()) {
      const Matrix6 c = lame(mat.modulus(rho), mat.nu);
      voigt += c;
      compliance += c.inverse();
    }
    voigt /= static_cast<double>(g.size());
    const Matrix6 reuss = (compliance / static_cast<double>(g.size())).inverse();
    const double tol = 1e-9 * voigt.cwiseAbs().maxCoeff();
    CHECK(min_eigenvalue(voigt - res.tensor.entries) > -tol);
    CHECK(min_eigenvalue(res.tensor.entries - reuss) > -tol);
  }
}

TEST_CASE("tensor equals the modulus-weighted sum of element energies") {
  MaterialModel mat;
  const DensityGrid g = random_grid({3, 4, 2}, 11);
  const auto res = homogenized_tensor(g, mat);
  Matrix6 sum = Matrix6::Zero();
  for (std::size_t e = 0; e < g.size(); ++e) sum += mat.modulus(g[e]) * res.element_energies[e];
  CHECK(rel_diff(sum / res.cell_volume, res.tensor.entries) < 1e-12);
}

TEST_CASE("scaling, translation and axis permutation") {
  MaterialModel mat;
  const DensityGrid g = random_grid(Resolution::cube(4), 7);
  const Matrix6 base = homogenized_tensor(g, mat).tensor.entries;

  SUBCASE("moduli scale linearly") {
    MaterialModel doubled = mat;
    doubled.e0 = 2.0;
    doubled.e_min = 2e-9;
    CHECK(rel_diff(homogenized_tensor(g, doubled).tensor.entries, 2.0 * base) < 1e-8);
  }
  SUBCASE("uniform cell size does not matter") {
    DensityGrid big(g.resolution(), {3.0, 3.0, 3.0}, std::vector<double>(g.values().begin(), g.values().end()));
    CHECK(rel_diff(homogenized_tensor(big, mat).tensor.entries, base) < 1e-8);
  }
  SUBCASE("periodic translation leaves the tensor unchanged") {
    DensityGrid shifted = g;
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) shifted.at((i + 1) % 4, (j + 3) % 4, (k + 2) % 4) = g.at(i, j, k);
    CHECK(rel_diff(homogenized_tensor(shifted, mat).tensor.entries, base) < 1e-8);
  }
  SUBCASE("cyclic axis permutation permutes Voigt indices") {
    // G'(a, b, c) = G(b, c, a): old axis 1 -> new 2, 2 -> 3, 3 -> 1.
    DensityGrid rotated = g;
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) rotated.at(i, j, k) = g.at(j, k, i);
    const Matrix6 rot = homogenized_tensor(rotated, mat).tensor.entries;
    const int perm[6] = {1, 2, 0, 4, 5, 3};
    Matrix6 expected;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) expected(perm[a], perm[b]) = base(a, b);
    CHECK(rel_diff(rot, expected) < 1e-8);
  }
}

TEST_CASE("direct and iterative solvers agree") {
  const DensityGrid g = random_grid(Resolution::cube(6), 3);
  const auto chol = homogenized_tensor(g, MaterialModel{}, {.kind = SolverKind::Cholesky});
  const auto pcg = homogenized_tensor(g, MaterialModel{}, {.kind = SolverKind::Pcg, .rel_tol = 1e-10});
  CHECK(rel_diff(pcg.tensor.entries, chol.tensor.entries) < 1e-6);
  CHECK(pcg.max_relative_residual <= 1e-10);
  CHECK(chol.max_relative_residual <= 1e-8);
}

TEST_CASE("factor reuse tracks a changing design") {
  Homogenizer reuse(Resolution::cube(4), {}, MaterialModel{}, {.reuse_factorization = true});
  Homogenizer fresh(Resolution::cube(4), {}, MaterialModel{});
  DensityGrid g = random_grid(Resolution::cube(4), 5);
  for (int step = 0; step < 4; ++step) {
    const auto a = reuse.run(g);
    const auto b = fresh.run(g);
    CHECK(rel_diff(a.tensor.entries, b.tensor.entries) < 1e-6);
    for (double& v : g.values()) v = 0.9 * v + 0.05;
  }
}

TEST_CASE("results do not depend on the thread count") {
  const DensityGrid g = random_grid(Resolution::cube(4), 9);
  for (SolverKind kind : {SolverKind::Cholesky, SolverKind::Pcg}) {
    const auto one = homogenized_tensor(g, MaterialModel{}, {.kind = kind, .threads = 1});
    const auto four = homogenized_tensor(g, MaterialModel{}, {.kind = kind, .threads = 4});
    CHECK(one.tensor.entries == four.tensor.entries);
  }
}

TEST_CASE("input validation and solver failure") {
  Homogenizer h(Resolution::cube(2), {}, MaterialModel{});
  CHECK_THROWS_AS(h.run(std::vector<double>(7, 0.5)), ShapeMismatch);
  CHECK_THROWS_AS(h.run(std::vector<double>(8, 1.2)), InvalidArgument);
  CHECK_THROWS_AS(h.solve_load_case(std::vector<double>(8, 0.5), 6), InvalidArgument);

  const DensityGrid g = random_grid(Resolution::cube(4), 2);
  CHECK_THROWS_AS(solve_load_case(g, MaterialModel{}, 0, {.kind = SolverKind::Pcg, .max_iterations = 2}),
                  SolverDiverged);
}
