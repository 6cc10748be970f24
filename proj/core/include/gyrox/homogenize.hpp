#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "gyrox/density_grid.hpp"
#include "gyrox/element.hpp"
#include "gyrox/periodic_dofs.hpp"

namespace gyrox {

/// SIMP material: E(rho) = E_min + (E_0 - E_min) rho^p. Moduli in GPa.
struct MaterialModel {
  double e0 = 1.0;
  double e_min = 1e-9;
  double nu = 0.3;
  double penal = 5.0;

  void validate() const;
  double modulus(double rho) const;
  /// dE/drho = p rho^(p-1) (E_0 - E_min)
  double modulus_derivative(double rho) const;
};

/// Homogenized stiffness, Voigt order (11, 22, 33, 12, 23, 31), GPa.
struct ElasticityTensor6 {
  Matrix6 entries = Matrix6::Zero();

  double max_abs() const { return entries.cwiseAbs().maxCoeff(); }
  /// max |E_ab - E_ba|
  double asymmetry() const { return (entries - entries.transpose()).cwiseAbs().maxCoeff(); }
};

/// {"voigt_order":"11,22,33,12,23,31","entries":[[...]],"units":"GPa"}
nlohmann::json tensor_to_json(const ElasticityTensor6& t);
ElasticityTensor6 tensor_from_json(const nlohmann::json& j);

enum class Objective { Bulk = 1, Shear = 2 };

std::string to_string(Objective obj);
Objective objective_from_string(const std::string& name);
Objective objective_from_id(int id);

/// Sum of the upper-left 3x3 (normal-normal) block.
double bulk_objective(const ElasticityTensor6& t);
/// E_1212 + E_2323 + E_3131.
double shear_objective(const ElasticityTensor6& t);
/// f(E) = sum_ab W_ab E_ab for the chosen objective.
Matrix6 objective_weights(Objective obj);
double objective_value(Objective obj, const ElasticityTensor6& t);

enum class SolverKind {
  /// Sparse Cholesky of the assembled reduced operator (CHOLMOD when available).
  Cholesky,
  /// Matrix-free conjugate gradients with a Jacobi preconditioner.
  Pcg,
};

struct SolverOptions {
  SolverKind kind = SolverKind::Cholesky;
  double rel_tol = 1e-8;
  /// 0 selects 10 * n_free.
  std::size_t max_iterations = 0;
  /// 0 reads GYROX_THREADS (default 1).
  int threads = 0;
  /// Cholesky only: keep the last factorization across runs and use it to
  /// precondition warm-started CG; refactor when CG needs more than
  /// `refactor_after` iterations. Suited to slowly changing designs.
  bool reuse_factorization = false;
  std::size_t refactor_after = 12;
};

/// Fluctuation field of one load case on the global periodic DOFs (3 per master node).
struct LoadCaseSolution {
  Eigen::VectorXd fluctuation;
  double relative_residual = 0.0;
  std::size_t iterations = 0;
};

struct HomogenizationResult {
  ElasticityTensor6 tensor;
  /// chi^(a) per test strain; the element displacement of case a is u0[:,a] - chi^(a)_e.
  std::array<Eigen::VectorXd, 6> fluctuations;
  double cell_volume = 0.0;
  /// Unit-modulus mutual energies Q_e = (u_e^A)^T k0 (u_e^A), one 6x6 per element.
  std::vector<Matrix6> element_energies;
  double max_relative_residual = 0.0;

  /// u_e^A for all six cases (24 x 6).
  Matrix24x6 element_displacements(std::size_t e, const ElementModel& elem, const PeriodicDofMap& map) const;
};

/// Reusable homogenization engine for one grid shape: caches the element model,
/// periodic numbering, sparse pattern and symbolic factorization.
class Homogenizer {
 public:
  Homogenizer(Resolution resolution, CellLengths lengths, MaterialModel material, SolverOptions options = {});
  ~Homogenizer();
  Homogenizer(Homogenizer&&) noexcept;
  Homogenizer& operator=(Homogenizer&&) noexcept;

  const ElementModel& element() const;
  const PeriodicDofMap& dof_map() const;
  const MaterialModel& material() const;
  double cell_volume() const;

  /// Homogenized tensor of per-element densities (x-fastest, each in [0,1]).
  HomogenizationResult run(std::span<const double> densities);
  HomogenizationResult run(const DensityGrid& grid) { return run(grid.values()); }

  /// Solves K chi = sum_e E_e k0 u0[:,test_case] for one test strain (0-based Voigt index).
  LoadCaseSolution solve_load_case(std::span<const double> densities, int test_case);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrappers.
LoadCaseSolution solve_load_case(const DensityGrid& grid, const MaterialModel& mat, int test_case,
                                 const SolverOptions& options = {});
HomogenizationResult homogenized_tensor(const DensityGrid& grid, const MaterialModel& mat,
                                        const SolverOptions& options = {});

}  // namespace gyrox
