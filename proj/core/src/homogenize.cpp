#include "gyrox/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include <Eigen/SparseCore>
#ifdef GYROX_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#else
#include <Eigen/SparseCholesky>
#endif

#include "gyrox/errors.hpp"
#include "gyrox/parallel.hpp"

namespace gyrox {

void MaterialModel::validate() const {
  if (!(e0 > 0.0)) throw InvalidArgument("E_0 must be positive");
  if (!(e_min > 0.0 && e_min < e0)) throw InvalidArgument("E_min must lie in (0, E_0)");
  if (!(nu >= 0.0 && nu < 0.5)) throw InvalidArgument("Poisson ratio must lie in [0, 0.5)");
  if (!(penal >= 1.0)) throw InvalidArgument("penalization exponent must be >= 1");
}

double MaterialModel::modulus(double rho) const { return e_min + (e0 - e_min) * std::pow(rho, penal); }

double MaterialModel::modulus_derivative(double rho) const {
  return penal * std::pow(rho, penal - 1.0) * (e0 - e_min);
}

nlohmann::json tensor_to_json(const ElasticityTensor6& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (int a = 0; a < 6; ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (int b = 0; b < 6; ++b) row.push_back(t.entries(a, b));
    rows.push_back(std::move(row));
  }
  return {{"voigt_order", "11,22,33,12,23,31"}, {"entries", std::move(rows)}, {"units", "GPa"}};
}

ElasticityTensor6 tensor_from_json(const nlohmann::json& j) {
  if (j.at("voigt_order").get<std::string>() != "11,22,33,12,23,31")
    throw InvalidArgument("unsupported Voigt order");
  ElasticityTensor6 t;
  const auto& rows = j.at("entries");
  if (rows.size() != 6) throw InvalidArgument("tensor JSON needs 6 rows");
  for (int a = 0; a < 6; ++a) {
    if (rows[a].size() != 6) throw InvalidArgument("tensor JSON needs 6 columns");
    for (int b = 0; b < 6; ++b) t.entries(a, b) = rows[a][b].get<double>();
  }
  return t;
}

std::string to_string(Objective obj) { return obj == Objective::Bulk ? "bulk" : "shear"; }

Objective objective_from_string(const std::string& name) {
  if (name == "bulk" || name == "1") return Objective::Bulk;
  if (name == "shear" || name == "2") return Objective::Shear;
  throw InvalidArgument("unknown objective '" + name + "' (expected bulk or shear)");
}

Objective objective_from_id(int id) {
  if (id == 1) return Objective::Bulk;
  if (id == 2) return Objective::Shear;
  throw InvalidArgument("objective id must be 1 (bulk) or 2 (shear)");
}

Matrix6 objective_weights(Objective obj) {
  Matrix6 w = Matrix6::Zero();
  if (obj == Objective::Bulk)
    w.topLeftCorner<3, 3>().setOnes();
  else
    for (int a = 3; a < 6; ++a) w(a, a) = 1.0;
  return w;
}

double bulk_objective(const ElasticityTensor6& t) { return t.entries.topLeftCorner<3, 3>().sum(); }

double shear_objective(const ElasticityTensor6& t) { return t.entries(3, 3) + t.entries(4, 4) + t.entries(5, 5); }

double objective_value(Objective obj, const ElasticityTensor6& t) {
  return obj == Objective::Bulk ? bulk_objective(t) : shear_objective(t);
}

Matrix24x6 HomogenizationResult::element_displacements(std::size_t e, const ElementModel& elem,
                                                       const PeriodicDofMap& map) const {
  Matrix24x6 u = elem.u0;
  const auto& dofs = map.element_dofs(e);
  for (int a = 0; a < 6; ++a)
    for (int i = 0; i < kDofsPerElement; ++i) u(i, a) -= fluctuations[a][dofs[i]];
  return u;
}

struct Homogenizer::Impl {
  using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
#ifdef GYROX_HAVE_CHOLMOD
  using DirectSolver = Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower>;
#else
  using DirectSolver = Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;
#endif

  CellLengths lengths;
  MaterialModel material;
  SolverOptions options;
  ElementModel elem;
  PeriodicDofMap map;
  Matrix24x6 f0;  // k0 * u0
  std::array<double, 6> force_scale{};

  // Cholesky state: lower-triangle pattern and, per element, the value slot of
  // each local (row, col) pair (-1 where the pair maps to the upper triangle).
  SparseMatrix k;
  std::vector<std::array<std::int32_t, 576>> slots;
  std::unique_ptr<DirectSolver> direct;
  bool analyzed = false;
  bool factor_current = false;  // factor matches the last assembled K
  bool have_factor = false;
  std::array<Eigen::VectorXd, 6> warm;  // previous reduced solutions

  Impl(Resolution res, CellLengths l, MaterialModel m, SolverOptions o)
      : lengths(l),
        material(m),
        options(o),
        elem(element_stiffness(m.nu, {l.x / res.x, l.y / res.y, l.z / res.z})),
        map(res) {
    material.validate();
    f0 = elem.k0 * elem.u0;
    const double sqrt_n = std::sqrt(static_cast<double>(res.count()));
    for (int a = 0; a < 6; ++a) force_scale[a] = material.e0 * sqrt_n * f0.col(a).norm();
    if (options.threads <= 0) options.threads = default_threads();
    if (options.kind == SolverKind::Cholesky) build_pattern();
  }

  std::size_t n_elements() const { return map.resolution().count(); }

  void build_pattern() {
    const auto n = static_cast<Eigen::Index>(map.n_reduced());
    std::vector<Eigen::Triplet<double, int>> trip;
    trip.reserve(n_elements() * 300);
    for (std::size_t e = 0; e < n_elements(); ++e) {
      const auto& dofs = map.element_dofs(e);
      for (int a = 0; a < 24; ++a)
        for (int b = 0; b < 24; ++b) {
          const auto ra = map.reduced(dofs[a]), rb = map.reduced(dofs[b]);
          if (ra >= 0 && rb >= 0 && ra >= rb) trip.emplace_back(static_cast<int>(ra), static_cast<int>(rb), 0.0);
        }
    }
    k.resize(n, n);
    k.setFromTriplets(trip.begin(), trip.end());
    k.makeCompressed();
    trip.clear();
    trip.shrink_to_fit();

    slots.resize(n_elements());
    const int* outer = k.outerIndexPtr();
    const int* inner = k.innerIndexPtr();
    for (std::size_t e = 0; e < n_elements(); ++e) {
      const auto& dofs = map.element_dofs(e);
      for (int a = 0; a < 24; ++a)
        for (int b = 0; b < 24; ++b) {
          const auto ra = map.reduced(dofs[a]), rb = map.reduced(dofs[b]);
          std::int32_t slot = -1;
          if (ra >= 0 && rb >= 0 && ra >= rb) {
            const int* first = inner + outer[rb];
            const int* last = inner + outer[rb + 1];
            slot = static_cast<std::int32_t>(std::lower_bound(first, last, static_cast<int>(ra)) - inner);
          }
          slots[e][24 * a + b] = slot;
        }
    }
    direct = std::make_unique<DirectSolver>();
  }

  std::vector<double> moduli(std::span<const double> rho) const {
    if (rho.size() != n_elements())
      throw ShapeMismatch("density count " + std::to_string(rho.size()) + " does not match grid " +
                          to_string(map.resolution()));
    std::vector<double> out(rho.size());
    for (std::size_t e = 0; e < rho.size(); ++e) {
      if (!(rho[e] >= 0.0 && rho[e] <= 1.0)) throw InvalidArgument("density outside [0,1]");
      out[e] = material.modulus(rho[e]);
    }
    return out;
  }

  // Global force vector of test strain a (unreduced numbering).
  Eigen::VectorXd load_vector(const std::vector<double>& emod, int a) const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(map.n_free()));
    for (std::size_t e = 0; e < n_elements(); ++e) {
      const auto& dofs = map.element_dofs(e);
      for (int i = 0; i < 24; ++i) f[dofs[i]] += emod[e] * f0(i, a);
    }
    return f;
  }

  // y = K x on global DOFs with the pinned master held at zero.
  void apply(const std::vector<double>& emod, const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    y.setZero(x.size());
    Eigen::Matrix<double, 24, 1> xe;
    for (std::size_t e = 0; e < n_elements(); ++e) {
      const auto& dofs = map.element_dofs(e);
      for (int i = 0; i < 24; ++i) xe[i] = x[dofs[i]];
      const Eigen::Matrix<double, 24, 1> ye = emod[e] * (elem.k0 * xe);
      for (int i = 0; i < 24; ++i) y[dofs[i]] += ye[i];
    }
    y.head<3>().setZero();
  }

  double residual_denominator(double f_norm, int a) const { return std::max(f_norm, 1e-12 * force_scale[a]); }

  void assemble(const std::vector<double>& emod) {
    std::fill(k.valuePtr(), k.valuePtr() + k.nonZeros(), 0.0);
    double* val = k.valuePtr();
    for (std::size_t e = 0; e < n_elements(); ++e) {
      const auto& s = slots[e];
      const double* ke = elem.k0.data();  // column-major: ke[24*b + a] = k0(a, b)
      for (int a = 0; a < 24; ++a)
        for (int b = 0; b < 24; ++b) {
          const auto slot = s[24 * a + b];
          if (slot >= 0) val[slot] += emod[e] * ke[24 * b + a];
        }
    }
    factor_current = false;
  }

  void factorize() {
    if (!analyzed) {
      direct->analyzePattern(k);
      analyzed = true;
    }
    direct->factorize(k);
    if (direct->info() != Eigen::Success) throw SolverDiverged("sparse Cholesky factorization failed");
    factor_current = true;
    have_factor = true;
  }

  // Direct solve with up to three steps of iterative refinement.
  double solve_factored(const Eigen::VectorXd& rhs, double denom, Eigen::VectorXd& x) {
    x = direct->solve(rhs);
    Eigen::VectorXd r = rhs - k.selfadjointView<Eigen::Lower>() * x;
    double rel = r.norm() / denom;
    for (int refinements = 0; rel > options.rel_tol && refinements < 3; ++refinements) {
      x += direct->solve(r);
      r = rhs - k.selfadjointView<Eigen::Lower>() * x;
      rel = r.norm() / denom;
    }
    return rel;
  }

  // CG on the current K preconditioned by the (possibly stale) factor. Returns
  // false when it does not converge within `cap` iterations.
  bool solve_preconditioned(const Eigen::VectorXd& rhs, double denom, std::size_t cap, Eigen::VectorXd& x,
                            double& rel, std::size_t& iterations) {
    Eigen::VectorXd r = rhs - k.selfadjointView<Eigen::Lower>() * x;
    rel = r.norm() / denom;
    iterations = 0;
    if (rel <= options.rel_tol) return true;
    Eigen::VectorXd z = direct->solve(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    for (std::size_t it = 1; it <= cap; ++it) {
      const Eigen::VectorXd q = k.selfadjointView<Eigen::Lower>() * p;
      const double alpha = rz / p.dot(q);
      x += alpha * p;
      r -= alpha * q;
      rel = r.norm() / denom;
      iterations = it;
      if (rel <= options.rel_tol) return true;
      z = direct->solve(r);
      const double rz_next = r.dot(z);
      p = z + (rz_next / rz) * p;
      rz = rz_next;
    }
    return false;
  }

  std::array<LoadCaseSolution, 6> solve_direct(const std::vector<double>& emod, const std::vector<int>& cases) {
    assemble(emod);
    const bool reuse = options.reuse_factorization && have_factor;
    if (!reuse) factorize();

    const auto n = static_cast<Eigen::Index>(map.n_reduced());
    std::array<LoadCaseSolution, 6> out;
    bool refactor_next = false;
    for (int a : cases) {
      const Eigen::VectorXd f = load_vector(emod, a).tail(n);
      const double denom = residual_denominator(f.norm(), a);
      auto& sol = out[static_cast<std::size_t>(a)];
      Eigen::VectorXd x;
      double rel = 0.0;
      bool done = false;
      if (!factor_current && warm[a].size() == n) {
        x = warm[a];
        std::size_t its = 0;
        done = solve_preconditioned(f, denom, 4 * options.refactor_after, x, rel, its);
        sol.iterations = its;
        if (its > options.refactor_after) refactor_next = true;
      }
      if (!done) {
        if (!factor_current) factorize();
        rel = solve_factored(f, denom, x);
      }
      if (!(rel <= options.rel_tol))
        throw SolverDiverged("Cholesky solve residual " + std::to_string(rel) + " above tolerance");
      if (options.reuse_factorization) warm[a] = x;
      sol.fluctuation = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(map.n_free()));
      sol.fluctuation.tail(n) = x;
      sol.relative_residual = rel;
    }
    // A slow preconditioner triggers a fresh factor on the next call.
    if (refactor_next) have_factor = false;
    return out;
  }

  LoadCaseSolution solve_pcg(const std::vector<double>& emod, int a) const {
    const auto nf = static_cast<Eigen::Index>(map.n_free());
    Eigen::VectorXd f = load_vector(emod, a);
    f.head<3>().setZero();
    const double denom = residual_denominator(f.norm(), a);

    Eigen::VectorXd diag = Eigen::VectorXd::Zero(nf);
    for (std::size_t e = 0; e < n_elements(); ++e) {
      const auto& dofs = map.element_dofs(e);
      for (int i = 0; i < 24; ++i) diag[dofs[i]] += emod[e] * elem.k0(i, i);
    }
    diag.head<3>().setOnes();
    const Eigen::VectorXd inv_diag = diag.cwiseInverse();

    LoadCaseSolution sol;
    sol.fluctuation = Eigen::VectorXd::Zero(nf);
    Eigen::VectorXd r = f;
    double rel = r.norm() / denom;
    if (rel <= options.rel_tol) {
      sol.relative_residual = rel;
      return sol;
    }
    Eigen::VectorXd z = inv_diag.cwiseProduct(r);
    Eigen::VectorXd p = z;
    Eigen::VectorXd q(nf);
    double rz = r.dot(z);
    const std::size_t cap = options.max_iterations ? options.max_iterations : 10 * map.n_free();
    for (std::size_t it = 1; it <= cap; ++it) {
      apply(emod, p, q);
      const double alpha = rz / p.dot(q);
      sol.fluctuation += alpha * p;
      r -= alpha * q;
      rel = r.norm() / denom;
      if (rel <= options.rel_tol) {
        sol.relative_residual = rel;
        sol.iterations = it;
        return sol;
      }
      z = inv_diag.cwiseProduct(r);
      const double rz_next = r.dot(z);
      p = z + (rz_next / rz) * p;
      rz = rz_next;
    }
    throw SolverDiverged("PCG did not reach relative residual " + std::to_string(options.rel_tol) + " in " +
                         std::to_string(cap) + " iterations (last " + std::to_string(rel) + ")");
  }

  std::array<LoadCaseSolution, 6> solve_cases(const std::vector<double>& emod, const std::vector<int>& cases) {
    if (map.n_reduced() == 0) {
      std::array<LoadCaseSolution, 6> out;
      for (int a : cases) out[static_cast<std::size_t>(a)].fluctuation = Eigen::VectorXd::Zero(3);
      return out;
    }
    if (options.kind == SolverKind::Cholesky) return solve_direct(emod, cases);
    std::array<LoadCaseSolution, 6> out;
    parallel_chunks(cases.size(), options.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t c = begin; c < end; ++c) out[static_cast<std::size_t>(cases[c])] = solve_pcg(emod, cases[c]);
    });
    return out;
  }

  HomogenizationResult run(std::span<const double> rho) {
    const std::vector<double> emod = moduli(rho);
    auto solutions = solve_cases(emod, {0, 1, 2, 3, 4, 5});

    HomogenizationResult res;
    res.cell_volume = lengths.volume();
    for (int a = 0; a < 6; ++a) {
      res.fluctuations[a] = std::move(solutions[a].fluctuation);
      res.max_relative_residual = std::max(res.max_relative_residual, solutions[a].relative_residual);
    }
    res.element_energies.resize(n_elements());
    parallel_chunks(n_elements(), options.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t e = begin; e < end; ++e) {
        const Matrix24x6 u = res.element_displacements(e, elem, map);
        Matrix6 q = u.transpose() * elem.k0 * u;
        res.element_energies[e] = 0.5 * (q + q.transpose());
      }
    });
    Matrix6 sum = Matrix6::Zero();
    for (std::size_t e = 0; e < n_elements(); ++e) sum += emod[e] * res.element_energies[e];
    res.tensor.entries = sum / res.cell_volume;
    return res;
  }
};

Homogenizer::Homogenizer(Resolution resolution, CellLengths lengths, MaterialModel material, SolverOptions options)
    : impl_(std::make_unique<Impl>(resolution, lengths, material, options)) {}
Homogenizer::~Homogenizer() = default;
Homogenizer::Homogenizer(Homogenizer&&) noexcept = default;
Homogenizer& Homogenizer::operator=(Homogenizer&&) noexcept = default;

const ElementModel& Homogenizer::element() const { return impl_->elem; }
const PeriodicDofMap& Homogenizer::dof_map() const { return impl_->map; }
const MaterialModel& Homogenizer::material() const { return impl_->material; }
double Homogenizer::cell_volume() const { return impl_->lengths.volume(); }

HomogenizationResult Homogenizer::run(std::span<const double> densities) { return impl_->run(densities); }

LoadCaseSolution Homogenizer::solve_load_case(std::span<const double> densities, int test_case) {
  if (test_case < 0 || test_case > 5) throw InvalidArgument("test strain index must be 0..5");
  const std::vector<double> emod = impl_->moduli(densities);
  auto sols = impl_->solve_cases(emod, {test_case});
  return std::move(sols[static_cast<std::size_t>(test_case)]);
}

LoadCaseSolution solve_load_case(const DensityGrid& grid, const MaterialModel& mat, int test_case,
                                 const SolverOptions& options) {
  Homogenizer h(grid.resolution(), grid.cell_lengths(), mat, options);
  return h.solve_load_case(grid.values(), test_case);
}

HomogenizationResult homogenized_tensor(const DensityGrid& grid, const MaterialModel& mat,
                                        const SolverOptions& options) {
  Homogenizer h(grid.resolution(), grid.cell_lengths(), mat, options);
  return h.run(grid);
}

}  // namespace gyrox
