#pragma once

#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "gyrox/density_grid.hpp"

namespace gyrox {

/// Row-normalized cone filter rho = W eta over a periodic voxel grid.
///
/// w_ij = max(0, r_min - d_ij), d_ij the minimum-image centroid distance in
/// element-edge units; each element pair appears once even when the radius
/// exceeds half the grid.
class FilterOperator {
 public:
  FilterOperator() = default;
  FilterOperator(Resolution resolution, double r_min);

  double r_min() const { return r_min_; }
  const Resolution& resolution() const { return res_; }
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& weights() const { return w_; }
  std::size_t size() const { return res_.count(); }

  std::vector<double> apply(std::span<const double> eta) const;
  std::vector<double> apply_transpose(std::span<const double> g) const;

 private:
  Resolution res_{};
  double r_min_ = 0.0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> w_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> wt_;
};

inline FilterOperator build_filter(Resolution resolution, double r_min) { return {resolution, r_min}; }

/// rho_H = 1 - exp(-beta rho) + rho exp(-beta), elementwise.
std::vector<double> heaviside_project(std::span<const double> rho, double beta);
double heaviside_project(double rho, double beta);
/// d rho_H / d rho = beta exp(-beta rho) + exp(-beta).
std::vector<double> heaviside_derivative(std::span<const double> rho, double beta);
double heaviside_derivative(double rho, double beta);

}  // namespace gyrox
