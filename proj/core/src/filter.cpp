#include "gyrox/filter.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gyrox/errors.hpp"

namespace gyrox {
namespace {

int wrap(int i, int n) {
  const int m = i % n;
  return m < 0 ? m + n : m;
}

// Minimum-image separation along one periodic axis.
int periodic_gap(int di, int n) {
  const int m = wrap(di, n);
  return std::min(m, n - m);
}

Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

FilterOperator::FilterOperator(Resolution resolution, double r_min) : res_(resolution), r_min_(r_min) {
  if (res_.x < 1 || res_.y < 1 || res_.z < 1) throw InvalidArgument("filter resolution must be positive");
  if (!(r_min >= 0.0) || !std::isfinite(r_min)) throw InvalidArgument("filter radius must be >= 0");

  const int reach = static_cast<int>(std::ceil(r_min));
  const auto n = static_cast<Eigen::Index>(res_.count());
  std::vector<Eigen::Triplet<double>> trip;
  std::map<int, double> row;
  for (int k = 0; k < res_.z; ++k)
    for (int j = 0; j < res_.y; ++j)
      for (int i = 0; i < res_.x; ++i) {
        row.clear();
        for (int dk = -reach; dk <= reach; ++dk)
          for (int dj = -reach; dj <= reach; ++dj)
            for (int di = -reach; di <= reach; ++di) {
              const int gx = periodic_gap(di, res_.x), gy = periodic_gap(dj, res_.y), gz = periodic_gap(dk, res_.z);
              const double w = r_min - std::sqrt(static_cast<double>(gx * gx + gy * gy + gz * gz));
              if (w <= 0.0) continue;
              const int col = wrap(i + di, res_.x) + res_.x * (wrap(j + dj, res_.y) + res_.y * wrap(k + dk, res_.z));
              row[col] = w;  // identical w for every offset that wraps onto col
            }
        const int r = i + res_.x * (j + res_.y * k);
        if (row.empty()) {
          // r_min == 0: keep the identity so the operator stays row-stochastic
          trip.emplace_back(r, r, 1.0);
          continue;
        }
        double total = 0.0;
        for (const auto& [col, w] : row) total += w;
        for (const auto& [col, w] : row) trip.emplace_back(r, col, w / total);
      }
  w_.resize(n, n);
  w_.setFromTriplets(trip.begin(), trip.end());
  w_.makeCompressed();
  wt_ = w_.transpose();
  wt_.makeCompressed();
}

std::vector<double> FilterOperator::apply(std::span<const double> eta) const {
  if (eta.size() != size()) throw ShapeMismatch("filter input size mismatch");
  const Eigen::VectorXd out = w_ * to_eigen(eta);
  return {out.data(), out.data() + out.size()};
}

std::vector<double> FilterOperator::apply_transpose(std::span<const double> g) const {
  if (g.size() != size()) throw ShapeMismatch("filter input size mismatch");
  const Eigen::VectorXd out = wt_ * to_eigen(g);
  return {out.data(), out.data() + out.size()};
}

double heaviside_project(double rho, double beta) {
  return 1.0 - std::exp(-beta * rho) + rho * std::exp(-beta);
}

double heaviside_derivative(double rho, double beta) { return beta * std::exp(-beta * rho) + std::exp(-beta); }

std::vector<double> heaviside_project(std::span<const double> rho, double beta) {
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be >= 0");
  std::vector<double> out(rho.size());
  for (std::size_t e = 0; e < rho.size(); ++e) out[e] = std::clamp(heaviside_project(rho[e], beta), 0.0, 1.0);
  return out;
}

std::vector<double> heaviside_derivative(std::span<const double> rho, double beta) {
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be >= 0");
  std::vector<double> out(rho.size());
  for (std::size_t e = 0; e < rho.size(); ++e) out[e] = heaviside_derivative(rho[e], beta);
  return out;
}

}  // namespace gyrox
