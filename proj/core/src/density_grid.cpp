#include "gyrox/density_grid.hpp"

#include <numeric>

#include "gyrox/errors.hpp"

namespace gyrox {

std::string to_string(const Resolution& r) {
  return std::to_string(r.x) + "x" + std::to_string(r.y) + "x" + std::to_string(r.z);
}

namespace {
void check_shape(const Resolution& res, const CellLengths& lengths) {
  if (res.x < 1 || res.y < 1 || res.z < 1)
    throw InvalidArgument("grid resolution must be positive, got " + to_string(res));
  if (!(lengths.x > 0.0 && lengths.y > 0.0 && lengths.z > 0.0))
    throw InvalidArgument("cell lengths must be positive");
}
}  // namespace

DensityGrid::DensityGrid(Resolution res, CellLengths lengths, double fill)
    : res_(res), lengths_(lengths) {
  check_shape(res, lengths);
  if (!(fill >= 0.0 && fill <= 1.0)) throw InvalidArgument("fill density outside [0,1]");
  data_.assign(res.count(), fill);
}

DensityGrid::DensityGrid(Resolution res, CellLengths lengths, std::vector<double> densities)
    : res_(res), lengths_(lengths), data_(std::move(densities)) {
  check_shape(res, lengths);
  if (data_.size() != res.count())
    throw InvalidArgument("density count " + std::to_string(data_.size()) +
                          " does not match resolution " + to_string(res));
  for (double d : data_)
    if (!(d >= 0.0 && d <= 1.0)) throw InvalidArgument("density outside [0,1]");
}

std::array<double, 3> DensityGrid::voxel_size() const {
  return {lengths_.x / res_.x, lengths_.y / res_.y, lengths_.z / res_.z};
}

double relative_density(const DensityGrid& grid) {
  if (grid.size() == 0) return 0.0;
  const auto v = grid.values();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace gyrox
