#include "gyrox/periodic_dofs.hpp"

#include "gyrox/errors.hpp"

namespace gyrox {

PeriodicDofMap::PeriodicDofMap(Resolution resolution) : res_(resolution) {
  if (res_.x < 1 || res_.y < 1 || res_.z < 1)
    throw InvalidArgument("periodic map needs resolution >= 1 per axis, got " + to_string(res_));
  edofs_.resize(res_.count());
  std::size_t e = 0;
  for (int k = 0; k < res_.z; ++k)
    for (int j = 0; j < res_.y; ++j)
      for (int i = 0; i < res_.x; ++i, ++e)
        for (int n = 0; n < 8; ++n) {
          const auto m = master_of(i + (n & 1), j + ((n >> 1) & 1), k + ((n >> 2) & 1));
          for (int d = 0; d < 3; ++d) edofs_[e][3 * n + d] = 3 * m + static_cast<std::uint32_t>(d);
        }
}

std::size_t PeriodicDofMap::node_count() const {
  return static_cast<std::size_t>(res_.x + 1) * (res_.y + 1) * (res_.z + 1);
}

std::uint32_t PeriodicDofMap::master_of(int i, int j, int k) const {
  const int mi = i % res_.x, mj = j % res_.y, mk = k % res_.z;
  return static_cast<std::uint32_t>(mi + res_.x * (mj + res_.y * mk));
}

std::uint32_t PeriodicDofMap::master_of_node(std::size_t node) const {
  const auto nx = static_cast<std::size_t>(res_.x + 1), ny = static_cast<std::size_t>(res_.y + 1);
  return master_of(static_cast<int>(node % nx), static_cast<int>((node / nx) % ny),
                   static_cast<int>(node / (nx * ny)));
}

}  // namespace gyrox
