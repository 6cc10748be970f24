#include "gyrox/tpms_voxel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "gyrox/errors.hpp"

namespace gyrox {

void TpmsSpec::validate() const {
  if (!(lengths.x > 0.0 && lengths.y > 0.0 && lengths.z > 0.0))
    throw InvalidArgument("cell lengths must be positive");
  if (mesh_points < 2) throw InvalidArgument("mesh_points must be >= 2");
  if (!std::isfinite(c)) throw InvalidArgument("level-set constant must be finite");
}

double gyroid_level_set(const TpmsSpec& spec, double x, double y, double z) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double ax = two_pi * x / spec.lengths.x;
  const double ay = two_pi * y / spec.lengths.y;
  const double az = two_pi * z / spec.lengths.z;
  return std::sin(ax) * std::cos(ay) + std::sin(ay) * std::cos(az) + std::sin(az) * std::cos(ax) - spec.c;
}

double ScalarField::interpolate(const std::array<double, 3>& p) const {
  std::array<int, 3> i0{};
  std::array<double, 3> t{};
  for (int a = 0; a < 3; ++a) {
    const double s = std::clamp(p[a] / spacing[a], 0.0, static_cast<double>(dims[a] - 1));
    i0[a] = std::min(static_cast<int>(std::floor(s)), dims[a] - 2);
    t[a] = s - i0[a];
  }
  double v = 0.0;
  for (int c = 0; c < 8; ++c) {
    const int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
    const double w = (dx ? t[0] : 1.0 - t[0]) * (dy ? t[1] : 1.0 - t[1]) * (dz ? t[2] : 1.0 - t[2]);
    v += w * at(i0[0] + dx, i0[1] + dy, i0[2] + dz);
  }
  return v;
}

ScalarField sample_level_set(const TpmsSpec& spec) {
  spec.validate();
  const int n = spec.mesh_points;
  ScalarField field;
  field.dims = {n, n, n};
  field.spacing = {spec.lengths.x / (n - 1), spec.lengths.y / (n - 1), spec.lengths.z / (n - 1)};
  field.values.resize(static_cast<std::size_t>(n) * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        field.values[field.index(i, j, k)] =
            gyroid_level_set(spec, i * field.spacing[0], j * field.spacing[1], k * field.spacing[2]);
  return field;
}

std::vector<std::pair<std::size_t, std::size_t>> TriangleMesh::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(triangles.size() * 3);
  for (const auto& t : triangles)
    for (int e = 0; e < 3; ++e) {
      const auto a = t[e], b = t[(e + 1) % 3];
      out.emplace_back(std::min(a, b), std::max(a, b));
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// Cube corner c sits at offset (c&1, (c>>1)&1, (c>>2)&1).
constexpr std::array<std::array<int, 2>, 12> kCubeEdges{{
    {0, 1}, {2, 3}, {4, 5}, {6, 7},  // along x
    {0, 2}, {1, 3}, {4, 6}, {5, 7},  // along y
    {0, 4}, {1, 5}, {2, 6}, {3, 7},  // along z
}};

// Corners of each face, counter-clockwise seen from outside the cube.
constexpr std::array<std::array<int, 4>, 6> kFaces{{
    {0, 4, 6, 2},  // x-
    {1, 3, 7, 5},  // x+
    {0, 1, 5, 4},  // y-
    {2, 6, 7, 3},  // y+
    {0, 2, 3, 1},  // z-
    {4, 5, 7, 6},  // z+
}};

constexpr int cube_edge_id(int a, int b) {
  for (int e = 0; e < 12; ++e)
    if ((kCubeEdges[e][0] == a && kCubeEdges[e][1] == b) || (kCubeEdges[e][0] == b && kCubeEdges[e][1] == a))
      return e;
  return -1;
}

struct Crossing {
  int edge;
  bool leaves_positive;  // walking CCW, positive corner -> non-positive corner
};

}  // namespace

TriangleMesh extract_isosurface(const ScalarField& field) {
  const auto [nx, ny, nz] = field.dims;
  if (nx < 2 || ny < 2 || nz < 2) throw InvalidArgument("scalar field needs >= 2 samples per axis");
  if (field.values.size() != static_cast<std::size_t>(nx) * ny * nz)
    throw InvalidArgument("scalar field size does not match dims");
  const bool any_pos = std::any_of(field.values.begin(), field.values.end(), [](double v) { return v > 0.0; });
  const bool any_neg = std::any_of(field.values.begin(), field.values.end(), [](double v) { return v <= 0.0; });
  if (!any_pos || !any_neg) throw NoSurface("level-set field has uniform sign; no isosurface in the cell");

  TriangleMesh mesh;
  // Vertex keys: 3*point + axis for an interior edge crossing, 3*npoints + point when the
  // crossing lands exactly on a sample.
  const std::size_t npoints = field.values.size();
  std::unordered_map<std::size_t, std::size_t> vertex_of_key;

  auto point_coords = [&](std::size_t p) -> Point3 {
    const auto i = static_cast<int>(p % nx);
    const auto j = static_cast<int>((p / nx) % ny);
    const auto k = static_cast<int>(p / (static_cast<std::size_t>(nx) * ny));
    return {i * field.spacing[0], j * field.spacing[1], k * field.spacing[2]};
  };

  auto vertex_on = [&](std::size_t pa, std::size_t pb, int axis) -> std::size_t {
    // pa is the lower-coordinate endpoint.
    const double fa = field.values[pa], fb = field.values[pb];
    const double t = fa / (fa - fb);
    std::size_t key;
    if (t <= 0.0)
      key = 3 * npoints + pa;
    else if (t >= 1.0)
      key = 3 * npoints + pb;
    else
      key = 3 * pa + static_cast<std::size_t>(axis);
    auto [it, inserted] = vertex_of_key.try_emplace(key, mesh.vertices.size());
    if (inserted) {
      const Point3 a = point_coords(pa), b = point_coords(pb);
      const double s = std::clamp(t, 0.0, 1.0);
      Point3 v{};
      for (int d = 0; d < 3; ++d) v[d] = a[d] + s * (b[d] - a[d]);
      if (t <= 0.0) v = a;
      if (t >= 1.0) v = b;
      mesh.vertices.push_back(v);
    }
    return it->second;
  };

  std::array<double, 8> f{};
  std::array<std::size_t, 8> gp{};
  for (int k = 0; k + 1 < nz; ++k)
    for (int j = 0; j + 1 < ny; ++j)
      for (int i = 0; i + 1 < nx; ++i) {
        unsigned mask = 0;
        for (int c = 0; c < 8; ++c) {
          gp[c] = field.index(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
          f[c] = field.values[gp[c]];
          if (f[c] > 0.0) mask |= 1u << c;
        }
        if (mask == 0 || mask == 0xFF) continue;
        auto pos = [&](int c) { return (mask >> c) & 1u; };

        // next[edge] = following cube edge along the loop
        std::array<int, 12> next;
        next.fill(-1);
        for (const auto& face : kFaces) {
          std::array<Crossing, 4> xs{};
          int nxs = 0;
          for (int s = 0; s < 4; ++s) {
            const int a = face[s], b = face[(s + 1) % 4];
            if (pos(a) != pos(b)) xs[nxs++] = {cube_edge_id(a, b), pos(a) != 0};
          }
          if (nxs == 2) {
            const auto& lv = xs[0].leaves_positive ? xs[0] : xs[1];
            const auto& en = xs[0].leaves_positive ? xs[1] : xs[0];
            next[lv.edge] = en.edge;
          } else if (nxs == 4) {
            const double center = 0.25 * (f[face[0]] + f[face[1]] + f[face[2]] + f[face[3]]);
            const bool positive_connected = center > 0.0;
            for (int s = 0; s < 4; ++s) {
              if (!xs[s].leaves_positive) continue;
              const int partner = positive_connected ? (s + 1) % 4 : (s + 3) % 4;
              next[xs[s].edge] = xs[partner].edge;
            }
          }
        }

        std::array<std::size_t, 12> vid{};
        for (int e = 0; e < 12; ++e) {
          if (next[e] < 0) continue;
          int a = kCubeEdges[e][0], b = kCubeEdges[e][1];
          vid[e] = vertex_on(gp[a], gp[b], e / 4);
        }

        std::array<bool, 12> used{};
        for (int start = 0; start < 12; ++start) {
          if (next[start] < 0 || used[start]) continue;
          std::vector<std::size_t> loop;
          for (int e = start; !used[e]; e = next[e]) {
            used[e] = true;
            if (loop.empty() || loop.back() != vid[e]) loop.push_back(vid[e]);
          }
          if (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
          for (std::size_t t = 1; t + 1 < loop.size(); ++t) {
            const std::array<std::size_t, 3> tri{loop[0], loop[t], loop[t + 1]};
            if (tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2]) mesh.triangles.push_back(tri);
          }
        }
      }
  if (mesh.triangles.empty()) throw NoSurface("isosurface is degenerate (no triangles)");
  return mesh;
}

bool segment_touches_box(const Point3& a, const Point3& b, const Point3& lo, const Point3& hi) {
  double t0 = 0.0, t1 = 1.0;
  for (int d = 0; d < 3; ++d) {
    const double dir = b[d] - a[d];
    if (dir == 0.0) {
      if (a[d] < lo[d] || a[d] > hi[d]) return false;
      continue;
    }
    double ta = (lo[d] - a[d]) / dir;
    double tb = (hi[d] - a[d]) / dir;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

namespace {

double point_segment_distance2(const Point3& p, const Point3& a, const Point3& b) {
  Point3 ab{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  Point3 ap{p[0] - a[0], p[1] - a[1], p[2] - a[2]};
  const double len2 = ab[0] * ab[0] + ab[1] * ab[1] + ab[2] * ab[2];
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp((ap[0] * ab[0] + ap[1] * ab[1] + ap[2] * ab[2]) / len2, 0.0, 1.0);
  double d2 = 0.0;
  for (int d = 0; d < 3; ++d) {
    const double r = ap[d] - t * ab[d];
    d2 += r * r;
  }
  return d2;
}

}  // namespace

DensityGrid voxelize_surface(const TriangleMesh& mesh, Resolution resolution, CellLengths lengths,
                             const VoxelOptions& options) {
  if (resolution.x < 2 || resolution.y < 2 || resolution.z < 2)
    throw InvalidArgument("voxel resolution must be >= 2 per axis");
  if (mesh.triangles.empty()) throw InvalidArgument("cannot voxelize an empty mesh");
  if (options.rule == VoxelRule::StrutRadius && !(options.strut_radius >= 0.0))
    throw InvalidArgument("strut radius must be non-negative");

  DensityGrid grid(resolution, lengths, 0.0);
  const auto h = grid.voxel_size();
  const std::array<int, 3> n{resolution.x, resolution.y, resolution.z};
  const double reach = options.rule == VoxelRule::StrutRadius ? options.strut_radius : 0.0;

  for (const auto& [ia, ib] : mesh.edges()) {
    const Point3& a = mesh.vertices[ia];
    const Point3& b = mesh.vertices[ib];
    std::array<int, 3> lo{}, hi{};
    for (int d = 0; d < 3; ++d) {
      const double mn = std::min(a[d], b[d]) - reach, mx = std::max(a[d], b[d]) + reach;
      // one voxel of slack on each side absorbs boundary-touching cases
      lo[d] = std::clamp(static_cast<int>(std::floor(mn / h[d])) - 1, 0, n[d] - 1);
      hi[d] = std::clamp(static_cast<int>(std::floor(mx / h[d])) + 1, 0, n[d] - 1);
    }
    for (int k = lo[2]; k <= hi[2]; ++k)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int i = lo[0]; i <= hi[0]; ++i) {
          double& cell = grid.at(i, j, k);
          if (cell == 1.0) continue;
          bool hit;
          if (options.rule == VoxelRule::StrutRadius) {
            const Point3 center{(i + 0.5) * h[0], (j + 0.5) * h[1], (k + 0.5) * h[2]};
            hit = point_segment_distance2(center, a, b) <= reach * reach;
          } else {
            const Point3 blo{i * h[0], j * h[1], k * h[2]};
            const Point3 bhi{(i + 1) * h[0], (j + 1) * h[1], (k + 1) * h[2]};
            hit = segment_touches_box(a, b, blo, bhi);
          }
          if (hit) cell = 1.0;
        }
  }
  return grid;
}

DensityGrid voxelize_gyroid(const TpmsSpec& spec, Resolution resolution, const VoxelOptions& options) {
  return voxelize_surface(extract_isosurface(sample_level_set(spec)), resolution, spec.lengths, options);
}

}  // namespace gyrox
