#include "gyrox/grid_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "gyrox/errors.hpp"

namespace gyrox {
namespace {

void put_u32(std::string& buf, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xFFu));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xFFu));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int b = 3; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

void read_exact(std::istream& in, unsigned char* dst, std::size_t n, const char* what) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw IoError(std::string("dgrid: truncated ") + what);
}

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  return tmp;
}

}  // namespace

void write_dgrid(std::ostream& out, const DensityGrid& grid) {
  const auto& r = grid.resolution();
  const auto& l = grid.cell_lengths();
  std::string buf;
  buf.reserve(kDgridHeaderBytes + 4 * grid.size());
  buf.append("DGRD", 4);
  put_u32(buf, kDgridVersion);
  put_u32(buf, static_cast<std::uint32_t>(r.x));
  put_u32(buf, static_cast<std::uint32_t>(r.y));
  put_u32(buf, static_cast<std::uint32_t>(r.z));
  put_u64(buf, std::bit_cast<std::uint64_t>(l.x));
  put_u64(buf, std::bit_cast<std::uint64_t>(l.y));
  put_u64(buf, std::bit_cast<std::uint64_t>(l.z));
  for (double d : grid.values()) put_u32(buf, std::bit_cast<std::uint32_t>(static_cast<float>(d)));
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("dgrid: write failed");
}

DensityGrid read_dgrid(std::istream& in) {
  std::array<unsigned char, kDgridHeaderBytes> head{};
  read_exact(in, head.data(), head.size(), "header");
  if (std::memcmp(head.data(), "DGRD", 4) != 0) throw IoError("dgrid: bad magic");
  const auto version = get_u32(head.data() + 4);
  if (version != kDgridVersion)
    throw IoError("dgrid: unsupported version " + std::to_string(version));
  Resolution res{static_cast<int>(get_u32(head.data() + 8)), static_cast<int>(get_u32(head.data() + 12)),
                 static_cast<int>(get_u32(head.data() + 16))};
  CellLengths lengths{std::bit_cast<double>(get_u64(head.data() + 20)),
                      std::bit_cast<double>(get_u64(head.data() + 28)),
                      std::bit_cast<double>(get_u64(head.data() + 36))};
  if (res.x < 1 || res.y < 1 || res.z < 1) throw IoError("dgrid: bad resolution");

  std::vector<unsigned char> payload(4 * res.count());
  read_exact(in, payload.data(), payload.size(), "payload");
  std::vector<double> densities(res.count());
  for (std::size_t e = 0; e < densities.size(); ++e)
    densities[e] = static_cast<double>(std::bit_cast<float>(get_u32(payload.data() + 4 * e)));
  try {
    return DensityGrid(res, lengths, std::move(densities));
  } catch (const InvalidArgument& err) {
    throw IoError(std::string("dgrid: ") + err.what());
  }
}

void save_dgrid(const std::filesystem::path& path, const DensityGrid& grid) {
  std::ostringstream buf(std::ios::binary);
  write_dgrid(buf, grid);
  write_text_atomic(path, buf.str());
}

DensityGrid load_dgrid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_dgrid(in);
}

DensityGrid quantize_f32(const DensityGrid& grid) {
  std::vector<double> v(grid.values().begin(), grid.values().end());
  for (double& d : v) d = static_cast<double>(static_cast<float>(d));
  return DensityGrid(grid.resolution(), grid.cell_lengths(), std::move(v));
}

void write_vtk(std::ostream& out, const DensityGrid& grid) {
  const auto& r = grid.resolution();
  const auto h = grid.voxel_size();
  out << "# vtk DataFile Version 3.0\n"
      << "gyrox density grid\n"
      << "ASCII\n"
      << "DATASET STRUCTURED_POINTS\n"
      << "DIMENSIONS " << r.x + 1 << ' ' << r.y + 1 << ' ' << r.z + 1 << '\n'
      << "ORIGIN 0 0 0\n"
      << std::setprecision(17) << "SPACING " << h[0] << ' ' << h[1] << ' ' << h[2] << '\n'
      << "CELL_DATA " << grid.size() << '\n'
      << "SCALARS density float 1\n"
      << "LOOKUP_TABLE default\n";
  out << std::setprecision(9);
  for (std::size_t e = 0; e < grid.size(); ++e) {
    out << static_cast<float>(grid[e]);
    out << (((e + 1) % static_cast<std::size_t>(r.x) == 0) ? '\n' : ' ');
  }
  if (!out) throw IoError("vtk: write failed");
}

void save_vtk(const std::filesystem::path& path, const DensityGrid& grid) {
  std::ostringstream buf;
  write_vtk(buf, grid);
  write_text_atomic(path, buf.str());
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

}  // namespace gyrox
