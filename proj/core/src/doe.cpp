#include "gyrox/doe.hpp"

#include <charconv>
#include <cmath>

#include "gyrox/errors.hpp"

namespace gyrox {
namespace {

double parse_number(const std::string& text, const std::string& whole) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw InvalidArgument("bad range '" + whole + "' (expected a:b:s)");
  return v;
}

}  // namespace

void Range::validate() const {
  if (!std::isfinite(min) || !std::isfinite(max) || !std::isfinite(step)) throw InvalidArgument("range is not finite");
  if (max < min) throw InvalidArgument("range upper end below lower end");
  if (max > min && !(step > 0.0)) throw InvalidArgument("range step must be positive");
}

std::size_t Range::size() const {
  validate();
  if (max == min) return 1;
  return static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
}

double Range::at(std::size_t i) const {
  return std::round((min + static_cast<double>(i) * step) * 1e12) / 1e12;
}

std::vector<double> Range::values() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i);
  return out;
}

Range parse_range(const std::string& text) {
  const auto c1 = text.find(':');
  Range r;
  if (c1 == std::string::npos) {
    r.min = r.max = parse_number(text, text);
    return r;
  }
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos || text.find(':', c2 + 1) != std::string::npos)
    throw InvalidArgument("bad range '" + text + "' (expected a:b:s)");
  r.min = parse_number(text.substr(0, c1), text);
  r.max = parse_number(text.substr(c1 + 1, c2 - c1 - 1), text);
  r.step = parse_number(text.substr(c2 + 1), text);
  r.validate();
  return r;
}

void DoeSpec::validate() const {
  vf.validate();
  rmin.validate();
  if (objectives.empty()) throw InvalidArgument("DoE needs at least one objective");
  for (double v : vf.values())
    if (!(v > 0.0 && v < 1.0)) throw InvalidArgument("volume fractions must lie in (0, 1)");
  for (double r : rmin.values())
    if (!(r >= 1.0)) throw InvalidArgument("filter radii must be >= 1 element");
}

std::vector<DoePoint> enumerate_doe(const DoeSpec& spec, const TopOptConfig& base) {
  spec.validate();
  const auto vfs = spec.vf.values();
  const auto rmins = spec.rmin.values();
  std::vector<DoePoint> out;
  out.reserve(spec.objectives.size() * vfs.size() * rmins.size());
  for (Objective obj : spec.objectives) {
    int index = 0;
    for (double vf : vfs)
      for (double rmin : rmins) {
        DoePoint p{++index, base};
        p.config.objective = obj;
        p.config.vf = vf;
        p.config.rmin = rmin;
        out.push_back(std::move(p));
      }
  }
  return out;
}

}  // namespace gyrox
