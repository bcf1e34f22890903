#include "rwre/lattice.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include "rwre/errors.hpp"
#include "rwre/hash.hpp"

namespace rwre {

std::size_t PointHash::operator()(const Point& p) const noexcept {
  return static_cast<std::size_t>(site_hash(0x5157E11A77ull, p, 0));
}

double dot(const Point& x, const Vec& ell) {
  double s = 0.0;
  for (int i = 0; i < kMaxDim; ++i) s += static_cast<double>(x[i]) * ell[i];
  return s;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < kMaxDim; ++i) s += a[i] * b[i];
  return s;
}

double l1_norm(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

Vec to_vec(const Point& p) {
  return {static_cast<double>(p[0]), static_cast<double>(p[1]), static_cast<double>(p[2])};
}

Vec scaled(const Vec& v, double s) { return {v[0] * s, v[1] * s, v[2] * s}; }

Coord sup_norm(const Point& p) {
  Coord m = 0;
  for (Coord v : p.c) m = std::max(m, v < 0 ? -v : v);
  return m;
}

Coord sup_dist(const Point& a, const Point& b) { return sup_norm(a - b); }

std::vector<Point> sup_ball(int dim, Coord radius) {
  std::vector<Point> out;
  const Coord r = radius;
  const Coord ylo = dim >= 2 ? -r : 0, yhi = dim >= 2 ? r : 0;
  const Coord zlo = dim >= 3 ? -r : 0, zhi = dim >= 3 ? r : 0;
  for (Coord x = -r; x <= r; ++x)
    for (Coord y = ylo; y <= yhi; ++y)
      for (Coord z = zlo; z <= zhi; ++z) out.emplace_back(x, y, z);
  return out;
}

std::vector<Point> unit_vectors(int dim) {
  std::vector<Point> out;
  for (int i = 0; i < dim; ++i) {
    Point e;
    e[i] = 1;
    out.push_back(e);
    out.push_back(-e);
  }
  return out;
}

std::string format_point(const Point& p, int dim) {
  std::string s;
  for (int i = 0; i < dim; ++i) {
    if (i) s += ',';
    s += std::to_string(p[i]);
  }
  return s;
}

namespace {

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(',', start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

Point parse_point(std::string_view text, int dim) {
  const auto parts = split_commas(text);
  if (static_cast<int>(parts.size()) != dim)
    throw ConfigError("point '" + std::string(text) + "' does not have " + std::to_string(dim) +
                      " coordinates");
  Point p;
  for (int i = 0; i < dim; ++i) {
    const auto part = parts[static_cast<std::size_t>(i)];
    Coord v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size())
      throw ConfigError("bad lattice coordinate '" + std::string(part) + "'");
    p[static_cast<std::size_t>(i)] = v;
  }
  return p;
}

Vec parse_vec(std::string_view text, int dim) {
  const auto parts = split_commas(text);
  if (static_cast<int>(parts.size()) != dim)
    throw ConfigError("vector '" + std::string(text) + "' does not have " + std::to_string(dim) +
                      " components");
  Vec v{};
  for (int i = 0; i < dim; ++i) {
    const std::string part(parts[static_cast<std::size_t>(i)]);
    char* end = nullptr;
    v[static_cast<std::size_t>(i)] = std::strtod(part.c_str(), &end);
    if (part.empty() || end != part.c_str() + part.size())
      throw ConfigError("bad vector component '" + part + "'");
  }
  return v;
}

std::string format_vec(const Vec& v, int dim) {
  std::ostringstream os;
  os.precision(17);
  for (int i = 0; i < dim; ++i) {
    if (i) os << ',';
    os << v[static_cast<std::size_t>(i)];
  }
  return os.str();
}

Coord slab_index(double projection) {
  // Tolerance absorbs rounding in x.ell for points exactly on a slab boundary.
  return static_cast<Coord>(std::floor(projection + 1e-9)) + 1;
}

}  // namespace rwre
