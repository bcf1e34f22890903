#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rwre {

inline constexpr int kMaxDim = 3;

using Coord = std::int64_t;

/// Lattice point of Z^d, d <= kMaxDim. Unused coordinates are kept at zero.
struct Point {
  std::array<Coord, kMaxDim> c{};

  constexpr Point() = default;
  constexpr explicit Point(Coord x) : c{x, 0, 0} {}
  constexpr Point(Coord x, Coord y) : c{x, y, 0} {}
  constexpr Point(Coord x, Coord y, Coord z) : c{x, y, z} {}

  constexpr Coord& operator[](std::size_t i) { return c[i]; }
  constexpr Coord operator[](std::size_t i) const { return c[i]; }

  constexpr Point& operator+=(const Point& o) {
    for (int i = 0; i < kMaxDim; ++i) c[i] += o.c[i];
    return *this;
  }
  constexpr Point& operator-=(const Point& o) {
    for (int i = 0; i < kMaxDim; ++i) c[i] -= o.c[i];
    return *this;
  }
  friend constexpr Point operator+(Point a, const Point& b) { return a += b; }
  friend constexpr Point operator-(Point a, const Point& b) { return a -= b; }
  friend constexpr Point operator-(Point a) {
    for (auto& v : a.c) v = -v;
    return a;
  }
  friend constexpr auto operator<=>(const Point&, const Point&) = default;
};

struct PointHash {
  std::size_t operator()(const Point& p) const noexcept;
};

/// Real vector, used for directions and drifts.
using Vec = std::array<double, kMaxDim>;

double dot(const Point& x, const Vec& ell);
double dot(const Vec& a, const Vec& b);
double l1_norm(const Vec& v);
Vec to_vec(const Point& p);
Vec scaled(const Vec& v, double s);

Coord sup_norm(const Point& p);
Coord sup_dist(const Point& a, const Point& b);

/// All offsets e with sup-norm |e| <= radius in dimension dim, including 0.
std::vector<Point> sup_ball(int dim, Coord radius);

/// Unit lattice vectors +-e_i, i < dim.
std::vector<Point> unit_vectors(int dim);

std::string format_point(const Point& p, int dim);
/// Parses "x", "x,y" or "x,y,z"; the number of coordinates must equal dim.
Point parse_point(std::string_view text, int dim);
Vec parse_vec(std::string_view text, int dim);
std::string format_vec(const Vec& v, int dim);

/// Index j of the slab H_{j-1} \ H_j containing a point with projection q,
/// i.e. j - 1 <= q < j.
Coord slab_index(double projection);

}  // namespace rwre
