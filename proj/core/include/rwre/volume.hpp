#pragma once

#include <cstddef>
#include <unordered_map>
#include <vector>

#include "rwre/lattice.hpp"

namespace rwre {

/// Finite set of lattice sites U, with the walk range M used for its
/// connectivity and boundary.
class FiniteVolume {
 public:
  FiniteVolume(std::vector<Point> sites, int dim, Coord range);

  /// All sites of the box [lo, hi].
  static FiniteVolume box(const Point& lo, const Point& hi, int dim, Coord range);
  /// The 1-D interval {a, ..., b}.
  static FiniteVolume interval(Coord a, Coord b, Coord range = 1);
  /// Centred box [-radius, radius]^d.
  static FiniteVolume centred_box(Coord radius, int dim, Coord range);

  const std::vector<Point>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  int dim() const { return dim_; }
  Coord range() const { return range_; }

  bool contains(const Point& x) const { return index_.count(x) != 0; }
  /// Position of x in sites(), or -1.
  long index_of(const Point& x) const;
  bool contains_origin() const { return contains(Point{}); }

  /// Connected when sites at sup-distance <= M are joined.
  bool m_connected() const { return m_connected_; }

  /// Sites outside U within sup-distance M of it.
  std::vector<Point> outer_boundary() const;

 private:
  std::vector<Point> sites_;
  std::unordered_map<Point, std::size_t, PointHash> index_;
  int dim_;
  Coord range_;
  bool m_connected_ = false;
};

}  // namespace rwre
