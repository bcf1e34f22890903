#include "rwre/volume.hpp"

#include <algorithm>
#include <set>

#include "rwre/errors.hpp"

namespace rwre {

FiniteVolume::FiniteVolume(std::vector<Point> sites, int dim, Coord range)
    : sites_(std::move(sites)), dim_(dim), range_(range) {
  if (sites_.empty()) throw ConfigError("volume: no sites");
  if (dim < 1 || dim > kMaxDim) throw ConfigError("volume: dimension must be in 1..3");
  if (range < 1) throw ConfigError("volume: range must be >= 1");
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    for (int k = dim; k < kMaxDim; ++k)
      if (sites_[i][static_cast<std::size_t>(k)] != 0)
        throw ConfigError("volume: site has coordinates beyond the dimension");
    if (!index_.emplace(sites_[i], i).second) throw ConfigError("volume: repeated site");
  }

  const auto ball = sup_ball(dim, range);
  std::vector<bool> seen(sites_.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (const auto& e : ball) {
      const auto it = index_.find(sites_[i] + e);
      if (it != index_.end() && !seen[it->second]) {
        seen[it->second] = true;
        ++reached;
        stack.push_back(it->second);
      }
    }
  }
  m_connected_ = reached == sites_.size();
}

FiniteVolume FiniteVolume::box(const Point& lo, const Point& hi, int dim, Coord range) {
  std::vector<Point> sites;
  const Coord z_lo = dim > 2 ? lo[2] : 0, z_hi = dim > 2 ? hi[2] : 0;
  const Coord y_lo = dim > 1 ? lo[1] : 0, y_hi = dim > 1 ? hi[1] : 0;
  for (Coord z = z_lo; z <= z_hi; ++z)
    for (Coord y = y_lo; y <= y_hi; ++y)
      for (Coord x = lo[0]; x <= hi[0]; ++x) sites.emplace_back(x, y, z);
  return FiniteVolume(std::move(sites), dim, range);
}

FiniteVolume FiniteVolume::interval(Coord a, Coord b, Coord range) {
  return box(Point(a), Point(b), 1, range);
}

FiniteVolume FiniteVolume::centred_box(Coord radius, int dim, Coord range) {
  Point lo, hi;
  for (int k = 0; k < dim; ++k) {
    lo[static_cast<std::size_t>(k)] = -radius;
    hi[static_cast<std::size_t>(k)] = radius;
  }
  return box(lo, hi, dim, range);
}

long FiniteVolume::index_of(const Point& x) const {
  const auto it = index_.find(x);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

std::vector<Point> FiniteVolume::outer_boundary() const {
  std::set<Point> out;
  const auto ball = sup_ball(dim_, range_);
  for (const auto& x : sites_)
    for (const auto& e : ball)
      if (!contains(x + e)) out.insert(x + e);
  return {out.begin(), out.end()};
}

}  // namespace rwre
