#include "rwre/transition.hpp"

#include <cmath>
#include <sstream>

#include "rwre/errors.hpp"

namespace rwre {

double TransitionVector::prob(const Point& offset) const {
  double p = 0.0;
  for (std::size_t i = 0; i < offsets.size(); ++i)
    if (offsets[i] == offset) p += probs[i];
  return p;
}

void TransitionVector::validate(int dim, Coord range) const {
  if (offsets.empty() || offsets.size() != probs.size())
    throw ConfigError("transition vector needs matching, non-empty offsets and probs");
  double total = 0.0;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (!(probs[i] >= 0.0)) throw ConfigError("transition probability is negative or NaN");
    total += probs[i];
    if (sup_norm(offsets[i]) > range)
      throw ConfigError("offset " + format_point(offsets[i], dim) + " exceeds range " +
                        std::to_string(range));
    for (int k = dim; k < kMaxDim; ++k)
      if (offsets[i][static_cast<std::size_t>(k)] != 0)
        throw ConfigError("offset has coordinates beyond dimension " + std::to_string(dim));
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ConfigError("transition probabilities sum to " + std::to_string(total));
}

Vec drift(const TransitionVector& v) {
  Vec d{};
  for (std::size_t i = 0; i < v.offsets.size(); ++i)
    for (int k = 0; k < kMaxDim; ++k)
      d[static_cast<std::size_t>(k)] +=
          static_cast<double>(v.offsets[i][static_cast<std::size_t>(k)]) * v.probs[i];
  return d;
}

TransitionVector nearest_neighbor_1d(double p) {
  return TransitionVector{{Point(1), Point(-1)}, {p, 1.0 - p}};
}

std::string describe(const TransitionVector& v, int dim) {
  std::ostringstream os;
  os.precision(17);
  os << '{';
  for (std::size_t i = 0; i < v.offsets.size(); ++i) {
    if (i) os << ' ';
    os << format_point(v.offsets[i], dim) << ':' << v.probs[i];
  }
  os << '}';
  return os.str();
}

}  // namespace rwre
