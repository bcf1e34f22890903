#pragma once

#include <string>
#include <vector>

#include "rwre/lattice.hpp"

namespace rwre {

/// Transition probabilities out of one site: probs[i] is the probability of
/// the displacement offsets[i].
struct TransitionVector {
  std::vector<Point> offsets;
  std::vector<double> probs;

  /// Probability of `offset`, 0 if it is not listed.
  double prob(const Point& offset) const;

  /// Throws ConfigError unless probs are >= 0, sum to 1 within 1e-12, and
  /// every offset has sup-norm <= range and zero unused coordinates.
  void validate(int dim, Coord range) const;

  friend bool operator==(const TransitionVector&, const TransitionVector&) = default;
};

/// Mean displacement sum_e e * p(e).
Vec drift(const TransitionVector& v);

/// Nearest-neighbour 1-D vector {+1: p, -1: 1-p}.
TransitionVector nearest_neighbor_1d(double p);

std::string describe(const TransitionVector& v, int dim);

}  // namespace rwre
