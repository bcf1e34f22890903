#pragma once

// Reference computations for tests. None of these share code paths with the
// library routines they check: no linear solves, no library samplers.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/lattice.hpp"
#include "rwre/transition.hpp"
#include "rwre/volume.hpp"

namespace oracle {

using rwre::Point;

struct Occupancy {
  std::map<Point, double> visits;
  std::map<Point, double> exit_law;
  double exit_time = 0.0;
  double exit_projection = 0.0;
  /// Mass still inside U when propagation stopped.
  double tail = 0.0;
  std::size_t steps = 0;
};

/// Sums over all paths by pushing the law of X_t forward until less than
/// `tail` of the mass is still inside U.
template <class Field>
Occupancy propagate(const Field& at, const rwre::FiniteVolume& volume, const Point& start,
                    const rwre::Vec& ell, double tail = 1e-13,
                    std::size_t max_steps = 10'000'000) {
  Occupancy out;
  std::map<Point, double> law;
  if (volume.contains(start)) {
    law[start] = 1.0;
  } else {
    out.exit_law[start] = 1.0;
    out.exit_projection = rwre::dot(start, ell);
    return out;
  }
  double inside = 1.0;
  while (inside > tail && out.steps < max_steps) {
    std::map<Point, double> next;
    for (const auto& [x, m] : law) {
      out.visits[x] += m;
      out.exit_time += m;
      const rwre::TransitionVector w = at(x);
      for (std::size_t i = 0; i < w.offsets.size(); ++i) {
        const Point y = x + w.offsets[i];
        const double mass = m * w.probs[i];
        if (mass == 0.0) continue;
        if (volume.contains(y)) {
          next[y] += mass;
        } else {
          out.exit_law[y] += mass;
          out.exit_projection += mass * rwre::dot(y, ell);
        }
      }
    }
    law = std::move(next);
    inside = 0.0;
    for (const auto& [x, m] : law) inside += m;
    ++out.steps;
  }
  out.tail = inside;
  return out;
}

inline Occupancy propagate(const rwre::Environment& env, const rwre::FiniteVolume& volume,
                           const Point& start, const rwre::Vec& ell, double tail = 1e-13) {
  return propagate([&](const Point& x) { return env.at(x); }, volume, start, ell, tail);
}

/// Random elliptic vector on the nearest-neighbour stencil of Z^dim.
inline rwre::TransitionVector random_vector(std::mt19937_64& rng, int dim, double floor = 0.05) {
  rwre::TransitionVector v;
  v.offsets = rwre::unit_vectors(dim);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double total = 0.0;
  for (std::size_t i = 0; i < v.offsets.size(); ++i) {
    v.probs.push_back(u(rng));
    total += v.probs.back();
  }
  const double free = 1.0 - floor * static_cast<double>(v.offsets.size());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < v.probs.size(); ++i) {
    v.probs[i] = floor + free * v.probs[i] / total;
    sum += v.probs[i];
  }
  v.probs.back() = 1.0 - sum;
  return v;
}

inline rwre::EnvironmentModel random_alphabet_model(std::mt19937_64& rng, int dim,
                                                     std::size_t letters) {
  std::vector<rwre::TransitionVector> alphabet;
  std::vector<double> weights;
  for (std::size_t i = 0; i < letters; ++i) {
    alphabet.push_back(random_vector(rng, dim));
    weights.push_back(1.0 / static_cast<double>(letters));
  }
  return rwre::iid_alphabet_model(alphabet, weights, dim, 1, rng());
}

/// Random nearest-neighbour connected set of `size` sites containing `seed`.
inline std::vector<Point> random_connected_set(std::mt19937_64& rng, int dim, std::size_t size,
                                               const Point& seed = Point{}) {
  std::set<Point> set{seed};
  std::vector<Point> order{seed};
  const auto units = rwre::unit_vectors(dim);
  while (set.size() < size) {
    const Point& from = order[std::uniform_int_distribution<std::size_t>(0, order.size() - 1)(rng)];
    const Point y = from + units[std::uniform_int_distribution<std::size_t>(0, units.size() - 1)(rng)];
    if (set.insert(y).second) order.push_back(y);
  }
  return order;
}

/// Gambler's ruin on {a, ..., b} for p = P(step +1): P_x(exit at b + 1).
inline double ruin_exit_right(double p, rwre::Coord a, rwre::Coord b, rwre::Coord x) {
  const double q = 1.0 - p;
  const double n = static_cast<double>(b - a + 2);
  const double k = static_cast<double>(x - a + 1);
  if (std::abs(p - q) < 1e-15) return k / n;
  const double rho = q / p;
  return (1.0 - std::pow(rho, k)) / (1.0 - std::pow(rho, n));
}

/// Solves a dense system by Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

}  // namespace oracle
