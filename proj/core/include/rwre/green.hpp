#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/lattice.hpp"
#include "rwre/volume.hpp"

namespace rwre {

struct OccupancyOptions {
  Vec ell{1.0, 0.0, 0.0};
  /// Also compute visit probabilities f and escape probabilities g, which
  /// needs the full inverse of I - P_U.
  bool full = false;
  std::size_t max_sites = 4000;
};

/// Exact quenched occupation data of U for a walk started at `start`.
/// Visits are counted at times j < T_U.
struct OccupancyTable {
  FiniteVolume volume;
  Point start;
  /// visits[i] = E(#{j < T_U : X_j = sites[i]}).
  std::vector<double> visits;
  /// Exit distribution of X_{T_U}, sorted by site.
  std::vector<std::pair<Point, double>> exit_law;
  double expected_exit_time = 0.0;
  double expected_exit_projection = 0.0;

  /// Filled when options.full: f[i] = P(hit sites[i] before T_U).
  std::vector<double> visit_prob;
  /// escape[i][k] = P_{x+y}(T_U before hitting x) for x = sites[i] and y the
  /// k-th offset of omega_x (1 when x+y is outside U); probs[i][k] = pi_{x,x+y}.
  std::vector<std::vector<double>> escape;
  std::vector<std::vector<double>> escape_step_probs;

  double visits_at(const Point& x) const;
  double exit_mass() const;
};

OccupancyTable occupancy(const Environment& env, const FiniteVolume& volume, const Point& start,
                         const OccupancyOptions& options = {});

/// E sum_{j < T_U} exp(-lambda X_j.ell).
double exponential_moment(const Environment& env, double lambda, const FiniteVolume& volume,
                          const Point& start, const Vec& ell);

/// Green function of a 1-D walk killed on leaving the window [lo, hi].
/// Factorizes once; columns give g_{kj} for every start k in the window.
class Green1D {
 public:
  Green1D(const Environment& env, Coord lo, Coord hi);
  ~Green1D();
  Green1D(Green1D&&) noexcept;
  Green1D& operator=(Green1D&&) noexcept;

  Coord lo() const { return lo_; }
  Coord hi() const { return hi_; }

  /// g_{kj} for k = lo..hi.
  std::vector<double> column(Coord j) const;
  double value(Coord i, Coord j) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Coord lo_, hi_;
};

struct TruncatedValue {
  double value = 0.0;
  /// |last doubling difference|.
  double truncation_error = 0.0;
  Coord lo = 0, hi = 0;
};

struct TruncationPolicy {
  Coord initial_pad = 32;
  double tolerance = 1e-8;
  Coord max_pad = 1 << 14;
};

/// g_ij = expected total visits to j from i, on windows [min(i,j)-pad,
/// max(i,j)+pad] with pad doubled until successive values differ < tolerance.
/// Throws ConvergenceError past max_pad, ConfigError for d != 1.
TruncatedValue green_1d(const Environment& env, Coord i, Coord j,
                        const TruncationPolicy& policy = {});

/// P_i(the walk ever visits j), by the same doubling scheme; solved directly
/// as a hitting problem, independent of the Green function route.
TruncatedValue hitting_probability_1d(const Environment& env, Coord i, Coord j,
                                      const TruncationPolicy& policy = {});

}  // namespace rwre
