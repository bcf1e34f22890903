#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/lattice.hpp"
#include "rwre/stats.hpp"
#include "rwre/volume.hpp"

namespace rwre {

/// Positions X_0, ..., X_n of a walk (X_0 = start).
struct Path {
  std::vector<Point> positions;

  const Point& start() const { return positions.front(); }
  const Point& end() const { return positions.back(); }
  std::size_t steps() const { return positions.empty() ? 0 : positions.size() - 1; }
};

/// The path translated so that it ends at the origin.
Path recentre(const Path& path);

namespace stop {
struct FixedLength {};
/// Stop at T_U, the first time outside the volume.
struct ExitVolume {
  std::shared_ptr<const FiniteVolume> volume;
};
/// Stop at tau_s, the first time X_n.ell >= level.
struct HitLevel {
  double level = 0.0;
  Vec ell{1.0, 0.0, 0.0};
};
}  // namespace stop

using StopRule = std::variant<stop::FixedLength, stop::ExitVolume, stop::HitLevel>;

/// Outcome of one walk without its trajectory.
struct WalkOutcome {
  Point endpoint;
  std::size_t steps = 0;
  /// The stop event occurred (always true for FixedLength).
  bool stopped = false;
};

/// Samples from the quenched law P_start^omega, at most `horizon` steps.
/// Deterministic in (env, start, horizon, stop, walk_seed).
Path run_quenched(const Environment& env, const Point& start, std::size_t horizon,
                  const StopRule& stop, std::uint64_t walk_seed);

/// Same walk as run_quenched, keeping only the outcome.
WalkOutcome run_quenched_outcome(const Environment& env, const Point& start,
                                 std::size_t horizon, const StopRule& stop,
                                 std::uint64_t walk_seed);

struct WalkRecord {
  std::size_t replicate = 0;
  std::uint64_t env_seed = 0;
  std::uint64_t walk_seed = 0;
  Point start;
  WalkOutcome outcome;
  std::optional<Path> path;
};

struct AnnealedOptions {
  std::size_t n_paths = 1;
  std::size_t horizon = 0;
  StopRule stop = stop::FixedLength{};
  std::uint64_t seed = 0;
  Point start{};
  bool keep_paths = false;
  unsigned workers = 1;
};

struct PathEnsemble {
  int dim = 1;
  std::size_t horizon = 0;
  std::vector<WalkRecord> records;
};

/// Seeds of replicate i under master `seed`.
std::uint64_t replicate_env_seed(std::uint64_t seed, std::size_t replicate);
std::uint64_t replicate_walk_seed(std::uint64_t seed, std::size_t replicate);

/// Each replicate draws a fresh environment and walk from its own seeds, so
/// the ensemble does not depend on `workers`.
PathEnsemble run_annealed(const EnvironmentModel& model, const AnnealedOptions& options);

struct VelocityEstimate {
  Vec mean{};
  Vec half_width{};
  std::size_t n = 0;
};

/// Componentwise mean of (X_n - X_0)/n over replicates, n the step count.
VelocityEstimate velocity_estimate(const PathEnsemble& ensemble, double z = kDefaultZ);

}  // namespace rwre
