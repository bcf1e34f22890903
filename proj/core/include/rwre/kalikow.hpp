#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/stats.hpp"
#include "rwre/volume.hpp"
#include "rwre/walk.hpp"

namespace rwre {

struct KalikowOptions {
  std::size_t n_env = 200;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  double z = kDefaultZ;
};

/// Occupation-weighted drift ratio at x for one volume:
/// E[visits_0(x) D(T^x omega).ell] / E[visits_0(x)], visits counted exactly.
struct KalikowRatio {
  Point x;
  RatioEstimate estimate;
};

/// Ratios for every x in U from one set of environment draws (each draw
/// gives the whole occupancy row). U must contain 0 and be M-connected.
std::vector<KalikowRatio> kalikow_ratios(const EnvironmentModel& model, const FiniteVolume& volume,
                                         const Vec& ell, const KalikowOptions& options);

KalikowRatio kalikow_ratio(const EnvironmentModel& model, const FiniteVolume& volume,
                           const Point& x, const Vec& ell, const KalikowOptions& options);

struct VolumeScan {
  std::string id;
  std::size_t n_sites = 0;
  std::uint64_t seed = 0;
  std::vector<KalikowRatio> ratios;
  /// Sites never visited in any draw (denominator identically 0); excluded.
  std::size_t unreachable = 0;
  double min_ratio = 0.0;
  double min_half_width = 0.0;
  Point argmin;
  /// Every x whose confidence interval reaches down to the minimum's.
  std::vector<Point> candidates;
};

struct KalikowReport {
  Vec ell{};
  std::vector<VolumeScan> per_volume;
  /// Running infimum over scanned volumes (an upper estimate of epsilon).
  std::vector<double> running_inf;
  double epsilon_hat = 0.0;
  double epsilon_half_width = 0.0;
  std::size_t n_env = 0;
  std::vector<Point> flags;
};

/// Scans a nested family; every volume gets fresh environment draws from a
/// seed derived from (options.seed, volume index).
KalikowReport kalikow_epsilon(const EnvironmentModel& model,
                              std::span<const FiniteVolume> family, const Vec& ell,
                              const KalikowOptions& options,
                              std::span<const std::string> ids = {});

struct EffectiveConditionParams {
  double kappa = 0.5;
  double a = 1.0;
  double b = 1.0;
  Estimate e_dplus;
  Estimate e_dminus;

  void validate() const;
};

struct EffectiveConditionVerdict {
  /// E(D.ell+) > kappa^-1 B A^-1 E(D.ell-) at the point estimates.
  bool holds = false;
  /// The margin stays positive over the whole confidence band.
  bool holds_with_confidence = false;
  double margin = 0.0;
  double margin_half_width = 0.0;
  /// kappa E(A D.ell+ - kappa^-1 B D.ell-).
  double implied_epsilon = 0.0;
  double implied_epsilon_half_width = 0.0;
};

EffectiveConditionVerdict effective_condition(const EffectiveConditionParams& params);

struct DriftMoments {
  Estimate e_dplus;
  Estimate e_dminus;
  std::size_t draws = 0;
};

/// Plain Monte Carlo for E(D.ell+) and E(D.ell-). Each draw is a fresh
/// realization: its value at the origin, or for Gibbs windows the average
/// over the window interior.
DriftMoments estimate_drift_moments(const EnvironmentModel& model, const Vec& ell,
                                    std::size_t draws, std::uint64_t seed, double z = kDefaultZ);

struct BallisticityReport {
  Estimate exit_projection;
  Estimate exit_time;
  /// E(X_{T_U}.ell) - epsilon * E(T_U), per-environment differences.
  Estimate slack;
  /// slack half-width plus the epsilon uncertainty times E(T_U).
  double combined_half_width = 0.0;
  bool holds = false;
};

BallisticityReport ballisticity_check(const EnvironmentModel& model, const FiniteVolume& volume,
                                      const Vec& ell, const Estimate& epsilon,
                                      const KalikowOptions& options);

struct SlabReport {
  Coord i = 0, j = 0;
  double step_bound = 0.0;
  Estimate vhat;
  std::size_t counted = 0;
  std::size_t censored = 0;
  double bound = 0.0;
  bool holds = false;
  /// Largest per-path sum of (X_{n+1} - X_n).ell over counted steps, and
  /// whether every path stayed within (j - i) + step_bound.
  double max_telescoped = 0.0;
  bool telescoping_ok = true;
};

/// Compares the mean of V-hat^j_{i, j+M} over the ensemble's kept paths with
/// 1 + eps^-1 ((j - i) + M ||ell||_1). Paths not reaching level j are censored.
SlabReport slab_occupancy_check(const PathEnsemble& ensemble, const Vec& ell, Coord i, Coord j,
                                Coord range, double epsilon_hat, double z = kDefaultZ);

}  // namespace rwre
