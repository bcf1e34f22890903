#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/green.hpp"
#include "rwre/local_function.hpp"
#include "rwre/path_stats.hpp"
#include "rwre/stats.hpp"
#include "rwre/walk.hpp"

namespace rwre {

struct CesaroOptions {
  std::size_t n_start = 16;
  /// Number of doublings after n_start; the largest N is n_start * 2^doublings.
  std::size_t doublings = 6;
  std::size_t n_paths = 200;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  double z = kDefaultZ;
};

struct CesaroPoint {
  std::size_t n = 0;
  /// Annealed estimate of N^-1 sum_{m=1..N} E f(T^{X_m} omega).
  Estimate estimate;
  /// |estimate - previous estimate|; 0 for the first point.
  double change = 0.0;
};

struct CesaroReport {
  std::vector<CesaroPoint> points;
  /// Three successive doublings moved the estimate by less than the CI width.
  bool converged = false;
  std::size_t converged_at = 0;
};

/// Per-replicate running averages N^-1 sum_{m=1..N} f(T^{X_m} omega):
/// values[i][rep] at N = schedule[i].
struct CesaroSamples {
  std::vector<std::size_t> schedule;
  std::vector<std::vector<double>> values;
};

CesaroSamples cesaro_samples(const EnvironmentModel& model, const LocalFunction& f,
                             const CesaroOptions& options);
CesaroReport cesaro_report(const CesaroSamples& samples, double z = kDefaultZ);

CesaroReport cesaro_expectation(const EnvironmentModel& model, const LocalFunction& f,
                                const CesaroOptions& options);

struct DensityOptions {
  Coord j_lo = -5;
  Coord j_hi = 5;
  /// The averaging block starts span sites left of j_lo; span doubles from
  /// span_start until the density moves less than tolerance.
  Coord span_start = 32;
  Coord span_max = 4096;
  Coord block = 64;
  /// Absorbing padding beyond the block and beyond j_hi.
  Coord pad = 64;
  double tolerance = 1e-8;
  std::size_t n_env = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  double z = kDefaultZ;
};

/// Per-environment 1-D invariant density data.
struct DensityDraw {
  std::uint64_t env_seed = 0;
  /// mu_j for j = j_lo..j_hi.
  std::vector<double> mu;
  /// Plain Cesaro averages G_{i,j} = (j - i + 1)^-1 sum_{k=i..j} g_kj at the
  /// final i = j_lo - span - block + 1.
  std::vector<double> cesaro;
  double drift0 = 0.0;
  double convergence_gap = 0.0;
  double truncation_error = 0.0;
  double harmonicity_residual = 0.0;
  Coord span = 0;
};

struct InvariantDensityTable {
  Coord j_lo = 0, j_hi = 0;
  std::vector<DensityDraw> draws;
  Estimate mu0;
  double max_convergence_gap = 0.0;
  double max_truncation_error = 0.0;
  /// max over draws and interior j of |sum_i pi_ij mu_i - mu_j|.
  double max_harmonicity_residual = 0.0;
  double tolerance = 0.0;

  bool converged() const { return max_convergence_gap < tolerance; }
  double mu0_of(std::size_t draw) const;
};

/// mu_j is the limit of Cesaro averages of g_kj as k -> -infinity, taken as
/// the mean of g_kj over a block of `block` starts placed span sites to the
/// left of the j range; span doubles until every mu_j moves < tolerance.
/// Throws ConvergenceError past span_max, ConfigError for d != 1.
InvariantDensityTable invariant_density_1d(const EnvironmentModel& model,
                                           const DensityOptions& options);

/// E[mu_0 D] / E[mu_0] over the table's environment draws.
RatioEstimate lln_velocity_from_density(const InvariantDensityTable& table, double z = kDefaultZ);

struct ZkCell {
  Coord k = 0;
  double a = 0.0;
  std::size_t n = 0;
  /// Replicate mean of N^-1 #{1 <= m <= N : Z-tilde_{k,m} <= a}.
  Estimate fraction;
  bool below_threshold = false;
};

struct ZkAdmissibility {
  std::vector<Coord> k_list;
  std::vector<double> a_grid;
  std::vector<std::size_t> n_list;
  double epsilon_ref = 0.0;
  double threshold = 0.0;
  std::vector<ZkCell> cells;

  const ZkCell& cell(std::size_t ki, std::size_t ai, std::size_t ni) const;
  /// Largest fraction over the a grid at (k, N).
  double best_fraction(std::size_t ki, std::size_t ni) const;
};

/// For one path, N^-1 #{1 <= m <= N : Z-tilde_{k,m} <= a} for every cell,
/// laid out as (k_index * |a_grid| + a_index) * |n_list| + n_index. The path
/// needs at least max(n_list) + 1 points.
std::vector<double> zk_path_fractions(const Path& path, const Vec& ell,
                                      const std::vector<Coord>& k_list,
                                      const std::vector<double>& a_grid,
                                      const std::vector<std::size_t>& n_list,
                                      const MixingConstants& constants);

ZkAdmissibility zk_from_fractions(const std::vector<Coord>& k_list,
                                  const std::vector<double>& a_grid,
                                  const std::vector<std::size_t>& n_list,
                                  const std::vector<std::vector<double>>& per_path,
                                  double epsilon_ref, double threshold_factor = 0.25,
                                  double z = kDefaultZ);

/// Uses each kept path's prefixes (X_0 - X_m, ..., 0), m = 1..N. Cells below
/// threshold_factor * epsilon_ref are flagged.
ZkAdmissibility zk_admissibility(const PathEnsemble& ensemble, const Vec& ell,
                                 const std::vector<Coord>& k_list,
                                 const std::vector<double>& a_grid,
                                 const std::vector<std::size_t>& n_list,
                                 const MixingConstants& constants, double epsilon_ref,
                                 double threshold_factor = 0.25, double z = kDefaultZ);

}  // namespace rwre
