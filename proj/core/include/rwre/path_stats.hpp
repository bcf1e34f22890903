#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "rwre/lattice.hpp"
#include "rwre/walk.hpp"

namespace rwre {

enum class MixingMode { Gibbs, LDependent };

/// Constants entering the half-space density bound Z_k.
struct MixingConstants {
  double kappa = 0.5;
  Coord r = 1;
  double g = 1.0;
  double c_tilde = 1.0;
  MixingMode mode = MixingMode::Gibbs;
  Coord gap = 1;

  void validate() const;
};

/// C * e^{g r} * S with S = ((1 + e^{-g/2}) / (1 - e^{-g/2}))^{d-1}, the sum
/// of e^{-g|u|/2} over the transverse coordinates of a hyperplane.
double default_c_tilde(double c, double g, Coord r, int dim);

/// V-hat^j_{i1,i2} = #{n <= tau_j : i1 <= X_n.ell < i2}.
struct SlabWindow {
  Coord i1 = 0;
  Coord i2 = 0;
  Coord j = 0;
};

struct PathStatsRequest {
  Vec ell{1.0, 0.0, 0.0};
  std::vector<double> tau_levels;
  std::vector<Coord> k_list;
  std::vector<SlabWindow> vhat;
  std::optional<MixingConstants> constants;
};

struct PathStats {
  /// tau[i] for tau_levels[i]; nullopt when the level is never reached.
  std::vector<std::optional<std::size_t>> tau;
  /// V_j(w): number of path points with j - 1 <= X.ell < j.
  std::map<Coord, std::size_t> slab_counts;
  /// Per k: card(w cap H_{k-r}) (H_{k-L} in l-dependent mode), with multiplicity.
  std::vector<std::size_t> hk_card;
  /// Per k: log Z_k(w).
  std::vector<double> log_zk;
  /// Per window: V-hat, nullopt when tau_j is not reached (censored).
  std::vector<std::optional<std::size_t>> vhat;
  double min_ell = 0.0;

  std::vector<double> zk() const;
};

/// Computes the requested statistics. Z_k needs a path ending at the origin
/// (see recentre) and constants; otherwise ConfigError.
PathStats path_stats(const Path& path, const PathStatsRequest& request);

/// log Z_k of the recentred prefix (X_0 - X_n, ..., 0) for every n < N and
/// every k: out[k_index][n]. This is Z-tilde_{k,n}.
std::vector<std::vector<double>> prefix_log_zk(const Path& path, const Vec& ell,
                                               const std::vector<Coord>& k_list,
                                               const MixingConstants& constants, std::size_t N);

}  // namespace rwre
