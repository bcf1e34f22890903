#pragma once

#include <cstddef>

namespace rwre {

struct SingularReport {
  int n = 0;
  int k = 0;
  /// Total variation between the laws of the environment seen from X_n and
  /// from X_k, both restricted to the half-plane {y : y.(1,1) >= -k}.
  double tv_n_vs_k = 0.0;
  /// The same restriction of the view from X_n against the environment law
  /// itself (i.i.d. fair arrows).
  double tv_n_vs_environment = 0.0;
  std::size_t constrained_sites = 0;
  std::size_t nodes = 0;
};

inline constexpr std::size_t kDefaultSingularNodeCap = 50'000'000;

/// Exact comparison for the north-east arrow field. Every walk of n steps is
/// enumerated (2^n of them, each of probability 2^-n); each fixes the arrows
/// on the sites it left, and all other arrows stay fair coins. The n-versus-k
/// distance is the L1 norm of the signed difference of the two mixtures,
/// found by a depth-first split over constrained sites after cancelling
/// identical components. The distance to the environment law uses the
/// number N of level-k sites whose arrow paths reach the walker:
/// TV = E|N - 1| / 2.
/// Requires 0 <= k <= n <= 20; throws EnumerationCapExceeded past node_cap.
SingularReport singular_restriction_check(int n, int k,
                                          std::size_t node_cap = kDefaultSingularNodeCap);

}  // namespace rwre
