#include "rwre/path_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rwre/errors.hpp"

namespace rwre {

namespace {

// Weights e^{-g i / 2}, i >= 0, grown on demand.
class DecayTable {
 public:
  explicit DecayTable(double g) : g_(g) {}
  double operator()(Coord i) {
    const auto k = static_cast<std::size_t>(i);
    while (table_.size() <= k) table_.push_back(std::exp(-0.5 * g_ * static_cast<double>(table_.size())));
    return table_[k];
  }

 private:
  double g_;
  std::vector<double> table_;
};

struct ZkTerms {
  std::size_t card = 0;
  double decay_sum = 0.0;
};

double log_z(const ZkTerms& t, const MixingConstants& c) {
  double out = -static_cast<double>(t.card) * std::log(c.kappa);
  if (c.mode == MixingMode::Gibbs) out += c.c_tilde * t.decay_sum;
  return out;
}

// Accumulates the Z_k terms contributed by one point with projection q.
void add_point(ZkTerms& t, double q, Coord k, const MixingConstants& c, DecayTable& decay) {
  const Coord cut = c.mode == MixingMode::Gibbs ? k - c.r : k - c.gap;
  if (q >= static_cast<double>(cut) - 1e-9) ++t.card;
  if (c.mode == MixingMode::Gibbs) {
    const Coord j = slab_index(q);
    if (j <= k - c.r) t.decay_sum += decay(k - j);
  }
}

}  // namespace

void MixingConstants::validate() const {
  if (!(kappa > 0.0 && kappa < 1.0)) throw ConfigError("mixing constants: kappa must be in (0,1)");
  if (mode == MixingMode::Gibbs) {
    if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("mixing constants: g must be > 0");
    if (r < 0) throw ConfigError("mixing constants: r must be >= 0");
    if (!(c_tilde >= 0.0) || !std::isfinite(c_tilde))
      throw ConfigError("mixing constants: c_tilde must be finite and >= 0");
  } else if (gap < 1) {
    throw ConfigError("mixing constants: L must be >= 1");
  }
}

double default_c_tilde(double c, double g, Coord r, int dim) {
  const double q = std::exp(-0.5 * g);
  const double surface = std::pow((1.0 + q) / (1.0 - q), dim - 1);
  return c * std::exp(g * static_cast<double>(r)) * surface;
}

std::vector<double> PathStats::zk() const {
  std::vector<double> out;
  out.reserve(log_zk.size());
  for (double v : log_zk) out.push_back(std::exp(v));
  return out;
}

PathStats path_stats(const Path& path, const PathStatsRequest& request) {
  if (path.positions.empty()) throw ConfigError("path_stats: empty path");
  const auto& xs = path.positions;
  std::vector<double> q(xs.size());
  for (std::size_t n = 0; n < xs.size(); ++n) q[n] = dot(xs[n], request.ell);

  PathStats out;
  out.min_ell = *std::min_element(q.begin(), q.end());
  for (double v : q) ++out.slab_counts[slab_index(v)];

  std::vector<double> levels = request.tau_levels;
  for (const auto& w : request.vhat) levels.push_back(static_cast<double>(w.j));
  std::vector<std::optional<std::size_t>> taus;
  for (double s : levels) {
    std::optional<std::size_t> tau;
    for (std::size_t n = 0; n < q.size(); ++n)
      if (q[n] >= s - 1e-9) {
        tau = n;
        break;
      }
    taus.push_back(tau);
  }
  out.tau.assign(taus.begin(), taus.begin() + static_cast<long>(request.tau_levels.size()));

  for (std::size_t w = 0; w < request.vhat.size(); ++w) {
    const auto& win = request.vhat[w];
    const auto tau = taus[request.tau_levels.size() + w];
    if (!tau) {
      out.vhat.push_back(std::nullopt);
      continue;
    }
    std::size_t count = 0;
    for (std::size_t n = 0; n <= *tau; ++n)
      if (q[n] >= static_cast<double>(win.i1) - 1e-9 && q[n] < static_cast<double>(win.i2) - 1e-9)
        ++count;
    out.vhat.push_back(count);
  }

  if (!request.k_list.empty()) {
    if (!request.constants) throw ConfigError("path_stats: Z_k requested without mixing constants");
    const auto& c = *request.constants;
    c.validate();
    if (path.end() != Point{})
      throw ConfigError("path_stats: Z_k needs a recentred path ending at the origin");
    DecayTable decay(c.g);
    for (Coord k : request.k_list) {
      ZkTerms t;
      for (double v : q) add_point(t, v, k, c, decay);
      out.hk_card.push_back(t.card);
      out.log_zk.push_back(log_z(t, c));
    }
  }
  return out;
}

std::vector<std::vector<double>> prefix_log_zk(const Path& path, const Vec& ell,
                                               const std::vector<Coord>& k_list,
                                               const MixingConstants& constants, std::size_t N) {
  constants.validate();
  if (path.positions.size() < N)
    throw ConfigError("prefix_log_zk: path has " + std::to_string(path.positions.size()) +
                      " points, fewer than N = " + std::to_string(N));
  DecayTable decay(constants.g);
  std::vector<std::vector<double>> out(k_list.size(), std::vector<double>(N));
  std::vector<double> rel;
  for (std::size_t n = 0; n < N; ++n) {
    rel.clear();
    for (std::size_t m = 0; m <= n; ++m) rel.push_back(dot(path.positions[m] - path.positions[n], ell));
    for (std::size_t ki = 0; ki < k_list.size(); ++ki) {
      ZkTerms t;
      for (double v : rel) add_point(t, v, k_list[ki], constants, decay);
      out[ki][n] = log_z(t, constants);
    }
  }
  return out;
}

}  // namespace rwre
