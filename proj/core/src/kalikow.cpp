#include "rwre/kalikow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwre/errors.hpp"
#include "rwre/green.hpp"
#include "rwre/hash.hpp"
#include "rwre/parallel.hpp"

namespace rwre {

namespace {

void check_volume(const FiniteVolume& volume, const EnvironmentModel& model) {
  if (!volume.contains_origin()) throw ConfigError("kalikow: volume must contain the origin");
  if (!volume.m_connected()) throw ConfigError("kalikow: volume must be M-connected");
  if (volume.dim() != model.dim) throw ConfigError("kalikow: volume and model dimensions differ");
}

std::uint64_t env_seed(std::uint64_t seed, std::size_t draw) {
  return derive_seed(derive_seed(seed, "kalikow-env"), static_cast<std::uint64_t>(draw));
}

}  // namespace

std::vector<KalikowRatio> kalikow_ratios(const EnvironmentModel& model, const FiniteVolume& volume,
                                         const Vec& ell, const KalikowOptions& options) {
  check_volume(volume, model);
  if (options.n_env < 1) throw ConfigError("kalikow: n_env must be >= 1");
  const std::size_t n = volume.size();
  std::vector<std::vector<double>> num(n, std::vector<double>(options.n_env));
  std::vector<std::vector<double>> den(n, std::vector<double>(options.n_env));
  OccupancyOptions occ;
  occ.ell = ell;
  parallel_for(options.n_env, options.workers, [&](std::size_t e) {
    const Environment env(model.with_seed(env_seed(options.seed, e)));
    const auto table = occupancy(env, volume, Point{}, occ);
    for (std::size_t i = 0; i < n; ++i) {
      den[i][e] = table.visits[i];
      num[i][e] = table.visits[i] == 0.0
                      ? 0.0
                      : table.visits[i] * dot(env.drift_at(volume.sites()[i]), ell);
    }
  });
  std::vector<KalikowRatio> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({volume.sites()[i], ratio_estimate(num[i], den[i], options.z)});
  return out;
}

KalikowRatio kalikow_ratio(const EnvironmentModel& model, const FiniteVolume& volume,
                           const Point& x, const Vec& ell, const KalikowOptions& options) {
  const long idx = volume.index_of(x);
  if (idx < 0) throw ConfigError("kalikow_ratio: x is not in the volume");
  auto all = kalikow_ratios(model, volume, ell, options);
  return all[static_cast<std::size_t>(idx)];
}

KalikowReport kalikow_epsilon(const EnvironmentModel& model,
                              std::span<const FiniteVolume> family, const Vec& ell,
                              const KalikowOptions& options, std::span<const std::string> ids) {
  if (family.empty()) throw ConfigError("kalikow_epsilon: empty volume family");
  if (!ids.empty() && ids.size() != family.size())
    throw ConfigError("kalikow_epsilon: one id per volume expected");
  KalikowReport report;
  report.ell = ell;
  report.n_env = options.n_env;
  double inf = std::numeric_limits<double>::infinity();
  double inf_hw = 0.0;
  for (std::size_t v = 0; v < family.size(); ++v) {
    VolumeScan scan;
    scan.id = ids.empty() ? "U" + std::to_string(v) : ids[v];
    scan.n_sites = family[v].size();
    scan.seed = derive_seed(options.seed, static_cast<std::uint64_t>(v));
    KalikowOptions per = options;
    per.seed = scan.seed;
    scan.ratios = kalikow_ratios(model, family[v], ell, per);

    scan.min_ratio = std::numeric_limits<double>::infinity();
    for (const auto& r : scan.ratios) {
      if (r.estimate.den_mean == 0.0) {
        ++scan.unreachable;
        continue;
      }
      if (r.estimate.degenerate) {
        report.flags.push_back(r.x);
        continue;
      }
      if (r.estimate.ratio < scan.min_ratio) {
        scan.min_ratio = r.estimate.ratio;
        scan.min_half_width = r.estimate.half_width;
        scan.argmin = r.x;
      }
    }
    if (!std::isfinite(scan.min_ratio))
      throw EstimationError("kalikow_epsilon: no site of " + scan.id + " has a usable ratio");
    const double reach = scan.min_ratio + scan.min_half_width;
    for (const auto& r : scan.ratios) {
      if (r.estimate.den_mean == 0.0 || r.estimate.degenerate) continue;
      if (r.estimate.lower() <= reach) scan.candidates.push_back(r.x);
    }
    if (scan.candidates.size() > 1)
      report.flags.insert(report.flags.end(), scan.candidates.begin(), scan.candidates.end());

    if (scan.min_ratio < inf) {
      inf = scan.min_ratio;
      inf_hw = scan.min_half_width;
    }
    report.running_inf.push_back(inf);
    report.per_volume.push_back(std::move(scan));
  }
  report.epsilon_hat = inf;
  report.epsilon_half_width = inf_hw;
  return report;
}

void EffectiveConditionParams::validate() const {
  if (!(kappa > 0.0 && kappa < 1.0)) throw ConfigError("effective condition: kappa must be in (0,1)");
  if (!(a > 0.0) || !(b >= a) || !std::isfinite(b))
    throw ConfigError("effective condition: need 0 < A <= B < infinity");
  if (!(e_dplus.value >= 0.0) || !(e_dminus.value >= 0.0))
    throw ConfigError("effective condition: drift moments must be >= 0");
}

EffectiveConditionVerdict effective_condition(const EffectiveConditionParams& p) {
  p.validate();
  const double factor = p.b / (p.kappa * p.a);
  EffectiveConditionVerdict v;
  v.margin = p.e_dplus.value - factor * p.e_dminus.value;
  v.margin_half_width = p.e_dplus.half_width + factor * p.e_dminus.half_width;
  v.holds = v.margin > 0.0;
  v.holds_with_confidence = v.margin - v.margin_half_width > 0.0;
  v.implied_epsilon = p.kappa * p.a * p.e_dplus.value - p.b * p.e_dminus.value;
  v.implied_epsilon_half_width = p.kappa * p.a * p.e_dplus.half_width + p.b * p.e_dminus.half_width;
  return v;
}

DriftMoments estimate_drift_moments(const EnvironmentModel& model, const Vec& ell,
                                    std::size_t draws, std::uint64_t seed, double z) {
  if (draws < 2) throw ConfigError("drift moments: need at least two draws");
  model.validate();
  std::vector<double> plus(draws), minus(draws);
  const std::uint64_t base = derive_seed(seed, "drift-moments");
  if (const auto* g = std::get_if<law::GibbsWindow>(&model.law)) {
    // Interior sites, away from the fixed boundary by a quarter of the width.
    std::vector<Point> interior;
    Configuration box(model.dim, g->lo, g->hi, 0);
    for (const auto& x : box.sites()) {
      bool inside = true;
      for (int k = 0; k < model.dim; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const Coord margin = (g->hi[kk] - g->lo[kk]) / 4;
        if (x[kk] < g->lo[kk] + margin || x[kk] > g->hi[kk] - margin) inside = false;
      }
      if (inside) interior.push_back(x);
    }
    for (std::size_t d = 0; d < draws; ++d) {
      const Environment env(model.with_seed(derive_seed(base, static_cast<std::uint64_t>(d))));
      double sp = 0.0, sm = 0.0;
      for (const auto& x : interior) {
        const double v = dot(env.drift_at(x), ell);
        sp += std::max(v, 0.0);
        sm += std::max(-v, 0.0);
      }
      plus[d] = sp / static_cast<double>(interior.size());
      minus[d] = sm / static_cast<double>(interior.size());
    }
  } else {
    for (std::size_t d = 0; d < draws; ++d) {
      const Environment env(model.with_seed(derive_seed(base, static_cast<std::uint64_t>(d))));
      const double v = dot(env.drift_at(Point{}), ell);
      plus[d] = std::max(v, 0.0);
      minus[d] = std::max(-v, 0.0);
    }
  }
  return DriftMoments{mean_estimate(plus, z), mean_estimate(minus, z), draws};
}

BallisticityReport ballisticity_check(const EnvironmentModel& model, const FiniteVolume& volume,
                                      const Vec& ell, const Estimate& epsilon,
                                      const KalikowOptions& options) {
  check_volume(volume, model);
  if (options.n_env < 1) throw ConfigError("ballisticity: n_env must be >= 1");
  std::vector<double> proj(options.n_env), time(options.n_env), diff(options.n_env);
  OccupancyOptions occ;
  occ.ell = ell;
  const std::uint64_t base = derive_seed(options.seed, "ballisticity");
  parallel_for(options.n_env, options.workers, [&](std::size_t e) {
    const Environment env(model.with_seed(env_seed(base, e)));
    const auto table = occupancy(env, volume, Point{}, occ);
    proj[e] = table.expected_exit_projection;
    time[e] = table.expected_exit_time;
    diff[e] = proj[e] - epsilon.value * time[e];
  });
  BallisticityReport r;
  r.exit_projection = mean_estimate(proj, options.z);
  r.exit_time = mean_estimate(time, options.z);
  r.slack = mean_estimate(diff, options.z);
  r.combined_half_width = r.slack.half_width + epsilon.half_width * r.exit_time.value;
  // The occupancy solve is exact only up to round-off; an identity that holds
  // with equality must not fail on the last few bits.
  const double solve_tol = 1e-9 * std::max(1.0, r.exit_time.value);
  r.holds = r.slack.value >= -(r.combined_half_width + solve_tol);
  return r;
}

SlabReport slab_occupancy_check(const PathEnsemble& ensemble, const Vec& ell, Coord i, Coord j,
                                Coord range, double epsilon_hat, double z) {
  if (!(epsilon_hat > 0.0)) throw ConfigError("slab check: epsilon must be > 0");
  if (j < i) throw ConfigError("slab check: need i <= j");
  SlabReport r;
  r.i = i;
  r.j = j;
  r.step_bound = static_cast<double>(range) * l1_norm(ell);
  const double top = static_cast<double>(j) + r.step_bound;
  const double lo = static_cast<double>(i);
  const double limit = static_cast<double>(j - i) + r.step_bound;
  std::vector<double> counts;
  for (const auto& rec : ensemble.records) {
    if (!rec.path) throw ConfigError("slab check: ensemble was run without keep_paths");
    const auto& xs = rec.path->positions;
    std::optional<std::size_t> tau;
    for (std::size_t n = 0; n < xs.size(); ++n)
      if (dot(xs[n], ell) >= static_cast<double>(j) - 1e-9) {
        tau = n;
        break;
      }
    if (!tau) {
      ++r.censored;
      continue;
    }
    std::size_t count = 0;
    double telescoped = 0.0;
    for (std::size_t n = 0; n <= *tau; ++n) {
      const double q = dot(xs[n], ell);
      if (q >= lo - 1e-9 && q < top - 1e-9) {
        ++count;
        if (n < *tau) telescoped += dot(xs[n + 1], ell) - q;
      }
    }
    counts.push_back(static_cast<double>(count));
    r.max_telescoped = std::max(r.max_telescoped, telescoped);
    if (telescoped > limit + 1e-9) r.telescoping_ok = false;
  }
  r.counted = counts.size();
  if (counts.empty()) throw EstimationError("slab check: every path was censored");
  r.vhat = mean_estimate(counts, z);
  r.bound = 1.0 + limit / epsilon_hat;
  r.holds = r.vhat.value - r.vhat.half_width <= r.bound;
  return r;
}

}  // namespace rwre
