#include "rwre/pov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rwre/errors.hpp"
#include "rwre/hash.hpp"
#include "rwre/parallel.hpp"

namespace rwre {

CesaroSamples cesaro_samples(const EnvironmentModel& model, const LocalFunction& f,
                             const CesaroOptions& options) {
  if (options.n_start < 1 || options.n_paths < 2)
    throw ConfigError("cesaro: need n_start >= 1 and at least two paths");
  model.validate();
  CesaroSamples out;
  for (std::size_t i = 0; i <= options.doublings; ++i)
    out.schedule.push_back(options.n_start << i);
  const std::size_t horizon = out.schedule.back();
  out.values.assign(out.schedule.size(), std::vector<double>(options.n_paths));

  parallel_for(options.n_paths, options.workers, [&](std::size_t rep) {
    const Environment env(model.with_seed(replicate_env_seed(options.seed, rep)));
    const Path path =
        run_quenched(env, Point{}, horizon, stop::FixedLength{}, replicate_walk_seed(options.seed, rep));
    double sum = 0.0;
    std::size_t next = 0;
    for (std::size_t m = 1; m <= horizon; ++m) {
      sum += f(env, path.positions[m]);
      if (m == out.schedule[next]) {
        out.values[next][rep] = sum / static_cast<double>(m);
        ++next;
      }
    }
  });
  return out;
}

CesaroReport cesaro_report(const CesaroSamples& samples, double z) {
  CesaroReport report;
  std::size_t streak = 0;
  for (std::size_t i = 0; i < samples.schedule.size(); ++i) {
    CesaroPoint pt;
    pt.n = samples.schedule[i];
    pt.estimate = mean_estimate(samples.values[i], z);
    if (i > 0) {
      const auto& prev = report.points.back().estimate;
      pt.change = std::abs(pt.estimate.value - prev.value);
      const double width = 2.0 * std::max(pt.estimate.half_width, prev.half_width);
      streak = pt.change <= width ? streak + 1 : 0;
      if (streak >= 3 && !report.converged) {
        report.converged = true;
        report.converged_at = pt.n;
      }
    }
    report.points.push_back(pt);
  }
  return report;
}

CesaroReport cesaro_expectation(const EnvironmentModel& model, const LocalFunction& f,
                                const CesaroOptions& options) {
  return cesaro_report(cesaro_samples(model, f, options), options.z);
}

namespace {

struct DensityStage {
  std::vector<double> mu;
  std::vector<double> cesaro;
};

DensityStage density_stage(const Environment& env, const DensityOptions& o, Coord span, Coord pad) {
  const Coord block_lo = o.j_lo - span - o.block + 1;
  const Coord block_hi = o.j_lo - span;
  const Green1D green(env, block_lo - pad, o.j_hi + pad);
  DensityStage out;
  for (Coord j = o.j_lo; j <= o.j_hi; ++j) {
    const auto col = green.column(j);
    auto g = [&](Coord k) { return col[static_cast<std::size_t>(k - green.lo())]; };
    double block = 0.0;
    for (Coord k = block_lo; k <= block_hi; ++k) block += g(k);
    out.mu.push_back(block / static_cast<double>(o.block));
    double all = 0.0;
    for (Coord k = block_lo; k <= j; ++k) all += g(k);
    out.cesaro.push_back(all / static_cast<double>(j - block_lo + 1));
  }
  return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
  return out;
}

}  // namespace

double InvariantDensityTable::mu0_of(std::size_t draw) const {
  return draws[draw].mu[static_cast<std::size_t>(-j_lo)];
}

InvariantDensityTable invariant_density_1d(const EnvironmentModel& model,
                                           const DensityOptions& o) {
  model.validate();
  if (model.dim != 1) throw ConfigError("invariant density: model must be one-dimensional");
  if (o.j_lo > 0 || o.j_hi < 0) throw ConfigError("invariant density: j range must contain 0");
  if (o.block < 1 || o.span_start < 1 || o.pad < 1 || o.n_env < 2)
    throw ConfigError("invariant density: invalid options");
  const Coord m = model.range;

  InvariantDensityTable table;
  table.j_lo = o.j_lo;
  table.j_hi = o.j_hi;
  table.tolerance = o.tolerance;
  table.draws.resize(o.n_env);
  const std::uint64_t base = derive_seed(o.seed, "density");

  parallel_for(o.n_env, o.workers, [&](std::size_t e) {
    DensityDraw& d = table.draws[e];
    d.env_seed = derive_seed(base, static_cast<std::uint64_t>(e));
    const Environment env(model.with_seed(d.env_seed));
    Coord span = o.span_start;
    DensityStage prev = density_stage(env, o, span, o.pad);
    double gap = std::numeric_limits<double>::infinity();
    while (!(gap < o.tolerance)) {
      if (2 * span > o.span_max)
        throw ConvergenceError("invariant density: span exceeded " + std::to_string(o.span_max) +
                               " for environment seed " + std::to_string(d.env_seed) +
                               " (last change " + std::to_string(gap) + ")");
      span *= 2;
      DensityStage next = density_stage(env, o, span, o.pad);
      gap = max_abs_diff(prev.mu, next.mu);
      prev = std::move(next);
    }
    d.convergence_gap = gap;
    d.span = span;
    d.mu = prev.mu;
    d.cesaro = prev.cesaro;
    d.truncation_error = max_abs_diff(d.mu, density_stage(env, o, span, 2 * o.pad).mu);
    d.drift0 = env.drift_at(Point{})[0];

    for (Coord j = o.j_lo + m; j <= o.j_hi - m; ++j) {
      double inflow = 0.0;
      for (Coord i = j - m; i <= j + m; ++i)
        inflow += env.at(Point(i)).prob(Point(j - i)) * d.mu[static_cast<std::size_t>(i - o.j_lo)];
      d.harmonicity_residual = std::max(
          d.harmonicity_residual, std::abs(inflow - d.mu[static_cast<std::size_t>(j - o.j_lo)]));
    }
  });

  std::vector<double> mu0(o.n_env);
  for (std::size_t e = 0; e < o.n_env; ++e) {
    const auto& d = table.draws[e];
    mu0[e] = table.mu0_of(e);
    table.max_convergence_gap = std::max(table.max_convergence_gap, d.convergence_gap);
    table.max_truncation_error = std::max(table.max_truncation_error, d.truncation_error);
    table.max_harmonicity_residual =
        std::max(table.max_harmonicity_residual, d.harmonicity_residual);
  }
  table.mu0 = mean_estimate(mu0, o.z);
  return table;
}

RatioEstimate lln_velocity_from_density(const InvariantDensityTable& table, double z) {
  std::vector<double> num, den;
  for (std::size_t e = 0; e < table.draws.size(); ++e) {
    const double mu0 = table.mu0_of(e);
    num.push_back(mu0 * table.draws[e].drift0);
    den.push_back(mu0);
  }
  auto r = ratio_estimate(num, den, z);
  if (r.degenerate) throw EstimationError("lln velocity: E[mu_0] is indistinguishable from 0");
  return r;
}

const ZkCell& ZkAdmissibility::cell(std::size_t ki, std::size_t ai, std::size_t ni) const {
  return cells[(ki * a_grid.size() + ai) * n_list.size() + ni];
}

double ZkAdmissibility::best_fraction(std::size_t ki, std::size_t ni) const {
  double best = 0.0;
  for (std::size_t ai = 0; ai < a_grid.size(); ++ai)
    best = std::max(best, cell(ki, ai, ni).fraction.value);
  return best;
}

namespace {

void check_zk_grid(const std::vector<Coord>& k_list, const std::vector<double>& a_grid,
                   const std::vector<std::size_t>& n_list) {
  if (k_list.empty() || a_grid.empty() || n_list.empty())
    throw ConfigError("zk admissibility: empty k, a or N list");
  for (double a : a_grid)
    if (!(a > 0.0)) throw ConfigError("zk admissibility: a values must be > 0");
  for (std::size_t n : n_list)
    if (n < 1) throw ConfigError("zk admissibility: N must be >= 1");
}

}  // namespace

std::vector<double> zk_path_fractions(const Path& path, const Vec& ell,
                                      const std::vector<Coord>& k_list,
                                      const std::vector<double>& a_grid,
                                      const std::vector<std::size_t>& n_list,
                                      const MixingConstants& constants) {
  check_zk_grid(k_list, a_grid, n_list);
  const std::size_t n_max = *std::max_element(n_list.begin(), n_list.end());
  if (path.positions.size() < n_max + 1)
    throw ConfigError("zk admissibility: path shorter than the largest N");
  const auto logz = prefix_log_zk(path, ell, k_list, constants, n_max + 1);
  std::vector<double> out;
  out.reserve(k_list.size() * a_grid.size() * n_list.size());
  for (std::size_t ki = 0; ki < k_list.size(); ++ki)
    for (double a : a_grid) {
      const double log_a = std::log(a);
      for (std::size_t n : n_list) {
        std::size_t hits = 0;
        for (std::size_t m = 1; m <= n; ++m)
          if (logz[ki][m] <= log_a) ++hits;
        out.push_back(static_cast<double>(hits) / static_cast<double>(n));
      }
    }
  return out;
}

ZkAdmissibility zk_from_fractions(const std::vector<Coord>& k_list,
                                  const std::vector<double>& a_grid,
                                  const std::vector<std::size_t>& n_list,
                                  const std::vector<std::vector<double>>& per_path,
                                  double epsilon_ref, double threshold_factor, double z) {
  check_zk_grid(k_list, a_grid, n_list);
  if (per_path.size() < 2) throw ConfigError("zk admissibility: need at least two paths");
  const std::size_t n_cells = k_list.size() * a_grid.size() * n_list.size();
  ZkAdmissibility out;
  out.k_list = k_list;
  out.a_grid = a_grid;
  out.n_list = n_list;
  out.epsilon_ref = epsilon_ref;
  out.threshold = threshold_factor * epsilon_ref;
  std::vector<double> column(per_path.size());
  for (std::size_t idx = 0; idx < n_cells; ++idx) {
    for (std::size_t p = 0; p < per_path.size(); ++p) {
      if (per_path[p].size() != n_cells) throw ConfigError("zk admissibility: ragged fractions");
      column[p] = per_path[p][idx];
    }
    const std::size_t ni = idx % n_list.size();
    const std::size_t ai = (idx / n_list.size()) % a_grid.size();
    const std::size_t ki = idx / (n_list.size() * a_grid.size());
    ZkCell c;
    c.k = k_list[ki];
    c.a = a_grid[ai];
    c.n = n_list[ni];
    c.fraction = mean_estimate(column, z);
    c.below_threshold = c.fraction.value < out.threshold;
    out.cells.push_back(c);
  }
  return out;
}

ZkAdmissibility zk_admissibility(const PathEnsemble& ensemble, const Vec& ell,
                                 const std::vector<Coord>& k_list,
                                 const std::vector<double>& a_grid,
                                 const std::vector<std::size_t>& n_list,
                                 const MixingConstants& constants, double epsilon_ref,
                                 double threshold_factor, double z) {
  std::vector<std::vector<double>> per_path;
  for (const auto& rec : ensemble.records) {
    if (!rec.path) throw ConfigError("zk admissibility: ensemble was run without keep_paths");
    per_path.push_back(zk_path_fractions(*rec.path, ell, k_list, a_grid, n_list, constants));
  }
  return zk_from_fractions(k_list, a_grid, n_list, per_path, epsilon_ref, threshold_factor, z);
}

}  // namespace rwre
