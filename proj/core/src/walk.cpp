#include "rwre/walk.hpp"

#include <cmath>

#include "rwre/errors.hpp"
#include "rwre/hash.hpp"
#include "rwre/parallel.hpp"

namespace rwre {

namespace {

template <class Visit>
WalkOutcome walk(const Environment& env, const Point& start, std::size_t horizon,
                 const StopRule& stop, std::uint64_t walk_seed, Visit&& visit) {
  SplitMix64 rng(walk_seed);
  Point x = start;
  visit(x);
  WalkOutcome out{x, 0, false};
  switch (stop.index()) {
    case 0: {
      for (std::size_t n = 0; n < horizon; ++n) {
        x += env.draw_step(x, rng.uniform());
        visit(x);
      }
      out.steps = horizon;
      out.stopped = true;
      break;
    }
    case 1: {
      const auto& volume = std::get<stop::ExitVolume>(stop).volume;
      if (!volume) throw ConfigError("exit-volume stop rule without a volume");
      std::size_t n = 0;
      while (volume->contains(x) && n < horizon) {
        x += env.draw_step(x, rng.uniform());
        visit(x);
        ++n;
      }
      out.steps = n;
      out.stopped = !volume->contains(x);
      break;
    }
    case 2: {
      const auto& rule = std::get<stop::HitLevel>(stop);
      std::size_t n = 0;
      while (dot(x, rule.ell) < rule.level && n < horizon) {
        x += env.draw_step(x, rng.uniform());
        visit(x);
        ++n;
      }
      out.steps = n;
      out.stopped = dot(x, rule.ell) >= rule.level;
      break;
    }
    default:
      break;
  }
  out.endpoint = x;
  return out;
}

}  // namespace

Path recentre(const Path& path) {
  if (path.positions.empty()) throw ConfigError("recentre: empty path");
  Path out = path;
  const Point last = path.end();
  for (auto& x : out.positions) x -= last;
  return out;
}

Path run_quenched(const Environment& env, const Point& start, std::size_t horizon,
                  const StopRule& stop, std::uint64_t walk_seed) {
  Path path;
  if (stop.index() == 0) path.positions.reserve(horizon + 1);
  walk(env, start, horizon, stop, walk_seed, [&](const Point& x) { path.positions.push_back(x); });
  return path;
}

WalkOutcome run_quenched_outcome(const Environment& env, const Point& start,
                                 std::size_t horizon, const StopRule& stop,
                                 std::uint64_t walk_seed) {
  return walk(env, start, horizon, stop, walk_seed, [](const Point&) {});
}

std::uint64_t replicate_env_seed(std::uint64_t seed, std::size_t replicate) {
  return derive_seed(derive_seed(seed, "env"), static_cast<std::uint64_t>(replicate));
}

std::uint64_t replicate_walk_seed(std::uint64_t seed, std::size_t replicate) {
  return derive_seed(derive_seed(seed, "walk"), static_cast<std::uint64_t>(replicate));
}

PathEnsemble run_annealed(const EnvironmentModel& model, const AnnealedOptions& options) {
  if (options.n_paths < 1) throw ConfigError("run_annealed: n_paths must be >= 1");
  model.validate();
  PathEnsemble ensemble;
  ensemble.dim = model.dim;
  ensemble.horizon = options.horizon;
  ensemble.records.resize(options.n_paths);
  parallel_for(options.n_paths, options.workers, [&](std::size_t i) {
    WalkRecord& rec = ensemble.records[i];
    rec.replicate = i;
    rec.env_seed = replicate_env_seed(options.seed, i);
    rec.walk_seed = replicate_walk_seed(options.seed, i);
    const Environment env(model.with_seed(rec.env_seed));
    rec.start = options.start;
    if (options.keep_paths) {
      Path path;
      rec.outcome = walk(env, options.start, options.horizon, options.stop, rec.walk_seed,
                         [&](const Point& x) { path.positions.push_back(x); });
      rec.path = std::move(path);
    } else {
      rec.outcome =
          run_quenched_outcome(env, options.start, options.horizon, options.stop, rec.walk_seed);
    }
  });
  return ensemble;
}

VelocityEstimate velocity_estimate(const PathEnsemble& ensemble, double z) {
  if (ensemble.records.empty()) throw EstimationError("velocity_estimate: empty ensemble");
  std::array<RunningStats, kMaxDim> acc;
  for (const auto& rec : ensemble.records) {
    if (rec.outcome.steps == 0) throw EstimationError("velocity_estimate: path with no steps");
    const Point disp = rec.outcome.endpoint - rec.start;
    const double n = static_cast<double>(rec.outcome.steps);
    for (int k = 0; k < ensemble.dim; ++k)
      acc[static_cast<std::size_t>(k)].push(static_cast<double>(disp[static_cast<std::size_t>(k)]) / n);
  }
  VelocityEstimate out;
  out.n = ensemble.records.size();
  for (int k = 0; k < ensemble.dim; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    out.mean[kk] = acc[kk].mean();
    out.half_width[kk] = z * acc[kk].std_error();
  }
  return out;
}

}  // namespace rwre
