#include "rwre/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "rwre/errors.hpp"
#include "rwre/gibbs.hpp"
#include "rwre/hash.hpp"
#include "rwre/kalikow.hpp"
#include "rwre/local_function.hpp"
#include "rwre/mixing.hpp"
#include "rwre/path_stats.hpp"
#include "rwre/pov.hpp"
#include "rwre/singular.hpp"
#include "rwre/stats.hpp"
#include "rwre/volume.hpp"
#include "rwre/walk.hpp"

namespace fs = std::filesystem;

namespace rwre {

std::string artifact_version() { return RWRE_VERSION; }

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"simulate",    "kalikow", "density1d",
                                              "pov-cesaro",  "zk",      "gibbs-check",
                                              "singular-ne", "reproduce"};
  return kinds;
}

namespace {

bool needs_model(const std::string& kind) {
  return kind == "simulate" || kind == "kalikow" || kind == "density1d" || kind == "pov-cesaro" ||
         kind == "zk";
}

// JSON has no NaN or infinity; such values are written as null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_or_nan(const Json& v) {
  return v.is_number() ? v.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

Json estimate_json(const Estimate& e) {
  return Json{{"value", number(e.value)}, {"half_width", number(e.half_width)}, {"n", e.n}};
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

struct Context {
  const ExperimentConfig& config;
  JsonNode params;
  std::uint64_t seed;
  unsigned workers;
  int dim = 1;
};

Vec ell_param(const Context& ctx, int dim) {
  if (ctx.params.has("ell")) return vec_from_json(ctx.params["ell"], dim);
  return Vec{1.0, 0.0, 0.0};
}

std::size_t size_param(const Context& ctx, std::string_view key, std::size_t fallback) {
  const auto v = ctx.params.get_int_or(key, static_cast<std::int64_t>(fallback));
  if (v < 0) ctx.params[key].fail("expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

// ---------------------------------------------------------------- simulate

StopRule stop_param(const Context& ctx, int dim, Coord range) {
  if (!ctx.params.has("stop")) return stop::FixedLength{};
  const auto s = ctx.params["stop"];
  if (s.raw().is_string()) {
    if (s.as_string() == "fixed") return stop::FixedLength{};
    s.fail("expected \"fixed\" or an object");
  }
  if (s.has("hit_level")) {
    stop::HitLevel h;
    h.level = s["hit_level"].as_double();
    h.ell = s.has("ell") ? vec_from_json(s["ell"], dim) : ell_param(ctx, dim);
    return h;
  }
  if (s.has("exit_box")) {
    const Coord radius = s["exit_box"].as_int();
    return stop::ExitVolume{
        std::make_shared<const FiniteVolume>(FiniteVolume::centred_box(radius, dim, range))};
  }
  s.fail("expected \"hit_level\" or \"exit_box\"");
}

std::vector<Json> run_simulate(const Context& ctx, const EnvironmentModel& model) {
  AnnealedOptions o;
  o.n_paths = size_param(ctx, "n_paths", 1000);
  o.horizon = size_param(ctx, "horizon", 100000);
  o.stop = stop_param(ctx, model.dim, model.range);
  o.seed = ctx.seed;
  o.workers = ctx.workers;
  if (ctx.params.has("start")) o.start = point_from_json(ctx.params["start"], model.dim);
  const auto ensemble = run_annealed(model, o);
  std::vector<Json> records;
  for (const auto& r : ensemble.records)
    records.push_back(Json{{"kind", "walk"},
                           {"replicate", r.replicate},
                           {"env_seed", r.env_seed},
                           {"walk_seed", r.walk_seed},
                           {"start", point_to_json(r.start, model.dim)},
                           {"endpoint", point_to_json(r.outcome.endpoint, model.dim)},
                           {"steps", r.outcome.steps},
                           {"stopped", r.outcome.stopped}});
  return records;
}

Json summarize_simulate(const std::vector<Json>& records, int dim) {
  std::vector<RunningStats> v(static_cast<std::size_t>(dim));
  RunningStats steps;
  std::size_t stopped = 0, n = 0;
  for (const auto& r : records) {
    if (r["kind"] != "walk") continue;
    ++n;
    const auto s = r["steps"].get<std::size_t>();
    steps.push(static_cast<double>(s));
    if (r["stopped"].get<bool>()) ++stopped;
    if (s == 0) continue;
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double disp = r["endpoint"][k].get<double>() - r["start"][k].get<double>();
      v[k].push(disp / static_cast<double>(s));
    }
  }
  Json vel = Json::array(), hw = Json::array();
  for (const auto& s : v) {
    vel.push_back(number(s.mean()));
    hw.push_back(number(kDefaultZ * s.std_error()));
  }
  return Json{{"paths", n},
              {"velocity", vel},
              {"velocity_half_width", hw},
              {"mean_steps", number(steps.mean())},
              {"stopped_fraction", n ? static_cast<double>(stopped) / static_cast<double>(n) : 0.0}};
}

// ----------------------------------------------------------------- kalikow

std::vector<Json> run_kalikow(const Context& ctx, const EnvironmentModel& model) {
  const Vec ell = ell_param(ctx, model.dim);
  std::vector<Coord> radii;
  if (ctx.params.has("radii")) {
    for (auto r : ctx.params["radii"].as_ints()) radii.push_back(r);
  } else {
    const auto k = ctx.params.get_int_or("boxes", 2);
    for (Coord r = 1; r <= k; ++r) radii.push_back(r);
  }
  if (radii.empty()) ctx.params.fail("no volumes requested");
  std::vector<FiniteVolume> family;
  std::vector<std::string> ids;
  for (Coord r : radii) {
    family.push_back(FiniteVolume::centred_box(r, model.dim, model.range));
    ids.push_back("box-" + std::to_string(r));
  }
  KalikowOptions o;
  o.n_env = size_param(ctx, "n_env", 200);
  o.seed = ctx.seed;
  o.workers = ctx.workers;
  o.z = ctx.params.get_or("z", kDefaultZ);

  std::vector<Json> records;
  for (std::size_t v = 0; v < family.size(); ++v) {
    KalikowOptions per = o;
    per.seed = derive_seed(o.seed, static_cast<std::uint64_t>(v));
    for (const auto& r : kalikow_ratios(model, family[v], ell, per))
      records.push_back(Json{{"kind", "kalikow-ratio"},
                             {"volume", ids[v]},
                             {"volume_index", v},
                             {"volume_seed", per.seed},
                             {"n_sites", family[v].size()},
                             {"x", point_to_json(r.x, model.dim)},
                             {"ratio", number(r.estimate.ratio)},
                             {"half_width", number(r.estimate.half_width)},
                             {"num_mean", number(r.estimate.num_mean)},
                             {"den_mean", number(r.estimate.den_mean)},
                             {"n", r.estimate.n},
                             {"degenerate", r.estimate.degenerate}});
  }

  if (ctx.params.has("effective")) {
    const auto eff = ctx.params["effective"];
    const auto draws = static_cast<std::size_t>(eff.get_int_or("draws", 2000));
    const auto moments = estimate_drift_moments(model, ell, draws, ctx.seed, o.z);
    double kappa = 0.0;
    if (eff.has("kappa")) {
      kappa = eff["kappa"].as_double();
    } else if (const auto rep = check_ellipticity(model, ell); rep.kappa_hat) {
      kappa = *rep.kappa_hat;
    } else {
      eff.fail("kappa is required for this model");
    }
    double a = 1.0, b = 1.0;
    if (const auto* g = std::get_if<law::GibbsWindow>(&model.law)) {
      const double c1 = g->spec.c1();
      a = 1.0 / (c1 * c1);
      b = c1 * c1;
    }
    a = eff.get_or("a", a);
    b = eff.get_or("b", b);
    records.push_back(Json{{"kind", "drift-moments"},
                           {"e_dplus", estimate_json(moments.e_dplus)},
                           {"e_dminus", estimate_json(moments.e_dminus)},
                           {"draws", moments.draws},
                           {"kappa", kappa},
                           {"a", a},
                           {"b", b}});
  }
  return records;
}

Estimate estimate_from(const Json& j) {
  Estimate e;
  e.value = number_or_nan(j["value"]);
  e.half_width = number_or_nan(j["half_width"]);
  e.n = j["n"].get<std::size_t>();
  return e;
}

Json summarize_kalikow(const std::vector<Json>& records) {
  std::map<std::size_t, std::pair<std::string, std::pair<double, double>>> per_volume;
  std::size_t unreachable = 0, degenerate = 0;
  for (const auto& r : records) {
    if (r["kind"] != "kalikow-ratio") continue;
    const auto v = r["volume_index"].get<std::size_t>();
    auto& slot = per_volume
                     .try_emplace(v, r["volume"].get<std::string>(),
                                  std::make_pair(std::numeric_limits<double>::infinity(), 0.0))
                     .first->second;
    if (number_or_nan(r["den_mean"]) == 0.0) {
      ++unreachable;
      continue;
    }
    if (r["degenerate"].get<bool>()) {
      ++degenerate;
      continue;
    }
    const double ratio = number_or_nan(r["ratio"]);
    if (ratio < slot.second.first) slot.second = {ratio, number_or_nan(r["half_width"])};
  }
  Json volumes = Json::array(), running = Json::array();
  double inf = std::numeric_limits<double>::infinity(), inf_hw = 0.0;
  for (const auto& [v, slot] : per_volume) {
    if (slot.second.first < inf) {
      inf = slot.second.first;
      inf_hw = slot.second.second;
    }
    volumes.push_back(Json{{"volume", slot.first},
                           {"min_ratio", number(slot.second.first)},
                           {"half_width", number(slot.second.second)}});
    running.push_back(number(inf));
  }
  Json out{{"volumes", volumes},
           {"running_inf", running},
           {"epsilon_hat", number(inf)},
           {"epsilon_half_width", number(inf_hw)},
           {"unreachable_sites", unreachable},
           {"degenerate_sites", degenerate}};
  for (const auto& r : records) {
    if (r["kind"] != "drift-moments") continue;
    EffectiveConditionParams p;
    p.kappa = r["kappa"].get<double>();
    p.a = r["a"].get<double>();
    p.b = r["b"].get<double>();
    p.e_dplus = estimate_from(r["e_dplus"]);
    p.e_dminus = estimate_from(r["e_dminus"]);
    const auto verdict = effective_condition(p);
    out["effective_condition"] = Json{{"holds", verdict.holds},
                                      {"holds_with_confidence", verdict.holds_with_confidence},
                                      {"margin", number(verdict.margin)},
                                      {"margin_half_width", number(verdict.margin_half_width)},
                                      {"implied_epsilon", number(verdict.implied_epsilon)},
                                      {"implied_epsilon_half_width",
                                       number(verdict.implied_epsilon_half_width)}};
  }
  return out;
}

// --------------------------------------------------------------- density1d

std::vector<Json> run_density(const Context& ctx, const EnvironmentModel& model) {
  DensityOptions o;
  o.j_lo = ctx.params.get_int_or("j_lo", o.j_lo);
  o.j_hi = ctx.params.get_int_or("j_hi", o.j_hi);
  o.span_start = ctx.params.get_int_or("span_start", o.span_start);
  o.span_max = ctx.params.get_int_or("span_max", o.span_max);
  o.block = ctx.params.get_int_or("block", o.block);
  o.pad = ctx.params.get_int_or("pad", o.pad);
  o.tolerance = ctx.params.get_or("tolerance", o.tolerance);
  o.n_env = size_param(ctx, "n_env", o.n_env);
  o.seed = ctx.seed;
  o.workers = ctx.workers;
  const auto table = invariant_density_1d(model, o);
  std::vector<Json> records;
  for (std::size_t e = 0; e < table.draws.size(); ++e) {
    const auto& d = table.draws[e];
    records.push_back(Json{{"kind", "density-draw"},
                           {"draw", e},
                           {"env_seed", d.env_seed},
                           {"j_lo", table.j_lo},
                           {"mu", d.mu},
                           {"cesaro", d.cesaro},
                           {"drift0", d.drift0},
                           {"convergence_gap", d.convergence_gap},
                           {"truncation_error", d.truncation_error},
                           {"harmonicity_residual", d.harmonicity_residual},
                           {"span", d.span}});
  }
  return records;
}

Json summarize_density(const std::vector<Json>& records, double z) {
  std::vector<double> mu0, num;
  double gap = 0.0, trunc = 0.0, harm = 0.0;
  for (const auto& r : records) {
    if (r["kind"] != "density-draw") continue;
    const auto at0 = static_cast<std::size_t>(-r["j_lo"].get<Coord>());
    const double m = r["mu"][at0].get<double>();
    mu0.push_back(m);
    num.push_back(m * r["drift0"].get<double>());
    gap = std::max(gap, r["convergence_gap"].get<double>());
    trunc = std::max(trunc, r["truncation_error"].get<double>());
    harm = std::max(harm, r["harmonicity_residual"].get<double>());
  }
  if (mu0.size() < 2) throw EstimationError("density summary: fewer than two draws");
  const auto v = ratio_estimate(num, mu0, z);
  return Json{{"draws", mu0.size()},
              {"mu0", estimate_json(mean_estimate(mu0, z))},
              {"velocity", number(v.ratio)},
              {"velocity_half_width", number(v.half_width)},
              {"velocity_degenerate", v.degenerate},
              {"max_convergence_gap", gap},
              {"max_truncation_error", trunc},
              {"max_harmonicity_residual", harm}};
}

// -------------------------------------------------------------- pov-cesaro

LocalFunction function_from_json(const JsonNode& node, int dim) {
  const std::string type = node["type"].as_string();
  const Point site = node.has("site") ? point_from_json(node["site"], dim) : Point{};
  if (type == "constant") return LocalFunction::constant(node["value"].as_double());
  if (type == "drift")
    return LocalFunction::drift_component(site, static_cast<int>(node.get_int_or("axis", 0)));
  if (type == "transition")
    return LocalFunction::transition(site, point_from_json(node["offset"], dim));
  if (type == "indicator")
    return LocalFunction::indicator(site, point_from_json(node["offset"], dim),
                                    node["lo"].as_double(), node["hi"].as_double());
  if (type == "product") {
    std::vector<LocalFunction> factors;
    const auto fs = node["factors"];
    for (std::size_t i = 0; i < fs.size(); ++i) factors.push_back(function_from_json(fs[i], dim));
    return LocalFunction::product(std::move(factors));
  }
  node["type"].fail("unknown function type \"" + type + "\"");
}

std::vector<Json> run_cesaro(const Context& ctx, const EnvironmentModel& model) {
  const LocalFunction f = ctx.params.has("function")
                              ? function_from_json(ctx.params["function"], model.dim)
                              : LocalFunction::drift_component(Point{}, 0);
  CesaroOptions o;
  o.n_start = size_param(ctx, "n_start", o.n_start);
  o.doublings = size_param(ctx, "doublings", o.doublings);
  o.n_paths = size_param(ctx, "n_paths", o.n_paths);
  o.seed = ctx.seed;
  o.workers = ctx.workers;
  const auto samples = cesaro_samples(model, f, o);
  std::vector<Json> records;
  for (std::size_t rep = 0; rep < o.n_paths; ++rep) {
    Json values = Json::array();
    for (std::size_t i = 0; i < samples.schedule.size(); ++i) values.push_back(samples.values[i][rep]);
    records.push_back(Json{{"kind", "cesaro-replicate"},
                           {"replicate", rep},
                           {"env_seed", replicate_env_seed(o.seed, rep)},
                           {"walk_seed", replicate_walk_seed(o.seed, rep)},
                           {"function", f.name(model.dim)},
                           {"schedule", samples.schedule},
                           {"values", values}});
  }
  return records;
}

Json summarize_cesaro(const std::vector<Json>& records, double z) {
  CesaroSamples samples;
  std::string name;
  for (const auto& r : records) {
    if (r["kind"] != "cesaro-replicate") continue;
    if (samples.schedule.empty()) {
      samples.schedule = r["schedule"].get<std::vector<std::size_t>>();
      samples.values.assign(samples.schedule.size(), {});
      name = r["function"].get<std::string>();
    }
    for (std::size_t i = 0; i < samples.schedule.size(); ++i)
      samples.values[i].push_back(r["values"][i].get<double>());
  }
  if (samples.schedule.empty()) throw EstimationError("cesaro summary: no replicates");
  const auto report = cesaro_report(samples, z);
  Json points = Json::array();
  for (const auto& p : report.points)
    points.push_back(Json{{"n", p.n},
                          {"value", number(p.estimate.value)},
                          {"half_width", number(p.estimate.half_width)},
                          {"change", number(p.change)}});
  const auto& last = report.points.back().estimate;
  return Json{{"function", name},
              {"points", points},
              {"estimate", number(last.value)},
              {"half_width", number(last.half_width)},
              {"converged", report.converged},
              {"converged_at", report.converged_at}};
}

// ---------------------------------------------------------------------- zk

struct ZkGrid {
  Vec ell;
  std::vector<Coord> k_list;
  std::vector<double> a_grid;
  std::vector<std::size_t> n_list;
};

ZkGrid zk_grid(const Context& ctx, int dim) {
  ZkGrid g;
  g.ell = ell_param(ctx, dim);
  if (ctx.params.has("k_list")) {
    for (auto k : ctx.params["k_list"].as_ints()) g.k_list.push_back(k);
  } else {
    g.k_list = {0, -1, -2, -3, -4, -5};
  }
  if (ctx.params.has("a_grid")) {
    g.a_grid = ctx.params["a_grid"].as_doubles();
  } else {
    for (int e = 0; e <= 12; ++e) g.a_grid.push_back(std::pow(10.0, e));
  }
  if (ctx.params.has("n_list")) {
    for (auto n : ctx.params["n_list"].as_ints()) g.n_list.push_back(static_cast<std::size_t>(n));
  } else {
    g.n_list = {1000};
  }
  return g;
}

std::vector<Json> run_zk(const Context& ctx, const EnvironmentModel& model) {
  const ZkGrid g = zk_grid(ctx, model.dim);
  const MixingConstants constants = constants_from_json(ctx.params["constants"]);
  AnnealedOptions o;
  o.n_paths = size_param(ctx, "n_paths", 200);
  o.horizon = *std::max_element(g.n_list.begin(), g.n_list.end());
  o.seed = ctx.seed;
  o.workers = ctx.workers;
  o.keep_paths = true;
  const auto ensemble = run_annealed(model, o);
  std::vector<Json> records;
  for (const auto& r : ensemble.records)
    records.push_back(Json{{"kind", "zk-replicate"},
                           {"replicate", r.replicate},
                           {"env_seed", r.env_seed},
                           {"walk_seed", r.walk_seed},
                           {"fractions", zk_path_fractions(*r.path, g.ell, g.k_list, g.a_grid,
                                                           g.n_list, constants)}});
  return records;
}

Json summarize_zk(const std::vector<Json>& records, const Context& ctx, int dim) {
  const ZkGrid g = zk_grid(ctx, dim);
  const double eps = ctx.params["epsilon_ref"].as_double();
  const double factor = ctx.params.get_or("threshold_factor", 0.25);
  std::vector<std::vector<double>> per_path;
  for (const auto& r : records)
    if (r["kind"] == "zk-replicate") per_path.push_back(r["fractions"].get<std::vector<double>>());
  const auto adm = zk_from_fractions(g.k_list, g.a_grid, g.n_list, per_path, eps, factor);
  Json best = Json::array();
  bool admissible = true;
  for (std::size_t ki = 0; ki < g.k_list.size(); ++ki)
    for (std::size_t ni = 0; ni < g.n_list.size(); ++ni) {
      const double b = adm.best_fraction(ki, ni);
      best.push_back(Json{{"k", g.k_list[ki]}, {"n", g.n_list[ni]}, {"best_fraction", b}});
      if (ni + 1 == g.n_list.size() && b < adm.threshold) admissible = false;
    }
  return Json{{"paths", per_path.size()},
              {"epsilon_ref", eps},
              {"threshold", adm.threshold},
              {"best", best},
              {"admissible_at_largest_n", admissible}};
}

// ------------------------------------------------------------- gibbs-check

std::vector<Point> sites_param(const JsonNode& node, int dim) {
  std::vector<Point> out;
  if (node.raw().is_object()) {
    const Point lo = point_from_json(node["lo"], dim);
    const Point hi = point_from_json(node["hi"], dim);
    return Configuration(dim, lo, hi, 0).sites();
  }
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(point_from_json(node[i], dim));
  return out;
}

std::vector<Json> run_gibbs(const Context& ctx) {
  const GibbsSpec spec = gibbs_from_json(ctx.params["spec"]);
  const int dim = spec.dim;
  const auto volume = sites_param(ctx.params["volume"], dim);
  BoundaryScan scan;
  scan.seed = ctx.seed;
  scan.trials = size_param(ctx, "trials", scan.trials);
  SurrogateOptions sur;
  sur.cap = size_param(ctx, "surrogate_cap", std::size_t{1} << 22);
  sur.tolerance = ctx.params.get_or("surrogate_tolerance", sur.tolerance);
  const auto boundary = outer_boundary(volume, spec.range, dim);

  std::vector<Json> records;
  std::vector<DsMixingResult> ds;
  for (const auto& x : boundary)
    for (const auto& y : volume) {
      const std::vector<Point> lambda{y};
      const auto r = ds_mixing_check(spec, volume, lambda, x, scan);
      ds.push_back(r);
      records.push_back(Json{{"kind", "ds"},
                             {"x", point_to_json(x, dim)},
                             {"lambda", Json::array({point_to_json(y, dim)})},
                             {"dist", r.dist},
                             {"max_distance", r.max_distance},
                             {"pairs", r.pairs},
                             {"exhaustive", r.exhaustive}});
    }
  const DecayFit fit = fit_decay(ds);
  const double G = ctx.params.get_or("G", fit.G);
  const double g = ctx.params.get_or("g", fit.g);
  const auto cert = make_certificate(spec, G, g, ds);

  for (const auto& x : boundary) {
    const auto r = density_ratio_check(spec, volume, x, scan);
    records.push_back(Json{{"kind", "density-ratio"},
                           {"x", point_to_json(x, dim)},
                           {"max_ratio", r.max_ratio},
                           {"c1", r.c1},
                           {"instances", r.instances},
                           {"holds", r.holds}});
  }

  const std::set<Point> inside(volume.begin(), volume.end());
  const auto ball = sup_ball(dim, spec.range);
  std::vector<Point> deep;
  for (const auto& y : volume)
    if (std::all_of(ball.begin(), ball.end(), [&](const Point& e) { return inside.count(y + e) > 0; }))
      deep.push_back(y);
  for (const auto& x : boundary)
    for (const auto& y : deep) {
      const std::vector<Point> lambda{y};
      const auto r = single_site_flip_check(spec, volume, lambda, x, cert, scan);
      records.push_back(Json{{"kind", "flip"},
                             {"x", point_to_json(x, dim)},
                             {"lambda", Json::array({point_to_json(y, dim)})},
                             {"max_deviation", r.max_deviation},
                             {"bound", r.bound},
                             {"worst_ratio", number(r.worst_ratio)},
                             {"instances", r.instances},
                             {"holds", r.holds}});
    }

  std::vector<Coord> gaps;
  if (ctx.params.has("h_gaps")) {
    for (auto d : ctx.params["h_gaps"].as_ints()) gaps.push_back(d);
  } else {
    gaps = {spec.range + 1, spec.range + 2, spec.range + 3};
  }
  std::vector<Point> lambda_sites = volume;
  if (ctx.params.has("lambda_sites")) lambda_sites = sites_param(ctx.params["lambda_sites"], dim);
  for (const auto& y : lambda_sites)
    for (Coord d : gaps) {
      const std::vector<Point> lambda{y};
      const Coord h = y[0] + d;
      const auto r = conditional_ratio_check(spec, h, lambda, cert, sur);
      Json fns = Json::array();
      for (const auto& f : r.functions) fns.push_back(Json{{"name", f.name}, {"max_ratio", f.max_ratio}});
      records.push_back(Json{{"kind", "conditional-ratio"},
                             {"lambda", Json::array({point_to_json(y, dim)})},
                             {"h", h},
                             {"max_ratio", r.max_ratio},
                             {"exponent_sum", r.exponent_sum},
                             {"tail_bound", r.tail_bound},
                             {"bound", number(r.bound)},
                             {"holds", r.holds},
                             {"surrogate_radius", r.surrogate_radius},
                             {"surrogate_change", r.surrogate_change},
                             {"surrogate_converged", r.surrogate_converged},
                             {"functions", fns}});
    }

  const auto sb = site_conditional_bounds(spec, sur);
  records.push_back(Json{{"kind", "site-bounds"},
                         {"observed_min", sb.observed_min},
                         {"observed_max", sb.observed_max},
                         {"a", sb.a},
                         {"b", sb.b},
                         {"holds", sb.holds}});
  records.push_back(Json{{"kind", "certificate"},
                         {"G", cert.G},
                         {"g", cert.g},
                         {"c1", cert.c1},
                         {"c", cert.c},
                         {"fit_points", fit.points}});
  return records;
}

Json summarize_gibbs(const std::vector<Json>& records) {
  std::vector<DsMixingResult> ds;
  double max_density = 1.0, c1 = 1.0, worst_flip = 0.0, max_cond = 1.0;
  bool density_ok = true, flip_ok = true, cond_ok = true, surrogate_ok = true, site_ok = true;
  std::size_t flips = 0, conds = 0;
  Json cert;
  for (const auto& r : records) {
    const std::string kind = r["kind"];
    if (kind == "ds") {
      DsMixingResult d;
      d.dist = r["dist"].get<Coord>();
      d.max_distance = r["max_distance"].get<double>();
      ds.push_back(d);
    } else if (kind == "density-ratio") {
      max_density = std::max(max_density, r["max_ratio"].get<double>());
      c1 = r["c1"].get<double>();
      density_ok = density_ok && r["holds"].get<bool>();
    } else if (kind == "flip") {
      ++flips;
      worst_flip = std::max(worst_flip, number_or_nan(r["worst_ratio"]));
      flip_ok = flip_ok && r["holds"].get<bool>();
    } else if (kind == "conditional-ratio") {
      ++conds;
      max_cond = std::max(max_cond, r["max_ratio"].get<double>());
      cond_ok = cond_ok && r["holds"].get<bool>();
      surrogate_ok = surrogate_ok && r["surrogate_converged"].get<bool>();
    } else if (kind == "site-bounds") {
      site_ok = r["holds"].get<bool>();
    } else if (kind == "certificate") {
      cert = r;
    }
  }
  const double G = cert.at("G").get<double>(), g = cert.at("g").get<double>();
  return Json{{"G", G},
              {"g", g},
              {"c1", c1},
              {"c", cert.at("c")},
              {"ds_instances", ds.size()},
              {"max_violation", number(decay_violation(ds, G, g))},
              {"max_density_ratio", max_density},
              {"density_ratio_ok", density_ok},
              {"flip_instances", flips},
              {"worst_flip_ratio", number(worst_flip)},
              {"flip_ok", flip_ok},
              {"conditional_instances", conds},
              {"max_conditional_ratio", max_cond},
              {"conditional_ok", cond_ok},
              {"surrogates_converged", surrogate_ok},
              {"site_bounds_ok", site_ok}};
}

// ------------------------------------------------------------- singular-ne

std::vector<Json> run_singular(const Context& ctx) {
  const auto n_max = ctx.params.get_int_or("n_max", 6);
  std::vector<Json> records;
  for (int n = 0; n <= n_max; ++n)
    for (int k = 0; k <= n; ++k) {
      const auto r = singular_restriction_check(n, k);
      records.push_back(Json{{"kind", "singular"},
                             {"n", n},
                             {"k", k},
                             {"tv_n_vs_k", r.tv_n_vs_k},
                             {"tv_n_vs_environment", r.tv_n_vs_environment},
                             {"constrained_sites", r.constrained_sites},
                             {"nodes", r.nodes}});
    }
  return records;
}

Json summarize_singular(const std::vector<Json>& records) {
  double tv = 0.0, tv_env = 0.0;
  std::size_t n = 0;
  for (const auto& r : records) {
    if (r["kind"] != "singular") continue;
    ++n;
    tv = std::max(tv, r["tv_n_vs_k"].get<double>());
    tv_env = std::max(tv_env, r["tv_n_vs_environment"].get<double>());
  }
  return Json{{"pairs", n}, {"max_tv_n_vs_k", tv}, {"max_tv_n_vs_environment", tv_env}};
}

// --------------------------------------------------------------- reproduce

std::vector<Json> run_reproduce(const Context& ctx) {
  const std::string dir = ctx.params["manifest_dir"].as_string();
  const fs::path scratch = ctx.config.output_dir.empty()
                               ? fs::temp_directory_path() / ("rwre-reproduce-" + config_hash(ctx.config))
                               : fs::path(ctx.config.output_dir) / "rerun";
  const auto report = reproduce_directory(dir, scratch.string(), ctx.workers);
  std::vector<Json> records;
  records.push_back(Json{{"kind", "reproduce-version"},
                         {"recorded", report.recorded_version},
                         {"current", report.current_version},
                         {"match", report.version_match}});
  for (const auto& f : report.files) {
    Json r{{"kind", "reproduce-file"},
           {"file", f.file},
           {"passed", f.passed},
           {"expected_digest", f.expected_digest},
           {"actual_digest", f.actual_digest}};
    if (f.first_divergent_record) r["first_divergent_record"] = *f.first_divergent_record;
    records.push_back(std::move(r));
  }
  return records;
}

Json summarize_reproduce(const std::vector<Json>& records) {
  bool passed = true;
  std::size_t files = 0;
  for (const auto& r : records) {
    if (r["kind"] == "reproduce-version") passed = passed && r["match"].get<bool>();
    if (r["kind"] == "reproduce-file") {
      ++files;
      passed = passed && r["passed"].get<bool>();
    }
  }
  return Json{{"files", files}, {"passed", passed}};
}

// ------------------------------------------------------------------ checks

void add_check(std::vector<CheckResult>& out, std::string name, bool passed, std::string detail) {
  out.push_back({std::move(name), passed, std::move(detail)});
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

std::vector<CheckResult> run_checks(const std::string& kind, const Json& summary,
                                    const Json& tolerances) {
  std::vector<CheckResult> out;
  const JsonNode tol(tolerances, "/tolerances");
  if (kind == "simulate" && tol.has("velocity_target")) {
    const auto target = tol["velocity_target"].as_doubles();
    const double eps = tol.get_or("velocity_tol", 0.01);
    for (std::size_t i = 0; i < target.size() && i < summary["velocity"].size(); ++i) {
      const double v = number_or_nan(summary["velocity"][i]);
      add_check(out, "velocity[" + std::to_string(i) + "]", std::abs(v - target[i]) <= eps,
                "observed " + fmt(v) + ", target " + fmt(target[i]) + " +- " + fmt(eps));
    }
  } else if (kind == "kalikow") {
    const double e = number_or_nan(summary["epsilon_hat"]);
    if (tol.has("epsilon_target")) {
      const double t = tol["epsilon_target"].as_double(), eps = tol.get_or("epsilon_tol", 1e-9);
      add_check(out, "epsilon", std::abs(e - t) <= eps,
                "observed " + fmt(e) + ", target " + fmt(t) + " +- " + fmt(eps));
    }
    if (tol.has("require_positive") && tol["require_positive"].as_bool()) {
      const double hw = number_or_nan(summary["epsilon_half_width"]);
      add_check(out, "epsilon_positive", e - hw > 0.0,
                "lower confidence bound " + fmt(e - hw));
    }
  } else if (kind == "density1d") {
    const double harm = summary["max_harmonicity_residual"].get<double>();
    const double hmax = tol.get_or("harmonicity_max", 1e-4);
    add_check(out, "harmonicity", harm <= hmax, "max residual " + fmt(harm));
    if (tol.has("mu0_min")) {
      const auto mu0 = estimate_from(summary["mu0"]);
      const double m = tol["mu0_min"].as_double();
      add_check(out, "mu0_lower_bound", mu0.upper() >= m,
                "E(mu_0) = " + fmt(mu0.value) + " +- " + fmt(mu0.half_width));
    }
    if (tol.has("velocity_target")) {
      const double v = number_or_nan(summary["velocity"]);
      const double t = tol["velocity_target"].as_double();
      const double hw = number_or_nan(summary["velocity_half_width"]);
      add_check(out, "velocity", std::abs(v - t) <= hw + tol.get_or("velocity_tol", 0.0),
                "observed " + fmt(v) + " +- " + fmt(hw) + ", target " + fmt(t));
    }
  } else if (kind == "pov-cesaro") {
    if (tol.has("target")) {
      const double v = number_or_nan(summary["estimate"]);
      const double hw = number_or_nan(summary["half_width"]);
      const double t = tol["target"].as_double();
      add_check(out, "cesaro_limit", std::abs(v - t) <= hw + tol.get_or("tol", 0.0),
                "observed " + fmt(v) + " +- " + fmt(hw) + ", target " + fmt(t));
    }
  } else if (kind == "zk") {
    add_check(out, "admissibility", summary["admissible_at_largest_n"].get<bool>(),
              "threshold " + fmt(summary["threshold"].get<double>()));
  } else if (kind == "gibbs-check") {
    add_check(out, "decay_rate_positive", summary["g"].get<double>() > 0.0,
              "g = " + fmt(summary["g"].get<double>()));
    const double violation = number_or_nan(summary["max_violation"]);
    add_check(out, "decay_envelope", !(violation > 1.0 + 1e-10),
              "max observed / (G e^{-g dist}) = " + fmt(violation));
    add_check(out, "density_ratio", summary["density_ratio_ok"].get<bool>(),
              "max " + fmt(summary["max_density_ratio"].get<double>()) + " vs C1 " +
                  fmt(summary["c1"].get<double>()));
    add_check(out, "single_site_flip", summary["flip_ok"].get<bool>(),
              "worst lhs/rhs " + fmt(number_or_nan(summary["worst_flip_ratio"])));
    add_check(out, "conditional_ratio", summary["conditional_ok"].get<bool>(),
              "max ratio " + fmt(summary["max_conditional_ratio"].get<double>()));
    add_check(out, "site_bounds", summary["site_bounds_ok"].get<bool>(), "within [C1^-2, C1^2]");
  } else if (kind == "singular-ne") {
    const double tv = summary["max_tv_n_vs_k"].get<double>();
    const double m = tol.get_or("tv_max", 1e-12);
    add_check(out, "restriction_identity", tv <= m, "max TV " + fmt(tv));
  } else if (kind == "reproduce") {
    add_check(out, "reproduced", summary["passed"].get<bool>(), "digest comparison");
  }
  return out;
}

std::string records_text(const std::vector<Json>& records) {
  std::string out;
  for (const auto& r : records) {
    out += canonical_dump(r);
    out += '\n';
  }
  return out;
}

}  // namespace

ExperimentConfig config_from_json(const Json& value) {
  const JsonNode root(value);
  if (!value.is_object()) root.fail("expected an object");
  static const std::set<std::string> known{"kind",       "model",      "params", "seed",
                                           "output_dir", "tolerances", "workers"};
  for (const auto& [key, v] : value.items())
    if (!known.count(key)) root.fail("unknown field \"" + key + "\"");

  ExperimentConfig c;
  c.kind = root["kind"].as_string();
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end())
    root["kind"].fail("unknown experiment kind \"" + c.kind + "\"");
  if (root.has("model")) {
    c.model = value.at("model");
    model_from_json(JsonNode(c.model, "/model"));
  } else if (needs_model(c.kind)) {
    root.fail("missing field \"model\"");
  }
  if (root.has("params")) {
    if (!value.at("params").is_object()) root["params"].fail("expected an object");
    c.params = value.at("params");
  }
  if (root.has("seed")) c.seed = root["seed"].as_uint64();
  if (root.has("output_dir")) c.output_dir = root["output_dir"].as_string();
  if (root.has("tolerances")) {
    if (!value.at("tolerances").is_object()) root["tolerances"].fail("expected an object");
    c.tolerances = value.at("tolerances");
  }
  if (root.has("workers")) {
    const auto w = root["workers"].as_int();
    if (w < 1) root["workers"].fail("expected at least one worker");
    c.workers = static_cast<unsigned>(w);
  }
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  Json out{{"kind", c.kind},
           {"params", c.params},
           {"seed", c.seed},
           {"output_dir", c.output_dir},
           {"tolerances", c.tolerances},
           {"workers", c.workers}};
  if (!c.model.is_null()) out["model"] = c.model;
  return out;
}

std::string config_hash(const ExperimentConfig& c) {
  return sha256_hex(
      canonical_dump(Json{{"kind", c.kind}, {"model", c.model}, {"params", c.params}, {"seed", c.seed}}));
}

std::uint64_t module_seed(const ExperimentConfig& c) { return derive_seed(c.seed, c.kind); }

bool ExperimentResult::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const std::string started = utc_now();
  Context ctx{config, JsonNode(config.params, "/params"), module_seed(config),
              std::max(1u, config.workers)};
  const double z = ctx.params.get_or("z", kDefaultZ);

  std::optional<EnvironmentModel> model;
  if (!config.model.is_null()) model = model_from_json(JsonNode(config.model, "/model"));
  if (needs_model(config.kind) && !model) throw ConfigError("config /: missing field \"model\"");

  ExperimentResult result;
  const std::string& kind = config.kind;
  if (kind == "simulate") {
    result.records = run_simulate(ctx, *model);
    result.summary = summarize_simulate(result.records, model->dim);
  } else if (kind == "kalikow") {
    result.records = run_kalikow(ctx, *model);
    result.summary = summarize_kalikow(result.records);
  } else if (kind == "density1d") {
    result.records = run_density(ctx, *model);
    result.summary = summarize_density(result.records, z);
  } else if (kind == "pov-cesaro") {
    result.records = run_cesaro(ctx, *model);
    result.summary = summarize_cesaro(result.records, z);
  } else if (kind == "zk") {
    result.records = run_zk(ctx, *model);
    result.summary = summarize_zk(result.records, ctx, model->dim);
  } else if (kind == "gibbs-check") {
    result.records = run_gibbs(ctx);
    result.summary = summarize_gibbs(result.records);
  } else if (kind == "singular-ne") {
    result.records = run_singular(ctx);
    result.summary = summarize_singular(result.records);
  } else if (kind == "reproduce") {
    result.records = run_reproduce(ctx);
    result.summary = summarize_reproduce(result.records);
  } else {
    throw ConfigError("config /kind: unknown experiment kind \"" + kind + "\"");
  }
  result.checks = run_checks(kind, result.summary, config.tolerances);

  const std::string records = records_text(result.records);
  const std::string summary_json = canonical_dump(result.summary) + "\n";
  const std::string summary_txt = summary_table(result.summary);

  Json checks = Json::array();
  for (const auto& c : result.checks)
    checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  Json seeds{{"master", config.seed},
             {"module", ctx.seed},
             {"scheme",
              "module = derive(master, kind); replicate i: env = derive(derive(module, \"env\"), i), "
              "walk = derive(derive(module, \"walk\"), i)"}};
  if (model) seeds["model"] = model->master_seed;
  result.manifest = Json{{"artifact_version", artifact_version()},
                         {"config", config_to_json(config)},
                         {"config_hash", config_hash(config)},
                         {"seeds", seeds},
                         {"workers", ctx.workers},
                         {"started_at", started},
                         {"finished_at", utc_now()},
                         {"files",
                          {{"records.jsonl", sha256_hex(records)},
                           {"summary.json", sha256_hex(summary_json)},
                           {"summary.txt", sha256_hex(summary_txt)}}},
                         {"checks", checks}};

  if (!config.output_dir.empty()) {
    fs::create_directories(config.output_dir);
    const fs::path dir(config.output_dir);
    write_text_file((dir / "records.jsonl").string(), records);
    write_text_file((dir / "summary.json").string(), summary_json);
    write_text_file((dir / "summary.txt").string(), summary_txt);
    write_text_file((dir / "manifest.json").string(), result.manifest.dump(2) + "\n");
  }
  return result;
}

bool ReproduceReport::passed() const {
  return version_match &&
         std::all_of(files.begin(), files.end(), [](const FileVerdict& f) { return f.passed; });
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

ReproduceReport reproduce(const Json& manifest, const std::string& scratch_dir,
                          std::optional<unsigned> workers, const std::string& original_dir) {
  const JsonNode root(manifest, "/manifest");
  ReproduceReport report;
  report.recorded_version = root["artifact_version"].as_string();
  report.current_version = artifact_version();
  report.version_match = report.recorded_version == report.current_version;

  ExperimentConfig config = config_from_json(manifest.at("config"));
  config.output_dir = scratch_dir;
  if (workers) config.workers = *workers;
  const auto rerun = run_experiment(config);

  const auto files = root["files"];
  for (const auto& [name, digest] : files.raw().items()) {
    FileVerdict v;
    v.file = name;
    v.expected_digest = digest.get<std::string>();
    const auto& fresh = rerun.manifest.at("files");
    v.actual_digest = fresh.contains(name) ? fresh.at(name).get<std::string>() : "";
    v.passed = v.expected_digest == v.actual_digest;
    if (!v.passed && name == "records.jsonl" && !original_dir.empty()) {
      const fs::path original = fs::path(original_dir) / name;
      if (fs::exists(original)) {
        const auto before = split_lines(read_text_file(original.string()));
        const auto after = split_lines(read_text_file((fs::path(scratch_dir) / name).string()));
        const std::size_t n = std::max(before.size(), after.size());
        for (std::size_t i = 0; i < n; ++i) {
          const std::string a = i < before.size() ? before[i] : "";
          const std::string b = i < after.size() ? after[i] : "";
          if (a != b) {
            v.first_divergent_record = i;
            v.expected_line = a;
            v.actual_line = b;
            break;
          }
        }
      }
    }
    report.files.push_back(std::move(v));
  }
  return report;
}

ReproduceReport reproduce_directory(const std::string& dir, const std::string& scratch_dir,
                                    std::optional<unsigned> workers) {
  const auto text = read_text_file((fs::path(dir) / "manifest.json").string());
  Json manifest;
  try {
    manifest = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("manifest " + dir + ": " + e.what());
  }
  return reproduce(manifest, scratch_dir, workers, dir);
}

std::string summary_table(const Json& summary) {
  std::size_t width = 0;
  for (const auto& [key, v] : summary.items()) width = std::max(width, key.size());
  std::ostringstream out;
  for (const auto& [key, v] : summary.items()) {
    out << std::left << std::setw(static_cast<int>(width)) << key << "  ";
    if (v.is_string()) {
      out << v.get<std::string>();
    } else {
      out << v.dump();
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace rwre
