#include "rwre/environment.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "rwre/errors.hpp"
#include "rwre/hash.hpp"

namespace rwre {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::uint64_t kStreamLetter = 0;
constexpr std::uint64_t kStreamCouple = 1;
constexpr std::uint64_t kStreamLayerPick = 2;
constexpr std::uint64_t kStreamLayer = 3;

const TransitionVector& east() {
  static const TransitionVector v{{Point(1, 0)}, {1.0}};
  return v;
}
const TransitionVector& north() {
  static const TransitionVector v{{Point(0, 1)}, {1.0}};
  return v;
}

void check_weights(const std::vector<TransitionVector>& letters,
                   const std::vector<double>& weights, const char* what) {
  if (letters.empty()) throw ConfigError(std::string(what) + ": empty alphabet");
  if (letters.size() != weights.size())
    throw ConfigError(std::string(what) + ": weights and letters differ in length");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw ConfigError(std::string(what) + ": weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw ConfigError(std::string(what) + ": weights sum to zero");
}

int pick_weighted(const std::vector<double>& weights, double u) {
  double total = 0.0;
  for (double w : weights) total += w;
  double target = u * total;
  const int n = static_cast<int>(weights.size());
  for (int i = 0; i < n; ++i) {
    target -= weights[static_cast<std::size_t>(i)];
    if (target < 0.0) return i;
  }
  // Rounding can leave target at 0; fall back to the last positive weight.
  for (int i = n - 1; i >= 0; --i)
    if (weights[static_cast<std::size_t>(i)] > 0.0) return i;
  return n - 1;
}

Point invert(const TransitionVector& v, double u) {
  double target = u;
  for (std::size_t i = 0; i < v.probs.size(); ++i) {
    target -= v.probs[i];
    if (target < 0.0) return v.offsets[i];
  }
  for (std::size_t i = v.probs.size(); i-- > 0;)
    if (v.probs[i] > 0.0) return v.offsets[i];
  return v.offsets.back();
}

Coord projection(const Point& x, const Point& direction) {
  Coord p = 0;
  for (std::size_t k = 0; k < kMaxDim; ++k) p += x[k] * direction[k];
  return p;
}

}  // namespace

std::string EnvironmentModel::kind() const {
  return std::visit(overloaded{
                        [](const law::Constant&) { return std::string("constant"); },
                        [](const law::IidFiniteAlphabet&) {
                          return std::string("iid-finite-alphabet");
                        },
                        [](const law::Northeast&) { return std::string("deterministic-ne"); },
                        [](const law::IidDirichlet&) { return std::string("iid-dirichlet"); },
                        [](const law::LDependent&) { return std::string("l-dependent"); },
                        [](const law::GibbsWindow&) { return std::string("gibbs-window"); },
                    },
                    law);
}

EnvironmentModel EnvironmentModel::with_seed(std::uint64_t seed) const {
  EnvironmentModel out = *this;
  out.master_seed = seed;
  return out;
}

std::vector<TransitionVector> EnvironmentModel::letters() const {
  return std::visit(
      overloaded{
          [](const law::Constant& c) { return std::vector<TransitionVector>{c.vector}; },
          [](const law::IidFiniteAlphabet& a) { return a.letters; },
          [](const law::Northeast&) { return std::vector<TransitionVector>{east(), north()}; },
          [](const law::IidDirichlet&) { return std::vector<TransitionVector>{}; },
          [](const law::LDependent& l) { return l.letters; },
          [](const law::GibbsWindow& g) { return g.spec.alphabet; },
      },
      law);
}

std::optional<std::vector<double>> EnvironmentModel::marginal_weights() const {
  using Out = std::optional<std::vector<double>>;
  auto normalized = [](std::vector<double> w) {
    double total = 0.0;
    for (double x : w) total += x;
    for (double& x : w) x /= total;
    return w;
  };
  return std::visit(overloaded{
                        [](const law::Constant&) -> Out { return std::vector<double>{1.0}; },
                        [&](const law::IidFiniteAlphabet& a) -> Out {
                          return normalized(a.weights);
                        },
                        [](const law::Northeast&) -> Out {
                          return std::vector<double>{0.5, 0.5};
                        },
                        [](const law::IidDirichlet&) -> Out { return std::nullopt; },
                        [&](const law::LDependent& l) -> Out { return normalized(l.weights); },
                        [](const law::GibbsWindow&) -> Out { return std::nullopt; },
                    },
                    law);
}

std::vector<Point> EnvironmentModel::stencil() const {
  std::set<Point> out;
  if (const auto* d = std::get_if<law::IidDirichlet>(&law)) {
    out.insert(d->offsets.begin(), d->offsets.end());
  } else {
    for (const auto& v : letters()) out.insert(v.offsets.begin(), v.offsets.end());
  }
  return {out.begin(), out.end()};
}

void EnvironmentModel::validate() const {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("model: dimension must be in 1..3");
  if (range < 1) throw ConfigError("model: range must be >= 1");
  std::visit(overloaded{
                 [&](const law::Constant& c) { c.vector.validate(dim, range); },
                 [&](const law::IidFiniteAlphabet& a) {
                   check_weights(a.letters, a.weights, "iid-finite-alphabet");
                   for (const auto& v : a.letters) v.validate(dim, range);
                 },
                 [&](const law::Northeast&) {
                   if (dim != 2) throw ConfigError("deterministic-ne: dimension must be 2");
                 },
                 [&](const law::IidDirichlet& d) {
                   if (d.offsets.empty() || d.offsets.size() != d.concentration.size())
                     throw ConfigError("iid-dirichlet: offsets and concentrations differ");
                   for (double a : d.concentration)
                     if (!(a > 0.0) || !std::isfinite(a))
                       throw ConfigError("iid-dirichlet: concentrations must be > 0");
                   for (const auto& e : d.offsets)
                     if (sup_norm(e) > range)
                       throw ConfigError("iid-dirichlet: offset exceeds range");
                 },
                 [&](const law::LDependent& l) {
                   check_weights(l.letters, l.weights, "l-dependent");
                   for (const auto& v : l.letters) v.validate(dim, range);
                   if (l.gap < 1) throw ConfigError("l-dependent: gap must be >= 1");
                   if (!(l.coupling >= 0.0 && l.coupling <= 1.0))
                     throw ConfigError("l-dependent: coupling must be in [0, 1]");
                   if (l.direction == Point{})
                     throw ConfigError("l-dependent: direction must be nonzero");
                 },
                 [&](const law::GibbsWindow& g) {
                   g.spec.validate();
                   if (g.spec.dim != dim)
                     throw ConfigError("gibbs-window: spec dimension differs from model");
                   for (const auto& v : g.spec.alphabet) v.validate(dim, range);
                   for (int k = 0; k < dim; ++k)
                     if (g.hi[static_cast<std::size_t>(k)] < g.lo[static_cast<std::size_t>(k)])
                       throw ConfigError("gibbs-window: empty window");
                   if (g.boundary_letter < 0 || g.boundary_letter >= g.spec.alphabet_size())
                     throw ConfigError("gibbs-window: boundary letter out of range");
                 },
             },
             law);
}

EnvironmentModel constant_model(TransitionVector v, int dim, Coord range, std::uint64_t seed) {
  EnvironmentModel m{law::Constant{std::move(v)}, dim, range, seed};
  m.validate();
  return m;
}

EnvironmentModel iid_alphabet_model(std::vector<TransitionVector> letters,
                                    std::vector<double> weights, int dim, Coord range,
                                    std::uint64_t seed) {
  EnvironmentModel m{law::IidFiniteAlphabet{std::move(letters), std::move(weights)}, dim, range,
                     seed};
  m.validate();
  return m;
}

EnvironmentModel northeast_model(std::uint64_t seed) {
  return EnvironmentModel{law::Northeast{}, 2, 1, seed};
}

EnvironmentModel dirichlet_model(std::vector<Point> offsets, std::vector<double> concentration,
                                 int dim, Coord range, std::uint64_t seed) {
  EnvironmentModel m{law::IidDirichlet{std::move(offsets), std::move(concentration)}, dim, range,
                     seed};
  m.validate();
  return m;
}

EnvironmentModel l_dependent_model(std::vector<TransitionVector> letters,
                                   std::vector<double> weights, Coord gap, double coupling,
                                   Point direction, int dim, Coord range, std::uint64_t seed) {
  EnvironmentModel m{
      law::LDependent{std::move(letters), std::move(weights), gap, coupling, direction}, dim,
      range, seed};
  m.validate();
  return m;
}

EnvironmentModel gibbs_window_model(GibbsSpec spec, Point lo, Point hi, int boundary_letter,
                                    std::size_t burn_in_sweeps, Coord range,
                                    std::uint64_t seed) {
  const int dim = spec.dim;
  EnvironmentModel m{law::GibbsWindow{std::move(spec), lo, hi, boundary_letter, burn_in_sweeps},
                     dim, range, seed};
  m.validate();
  return m;
}

struct Environment::State {
  std::shared_ptr<const EnvironmentModel> model;
  std::vector<TransitionVector> letters;
  std::optional<Configuration> window;
};

const EnvironmentModel& Environment::model() const { return *state_->model; }

int Environment::dim() const { return state_->model->dim; }

Environment::Environment(const EnvironmentModel& model) {
  model.validate();
  auto state = std::make_shared<State>();
  state->model = std::make_shared<const EnvironmentModel>(model);
  state->letters = model.letters();
  if (const auto* g = std::get_if<law::GibbsWindow>(&model.law)) {
    state->window = glauber_sample(g->spec, g->lo, g->hi, g->boundary_letter, g->burn_in_sweeps,
                                   derive_seed(model.master_seed, "gibbs-window"));
  }
  state_ = std::move(state);
}

const TransitionVector* Environment::letter_ref(const Point& x, int* letter) const {
  const EnvironmentModel& m = *state_->model;
  const std::uint64_t seed = m.master_seed;
  int idx = -1;
  switch (m.law.index()) {
    case 0:
      idx = 0;
      break;
    case 1: {
      const auto& a = std::get<law::IidFiniteAlphabet>(m.law);
      idx = pick_weighted(a.weights, to_unit(site_hash(seed, x, kStreamLetter)));
      break;
    }
    case 2:
      idx = to_unit(site_hash(seed, x, kStreamLetter)) < 0.5 ? 0 : 1;
      break;
    case 3:
      return nullptr;
    case 4: {
      const auto& l = std::get<law::LDependent>(m.law);
      if (to_unit(site_hash(seed, x, kStreamCouple)) < l.coupling) {
        const auto shift = static_cast<Coord>(site_hash(seed, x, kStreamLayerPick) %
                                              static_cast<std::uint64_t>(l.gap));
        const Point layer(projection(x, l.direction) - shift);
        idx = pick_weighted(l.weights, to_unit(site_hash(seed, layer, kStreamLayer)));
      } else {
        idx = pick_weighted(l.weights, to_unit(site_hash(seed, x, kStreamLetter)));
      }
      break;
    }
    case 5: {
      const auto& window = *state_->window;
      if (!window.in_box(x))
        throw WindowExceeded("gibbs window does not contain site " + format_point(x, m.dim));
      idx = window.at(x);
      break;
    }
    default:
      break;
  }
  if (letter) *letter = idx;
  return &state_->letters[static_cast<std::size_t>(idx)];
}

TransitionVector Environment::dirichlet_at(const Point& x) const {
  const auto& d = std::get<law::IidDirichlet>(state_->model->law);
  SplitMix64 rng(site_hash(state_->model->master_seed, x, kStreamLetter));
  TransitionVector v;
  v.offsets = d.offsets;
  v.probs.resize(d.offsets.size());
  double total = 0.0;
  for (std::size_t i = 0; i < d.offsets.size(); ++i) {
    std::gamma_distribution<double> gamma(d.concentration[i], 1.0);
    v.probs[i] = gamma(rng);
    total += v.probs[i];
  }
  if (!(total > 0.0)) {
    // All gamma draws underflowed; only possible for tiny concentrations.
    std::fill(v.probs.begin(), v.probs.end(), 1.0 / static_cast<double>(v.probs.size()));
  } else {
    for (double& p : v.probs) p /= total;
  }
  return v;
}

TransitionVector Environment::at(const Point& site) const {
  const Point x = site + shift_;
  if (const auto* v = letter_ref(x, nullptr)) return *v;
  return dirichlet_at(x);
}

Vec Environment::drift_at(const Point& site) const {
  const Point x = site + shift_;
  if (const auto* v = letter_ref(x, nullptr)) return drift(*v);
  return drift(dirichlet_at(x));
}

int Environment::letter_at(const Point& site) const {
  int idx = -1;
  letter_ref(site + shift_, &idx);
  return idx;
}

Point Environment::draw_step(const Point& site, double u) const {
  const Point x = site + shift_;
  if (const auto* v = letter_ref(x, nullptr)) return invert(*v, u);
  return invert(dirichlet_at(x), u);
}

Environment Environment::shifted(const Point& by) const {
  Environment out = *this;
  out.shift_ += by;
  return out;
}

TransitionVector sample_site(const EnvironmentModel& model, const Point& site) {
  return Environment(model).at(site);
}

EllipticityReport check_ellipticity(const EnvironmentModel& model, const Vec& ell) {
  model.validate();
  EllipticityReport report;
  report.ell = ell;
  const int dim = model.dim;

  std::vector<Point> forward;
  for (const auto& j : unit_vectors(dim))
    if (dot(j, ell) >= 0.0) forward.push_back(j);

  if (const auto* d = std::get_if<law::IidDirichlet>(&model.law)) {
    // The Dirichlet density reaches 0 near the simplex boundary: no uniform
    // lower bound, but every listed offset is positive almost surely.
    report.kappa_hat = std::nullopt;
    report.strong_ok = false;
    report.weak_ok = true;
    for (const auto& j : forward)
      if (std::find(d->offsets.begin(), d->offsets.end(), j) == d->offsets.end()) {
        report.weak_ok = false;
        report.witness = "offset " + format_point(j, dim) + " not in the Dirichlet support";
        break;
      }
    if (report.witness.empty()) report.witness = "Dirichlet density has no positive lower bound";
    return report;
  }

  const auto letters = model.letters();
  std::vector<bool> possible(letters.size(), true);
  if (const auto w = model.marginal_weights())
    for (std::size_t i = 0; i < letters.size(); ++i) possible[i] = (*w)[i] > 0.0;

  const auto stencil = model.stencil();
  double kappa = 1.0;
  std::string strong_witness;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (!possible[i]) continue;
    for (const auto& e : stencil) {
      const double p = letters[i].prob(e);
      if (p < kappa) {
        kappa = p;
        if (p <= 0.0)
          strong_witness = "letter " + std::to_string(i) + " " + describe(letters[i], dim) +
                           " gives offset " + format_point(e, dim) + " probability 0";
      }
    }
  }
  report.kappa_hat = kappa;
  report.strong_ok = kappa > 0.0 && kappa < 1.0;
  if (kappa >= 1.0) strong_witness = "single deterministic offset; no kappa in (0,1)";

  report.weak_ok = true;
  std::string weak_witness;
  for (std::size_t i = 0; i < letters.size() && report.weak_ok; ++i) {
    if (!possible[i]) continue;
    for (const auto& j : forward)
      if (!(letters[i].prob(j) > 0.0)) {
        report.weak_ok = false;
        weak_witness = "letter " + std::to_string(i) + " " + describe(letters[i], dim) +
                       " gives unit step " + format_point(j, dim) + " probability 0";
        break;
      }
  }
  report.witness = !strong_witness.empty() ? strong_witness : weak_witness;
  return report;
}

}  // namespace rwre
