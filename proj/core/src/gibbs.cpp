#include "rwre/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "rwre/errors.hpp"
#include "rwre/hash.hpp"

namespace rwre {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out *= base;
  return out;
}

// Saturating q^n, so the cap check cannot overflow.
std::size_t ipow_capped(std::size_t base, std::size_t exp, std::size_t cap) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (out > cap / std::max<std::size_t>(base, 1)) return cap + 1;
    out *= base;
  }
  return out;
}

}  // namespace

double GibbsSpec::prior_weight(int letter) const {
  if (prior.empty()) return 1.0;
  return prior[static_cast<std::size_t>(letter)];
}

double GibbsSpec::norm_u() const {
  double out = 0.0;
  for (const auto& term : interaction)
    for (double e : term.energy) out = std::max(out, std::abs(e));
  return out;
}

double GibbsSpec::c1() const {
  const double ball = static_cast<double>(sup_ball(dim, range).size());
  return std::exp(std::pow(2.0, ball + 1.0) * beta * norm_u());
}

void GibbsSpec::validate() const {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("gibbs: dimension must be in 1..3");
  if (alphabet.size() < 1) throw ConfigError("gibbs: empty alphabet");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("gibbs: beta must be >= 0");
  if (range < 0) throw ConfigError("gibbs: negative range");
  if (!prior.empty()) {
    if (prior.size() != alphabet.size())
      throw ConfigError("gibbs: prior length differs from alphabet size");
    for (double w : prior)
      if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("gibbs: prior weights must be > 0");
  }
  const std::size_t q = alphabet.size();
  for (const auto& term : interaction) {
    if (term.shape.empty()) throw ConfigError("gibbs: empty interaction shape");
    if (term.energy.size() != ipow(q, term.shape.size()))
      throw ConfigError("gibbs: energy table size must be q^|shape|");
    if (std::set<Point>(term.shape.begin(), term.shape.end()).size() != term.shape.size())
      throw ConfigError("gibbs: repeated site in interaction shape");
    for (const auto& a : term.shape)
      for (const auto& b : term.shape)
        if (sup_dist(a, b) > range) throw ConfigError("gibbs: shape diameter exceeds range");
    for (double e : term.energy)
      if (!std::isfinite(e)) throw ConfigError("gibbs: non-finite energy");
  }
}

GibbsSpec nearest_neighbor_spec(int dim, std::vector<TransitionVector> alphabet,
                                const std::vector<std::vector<double>>& pair_energy,
                                const std::vector<double>& field, double beta,
                                std::vector<double> prior) {
  GibbsSpec spec;
  spec.dim = dim;
  spec.beta = beta;
  spec.range = 1;
  spec.prior = std::move(prior);
  const std::size_t q = alphabet.size();
  spec.alphabet = std::move(alphabet);
  if (pair_energy.size() != q) throw ConfigError("gibbs: pair energy must be q x q");
  for (int axis = 0; axis < dim; ++axis) {
    InteractionTerm bond;
    Point e;
    e[static_cast<std::size_t>(axis)] = 1;
    bond.shape = {Point{}, e};
    bond.energy.assign(q * q, 0.0);
    for (std::size_t a = 0; a < q; ++a) {
      if (pair_energy[a].size() != q) throw ConfigError("gibbs: pair energy must be q x q");
      for (std::size_t b = 0; b < q; ++b) bond.energy[a + q * b] = pair_energy[a][b];
    }
    spec.interaction.push_back(std::move(bond));
  }
  if (!field.empty()) {
    if (field.size() != q) throw ConfigError("gibbs: field must have q entries");
    spec.interaction.push_back(InteractionTerm{{Point{}}, field});
  }
  spec.validate();
  return spec;
}

GibbsSpec ising_spec(int dim, std::vector<TransitionVector> alphabet, double coupling,
                     double field, double beta, std::vector<double> prior) {
  if (alphabet.size() != 2) throw ConfigError("gibbs: ising spec needs two letters");
  const double s[2] = {1.0, -1.0};
  std::vector<std::vector<double>> pair(2, std::vector<double>(2));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) pair[a][b] = -coupling * s[a] * s[b];
  std::vector<double> h;
  if (field != 0.0) h = {-field * s[0], -field * s[1]};
  return nearest_neighbor_spec(dim, std::move(alphabet), pair, h, beta, std::move(prior));
}

Configuration::Configuration(int dim, Point lo, Point hi, int fallback)
    : dim_(dim), lo_(lo), hi_(hi), fallback_(fallback) {
  std::size_t total = 1;
  for (int i = 0; i < kMaxDim; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (i >= dim) {
      lo_[k] = hi_[k] = 0;
    } else if (hi_[k] < lo_[k]) {
      throw ConfigError("configuration: empty box");
    }
    extent_[k] = static_cast<std::size_t>(hi_[k] - lo_[k] + 1);
    total *= extent_[k];
  }
  letters_.assign(total, fallback);
}

bool Configuration::in_box(const Point& site) const {
  if (letters_.empty()) return false;
  for (std::size_t i = 0; i < kMaxDim; ++i)
    if (site[i] < lo_[i] || site[i] > hi_[i]) return false;
  return true;
}

std::size_t Configuration::index(const Point& site) const {
  std::size_t idx = 0;
  for (int i = kMaxDim - 1; i >= 0; --i) {
    const auto k = static_cast<std::size_t>(i);
    idx = idx * extent_[k] + static_cast<std::size_t>(site[k] - lo_[k]);
  }
  return idx;
}

int Configuration::at(const Point& site) const {
  return in_box(site) ? letters_[index(site)] : fallback_;
}

void Configuration::set(const Point& site, int letter) {
  if (!in_box(site)) throw WindowExceeded("configuration: site " + format_point(site, dim_) +
                                          " outside stored box");
  letters_[index(site)] = letter;
}

std::vector<Point> Configuration::sites() const {
  std::vector<Point> out;
  out.reserve(letters_.size());
  for (std::size_t idx = 0; idx < letters_.size(); ++idx) {
    Point p;
    std::size_t rest = idx;
    for (std::size_t i = 0; i < kMaxDim; ++i) {
      p[i] = lo_[i] + static_cast<Coord>(rest % extent_[i]);
      rest /= extent_[i];
    }
    out.push_back(p);
  }
  return out;
}

std::vector<Point> outer_boundary(std::span<const Point> volume, Coord r, int dim) {
  const std::set<Point> inside(volume.begin(), volume.end());
  std::set<Point> out;
  const auto ball = sup_ball(dim, r);
  for (const auto& v : volume)
    for (const auto& e : ball) {
      const Point y = v + e;
      if (!inside.count(y)) out.insert(y);
    }
  return {out.begin(), out.end()};
}

std::vector<Point> inner_boundary(std::span<const Point> set, Coord r, int dim) {
  const std::set<Point> inside(set.begin(), set.end());
  const auto ball = sup_ball(dim, r);
  std::vector<Point> out;
  for (const auto& v : set) {
    const bool near = std::any_of(ball.begin(), ball.end(),
                                  [&](const Point& e) { return !inside.count(v + e); });
    if (near) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ConditionalTable::ConditionalTable(std::vector<Point> sites, int q, std::vector<double> probs)
    : sites_(std::move(sites)), q_(q), probs_(std::move(probs)) {}

int ConditionalTable::letter(std::size_t config, std::size_t position) const {
  for (std::size_t i = 0; i < position; ++i) config /= static_cast<std::size_t>(q_);
  return static_cast<int>(config % static_cast<std::size_t>(q_));
}

std::vector<double> ConditionalTable::marginal(std::span<const std::size_t> positions) const {
  const auto q = static_cast<std::size_t>(q_);
  std::vector<std::size_t> stride(sites_.size(), 1);
  for (std::size_t i = 1; i < sites_.size(); ++i) stride[i] = stride[i - 1] * q;
  std::vector<double> out(ipow(q, positions.size()), 0.0);
  for (std::size_t c = 0; c < probs_.size(); ++c) {
    std::size_t idx = 0, mult = 1;
    for (std::size_t pos : positions) {
      idx += ((c / stride[pos]) % q) * mult;
      mult *= q;
    }
    out[idx] += probs_[c];
  }
  return out;
}

std::size_t ConditionalTable::position_of(const Point& site) const {
  const auto it = std::find(sites_.begin(), sites_.end(), site);
  if (it == sites_.end()) throw ConfigError("conditional table: site not in volume");
  return static_cast<std::size_t>(it - sites_.begin());
}

ConditionalTable exact_conditional(const GibbsSpec& spec, std::span<const Point> volume,
                                   const Configuration& boundary, std::size_t cap) {
  const auto q = static_cast<std::size_t>(spec.alphabet_size());
  const std::size_t total = ipow_capped(q, volume.size(), cap);
  if (total > cap)
    throw EnumerationCapExceeded("exact_conditional: " + std::to_string(q) + "^" +
                                 std::to_string(volume.size()) + " configurations exceed cap " +
                                 std::to_string(cap));

  std::vector<Point> sites(volume.begin(), volume.end());
  const std::set<Point> inside(sites.begin(), sites.end());
  if (inside.size() != sites.size()) throw ConfigError("exact_conditional: repeated site");

  // Every placement of every term that meets the volume. Each shape slot is
  // either a volume position or a fixed boundary letter.
  struct Slot {
    long position;  // -1 for boundary
    int letter;
  };
  struct Placement {
    const InteractionTerm* term;
    std::vector<Slot> slots;
  };
  std::vector<Placement> placements;
  std::set<std::pair<std::size_t, Point>> seen;
  for (std::size_t t = 0; t < spec.interaction.size(); ++t) {
    const auto& term = spec.interaction[t];
    for (const auto& v : sites)
      for (const auto& s : term.shape) {
        const Point anchor = v - s;
        if (!seen.insert({t, anchor}).second) continue;
        Placement pl{&term, {}};
        for (const auto& s2 : term.shape) {
          const Point y = anchor + s2;
          if (inside.count(y)) {
            const auto pos = std::find(sites.begin(), sites.end(), y) - sites.begin();
            pl.slots.push_back({static_cast<long>(pos), 0});
          } else {
            pl.slots.push_back({-1, boundary.at(y)});
          }
        }
        placements.push_back(std::move(pl));
      }
  }

  std::vector<double> logw(total);
  std::vector<int> letters(sites.size(), 0);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rest = c;
    double lw = 0.0;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      letters[i] = static_cast<int>(rest % q);
      rest /= q;
      lw += std::log(spec.prior_weight(letters[i]));
    }
    double energy = 0.0;
    for (const auto& pl : placements) {
      std::size_t idx = 0, mult = 1;
      for (const auto& slot : pl.slots) {
        const int a = slot.position >= 0 ? letters[static_cast<std::size_t>(slot.position)]
                                         : slot.letter;
        idx += static_cast<std::size_t>(a) * mult;
        mult *= q;
      }
      energy += pl.term->energy[idx];
    }
    logw[c] = lw - spec.beta * energy;
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double z = 0.0;
  for (double& w : logw) {
    w = std::exp(w - top);
    z += w;
  }
  for (double& w : logw) w /= z;
  return ConditionalTable(std::move(sites), static_cast<int>(q), std::move(logw));
}

Configuration glauber_sample(const GibbsSpec& spec, const Point& lo, const Point& hi,
                             int boundary_letter, std::size_t sweeps, std::uint64_t seed) {
  spec.validate();
  const int q = spec.alphabet_size();
  if (boundary_letter < 0 || boundary_letter >= q)
    throw ConfigError("glauber: boundary letter out of range");
  Configuration field(spec.dim, lo, hi, boundary_letter);
  const auto sites = field.sites();
  SplitMix64 rng(seed);

  std::vector<double> cumulative(static_cast<std::size_t>(q));
  double prior_total = 0.0;
  for (int a = 0; a < q; ++a) {
    prior_total += spec.prior_weight(a);
    cumulative[static_cast<std::size_t>(a)] = prior_total;
  }
  auto pick = [&](double u) {
    const double target = u * cumulative.back();
    for (int a = 0; a < q; ++a)
      if (target < cumulative[static_cast<std::size_t>(a)]) return a;
    return q - 1;
  };
  for (const auto& x : sites) field.set(x, pick(rng.uniform()));

  std::vector<double> logw(static_cast<std::size_t>(q));
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
    for (const auto& x : sites) {
      for (int a = 0; a < q; ++a) {
        double energy = 0.0;
        for (const auto& term : spec.interaction)
          for (std::size_t i = 0; i < term.shape.size(); ++i) {
            const Point anchor = x - term.shape[i];
            std::size_t idx = 0, mult = 1;
            for (std::size_t j = 0; j < term.shape.size(); ++j) {
              const int b = j == i ? a : field.at(anchor + term.shape[j]);
              idx += static_cast<std::size_t>(b) * mult;
              mult *= static_cast<std::size_t>(q);
            }
            energy += term.energy[idx];
          }
        logw[static_cast<std::size_t>(a)] = std::log(spec.prior_weight(a)) - spec.beta * energy;
      }
      const double top = *std::max_element(logw.begin(), logw.end());
      double total = 0.0;
      for (double& w : logw) {
        w = std::exp(w - top);
        total += w;
      }
      double target = rng.uniform() * total;
      int chosen = q - 1;
      for (int a = 0; a < q; ++a) {
        target -= logw[static_cast<std::size_t>(a)];
        if (target < 0.0) {
          chosen = a;
          break;
        }
      }
      field.set(x, chosen);
    }
  }
  return field;
}

}  // namespace rwre
