#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rwre/lattice.hpp"
#include "rwre/transition.hpp"

namespace rwre {

/// Translation-invariant interaction on one shape. Placed at anchor a it
/// couples the sites a + shape[i]; its energy is looked up by the letters
/// found there, index = sum_i letter_i * q^i.
struct InteractionTerm {
  std::vector<Point> shape;
  std::vector<double> energy;
};

/// Finite-alphabet Gibbs specification over TransitionVector letters.
///
/// The conditional law on a finite volume V given the outside is
///   prior(sigma_V) * exp(-beta * sum_{A : A meets V} U_A) / normaliser,
/// with `prior` an optional a priori single-site weight (uniform if empty).
struct GibbsSpec {
  int dim = 1;
  std::vector<TransitionVector> alphabet;
  std::vector<double> prior;
  std::vector<InteractionTerm> interaction;
  double beta = 0.0;
  Coord range = 1;

  int alphabet_size() const { return static_cast<int>(alphabet.size()); }
  double prior_weight(int letter) const;

  /// sup_A |U_A| over all terms and letter assignments.
  double norm_u() const;

  /// Radon-Nikodym bound between boundary conditions differing at one site:
  /// exp(2^(card{y : |y| <= r} + 1) * beta * norm_u()).
  double c1() const;

  void validate() const;
};

/// Two-letter-or-more nearest-neighbour specification in `dim` dimensions:
/// pair_energy[a][b] on every bond {x, x + e_i}, field[a] on every site.
GibbsSpec nearest_neighbor_spec(int dim, std::vector<TransitionVector> alphabet,
                                const std::vector<std::vector<double>>& pair_energy,
                                const std::vector<double>& field, double beta,
                                std::vector<double> prior = {});

/// Ising-type chain on two letters: spin +1 for letter 0, -1 for letter 1,
/// energy -J s_x s_{x+1} - h s_x.
GibbsSpec ising_spec(int dim, std::vector<TransitionVector> alphabet, double coupling,
                     double field, double beta, std::vector<double> prior = {});

/// Letter assignment stored densely on a box, with a fallback letter outside.
class Configuration {
 public:
  Configuration() = default;
  Configuration(int dim, Point lo, Point hi, int fallback);

  int at(const Point& site) const;
  void set(const Point& site, int letter);
  bool in_box(const Point& site) const;

  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  int dim() const { return dim_; }
  int fallback() const { return fallback_; }
  std::size_t size() const { return letters_.size(); }
  std::vector<Point> sites() const;

 private:
  std::size_t index(const Point& site) const;

  int dim_ = 1;
  Point lo_{}, hi_{};
  std::array<std::size_t, kMaxDim> extent_{};
  int fallback_ = 0;
  std::vector<int> letters_;
};

/// Sites outside `volume` within sup-distance r of it.
std::vector<Point> outer_boundary(std::span<const Point> volume, Coord r, int dim);

/// Sites of `set` within sup-distance r of its complement.
std::vector<Point> inner_boundary(std::span<const Point> set, Coord r, int dim);

/// Exact conditional law on a finite volume; probs[c] is the probability of
/// configuration c, whose letter at sites[i] is (c / q^i) % q.
class ConditionalTable {
 public:
  ConditionalTable(std::vector<Point> sites, int q, std::vector<double> probs);

  const std::vector<Point>& sites() const { return sites_; }
  int alphabet_size() const { return q_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }

  int letter(std::size_t config, std::size_t position) const;
  /// Law of the letters at the given positions (indices into sites()).
  std::vector<double> marginal(std::span<const std::size_t> positions) const;
  std::size_t position_of(const Point& site) const;

 private:
  std::vector<Point> sites_;
  int q_;
  std::vector<double> probs_;
};

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

/// Exhaustive conditional law on `volume` given `boundary` outside it.
/// Throws EnumerationCapExceeded if q^|volume| > cap.
ConditionalTable exact_conditional(const GibbsSpec& spec, std::span<const Point> volume,
                                   const Configuration& boundary,
                                   std::size_t cap = kDefaultEnumerationCap);

/// Heat-bath single-site sweeps over the box [lo, hi] with `boundary_letter`
/// fixed outside; the initial state is drawn from the prior. Pure in `seed`.
Configuration glauber_sample(const GibbsSpec& spec, const Point& lo, const Point& hi,
                             int boundary_letter, std::size_t sweeps, std::uint64_t seed);

}  // namespace rwre
