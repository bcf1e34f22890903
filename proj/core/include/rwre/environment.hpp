#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rwre/gibbs.hpp"
#include "rwre/lattice.hpp"
#include "rwre/transition.hpp"

namespace rwre {

namespace law {

/// The same vector at every site.
struct Constant {
  TransitionVector vector;
};

/// Letters drawn independently per site with the given weights.
struct IidFiniteAlphabet {
  std::vector<TransitionVector> letters;
  std::vector<double> weights;
};

/// Two-dimensional field of arrows: {(1,0): 1} or {(0,1): 1}, each with
/// probability 1/2, independently per site.
struct Northeast {};

/// Independent Dirichlet(concentration) vectors on a fixed offset list.
struct IidDirichlet {
  std::vector<Point> offsets;
  std::vector<double> concentration;
};

/// Finite-alphabet field that is independent across sites whose projections
/// on `direction` differ by at least `gap`. Each site copies, with probability
/// `coupling`, a shared layer letter from one of the `gap` layers at or just
/// below its own projection (picked uniformly per site); otherwise it draws
/// its own letter. Every single-site marginal is `weights`.
struct LDependent {
  std::vector<TransitionVector> letters;
  std::vector<double> weights;
  Coord gap = 1;
  double coupling = 0.5;
  Point direction{1};
};

/// Gibbs field realized once on the box [lo, hi] by Glauber sweeps with a
/// fixed boundary letter. Sites outside the box are not available.
struct GibbsWindow {
  GibbsSpec spec;
  Point lo, hi;
  int boundary_letter = 0;
  std::size_t burn_in_sweeps = 1000;
};

}  // namespace law

using Law = std::variant<law::Constant, law::IidFiniteAlphabet, law::Northeast,
                         law::IidDirichlet, law::LDependent, law::GibbsWindow>;

/// A law on transition-vector fields, plus the seed that selects one field.
struct EnvironmentModel {
  Law law;
  int dim = 1;
  Coord range = 1;
  std::uint64_t master_seed = 0;

  /// "constant", "iid-finite-alphabet", "deterministic-ne", "iid-dirichlet",
  /// "l-dependent" or "gibbs-window".
  std::string kind() const;

  EnvironmentModel with_seed(std::uint64_t seed) const;

  /// Union of all offsets any site can use.
  std::vector<Point> stencil() const;

  /// Letters a site can take, for finite-alphabet laws (empty otherwise).
  std::vector<TransitionVector> letters() const;

  /// Exact single-site marginal weights over letters(), when known in closed
  /// form (not for Gibbs windows or Dirichlet).
  std::optional<std::vector<double>> marginal_weights() const;

  void validate() const;
};

EnvironmentModel constant_model(TransitionVector v, int dim, Coord range = 1,
                                std::uint64_t seed = 0);
EnvironmentModel iid_alphabet_model(std::vector<TransitionVector> letters,
                                    std::vector<double> weights, int dim, Coord range,
                                    std::uint64_t seed);
EnvironmentModel northeast_model(std::uint64_t seed);
EnvironmentModel dirichlet_model(std::vector<Point> offsets, std::vector<double> concentration,
                                 int dim, Coord range, std::uint64_t seed);
EnvironmentModel l_dependent_model(std::vector<TransitionVector> letters,
                                   std::vector<double> weights, Coord gap, double coupling,
                                   Point direction, int dim, Coord range, std::uint64_t seed);
EnvironmentModel gibbs_window_model(GibbsSpec spec, Point lo, Point hi, int boundary_letter,
                                    std::size_t burn_in_sweeps, Coord range, std::uint64_t seed);

/// One realization omega of a model, possibly viewed from a shifted origin
/// (T^x omega). Cheap to copy; Gibbs windows are realized at construction.
class Environment {
 public:
  explicit Environment(const EnvironmentModel& model);

  const EnvironmentModel& model() const;
  int dim() const;
  const Point& shift() const { return shift_; }

  /// omega_x. Throws WindowExceeded outside a Gibbs window.
  TransitionVector at(const Point& site) const;
  Vec drift_at(const Point& site) const;

  /// Index into model().letters(), or -1 for laws without a finite alphabet.
  int letter_at(const Point& site) const;

  /// Displacement chosen at `site` by inverting the cumulative law at u in
  /// [0, 1). Allocation-free for finite-alphabet laws.
  Point draw_step(const Point& site, double u) const;

  /// The environment seen from x: (T^x omega)_y = omega_{x+y}.
  Environment shifted(const Point& by) const;

 private:
  struct State;
  const TransitionVector* letter_ref(const Point& absolute, int* letter) const;
  TransitionVector dirichlet_at(const Point& absolute) const;

  std::shared_ptr<const State> state_;
  Point shift_{};
};

/// omega_site for the model's own seed. For Gibbs windows this realizes the
/// window on every call; hold an Environment to sample many sites.
TransitionVector sample_site(const EnvironmentModel& model, const Point& site);

struct EllipticityReport {
  std::optional<double> kappa_hat;
  bool strong_ok = false;
  bool weak_ok = false;
  std::string witness;
  Vec ell{};
};

/// Exact for finite-alphabet and constant laws: kappa is the smallest
/// probability any possible letter gives to any offset of the model stencil.
/// The weak condition asks pi_{0j} > 0 for every unit j with j.ell >= 0.
EllipticityReport check_ellipticity(const EnvironmentModel& model, const Vec& ell);

}  // namespace rwre
