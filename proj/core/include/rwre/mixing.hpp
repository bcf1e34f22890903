#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rwre/gibbs.hpp"
#include "rwre/lattice.hpp"

namespace rwre {

/// sup over events of p(E) - q(E), i.e. half the L1 distance.
double variational_distance(std::span<const double> p, std::span<const double> q);

/// How boundary conditions outside V are chosen: every assignment of the
/// r-boundary when there are at most exhaustive_cap of them, otherwise
/// `trials` random assignments.
struct BoundaryScan {
  std::size_t exhaustive_cap = 4096;
  std::size_t trials = 256;
  std::uint64_t seed = 0;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
};

struct DsMixingResult {
  Point x;
  Coord dist = 0;
  /// sup over boundary pairs differing only at x of the variational distance
  /// between the Lambda-marginals of the conditional laws on V.
  double max_distance = 0.0;
  std::size_t pairs = 0;
  bool exhaustive = false;
};

DsMixingResult ds_mixing_check(const GibbsSpec& spec, std::span<const Point> volume,
                               std::span<const Point> lambda, const Point& x,
                               const BoundaryScan& scan = {});

struct DecayFit {
  double G = 0.0;
  double g = 0.0;
  std::size_t points = 0;
};

/// g from a least-squares line through (dist, log distance) over samples with
/// positive distance; G the smallest constant with every sample <= G e^{-g dist}.
DecayFit fit_decay(std::span<const DsMixingResult> samples);

/// max over samples of distance / (G e^{-g dist}).
double decay_violation(std::span<const DsMixingResult> samples, double G, double g);

struct MixingCertificate {
  double G = 0.0;
  double g = 0.0;
  double c1 = 1.0;
  /// C1 G e^{g r}.
  double c = 0.0;
  double max_violation = 0.0;
};

MixingCertificate make_certificate(const GibbsSpec& spec, double G, double g,
                                   std::span<const DsMixingResult> samples);

struct DensityRatioResult {
  double max_ratio = 1.0;
  double c1 = 1.0;
  std::size_t instances = 0;
  bool holds = true;
};

/// max over boundary pairs differing at x and configurations xi_V of
/// Q_V^omega(xi) / Q_V^omega-bar(xi), against C1.
DensityRatioResult density_ratio_check(const GibbsSpec& spec, std::span<const Point> volume,
                                       const Point& x, const BoundaryScan& scan = {});

struct FlipResult {
  double max_deviation = 0.0;
  double bound = 0.0;
  /// max_deviation / bound.
  double worst_ratio = 0.0;
  std::size_t instances = 0;
  bool holds = true;
};

/// |dQ^omega_{V,Lambda} / dQ^omega-bar_{V,Lambda} - 1| for boundary pairs
/// differing at x, against C sum_{y in inner r-boundary of Lambda} e^{-g dist(x,y)}.
/// Needs dist(Lambda, V^c) > r.
FlipResult single_site_flip_check(const GibbsSpec& spec, std::span<const Point> volume,
                                  std::span<const Point> lambda, const Point& x,
                                  const MixingCertificate& cert, const BoundaryScan& scan = {});

struct SurrogateOptions {
  Coord initial_radius = 4;
  double tolerance = 1e-6;
  std::size_t cap = kDefaultEnumerationCap;
  int boundary_letter = 0;
};

/// The infinite-volume field approximated by the conditional law on the
/// bounding box of Lambda and `contain`, widened by R on every side (fixed
/// boundary letter). R doubles while the Lambda-marginal moves by at least
/// `tolerance` in variational distance and the cap allows.
struct Surrogate {
  Coord radius = 0;
  double change = 1.0;
  bool converged = false;
  ConditionalTable table;
};

Surrogate surrogate_field(const GibbsSpec& spec, std::span<const Point> lambda,
                          std::span<const Point> contain, const SurrogateOptions& options = {});

struct FunctionRatio {
  std::string name;
  double max_ratio = 1.0;
};

struct ConditionalRatioReport {
  std::vector<FunctionRatio> functions;
  double max_ratio = 1.0;
  /// sum over x in the inner r-boundary of H, y in that of Lambda, of
  /// e^{-g dist(x,y)}, truncated once a shell adds less than 1e-12.
  double exponent_sum = 0.0;
  double tail_bound = 0.0;
  double bound = 1.0;
  bool holds = true;
  Coord surrogate_radius = 0;
  double surrogate_change = 0.0;
  bool surrogate_converged = false;
};

/// sup over F in the catalog (cylinder indicators of Lambda and single-site
/// transition probabilities) and over configurations on H of
/// E(F | H) / E(F), for the half-space H = {x : x_0 >= h}, against
/// exp(C * exponent_sum). Needs Lambda in H^c with dist(Lambda, H) > r.
ConditionalRatioReport conditional_ratio_check(const GibbsSpec& spec, Coord h,
                                               std::span<const Point> lambda,
                                               const MixingCertificate& cert,
                                               const SurrogateOptions& options = {});

struct SiteConditionalBounds {
  /// Range over neighbourhood configurations of P(sigma_0 = a | rest) / P(sigma_0 = a).
  double observed_min = 1.0;
  double observed_max = 1.0;
  /// C1^-2 and C1^2.
  double a = 1.0;
  double b = 1.0;
  bool holds = true;
};

SiteConditionalBounds site_conditional_bounds(const GibbsSpec& spec,
                                              const SurrogateOptions& options = {});

}  // namespace rwre
