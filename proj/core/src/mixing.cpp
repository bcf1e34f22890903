#include "rwre/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <string>

#include "rwre/errors.hpp"
#include "rwre/hash.hpp"

namespace rwre {

double variational_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ConfigError("variational distance: size mismatch");
  double l1 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) l1 += std::abs(p[i] - q[i]);
  return 0.5 * l1;
}

namespace {

constexpr double kSlack = 1e-9;

std::size_t power(std::size_t base, std::size_t exp, std::size_t cap) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (out > cap / std::max<std::size_t>(base, 1)) return cap + 1;
    out *= base;
  }
  return out;
}

std::vector<std::size_t> positions_in(const ConditionalTable& table, std::span<const Point> sites) {
  std::vector<std::size_t> out;
  for (const auto& s : sites) out.push_back(table.position_of(s));
  return out;
}

struct ScanInfo {
  std::size_t pairs = 0;
  bool exhaustive = false;
};

// Calls visit(table_a, table_b) for boundary conditions that agree off x and
// carry distinct letters a < b at x.
ScanInfo scan_pairs(const GibbsSpec& spec, std::span<const Point> volume, const Point& x,
                    const BoundaryScan& scan,
                    const std::function<void(const ConditionalTable&, const ConditionalTable&)>& visit) {
  spec.validate();
  if (volume.empty()) throw ConfigError("mixing: empty volume");
  if (std::find(volume.begin(), volume.end(), x) != volume.end())
    throw ConfigError("mixing: the flipped site must lie outside the volume");
  const auto q = static_cast<std::size_t>(spec.alphabet_size());
  if (q < 2) return {};

  Point lo = x, hi = x;
  for (const auto& v : volume)
    for (std::size_t i = 0; i < kMaxDim; ++i) {
      lo[i] = std::min(lo[i], v[i] - spec.range);
      hi[i] = std::max(hi[i], v[i] + spec.range);
    }
  std::vector<Point> free_sites;
  for (const auto& b : outer_boundary(volume, spec.range, spec.dim))
    if (b != x) free_sites.push_back(b);

  const std::size_t total = power(q, free_sites.size(), scan.exhaustive_cap);
  ScanInfo info;
  info.exhaustive = total <= scan.exhaustive_cap;
  const std::size_t rounds = info.exhaustive ? total : scan.trials;
  SplitMix64 rng(derive_seed(scan.seed, "boundary-scan"));

  Configuration base(spec.dim, lo, hi, 0);
  for (std::size_t round = 0; round < rounds; ++round) {
    std::size_t rest = round;
    for (const auto& s : free_sites) {
      std::size_t letter;
      if (info.exhaustive) {
        letter = rest % q;
        rest /= q;
      } else {
        letter = std::min(q - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(q)));
      }
      base.set(s, static_cast<int>(letter));
    }
    std::vector<ConditionalTable> tables;
    for (std::size_t a = 0; a < q; ++a) {
      base.set(x, static_cast<int>(a));
      tables.push_back(exact_conditional(spec, volume, base, scan.enumeration_cap));
    }
    for (std::size_t a = 0; a < q; ++a)
      for (std::size_t b = a + 1; b < q; ++b) {
        visit(tables[a], tables[b]);
        ++info.pairs;
      }
  }
  return info;
}

void require_subset(std::span<const Point> inner, std::span<const Point> volume) {
  const std::set<Point> v(volume.begin(), volume.end());
  for (const auto& p : inner)
    if (!v.count(p)) throw ConfigError("mixing: Lambda must be contained in the volume");
}

}  // namespace

DsMixingResult ds_mixing_check(const GibbsSpec& spec, std::span<const Point> volume,
                               std::span<const Point> lambda, const Point& x,
                               const BoundaryScan& scan) {
  require_subset(lambda, volume);
  DsMixingResult out;
  out.x = x;
  out.dist = std::numeric_limits<Coord>::max();
  for (const auto& y : lambda) out.dist = std::min(out.dist, sup_dist(x, y));
  const auto info = scan_pairs(spec, volume, x, scan,
                               [&](const ConditionalTable& ta, const ConditionalTable& tb) {
                                 const auto pos = positions_in(ta, lambda);
                                 const auto ma = ta.marginal(pos);
                                 const auto mb = tb.marginal(pos);
                                 out.max_distance =
                                     std::max(out.max_distance, variational_distance(ma, mb));
                               });
  out.pairs = info.pairs;
  out.exhaustive = info.exhaustive;
  return out;
}

DecayFit fit_decay(std::span<const DsMixingResult> samples) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : samples)
    if (s.max_distance > 0.0)
      pts.emplace_back(static_cast<double>(s.dist), std::log(s.max_distance));
  DecayFit fit;
  fit.points = pts.size();
  if (pts.empty()) return fit;
  double mx = 0.0, my = 0.0;
  for (const auto& [d, l] : pts) {
    mx += d;
    my += l;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [d, l] : pts) {
    sxx += (d - mx) * (d - mx);
    sxy += (d - mx) * (l - my);
  }
  fit.g = sxx > 0.0 ? -sxy / sxx : 0.0;
  for (const auto& s : samples)
    fit.G = std::max(fit.G, s.max_distance * std::exp(fit.g * static_cast<double>(s.dist)));
  return fit;
}

double decay_violation(std::span<const DsMixingResult> samples, double G, double g) {
  double worst = 0.0;
  for (const auto& s : samples) {
    if (s.max_distance <= 0.0) continue;
    const double bound = G * std::exp(-g * static_cast<double>(s.dist));
    worst = std::max(worst, bound > 0.0 ? s.max_distance / bound
                                        : std::numeric_limits<double>::infinity());
  }
  return worst;
}

MixingCertificate make_certificate(const GibbsSpec& spec, double G, double g,
                                   std::span<const DsMixingResult> samples) {
  if (!(G >= 0.0) || !std::isfinite(G) || !std::isfinite(g))
    throw ConfigError("mixing certificate: G must be finite and >= 0, g finite");
  MixingCertificate cert;
  cert.G = G;
  cert.g = g;
  cert.c1 = spec.c1();
  cert.c = cert.c1 * G * std::exp(g * static_cast<double>(spec.range));
  cert.max_violation = decay_violation(samples, G, g);
  return cert;
}

DensityRatioResult density_ratio_check(const GibbsSpec& spec, std::span<const Point> volume,
                                       const Point& x, const BoundaryScan& scan) {
  DensityRatioResult out;
  out.c1 = spec.c1();
  scan_pairs(spec, volume, x, scan, [&](const ConditionalTable& ta, const ConditionalTable& tb) {
    for (std::size_t c = 0; c < ta.size(); ++c) {
      const double pa = ta.probs()[c], pb = tb.probs()[c];
      out.max_ratio = std::max({out.max_ratio, pa / pb, pb / pa});
      ++out.instances;
    }
  });
  out.holds = out.max_ratio <= out.c1 * (1.0 + kSlack);
  return out;
}

FlipResult single_site_flip_check(const GibbsSpec& spec, std::span<const Point> volume,
                                  std::span<const Point> lambda, const Point& x,
                                  const MixingCertificate& cert, const BoundaryScan& scan) {
  require_subset(lambda, volume);
  const std::set<Point> v(volume.begin(), volume.end());
  const auto ball = sup_ball(spec.dim, spec.range);
  for (const auto& y : lambda)
    for (const auto& e : ball)
      if (!v.count(y + e))
        throw ConfigError("flip check: Lambda must be at distance > r from the complement of V");

  FlipResult out;
  double sum = 0.0;
  for (const auto& y : inner_boundary(lambda, spec.range, spec.dim))
    sum += std::exp(-cert.g * static_cast<double>(sup_dist(x, y)));
  out.bound = cert.c * sum;

  scan_pairs(spec, volume, x, scan, [&](const ConditionalTable& ta, const ConditionalTable& tb) {
    const auto pos = positions_in(ta, lambda);
    const auto ma = ta.marginal(pos);
    const auto mb = tb.marginal(pos);
    for (std::size_t c = 0; c < ma.size(); ++c) {
      out.max_deviation =
          std::max({out.max_deviation, std::abs(ma[c] / mb[c] - 1.0), std::abs(mb[c] / ma[c] - 1.0)});
      ++out.instances;
    }
  });
  out.worst_ratio = out.bound > 0.0 ? out.max_deviation / out.bound
                    : out.max_deviation > 0.0 ? std::numeric_limits<double>::infinity()
                                              : 0.0;
  out.holds = out.max_deviation <= out.bound * (1.0 + kSlack) + 1e-12;
  return out;
}

namespace {

struct Box {
  Point lo, hi;
};

Box widened(const Box& b, Coord by, int dim) {
  Box out = b;
  for (int i = 0; i < dim; ++i) {
    out.lo[static_cast<std::size_t>(i)] -= by;
    out.hi[static_cast<std::size_t>(i)] += by;
  }
  return out;
}

std::size_t box_sites(const Box& b, int dim, std::size_t cap) {
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) {
    const auto w = static_cast<std::size_t>(b.hi[static_cast<std::size_t>(i)] -
                                            b.lo[static_cast<std::size_t>(i)] + 1);
    if (n > cap / w) return cap + 1;
    n *= w;
  }
  return n;
}

ConditionalTable box_law(const GibbsSpec& spec, const Box& box, const SurrogateOptions& o) {
  const auto sites = Configuration(spec.dim, box.lo, box.hi, 0).sites();
  const Box outer = widened(box, spec.range, spec.dim);
  const Configuration boundary(spec.dim, outer.lo, outer.hi, o.boundary_letter);
  return exact_conditional(spec, sites, boundary, o.cap);
}

}  // namespace

Surrogate surrogate_field(const GibbsSpec& spec, std::span<const Point> lambda,
                          std::span<const Point> contain, const SurrogateOptions& o) {
  spec.validate();
  if (lambda.empty()) throw ConfigError("surrogate: empty Lambda");
  if (o.boundary_letter < 0 || o.boundary_letter >= spec.alphabet_size())
    throw ConfigError("surrogate: boundary letter out of range");
  Box core{lambda.front(), lambda.front()};
  auto include = [&](const Point& p) {
    for (std::size_t i = 0; i < kMaxDim; ++i) {
      core.lo[i] = std::min(core.lo[i], p[i]);
      core.hi[i] = std::max(core.hi[i], p[i]);
    }
  };
  for (const auto& p : lambda) include(p);
  for (const auto& p : contain) include(p);

  const auto q = static_cast<std::size_t>(spec.alphabet_size());
  auto fits = [&](Coord r) {
    return power(q, box_sites(widened(core, r, spec.dim), spec.dim, o.cap), o.cap) <= o.cap;
  };
  const Coord radius = std::max<Coord>(o.initial_radius, 1);
  Surrogate out{radius, 1.0, false, box_law(spec, widened(core, radius, spec.dim), o)};
  while (fits(2 * out.radius)) {
    const Coord next = 2 * out.radius;
    ConditionalTable table = box_law(spec, widened(core, next, spec.dim), o);
    const auto m_old = out.table.marginal(positions_in(out.table, lambda));
    const auto m_new = table.marginal(positions_in(table, lambda));
    out.change = variational_distance(m_old, m_new);
    out.radius = next;
    out.table = std::move(table);
    if (out.change < o.tolerance) {
      out.converged = true;
      break;
    }
  }
  return out;
}

namespace {

// sum over x in {h <= x_0 <= h + r - 1} of e^{-g dist(x, y)}; the transverse
// directions are summed shell by shell around y.
std::pair<double, double> half_space_sum(int dim, Coord h, Coord r, double g, const Point& y) {
  if (r < 1) return {0.0, 0.0};
  auto shell_count = [&](Coord t) {
    if (t == 0) return 1.0;
    const double outer = std::pow(2.0 * static_cast<double>(t) + 1.0, dim - 1);
    const double inner = std::pow(2.0 * static_cast<double>(t) - 1.0, dim - 1);
    return outer - inner;
  };
  auto shell = [&](Coord t) {
    double s = 0.0;
    for (Coord x0 = h; x0 <= h + r - 1; ++x0) {
      const Coord d = std::max(std::abs(x0 - y[0]), t);
      s += std::exp(-g * static_cast<double>(d));
    }
    return shell_count(t) * s;
  };
  if (dim == 1) return {shell(0), 0.0};
  if (!(g > 0.0)) throw ConfigError("conditional ratio: decay rate must be > 0 for d >= 2");
  const Coord reach = std::abs(h - y[0]) + r;
  double sum = 0.0;
  Coord t = 0;
  for (;; ++t) {
    const double s = shell(t);
    sum += s;
    if (t >= reach && s < 1e-12) break;
  }
  double tail = 0.0;
  for (++t; t < 10'000'000; ++t) {
    const double s = shell(t);
    tail += s;
    if (s < 1e-300) break;
  }
  return {sum, tail};
}

}  // namespace

ConditionalRatioReport conditional_ratio_check(const GibbsSpec& spec, Coord h,
                                               std::span<const Point> lambda,
                                               const MixingCertificate& cert,
                                               const SurrogateOptions& options) {
  spec.validate();
  if (lambda.empty()) throw ConfigError("conditional ratio: empty Lambda");
  for (const auto& y : lambda)
    if (h - y[0] <= spec.range)
      throw ConfigError("conditional ratio: Lambda must be at distance > r from H");

  // The box reaches r sites into H, so the conditioning covers the inner
  // r-boundary of H.
  std::vector<Point> contain;
  for (const auto& y : lambda) {
    Point p = y;
    p[0] = h + spec.range - 1;
    contain.push_back(p);
  }
  const Surrogate field = surrogate_field(spec, lambda, contain, options);
  const auto& table = field.table;

  ConditionalRatioReport out;
  out.surrogate_radius = field.radius;
  out.surrogate_change = field.change;
  out.surrogate_converged = field.converged;

  std::vector<std::size_t> pos = positions_in(table, lambda);
  const std::size_t n_lambda = pos.size();
  for (std::size_t i = 0; i < table.sites().size(); ++i)
    if (table.sites()[i][0] >= h) pos.push_back(i);
  const auto joint = table.marginal(pos);
  const auto q = static_cast<std::size_t>(spec.alphabet_size());
  const std::size_t lambda_configs = power(q, n_lambda, std::numeric_limits<std::size_t>::max());
  const std::size_t h_configs = joint.size() / lambda_configs;

  std::vector<double> p_lambda(lambda_configs, 0.0), p_h(h_configs, 0.0);
  for (std::size_t hc = 0; hc < h_configs; ++hc)
    for (std::size_t lc = 0; lc < lambda_configs; ++lc) {
      const double p = joint[lc + lambda_configs * hc];
      p_lambda[lc] += p;
      p_h[hc] += p;
    }

  auto evaluate = [&](const std::string& name, const std::vector<double>& f) {
    double mean = 0.0;
    for (std::size_t lc = 0; lc < lambda_configs; ++lc) mean += f[lc] * p_lambda[lc];
    if (!(mean > 0.0)) return;
    double worst = 0.0;
    for (std::size_t hc = 0; hc < h_configs; ++hc) {
      if (!(p_h[hc] > 0.0)) continue;
      double cond = 0.0;
      for (std::size_t lc = 0; lc < lambda_configs; ++lc)
        cond += f[lc] * joint[lc + lambda_configs * hc];
      worst = std::max(worst, cond / p_h[hc] / mean);
    }
    out.functions.push_back({name, worst});
    out.max_ratio = std::max(out.max_ratio, worst);
  };

  auto letter_of = [&](std::size_t lc, std::size_t i) {
    for (std::size_t k = 0; k < i; ++k) lc /= q;
    return static_cast<int>(lc % q);
  };
  for (std::size_t lc = 0; lc < lambda_configs; ++lc) {
    std::vector<double> f(lambda_configs, 0.0);
    f[lc] = 1.0;
    evaluate("cylinder#" + std::to_string(lc), f);
  }
  std::set<Point> offsets;
  for (const auto& letter : spec.alphabet) offsets.insert(letter.offsets.begin(), letter.offsets.end());
  for (std::size_t i = 0; i < n_lambda; ++i)
    for (const auto& e : offsets) {
      std::vector<double> f(lambda_configs);
      for (std::size_t lc = 0; lc < lambda_configs; ++lc)
        f[lc] = spec.alphabet[static_cast<std::size_t>(letter_of(lc, i))].prob(e);
      evaluate("pi(" + format_point(lambda[i], spec.dim) + "," + format_point(e, spec.dim) + ")", f);
    }

  if (cert.c > 0.0) {
    for (const auto& y : inner_boundary(lambda, spec.range, spec.dim)) {
      const auto [sum, tail] = half_space_sum(spec.dim, h, spec.range, cert.g, y);
      out.exponent_sum += sum;
      out.tail_bound += tail;
    }
  }
  out.bound = std::exp(cert.c * (out.exponent_sum + out.tail_bound));
  out.holds = out.max_ratio <= out.bound * (1.0 + kSlack);
  return out;
}

SiteConditionalBounds site_conditional_bounds(const GibbsSpec& spec, const SurrogateOptions& o) {
  const std::vector<Point> origin{Point{}};
  const Surrogate field = surrogate_field(spec, origin, {}, o);
  const auto p0 = field.table.marginal(positions_in(field.table, origin));

  SiteConditionalBounds out;
  const double c1 = spec.c1();
  out.a = 1.0 / (c1 * c1);
  out.b = c1 * c1;
  out.observed_min = std::numeric_limits<double>::infinity();
  out.observed_max = 0.0;

  std::vector<Point> neighbours;
  for (const auto& e : sup_ball(spec.dim, spec.range))
    if (e != Point{}) neighbours.push_back(e);
  const auto q = static_cast<std::size_t>(spec.alphabet_size());
  const std::size_t total = power(q, neighbours.size(), o.cap);
  if (total > o.cap) throw EnumerationCapExceeded("site conditional bounds: neighbourhood too large");
  Point lo, hi;
  for (int i = 0; i < spec.dim; ++i) {
    lo[static_cast<std::size_t>(i)] = -spec.range;
    hi[static_cast<std::size_t>(i)] = spec.range;
  }
  Configuration boundary(spec.dim, lo, hi, o.boundary_letter);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rest = c;
    for (const auto& n : neighbours) {
      boundary.set(n, static_cast<int>(rest % q));
      rest /= q;
    }
    const auto local = exact_conditional(spec, origin, boundary, o.cap);
    for (std::size_t a = 0; a < q; ++a) {
      const double ratio = local.probs()[a] / p0[a];
      out.observed_min = std::min(out.observed_min, ratio);
      out.observed_max = std::max(out.observed_max, ratio);
    }
  }
  out.holds = out.observed_min >= out.a * (1.0 - kSlack) && out.observed_max <= out.b * (1.0 + kSlack);
  return out;
}

}  // namespace rwre
