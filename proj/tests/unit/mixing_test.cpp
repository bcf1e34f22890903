#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rwre/errors.hpp"
#include "rwre/gibbs.hpp"
#include "rwre/mixing.hpp"

namespace {

using rwre::Point;
using rwre::nearest_neighbor_1d;

const std::vector<rwre::TransitionVector> kLetters{nearest_neighbor_1d(0.95), nearest_neighbor_1d(0.45)};

std::vector<Point> interval(rwre::Coord a, rwre::Coord b) {
  std::vector<Point> out;
  for (auto x = a; x <= b; ++x) out.push_back(Point(x));
  return out;
}

// Ising chain law on {0..n-1} with boundary spins left/right, by hand.
std::vector<double> chain_law(int n, double beta, double j, int left, int right) {
  std::vector<double> w(std::size_t{1} << n);
  double z = 0.0;
  for (std::size_t c = 0; c < w.size(); ++c) {
    std::vector<double> s{left == 0 ? 1.0 : -1.0};
    for (int i = 0; i < n; ++i) s.push_back((c >> i) & 1 ? -1.0 : 1.0);
    s.push_back(right == 0 ? 1.0 : -1.0);
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) e -= j * s[i] * s[i + 1];
    w[c] = std::exp(-beta * e);
    z += w[c];
  }
  for (auto& v : w) v /= z;
  return w;
}

// sup over all events E of the two-site marginal of P(E) - Q(E).
double tv_by_events(const std::vector<double>& p, const std::vector<double>& q, int a, int b) {
  std::vector<double> mp(4, 0.0), mq(4, 0.0);
  for (std::size_t c = 0; c < p.size(); ++c) {
    const std::size_t k = ((c >> a) & 1) + 2 * ((c >> b) & 1);
    mp[k] += p[c];
    mq[k] += q[c];
  }
  double best = 0.0;
  for (int e = 0; e < 16; ++e) {
    double d = 0.0;
    for (int k = 0; k < 4; ++k)
      if ((e >> k) & 1) d += mp[static_cast<std::size_t>(k)] - mq[static_cast<std::size_t>(k)];
    best = std::max(best, d);
  }
  return best;
}

TEST(Mixing, VariationalDistance) {
  const std::vector<double> p{0.5, 0.5, 0.0}, q{0.25, 0.25, 0.5};
  EXPECT_DOUBLE_EQ(rwre::variational_distance(p, q), 0.5);
  EXPECT_EQ(rwre::variational_distance(p, p), 0.0);
}

TEST(Mixing, DsDistanceMatchesEventEnumeration) {
  const double beta = 0.4, j = 1.0;
  const auto spec = rwre::ising_spec(1, kLetters, j, 0.0, beta);
  const auto v = interval(0, 3);
  const std::vector<Point> lambda{Point(1), Point(2)};
  const auto r = rwre::ds_mixing_check(spec, v, lambda, Point(-1));
  EXPECT_TRUE(r.exhaustive);
  EXPECT_EQ(r.dist, 2);
  double expected = 0.0;
  for (int right = 0; right < 2; ++right) {
    const auto p = chain_law(4, beta, j, 0, right);
    const auto q = chain_law(4, beta, j, 1, right);
    expected = std::max({expected, tv_by_events(p, q, 1, 2), tv_by_events(q, p, 1, 2)});
  }
  EXPECT_NEAR(r.max_distance, expected, 1e-12);
}

TEST(Mixing, ZeroBetaHasNoInfluence) {
  const auto spec = rwre::ising_spec(1, kLetters, 1.0, 0.0, 0.0);
  const auto v = interval(0, 4);
  EXPECT_EQ(rwre::ds_mixing_check(spec, v, std::vector<Point>{Point(0)}, Point(-1)).max_distance, 0.0);
  const auto d = rwre::density_ratio_check(spec, v, Point(5));
  EXPECT_NEAR(d.max_ratio, 1.0, 1e-14);
  EXPECT_TRUE(d.holds);
}

TEST(Mixing, DecayFitAndEnvelope) {
  const auto spec = rwre::ising_spec(1, kLetters, 1.0, 0.0, 0.3);
  const auto v = interval(0, 5);
  std::vector<rwre::DsMixingResult> ds;
  for (const auto& y : v) ds.push_back(rwre::ds_mixing_check(spec, v, std::vector<Point>{y}, Point(-1)));
  for (std::size_t i = 1; i < ds.size(); ++i) EXPECT_LT(ds[i].max_distance, ds[i - 1].max_distance);
  const auto fit = rwre::fit_decay(ds);
  EXPECT_GT(fit.g, 0.0);
  // For a 1-D Ising chain influence decays like tanh(beta J)^dist.
  EXPECT_NEAR(fit.g, -std::log(std::tanh(0.3)), 0.3);
  EXPECT_LE(rwre::decay_violation(ds, fit.G, fit.g), 1.0 + 1e-12);
  const auto cert = rwre::make_certificate(spec, fit.G, fit.g, ds);
  EXPECT_NEAR(cert.c, spec.c1() * fit.G * std::exp(fit.g), 1e-12 * cert.c);
}

TEST(Mixing, DensityRatioBoundedByC1) {
  for (double beta : {0.02, 0.1, 0.5}) {
    const auto spec = rwre::ising_spec(1, kLetters, 1.0, 0.2, beta);
    const auto r = rwre::density_ratio_check(spec, interval(0, 5), Point(6));
    EXPECT_TRUE(r.holds);
    EXPECT_LE(r.max_ratio, spec.c1() * (1 + 1e-10));
    // Flipping one boundary spin changes the energy by at most 4 beta J:
    // the ratio of conditional laws is at most e^{8 beta J}.
    EXPECT_LE(r.max_ratio, std::exp(8 * beta) * (1 + 1e-12));
    EXPECT_GT(r.max_ratio, 1.0);
  }
}

TEST(Mixing, FlipBound) {
  const auto spec = rwre::ising_spec(1, kLetters, 1.0, 0.0, 0.05);
  const auto v = interval(0, 5);
  std::vector<rwre::DsMixingResult> ds;
  for (const auto& x : {Point(-1), Point(6)})
    for (const auto& y : v) ds.push_back(rwre::ds_mixing_check(spec, v, std::vector<Point>{y}, x));
  const auto fit = rwre::fit_decay(ds);
  const auto cert = rwre::make_certificate(spec, fit.G, fit.g, ds);
  const auto r = rwre::single_site_flip_check(spec, v, std::vector<Point>{Point(2)}, Point(-1), cert);
  EXPECT_TRUE(r.holds);
  EXPECT_GT(r.max_deviation, 0.0);
  EXPECT_THROW(rwre::single_site_flip_check(spec, v, std::vector<Point>{Point(0)}, Point(-1), cert),
               rwre::ConfigError);
}

TEST(Mixing, ConditionalRatioAtZeroBetaIsOne) {
  const auto spec = rwre::ising_spec(1, kLetters, 1.0, 0.0, 0.0);
  rwre::MixingCertificate cert;
  cert.G = 1.0;
  cert.g = 1.0;
  cert.c1 = 1.0;
  cert.c = std::exp(1.0);
  rwre::SurrogateOptions so;
  so.cap = std::size_t{1} << 22;
  const auto r = rwre::conditional_ratio_check(spec, 3, std::vector<Point>{Point(0)}, cert, so);
  EXPECT_NEAR(r.max_ratio, 1.0, 1e-12);
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.surrogate_converged);
}

TEST(Mixing, ConditionalRatioHoldsAndGrowsWithBeta) {
  double prev = 1.0;
  for (double beta : {0.01, 0.03, 0.05}) {
    const auto spec = rwre::ising_spec(1, kLetters, 1.0, 0.0, beta);
    const auto v = interval(0, 5);
    std::vector<rwre::DsMixingResult> ds;
    for (const auto& y : v) ds.push_back(rwre::ds_mixing_check(spec, v, std::vector<Point>{y}, Point(-1)));
    const auto fit = rwre::fit_decay(ds);
    const auto cert = rwre::make_certificate(spec, fit.G, fit.g, ds);
    const auto r = rwre::conditional_ratio_check(spec, 3, std::vector<Point>{Point(0)}, cert);
    EXPECT_TRUE(r.holds) << beta;
    EXPECT_GE(r.max_ratio, prev);
    EXPECT_LE(r.max_ratio, r.bound);
    prev = r.max_ratio;
  }
}

TEST(Mixing, SiteConditionalBounds) {
  for (double beta : {0.0, 0.05, 0.2}) {
    const auto spec = rwre::ising_spec(1, kLetters, 1.0, 0.3, beta);
    const auto b = rwre::site_conditional_bounds(spec);
    EXPECT_TRUE(b.holds);
    EXPECT_NEAR(b.a, std::pow(spec.c1(), -2), 1e-12);
    EXPECT_NEAR(b.b, std::pow(spec.c1(), 2), 1e-12);
    EXPECT_GE(b.observed_min, b.a);
    EXPECT_LE(b.observed_max, b.b);
  }
}

TEST(Mixing, SurrogateConverges) {
  const double beta = 0.02;
  const auto spec = rwre::ising_spec(1, kLetters, 1.0, 0.0, beta);
  const std::vector<Point> lambda{Point(0)};
  rwre::SurrogateOptions so;
  so.cap = std::size_t{1} << 22;
  const auto s = rwre::surrogate_field(spec, lambda, {}, so);
  EXPECT_TRUE(s.converged);
  EXPECT_LT(s.change, 1e-6);
  // Zero field: the chain is symmetric, and each fixed end shifts the
  // magnetization at distance R by tanh(beta)^R.
  const auto m = s.table.marginal(std::vector<std::size_t>{s.table.position_of(Point(0))});
  EXPECT_NEAR(m[0], 0.5, std::pow(std::tanh(beta), static_cast<double>(s.radius)) + 1e-12);
  EXPECT_GT(m[0], 0.5);
}

}  // namespace
