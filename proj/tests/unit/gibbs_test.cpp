#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "rwre/errors.hpp"
#include "rwre/gibbs.hpp"

namespace {

using rwre::Point;
using rwre::nearest_neighbor_1d;

const std::vector<rwre::TransitionVector> kLetters{nearest_neighbor_1d(0.9), nearest_neighbor_1d(0.4)};

std::vector<Point> interval(rwre::Coord a, rwre::Coord b) {
  std::vector<Point> out;
  for (auto x = a; x <= b; ++x) out.push_back(Point(x));
  return out;
}

double spin(int letter) { return letter == 0 ? 1.0 : -1.0; }

TEST(Gibbs, ZeroBetaIsPrior) {
  const auto spec = rwre::ising_spec(1, kLetters, 1.0, 0.3, 0.0, {0.2, 0.8});
  rwre::Configuration boundary(1, Point(-3), Point(6), 1);
  const auto t = rwre::exact_conditional(spec, interval(0, 2), boundary);
  ASSERT_EQ(t.size(), 8u);
  for (std::size_t c = 0; c < t.size(); ++c) {
    double p = 1.0;
    for (std::size_t i = 0; i < 3; ++i) p *= t.letter(c, i) == 0 ? 0.2 : 0.8;
    EXPECT_NEAR(t.probs()[c], p, 1e-14);
  }
}

TEST(Gibbs, SingleSiteField) {
  // No coupling: P(letter 0) = e^{beta h} / (e^{beta h} + e^{-beta h}).
  const double beta = 0.7, h = 0.4;
  const auto spec = rwre::ising_spec(1, kLetters, 0.0, h, beta);
  rwre::Configuration boundary(1, Point(0), Point(0), 0);
  const auto t = rwre::exact_conditional(spec, interval(0, 0), boundary);
  const double expected = std::exp(beta * h) / (std::exp(beta * h) + std::exp(-beta * h));
  EXPECT_NEAR(t.probs()[0], expected, 1e-14);
}

TEST(Gibbs, ChainMatchesHandEnergy) {
  const double beta = 0.35, j = 1.2, h = -0.3;
  const auto spec = rwre::ising_spec(1, kLetters, j, h, beta);
  rwre::Configuration boundary(1, Point(-1), Point(4), 0);
  boundary.set(Point(-1), 1);
  boundary.set(Point(4), 0);
  const auto t = rwre::exact_conditional(spec, interval(0, 3), boundary);
  std::vector<double> w(t.size());
  for (std::size_t c = 0; c < t.size(); ++c) {
    std::vector<double> s{spin(1)};
    for (std::size_t i = 0; i < 4; ++i) s.push_back(spin(t.letter(c, i)));
    s.push_back(spin(0));
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) e += -j * s[i] * s[i + 1];
    for (std::size_t i = 1; i + 1 < s.size(); ++i) e += -h * s[i];
    w[c] = std::exp(-beta * e);
  }
  const double z = std::accumulate(w.begin(), w.end(), 0.0);
  double total = 0.0;
  for (std::size_t c = 0; c < t.size(); ++c) {
    EXPECT_NEAR(t.probs()[c], w[c] / z, 1e-13);
    total += t.probs()[c];
  }
  EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(Gibbs, NestedConditionalsAreConsistent) {
  // Conditioning the law on V = {0..3} on its sites {2, 3} gives the law on
  // {0, 1} with those letters as boundary.
  const auto spec = rwre::ising_spec(1, kLetters, 0.8, 0.2, 0.6, {0.3, 0.7});
  rwre::Configuration boundary(1, Point(-2), Point(5), 1);
  const auto big = rwre::exact_conditional(spec, interval(0, 3), boundary);
  for (int c2 = 0; c2 < 2; ++c2)
    for (int c3 = 0; c3 < 2; ++c3) {
      rwre::Configuration inner = boundary;
      inner.set(Point(2), c2);
      inner.set(Point(3), c3);
      const auto small = rwre::exact_conditional(spec, interval(0, 1), inner);
      std::vector<double> cond(4, 0.0);
      double mass = 0.0;
      for (std::size_t c = 0; c < big.size(); ++c)
        if (big.letter(c, 2) == c2 && big.letter(c, 3) == c3) {
          cond[static_cast<std::size_t>(big.letter(c, 0) + 2 * big.letter(c, 1))] += big.probs()[c];
          mass += big.probs()[c];
        }
      for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(cond[c] / mass, small.probs()[c], 1e-13);
    }
}

TEST(Gibbs, MarginalSumsOut) {
  const auto spec = rwre::ising_spec(2, kLetters, 0.5, 0.0, 0.4);
  rwre::Configuration boundary(2, Point(-1, -1), Point(2, 2), 0);
  const std::vector<Point> v{Point(0, 0), Point(1, 0), Point(0, 1), Point(1, 1)};
  const auto t = rwre::exact_conditional(spec, v, boundary);
  const std::vector<std::size_t> pos{t.position_of(Point(1, 1))};
  const auto m = t.marginal(pos);
  ASSERT_EQ(m.size(), 2u);
  double p0 = 0.0;
  for (std::size_t c = 0; c < t.size(); ++c)
    if (t.letter(c, pos[0]) == 0) p0 += t.probs()[c];
  EXPECT_NEAR(m[0], p0, 1e-14);
  EXPECT_NEAR(m[0] + m[1], 1.0, 1e-14);
  // Boundary all letter 0 with positive coupling favours letter 0.
  EXPECT_GT(m[0], 0.5);
}

TEST(Gibbs, GlauberMatchesExactLaw) {
  const auto spec = rwre::ising_spec(1, kLetters, 1.0, 0.1, 0.5);
  const auto v = interval(0, 2);
  rwre::Configuration boundary(1, Point(-1), Point(3), 1);
  const auto exact = rwre::exact_conditional(spec, v, boundary);
  std::vector<double> counts(exact.size(), 0.0);
  const int n = 20000;
  for (int s = 0; s < n; ++s) {
    const auto c = rwre::glauber_sample(spec, Point(0), Point(2), 1, 30, static_cast<std::uint64_t>(s));
    counts[static_cast<std::size_t>(c.at(Point(0)) + 2 * c.at(Point(1)) + 4 * c.at(Point(2)))] += 1.0;
  }
  for (std::size_t c = 0; c < exact.size(); ++c) {
    const double p = exact.probs()[c];
    EXPECT_NEAR(counts[c] / n, p, 5.0 * std::sqrt(p * (1 - p) / n) + 1e-3) << c;
  }
}

TEST(Gibbs, GlauberIsPureInSeed) {
  const auto spec = rwre::ising_spec(2, kLetters, 1.0, 0.0, 0.3);
  const auto a = rwre::glauber_sample(spec, Point(0, 0), Point(5, 5), 0, 20, 3);
  const auto b = rwre::glauber_sample(spec, Point(0, 0), Point(5, 5), 0, 20, 3);
  for (const auto& x : a.sites()) EXPECT_EQ(a.at(x), b.at(x));
}

TEST(Gibbs, C1ClosedForm) {
  // 1-D, r = 1: the ball has 3 sites, so C1 = exp(2^4 beta ||U||).
  const auto s1 = rwre::ising_spec(1, kLetters, 1.0, 0.0, 0.05);
  EXPECT_DOUBLE_EQ(s1.norm_u(), 1.0);
  EXPECT_NEAR(s1.c1(), std::exp(0.8), 1e-12);
  // 2-D: 9 sites, 2^10.
  const auto s2 = rwre::ising_spec(2, kLetters, 0.5, 0.0, 0.001);
  EXPECT_NEAR(s2.c1(), std::exp(1024 * 0.001 * 0.5), 1e-12);
}

TEST(Gibbs, Boundaries) {
  const auto v = interval(0, 4);
  EXPECT_EQ(rwre::outer_boundary(v, 1, 1).size(), 2u);
  EXPECT_EQ(rwre::outer_boundary(v, 2, 1).size(), 4u);
  EXPECT_EQ(rwre::inner_boundary(v, 1, 1).size(), 2u);
  EXPECT_EQ(rwre::inner_boundary(v, 2, 1).size(), 4u);
  std::vector<Point> box;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) box.push_back(Point(a, b));
  EXPECT_EQ(rwre::outer_boundary(box, 1, 2).size(), 16u);
  EXPECT_EQ(rwre::inner_boundary(box, 1, 2).size(), 8u);
}

TEST(Gibbs, EnumerationCap) {
  const auto spec = rwre::ising_spec(1, kLetters, 1.0, 0.0, 0.1);
  rwre::Configuration boundary(1, Point(-1), Point(30), 0);
  EXPECT_THROW(rwre::exact_conditional(spec, interval(0, 25), boundary, 1000),
               rwre::EnumerationCapExceeded);
}

TEST(Gibbs, Validation) {
  auto spec = rwre::ising_spec(1, kLetters, 1.0, 0.0, 0.1);
  spec.prior = {1.0};
  EXPECT_THROW(spec.validate(), rwre::ConfigError);
  EXPECT_THROW(rwre::ising_spec(1, {kLetters[0]}, 1.0, 0.0, 0.1), rwre::ConfigError);
}

}  // namespace
