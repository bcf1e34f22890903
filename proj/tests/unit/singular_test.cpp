#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "rwre/errors.hpp"
#include "rwre/lattice.hpp"
#include "rwre/singular.hpp"

namespace {

using rwre::Point;

// Relative sites y with y1, y2 in [-k, 0] and -k <= y1 + y2 <= -1: every
// site the last k steps can have left. Outside this set the restricted view
// is a product of fair arrows under both laws.
std::vector<Point> window(int k) {
  std::vector<Point> out;
  for (int a = -k; a <= 0; ++a)
    for (int b = -k; b <= 0; ++b)
      if (a + b >= -k && a + b <= -1) out.push_back(Point(a, b));
  return out;
}

// Law of the arrows at X_n + F by enumerating every arrow field on the
// triangle {a, b >= 0, a + b < n} that decides the walk. Arrows of X_n + F
// outside the triangle are fair and independent of the walk.
std::vector<double> view_law_brute(int n, const std::vector<Point>& f) {
  std::vector<Point> tri;
  for (int s = 0; s < n; ++s)
    for (int a = 0; a <= s; ++a) tri.push_back(Point(a, s - a));
  std::map<Point, std::size_t> index;
  for (std::size_t i = 0; i < tri.size(); ++i) index[tri[i]] = i;

  std::vector<double> law(std::size_t{1} << f.size(), 0.0);
  const double w = std::ldexp(1.0, -static_cast<int>(tri.size()));
  for (std::uint64_t env = 0; env < (std::uint64_t{1} << tri.size()); ++env) {
    auto arrow = [&](const Point& p) { return static_cast<int>((env >> index.at(p)) & 1); };
    Point x(0, 0);
    for (int m = 0; m < n; ++m) x += arrow(x) ? Point(0, 1) : Point(1, 0);
    std::vector<int> fixed(f.size(), -1);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Point s = x + f[i];
      if (index.count(s)) fixed[i] = arrow(s);
    }
    for (std::uint64_t c = 0; c < law.size(); ++c) {
      double p = w;
      for (std::size_t i = 0; i < f.size(); ++i) {
        const int a = static_cast<int>((c >> i) & 1);
        if (fixed[i] < 0) {
          p *= 0.5;
        } else if (fixed[i] != a) {
          p = 0.0;
          break;
        }
      }
      law[c] += p;
    }
  }
  return law;
}

double tv(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

TEST(Singular, BruteForceAgrees) {
  for (int n = 0; n <= 5; ++n)
    for (int k = 0; k <= n; ++k) {
      const auto f = window(k);
      // Keeps the enumeration (fields times window configurations) under 2^24.
      if (n * (n + 1) / 2 + static_cast<int>(f.size()) > 24) continue;
      const auto at_n = view_law_brute(n, f);
      const auto at_k = view_law_brute(k, f);
      const std::vector<double> fair(at_n.size(), 1.0 / static_cast<double>(at_n.size()));
      const auto rep = rwre::singular_restriction_check(n, k);
      EXPECT_NEAR(rep.tv_n_vs_k, tv(at_n, at_k), 1e-12) << n << "," << k;
      EXPECT_NEAR(rep.tv_n_vs_environment, tv(at_n, fair), 1e-12) << n << "," << k;
    }
}

TEST(Singular, RestrictedLawsCoincide) {
  for (int n = 0; n <= 8; ++n)
    for (int k = 0; k <= n; ++k)
      EXPECT_LE(rwre::singular_restriction_check(n, k).tv_n_vs_k, 1e-12) << n << "," << k;
}

TEST(Singular, ViewDiffersFromEnvironmentLaw) {
  EXPECT_NEAR(rwre::singular_restriction_check(3, 1).tv_n_vs_environment, 0.25, 1e-15);
  EXPECT_EQ(rwre::singular_restriction_check(3, 0).tv_n_vs_environment, 0.0);
  double prev = 0.0;
  for (int k = 1; k <= 6; ++k) {
    const double d = rwre::singular_restriction_check(6, k).tv_n_vs_environment;
    EXPECT_GE(d, prev);
    prev = d;
  }
}

TEST(Singular, Limits) {
  EXPECT_THROW(rwre::singular_restriction_check(3, 4), rwre::ConfigError);
  EXPECT_THROW(rwre::singular_restriction_check(21, 1), rwre::ConfigError);
  const auto full = rwre::singular_restriction_check(8, 4);
  ASSERT_GE(full.nodes, 1u);
  EXPECT_THROW(rwre::singular_restriction_check(8, 4, full.nodes - 1), rwre::EnumerationCapExceeded);
}

}  // namespace
