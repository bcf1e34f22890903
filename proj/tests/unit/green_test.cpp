#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rwre/errors.hpp"
#include "rwre/green.hpp"

namespace {

using rwre::Point;

void expect_matches_oracle(const rwre::Environment& env, const rwre::FiniteVolume& u,
                           const Point& start, const rwre::Vec& ell) {
  rwre::OccupancyOptions o;
  o.ell = ell;
  const auto t = rwre::occupancy(env, u, start, o);
  const auto ref = oracle::propagate(env, u, start, ell);
  ASSERT_LT(ref.tail, 1e-10);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto it = ref.visits.find(u.sites()[i]);
    EXPECT_NEAR(t.visits[i], it == ref.visits.end() ? 0.0 : it->second, 1e-8);
  }
  ASSERT_EQ(t.exit_law.size(), ref.exit_law.size());
  for (const auto& [y, m] : t.exit_law) EXPECT_NEAR(m, ref.exit_law.at(y), 1e-8);
  EXPECT_NEAR(t.exit_mass(), 1.0, 1e-10);
  EXPECT_NEAR(t.expected_exit_time, ref.exit_time, 1e-8 * std::max(1.0, ref.exit_time));
  EXPECT_NEAR(t.expected_exit_projection, ref.exit_projection, 1e-8);
}

TEST(Occupancy, MatchesPathSumOnRandomVolumes) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 1 + trial % 2;
    const auto model = oracle::random_alphabet_model(rng, dim, 3);
    rwre::Environment env(model);
    const auto sites = oracle::random_connected_set(rng, dim, 1 + trial % 6);
    rwre::FiniteVolume u(sites, dim, 1);
    const Point start = sites[std::uniform_int_distribution<std::size_t>(0, sites.size() - 1)(rng)];
    expect_matches_oracle(env, u, start, {1.0, 0.5, 0.0});
  }
}

TEST(Occupancy, SmallExamples) {
  rwre::Environment sym(rwre::constant_model(rwre::nearest_neighbor_1d(0.5), 1));
  const auto t = rwre::occupancy(sym, rwre::FiniteVolume::interval(-1, 1), Point(0));
  EXPECT_NEAR(t.visits_at(Point(0)), 2.0, 1e-12);
  EXPECT_NEAR(t.visits_at(Point(-1)), 1.0, 1e-12);
  EXPECT_NEAR(t.visits_at(Point(1)), 1.0, 1e-12);
  EXPECT_NEAR(t.expected_exit_time, 4.0, 1e-12);

  const auto single = rwre::occupancy(sym, rwre::FiniteVolume::interval(0, 0), Point(0));
  EXPECT_NEAR(single.visits_at(Point(0)), 1.0, 1e-15);

  rwre::Environment right(rwre::constant_model(rwre::TransitionVector{{Point(1)}, {1.0}}, 1));
  const auto line = rwre::occupancy(right, rwre::FiniteVolume::interval(0, 6), Point(0));
  for (double v : line.visits) EXPECT_NEAR(v, 1.0, 1e-12);
  EXPECT_NEAR(line.expected_exit_time, 7.0, 1e-12);
  EXPECT_NEAR(line.expected_exit_projection, 7.0, 1e-12);
  EXPECT_NEAR(rwre::exponential_moment(right, 0.3, rwre::FiniteVolume::interval(0, 6), Point(0),
                                       {1.0, 0.0, 0.0}),
              (1 - std::exp(-0.3 * 7)) / (1 - std::exp(-0.3)), 1e-12);

  EXPECT_THROW(rwre::occupancy(sym, rwre::FiniteVolume::interval(0, 3), Point(9)), rwre::ConfigError);
}

TEST(Occupancy, GamblersRuin) {
  for (double p : {0.3, 0.5, 0.8}) {
    rwre::Environment env(rwre::constant_model(rwre::nearest_neighbor_1d(p), 1));
    const auto t = rwre::occupancy(env, rwre::FiniteVolume::interval(-4, 6), Point(0));
    double right = 0.0;
    for (const auto& [y, m] : t.exit_law)
      if (y == Point(7)) right = m;
    EXPECT_NEAR(right, oracle::ruin_exit_right(p, -4, 6, 0), 1e-12);
  }
}

TEST(Occupancy, VisitAndEscapeProbabilities) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const int dim = 1 + trial % 2;
    rwre::Environment env(oracle::random_alphabet_model(rng, dim, 2));
    const auto sites = oracle::random_connected_set(rng, dim, 5);
    rwre::FiniteVolume u(sites, dim, 1);
    rwre::OccupancyOptions o;
    o.full = true;
    const auto t = rwre::occupancy(env, u, sites[0], o);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const Point x = u.sites()[i];
      const auto from_x = oracle::propagate(env, u, x, o.ell);
      const double gxx = from_x.visits.at(x);
      // visits = P(hit x) * g_xx.
      EXPECT_NEAR(t.visits[i], t.visit_prob[i] * gxx, 1e-9);
      // Escape from x: sum_y pi_{x,x+y} P_{x+y}(leave U before x) = 1 / g_xx.
      double escape = 0.0;
      for (std::size_t k = 0; k < t.escape[i].size(); ++k) {
        escape += t.escape_step_probs[i][k] * t.escape[i][k];
        const Point y = x + env.at(x).offsets[k];
        std::vector<Point> rest;
        for (const auto& s : u.sites())
          if (s != x) rest.push_back(s);
        double direct = 1.0;
        if (u.contains(y)) {
          const auto r = oracle::propagate(env, rwre::FiniteVolume(rest, dim, 1), y, o.ell);
          direct = 1.0 - (r.exit_law.count(x) ? r.exit_law.at(x) : 0.0);
        }
        EXPECT_NEAR(t.escape[i][k], direct, 1e-9);
      }
      EXPECT_NEAR(escape, 1.0 / gxx, 1e-9);
    }
  }
}

TEST(Occupancy, ExponentialMomentMatchesPathSum) {
  std::mt19937_64 rng(1);
  rwre::Environment env(oracle::random_alphabet_model(rng, 2, 3));
  const auto u = rwre::FiniteVolume::centred_box(2, 2, 1);
  const rwre::Vec ell{1.0, 0.0, 0.0};
  const auto ref = oracle::propagate(env, u, Point(0, 0), ell);
  for (double lambda : {0.1, 1.0}) {
    double expected = 0.0;
    for (const auto& [x, g] : ref.visits) expected += g * std::exp(-lambda * rwre::dot(x, ell));
    EXPECT_NEAR(rwre::exponential_moment(env, lambda, u, Point(0, 0), ell), expected, 1e-9);
  }
  EXPECT_THROW(rwre::exponential_moment(env, 0.0, u, Point(0, 0), ell), rwre::ConfigError);
}

TEST(Occupancy, CapAndConnectivityErrors) {
  rwre::Environment env(rwre::constant_model(rwre::nearest_neighbor_1d(0.5), 1));
  rwre::OccupancyOptions o;
  o.max_sites = 10;
  EXPECT_THROW(rwre::occupancy(env, rwre::FiniteVolume::interval(0, 20), Point(0), o), rwre::Error);
}

// Window Green function by hand: g_kj = delta_kj + sum pi_{k,k'} g_{k'j}.
std::vector<double> window_column(const rwre::Environment& env, rwre::Coord lo, rwre::Coord hi,
                                  rwre::Coord j) {
  const std::size_t n = static_cast<std::size_t>(hi - lo + 1);
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    a[r][r] = 1.0;
    const auto w = env.at(Point(lo + static_cast<rwre::Coord>(r)));
    for (std::size_t k = 0; k < w.offsets.size(); ++k) {
      const rwre::Coord y = lo + static_cast<rwre::Coord>(r) + w.offsets[k][0];
      if (y >= lo && y <= hi) a[r][static_cast<std::size_t>(y - lo)] -= w.probs[k];
    }
  }
  b[static_cast<std::size_t>(j - lo)] = 1.0;
  return oracle::gauss_solve(a, b);
}

TEST(Green1D, MatchesGaussianElimination) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    rwre::Environment env(oracle::random_alphabet_model(rng, 1, 4));
    rwre::Green1D g(env, -15, 12);
    for (rwre::Coord j : {-15, -3, 0, 12}) {
      const auto ref = window_column(env, -15, 12, j);
      const auto col = g.column(j);
      ASSERT_EQ(col.size(), ref.size());
      for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(col[k], ref[k], 1e-10);
      EXPECT_NEAR(g.value(-2, j), ref[13], 1e-10);
    }
  }
}

TEST(Green1D, TransientClosedForm) {
  // Homogeneous walk: return probability 1 - |2p - 1|, so g_jj = 1/|2p - 1|;
  // g_ij = g_jj for i < j when p > 1/2.
  rwre::Environment env(rwre::constant_model(rwre::nearest_neighbor_1d(0.7), 1));
  const auto gjj = rwre::green_1d(env, 0, 0);
  EXPECT_NEAR(gjj.value, 2.5, 1e-8);
  EXPECT_NEAR(rwre::green_1d(env, -7, 0).value, 2.5, 1e-8);
  // Right of j: P_i(hit j) = (q/p)^{i-j}.
  EXPECT_NEAR(rwre::green_1d(env, 3, 0).value, 2.5 * std::pow(3.0 / 7.0, 3), 1e-8);
}

TEST(Green1D, HittingFactorization) {
  std::mt19937_64 rng(11);
  const auto model = rwre::iid_alphabet_model(
      {rwre::nearest_neighbor_1d(0.7), rwre::nearest_neighbor_1d(0.9)}, {0.5, 0.5}, 1, 1, 31);
  rwre::Environment env(model);
  for (auto [i, j] : {std::pair<rwre::Coord, rwre::Coord>{-5, 0}, {3, 0}, {0, 4}, {-2, -2}}) {
    const auto gij = rwre::green_1d(env, i, j);
    const auto gjj = rwre::green_1d(env, j, j);
    const auto hij = rwre::hitting_probability_1d(env, i, j);
    EXPECT_NEAR(gij.value, hij.value * gjj.value, 1e-7);
  }
}

TEST(Green1D, ShiftIdentity) {
  const auto model = rwre::iid_alphabet_model(
      {rwre::nearest_neighbor_1d(0.7), rwre::nearest_neighbor_1d(0.9)}, {0.5, 0.5}, 1, 1, 8);
  rwre::Environment env(model);
  const auto moved = env.shifted(Point(1));
  for (rwre::Coord i = -6; i <= 3; ++i)
    EXPECT_NEAR(rwre::green_1d(moved, i, 0).value, rwre::green_1d(env, i + 1, 1).value, 1e-8);
}

TEST(Green1D, RejectsHigherDimensions) {
  rwre::Environment env(rwre::northeast_model(0));
  EXPECT_THROW(rwre::green_1d(env, 0, 0), rwre::ConfigError);
}

}  // namespace
