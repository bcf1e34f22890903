#include <gtest/gtest.h>

#include <cmath>

#include "rwre/errors.hpp"
#include "rwre/path_stats.hpp"
#include "rwre/walk.hpp"

namespace {

using rwre::Point;

const rwre::Vec kRight{1.0, 0.0, 0.0};

rwre::Path line(std::initializer_list<rwre::Coord> xs) {
  rwre::Path p;
  for (auto x : xs) p.positions.push_back(Point(x));
  return p;
}

rwre::MixingConstants gibbs_constants() {
  rwre::MixingConstants c;
  c.kappa = 0.5;
  c.r = 1;
  c.g = 1.0;
  c.c_tilde = 2.0;
  return c;
}

TEST(PathStats, SlabsTauAndVhat) {
  const auto p = line({0, 1, 2, 1, 2, 3, 4});
  rwre::PathStatsRequest req;
  req.tau_levels = {2.0, 9.0};
  req.vhat = {{1, 3, 2}, {0, 5, 4}, {0, 1, 7}};
  const auto s = rwre::path_stats(p, req);
  ASSERT_EQ(s.tau.size(), 2u);
  EXPECT_EQ(*s.tau[0], 2u);
  EXPECT_FALSE(s.tau[1].has_value());
  // V_j counts points with j - 1 <= x < j.
  EXPECT_EQ(s.slab_counts.at(1), 1u);
  EXPECT_EQ(s.slab_counts.at(2), 2u);
  EXPECT_EQ(s.slab_counts.at(3), 2u);
  // tau_2 = 2: points 0, 1, 2; those in [1, 3) are 1, 2.
  EXPECT_EQ(*s.vhat[0], 2u);
  // tau_4 = 6: every point, those in [0, 5).
  EXPECT_EQ(*s.vhat[1], 7u);
  EXPECT_FALSE(s.vhat[2].has_value());
  EXPECT_EQ(s.min_ell, 0.0);
}

TEST(PathStats, ZkByHand) {
  // Recentred path -3, -2, -1, -2, -1, 0; k = 0, r = 1.
  const auto p = rwre::recentre(line({0, 1, 2, 1, 2, 3}));
  rwre::PathStatsRequest req;
  req.k_list = {0, -1};
  req.constants = gibbs_constants();
  const auto s = rwre::path_stats(p, req);
  // k = 0: points with x >= -1 are -1, -1, 0. Slab indices j <= -1 belong to
  // x = -3 (j = -2) and x = -2 twice (j = -1): e^{-1} + 2 e^{-1/2}.
  EXPECT_EQ(s.hk_card[0], 3u);
  EXPECT_NEAR(s.log_zk[0], 3 * std::log(2.0) + 2.0 * (std::exp(-1.0) + 2 * std::exp(-0.5)), 1e-12);
  // k = -1: x >= -2 gives 5 points; j <= -2 only for x = -3, at k - j = 1.
  EXPECT_EQ(s.hk_card[1], 5u);
  EXPECT_NEAR(s.log_zk[1], 5 * std::log(2.0) + 2.0 * std::exp(-0.5), 1e-12);
  EXPECT_NEAR(s.zk()[1], std::exp(s.log_zk[1]), 1e-9);

  auto l = gibbs_constants();
  l.mode = rwre::MixingMode::LDependent;
  l.gap = 2;
  req.constants = l;
  const auto t = rwre::path_stats(p, req);
  // k = 0, L = 2: points with x >= -2: 5 of them, no decay term.
  EXPECT_EQ(t.hk_card[0], 5u);
  EXPECT_NEAR(t.log_zk[0], 5 * std::log(2.0), 1e-12);
}

TEST(PathStats, PrefixAgreesWithRecentredPrefixes) {
  rwre::Environment env(rwre::iid_alphabet_model(
      {rwre::nearest_neighbor_1d(0.7), rwre::nearest_neighbor_1d(0.9)}, {0.5, 0.5}, 1, 1, 3));
  const auto path = rwre::run_quenched(env, Point(0), 60, rwre::stop::FixedLength{}, 8);
  const std::vector<rwre::Coord> ks{0, -2, -5};
  const auto c = gibbs_constants();
  const auto table = rwre::prefix_log_zk(path, kRight, ks, c, 40);
  for (std::size_t n : {0u, 1u, 17u, 39u}) {
    rwre::Path prefix;
    prefix.positions.assign(path.positions.begin(), path.positions.begin() + static_cast<long>(n) + 1);
    rwre::PathStatsRequest req;
    req.k_list = ks;
    req.constants = c;
    const auto s = rwre::path_stats(rwre::recentre(prefix), req);
    for (std::size_t ki = 0; ki < ks.size(); ++ki) EXPECT_NEAR(table[ki][n], s.log_zk[ki], 1e-10);
  }
}

TEST(PathStats, Errors) {
  rwre::PathStatsRequest req;
  req.k_list = {0};
  EXPECT_THROW(rwre::path_stats(line({0, 1}), req), rwre::ConfigError);
  req.constants = gibbs_constants();
  EXPECT_THROW(rwre::path_stats(line({0, 1}), req), rwre::ConfigError);
  auto bad = gibbs_constants();
  bad.kappa = 1.5;
  EXPECT_THROW(bad.validate(), rwre::ConfigError);
  EXPECT_THROW(rwre::prefix_log_zk(line({0, 1}), kRight, {0}, gibbs_constants(), 5),
               rwre::ConfigError);
}

TEST(PathStats, DefaultCTilde) {
  EXPECT_NEAR(rwre::default_c_tilde(2.0, 1.0, 1, 1), 2.0 * std::exp(1.0), 1e-12);
  const double q = std::exp(-0.5);
  EXPECT_NEAR(rwre::default_c_tilde(2.0, 1.0, 1, 2), 2.0 * std::exp(1.0) * (1 + q) / (1 - q), 1e-12);
}

}  // namespace
