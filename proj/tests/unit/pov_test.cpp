#include <gtest/gtest.h>

#include <cmath>

#include "rwre/errors.hpp"
#include "rwre/local_function.hpp"
#include "rwre/pov.hpp"

namespace {

using rwre::Point;
using rwre::nearest_neighbor_1d;

const rwre::Vec kRight{1.0, 0.0, 0.0};

TEST(LocalFunction, Catalog) {
  rwre::Environment env(rwre::iid_alphabet_model({nearest_neighbor_1d(0.7), nearest_neighbor_1d(0.9)},
                                                 {0.5, 0.5}, 1, 1, 2));
  const auto t = rwre::LocalFunction::transition(Point(1), Point(1));
  EXPECT_EQ(t(env, Point(4)), env.at(Point(5)).prob(Point(1)));
  const auto d = rwre::LocalFunction::drift_component(Point(0), 0);
  EXPECT_NEAR(d(env, Point(3)), 2 * env.at(Point(3)).prob(Point(1)) - 1, 1e-15);
  const auto ind = rwre::LocalFunction::indicator(Point(0), Point(1), 0.8, 1.0);
  EXPECT_EQ(ind(env, Point(3)), env.at(Point(3)).prob(Point(1)) > 0.8 ? 1.0 : 0.0);
  const auto prod = rwre::LocalFunction::product({t, rwre::LocalFunction::constant(2.0)});
  EXPECT_DOUBLE_EQ(prod(env, Point(4)), 2.0 * t(env, Point(4)));
  EXPECT_EQ(prod.window(), std::vector<Point>{Point(1)});
}

TEST(Cesaro, ConstantFunctionIsExactlyOne) {
  rwre::CesaroOptions o;
  o.n_paths = 20;
  o.doublings = 4;
  const auto r = rwre::cesaro_expectation(rwre::northeast_model(0),
                                          rwre::LocalFunction::constant(1.0), o);
  for (const auto& p : r.points) {
    EXPECT_EQ(p.estimate.value, 1.0);
    EXPECT_EQ(p.estimate.half_width, 0.0);
  }
  EXPECT_TRUE(r.converged);
}

// North-east arrows: X_m - e1 is either X_{m-1} (last step east, probability
// 1/2, and then its arrow points east) or a site the walk never saw. So
// E pi_{-e1, 0}(T^{X_m} omega) = 1/2 + 1/4 for every m >= 1, while the arrow
// at X_m itself is always fresh: E pi_{0, e1} = 1/2.
TEST(Cesaro, NortheastExactValues) {
  rwre::CesaroOptions o;
  o.n_paths = 2000;
  o.n_start = 8;
  o.doublings = 4;
  o.seed = 5;
  o.workers = 4;
  o.z = 4.0;
  const auto behind = rwre::cesaro_expectation(
      rwre::northeast_model(0), rwre::LocalFunction::transition(Point(-1, 0), Point(1, 0)), o);
  for (const auto& p : behind.points)
    EXPECT_NEAR(p.estimate.value, 0.75, p.estimate.half_width) << "N = " << p.n;
  const auto here = rwre::cesaro_expectation(
      rwre::northeast_model(0), rwre::LocalFunction::transition(Point(0, 0), Point(1, 0)), o);
  for (const auto& p : here.points)
    EXPECT_NEAR(p.estimate.value, 0.5, p.estimate.half_width) << "N = " << p.n;
}

TEST(Cesaro, WorkerCountDoesNotChangeSamples) {
  rwre::CesaroOptions o;
  o.n_paths = 30;
  o.doublings = 3;
  const auto f = rwre::LocalFunction::transition(Point(-1, 0), Point(1, 0));
  o.workers = 1;
  const auto a = rwre::cesaro_samples(rwre::northeast_model(0), f, o);
  o.workers = 5;
  const auto b = rwre::cesaro_samples(rwre::northeast_model(0), f, o);
  EXPECT_EQ(a.values, b.values);
}

TEST(Density, ConstantFieldClosedForm) {
  // p = 0.7: mu_j = g_jj = 1 / (2p - 1) = 2.5 and the velocity is 0.4.
  rwre::DensityOptions o;
  o.n_env = 3;
  const auto t = rwre::invariant_density_1d(rwre::constant_model(nearest_neighbor_1d(0.7), 1), o);
  EXPECT_TRUE(t.converged());
  for (const auto& d : t.draws)
    for (double mu : d.mu) EXPECT_NEAR(mu, 2.5, 1e-7);
  const auto v = rwre::lln_velocity_from_density(t);
  EXPECT_NEAR(v.ratio, 0.4, 1e-9);
}

TEST(Density, AlphabetSolomonVelocity) {
  // Solomon: v = (1 - E rho) / (1 + E rho), rho = q / p; E rho = (3/7 + 1/9) / 2 = 17/63.
  const double erho = 17.0 / 63.0;
  const double solomon = (1 - erho) / (1 + erho);
  EXPECT_NEAR(solomon, 0.575, 1e-15);
  rwre::DensityOptions o;
  o.n_env = 400;
  o.seed = 12;
  o.workers = 4;
  const auto t = rwre::invariant_density_1d(
      rwre::iid_alphabet_model({nearest_neighbor_1d(0.7), nearest_neighbor_1d(0.9)}, {0.5, 0.5}, 1,
                               1, 0),
      o);
  EXPECT_TRUE(t.converged());
  EXPECT_LE(t.max_harmonicity_residual, 1e-4);
  EXPECT_GE(t.mu0.upper(), 1.0);
  const auto v = rwre::lln_velocity_from_density(t);
  EXPECT_NEAR(v.ratio, solomon, v.half_width);
  // E mu_0 has the closed form 1 / v for nearest-neighbour walks.
  EXPECT_NEAR(t.mu0.value, 1.0 / solomon, t.mu0.half_width);
}

TEST(Density, RejectsHigherDimensions) {
  EXPECT_THROW(rwre::invariant_density_1d(rwre::northeast_model(0), rwre::DensityOptions{}),
               rwre::ConfigError);
}

TEST(Zk, DeterministicRightWalk) {
  // Always step right: the recentred prefix is -m, ..., 0, so with L = 1 the
  // half-space above k - 1 = -1 holds two points and Z_0 = kappa^-2 = 4.
  rwre::AnnealedOptions ao;
  ao.n_paths = 4;
  ao.horizon = 50;
  ao.keep_paths = true;
  const auto ens =
      rwre::run_annealed(rwre::constant_model(rwre::TransitionVector{{Point(1)}, {1.0}}, 1), ao);
  rwre::MixingConstants c;
  c.kappa = 0.5;
  c.mode = rwre::MixingMode::LDependent;
  c.gap = 1;
  const auto z = rwre::zk_admissibility(ens, kRight, {0}, {3.9, 4.0, 100.0}, {10, 50}, c, 0.5);
  for (std::size_t ni = 0; ni < 2; ++ni) {
    EXPECT_EQ(z.cell(0, 0, ni).fraction.value, 0.0);
    EXPECT_EQ(z.cell(0, 1, ni).fraction.value, 1.0);
    EXPECT_EQ(z.cell(0, 2, ni).fraction.value, 1.0);
    EXPECT_TRUE(z.cell(0, 0, ni).below_threshold);
    EXPECT_EQ(z.best_fraction(0, ni), 1.0);
  }
}

TEST(Zk, MonotoneInA) {
  rwre::AnnealedOptions ao;
  ao.n_paths = 20;
  ao.horizon = 300;
  ao.keep_paths = true;
  ao.seed = 9;
  const auto ens = rwre::run_annealed(
      rwre::iid_alphabet_model({nearest_neighbor_1d(0.7), nearest_neighbor_1d(0.9)}, {0.5, 0.5}, 1,
                               1, 0),
      ao);
  rwre::MixingConstants c;
  c.kappa = 0.1;
  c.g = 1.0;
  c.c_tilde = 3.0;
  const std::vector<double> grid{1, 10, 1e2, 1e4, 1e8, 1e16};
  const auto z = rwre::zk_admissibility(ens, kRight, {0, -3}, grid, {100, 300}, c, 0.5);
  for (std::size_t ki = 0; ki < 2; ++ki)
    for (std::size_t ni = 0; ni < 2; ++ni)
      for (std::size_t ai = 1; ai < grid.size(); ++ai)
        EXPECT_GE(z.cell(ki, ai, ni).fraction.value, z.cell(ki, ai - 1, ni).fraction.value);
}

}  // namespace
