#include <gtest/gtest.h>

#include <cmath>

#include "mfeg/errors.hpp"
#include "mfeg/fpk.hpp"

using namespace mfeg;

namespace {

PolicyField constant_field(const Grid& g, double power) {
  PolicyField f(g.n_time, g.n_energy + 1);
  for (std::size_t n = 0; n < g.n_time; ++n) {
    for (std::size_t i = 1; i <= g.n_energy; ++i) f(n, i) = power;
  }
  return f;
}

}  // namespace

TEST(EnergyDistribution, UniformAndThreshold) {
  const Grid g{20, 40, 20.0, 0.0, 20.0};
  const auto u = uniform_distribution(g);
  EXPECT_EQ(u.mass[0], 0.0);
  EXPECT_NEAR(u.total(), 1.0, 1e-15);
  EXPECT_NEAR(u.mass[7], 1.0 / 20.0, 1e-15);
  const auto t = threshold_distribution(g, 18.0);
  EXPECT_NEAR(t.total(), 1.0, 1e-15);
  EXPECT_EQ(t.mass[18], 0.0);
  EXPECT_NEAR(t.mass[19], 0.5, 1e-15);
  EXPECT_NEAR(t.mass[20], 0.5, 1e-15);
}

TEST(FpkForward, ZeroPolicyFreezesDensity) {
  ModelParams p;
  const Grid g = Grid::with_cfl_margin(p, 20);
  const auto m0 = uniform_distribution(g);
  const auto d = fpk_forward(constant_field(g, 0.0), m0, g);
  for (std::size_t n = 0; n <= g.n_time; ++n) {
    for (std::size_t i = 0; i <= g.n_energy; ++i) EXPECT_EQ(d.mass(n, i), m0.mass[i]);
  }
}

TEST(FpkForward, UnitCourantShiftsOneNodePerStep) {
  // p dt / dE = 1: each step moves every cell exactly one node down.
  const Grid g{10, 5, 10.0, 0.0, 5.0};
  const auto m0 = threshold_distribution(g, 8.0);  // nodes 9, 10
  const auto d = fpk_forward(constant_field(g, 1.0), m0, g);
  EXPECT_NEAR(d.mass(3, 6), 0.5, 1e-15);
  EXPECT_NEAR(d.mass(3, 7), 0.5, 1e-15);
  EXPECT_NEAR(d.absorbed(5), 0.0, 1e-15);
  EXPECT_NEAR(d.mass(5, 4), 0.5, 1e-15);
}

TEST(FpkForward, ConservesMassAndMeanEnergyDecreases) {
  ModelParams p;
  const Grid g = Grid::with_cfl_margin(p, 50);
  PolicyField f(g.n_time, g.n_energy + 1);
  for (std::size_t n = 0; n < g.n_time; ++n) {
    for (std::size_t i = 1; i <= g.n_energy; ++i) {
      f(n, i) = p.p_max * (0.5 + 0.5 * std::sin(0.37 * n + 0.11 * i));
    }
  }
  const auto d = fpk_forward(f, uniform_distribution(g), g);
  for (std::size_t n = 0; n <= g.n_time; ++n) {
    EXPECT_NEAR(d.total(n), 1.0, 1e-8);
    if (n > 0) EXPECT_LE(d.mean_energy(n, g), d.mean_energy(n - 1, g) + 1e-15);
    for (std::size_t i = 0; i <= g.n_energy; ++i) EXPECT_GE(d.mass(n, i), 0.0);
  }
}

TEST(FpkForward, RejectsBadInputs) {
  ModelParams p;
  const Grid g = Grid::with_cfl_margin(p, 20);
  auto m0 = uniform_distribution(g);
  m0.mass[3] += 0.1;
  EXPECT_THROW(fpk_forward(constant_field(g, 0.5), m0, g), ConfigError);
  EXPECT_THROW(fpk_forward(PolicyField(3, 3), uniform_distribution(g), g), ConfigError);
}

TEST(Interference, WeightedSumOfActiveMass) {
  ModelParams p;
  p.load = 2.0;
  p.channel_gain_mean = 0.5;
  const std::vector<double> m{0.0, 0.25, 0.75};
  const std::vector<double> pw{0.0, 2.0, 4.0};
  EXPECT_DOUBLE_EQ(interference_of(m, pw, p), 2.0 * 0.5 * (0.5 + 3.0));
}
