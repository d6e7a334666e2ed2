#include <gtest/gtest.h>

#include <cmath>

#include "mfeg/errors.hpp"
#include "mfeg/grid.hpp"
#include "mfeg/hjb.hpp"
#include "oracles.hpp"

using namespace mfeg;

namespace {

Grid small_grid(const ModelParams& p, std::size_t n_energy = 40) {
  return Grid::with_cfl_margin(p, n_energy);
}

}  // namespace

TEST(Grid, CflMarginSizing) {
  ModelParams p;
  const Grid g = Grid::with_cfl_margin(p, 200);
  EXPECT_EQ(g.n_time, 1200u);
  EXPECT_LE(g.courant(p.p_max), 1.0 / 1.2 + 1e-12);
  p.t_end = 120.0;
  EXPECT_EQ(Grid::with_cfl_margin(p, 200).n_time, 7200u);
}

TEST(Grid, ValidateRejectsCflViolation) {
  ModelParams p;
  Grid g{200, 100, 20.0, 0.0, 20.0};
  EXPECT_THROW(g.validate(p), ConfigError);
  g.n_energy = 1;
  EXPECT_THROW(g.validate(p), ConfigError);
}

TEST(Hamiltonian, ArgmaxMatchesBruteForce) {
  ModelParams p;
  for (double lambda : {0.0, 1e4, 1e5, 5e5, 2e6, -1e5}) {
    for (double interference : {0.0, 0.3, 0.9}) {
      for (double gain : {0.5, 1.0}) {
        const auto got = hamiltonian_argmax(lambda, interference, gain, p);
        const auto ref = oracle::brute_force_argmax(lambda, interference, gain, p.rate,
                                                    p.noise_power, 0.9, p.p_max);
        EXPECT_NEAR(got.value, ref.value, 1e-9 * std::max(1.0, std::abs(ref.value)))
            << "lambda=" << lambda << " I=" << interference;
        if (ref.power > 0.0 && ref.power < p.p_max) {
          EXPECT_NEAR(got.power, ref.power, 1e-6 * ref.power);
        }
      }
    }
  }
}

TEST(Hamiltonian, InterfaceFreeMaximizer) {
  // With lambda = 0 and no interference the maximizer of R f(p/sigma^2)/p is p = a sigma^2.
  ModelParams p;
  const auto got = hamiltonian_argmax(0.0, 0.0, 1.0, p);
  EXPECT_NEAR(got.power, 0.9 * 0.1, 1e-9);
  EXPECT_NEAR(got.value, p.rate * std::exp(-1.0) / 0.09, 1e-3);
}

TEST(Hamiltonian, HighPriceShutsDown) {
  ModelParams p;
  const auto got = hamiltonian_argmax(1e9, 0.3, 1.0, p);
  EXPECT_EQ(got.power, 0.0);
  EXPECT_EQ(got.value, 0.0);
}

TEST(Hamiltonian, NegativePriceUsesFullPower) {
  ModelParams p;
  EXPECT_EQ(hamiltonian_argmax(-1e6, 0.3, 1.0, p).power, p.p_max);
}

TEST(RelaxedUtility, EnvelopeDominatesUtility) {
  ModelParams p;
  const RelaxedUtility env = relaxed_utility(0.3, 1.0, p);
  const double pt = 0.9 * (0.1 + 0.3) / 2.0;  // argmax of f(p c) / p^2 for f = exp(-a/x)
  EXPECT_NEAR(env.tangent_power, pt, 1e-8);
  for (double q = 0.01; q < p.p_max; q += 0.01) {
    const double u = oracle::phi(q, 0.0, 0.3, 1.0, p.rate, p.noise_power, 0.9);
    EXPECT_GE(env(q), u * (1.0 - 1e-12));
  }
  EXPECT_NEAR(env(0.5 * pt), 0.5 * env(pt), 1e-9 * env(pt));
  EXPECT_DOUBLE_EQ(env.on_power(0.5 * pt), env.tangent_power);
  EXPECT_DOUBLE_EQ(env.on_power(2.0 * pt), 2.0 * pt);
}

TEST(HjbBackward, TerminalConditionIsExact) {
  ModelParams p;
  const Grid g = small_grid(p);
  auto q = [](double e) { return 1000.0 * std::sqrt(e); };
  const auto sol = solve_hjb_backward(InterferenceTrajectory::constant(g.n_time, 0.5), g, q, p);
  for (std::size_t i = 0; i <= g.n_energy; ++i) {
    EXPECT_EQ(sol.value(g.n_time, i), q(g.energy(i)));
  }
}

TEST(HjbBackward, MonotoneAndNonNegative) {
  ModelParams p;
  const Grid g = small_grid(p);
  std::vector<double> varying(g.n_time);
  for (std::size_t n = 0; n < g.n_time; ++n) varying[n] = 0.2 + 0.5 * std::sin(0.01 * n) * std::sin(0.01 * n);
  const auto sol = solve_hjb_backward({varying}, g, zero_reward, p);
  for (std::size_t n = 0; n <= g.n_time; ++n) {
    for (std::size_t i = 0; i <= g.n_energy; ++i) {
      EXPECT_GE(sol.value(n, i), 0.0);
      if (i > 0) EXPECT_GE(sol.value(n, i), sol.value(n, i - 1));
    }
  }
}

TEST(HjbBackward, EmptyBatteryNeverTransmits) {
  ModelParams p;
  const Grid g = small_grid(p);
  const auto sol = solve_hjb_backward(InterferenceTrajectory::constant(g.n_time, 0.3), g, zero_reward, p);
  for (std::size_t n = 0; n < g.n_time; ++n) {
    EXPECT_EQ(sol.policy(n, 0), 0.0);
    EXPECT_EQ(sol.value(n, 0), 0.0);
  }
}

TEST(HjbBackward, AbundantEnergyMatchesClosedForm) {
  // Without interference and with energy that never binds, v(T, E) = T R e^{-1} / (a sigma^2).
  ModelParams p;
  p.energy_max = 20.0;
  p.t_end = 5.0;
  const Grid g = Grid::with_cfl_margin(p, 100);
  const auto sol = solve_hjb_backward(InterferenceTrajectory::constant(g.n_time, 0.0), g, zero_reward, p);
  const double expected = 5.0 * p.rate * std::exp(-1.0) / 0.09;
  EXPECT_NEAR(sol.value(0, g.n_energy), expected, 1e-9 * expected);
}

TEST(HjbBackward, ZeroPowerCapLeavesTerminalReward) {
  ModelParams p;
  p.p_max = 0.0;
  const Grid g{20, 10, p.energy_max, p.t_start, p.t_end};
  auto q = [](double e) { return 3.0 * e; };
  const auto sol = solve_hjb_backward(InterferenceTrajectory::constant(g.n_time, 0.0), g, q, p);
  for (std::size_t n = 0; n <= g.n_time; ++n) {
    for (std::size_t i = 0; i <= g.n_energy; ++i) EXPECT_EQ(sol.value(n, i), q(g.energy(i)));
  }
}

TEST(HjbBackward, FirstOrderConditionAtInteriorMaximizers) {
  ModelParams p;
  const Grid g = small_grid(p);
  const double interference = 0.4;
  const auto sol = solve_hjb_backward(InterferenceTrajectory::constant(g.n_time, interference), g,
                                      zero_reward, p);
  int checked = 0;
  for (std::size_t n = 0; n < g.n_time; n += 7) {
    for (std::size_t i = 1; i <= g.n_energy; ++i) {
      const double ps = sol.policy(n, i);
      if (!(ps > 1e-6 && ps < p.p_max - 1e-6)) continue;
      const double lambda = (sol.value(n + 1, i) - sol.value(n + 1, i - 1)) / g.dE();
      const double h = 1e-6 * ps;
      const double d = (oracle::phi(ps + h, lambda, interference, 1.0, p.rate, p.noise_power, 0.9) -
                        oracle::phi(ps - h, lambda, interference, 1.0, p.rate, p.noise_power, 0.9)) /
                       (2.0 * h);
      EXPECT_LT(std::abs(d) / p.rate, 1e-6);
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(HjbBackward, RejectsWrongTrajectoryLength) {
  ModelParams p;
  const Grid g = small_grid(p);
  EXPECT_THROW(solve_hjb_backward(InterferenceTrajectory::constant(g.n_time + 1, 0.0), g,
                                  zero_reward, p),
               ConfigError);
}

TEST(HjbBackward, ProxAnchorKeepsMeanPowerInRange) {
  ModelParams p;
  const Grid g = small_grid(p, 20);
  const auto I = InterferenceTrajectory::constant(g.n_time, 0.9);
  const auto exact = solve_hjb_backward(I, g, zero_reward, p);
  const auto prox = solve_hjb_backward(I, g, zero_reward, p, ProxAnchor{&exact.policy, 0.1});
  for (std::size_t n = 0; n < g.n_time; ++n) {
    EXPECT_EQ(prox.policy(n, 0), 0.0);
    for (std::size_t i = 1; i <= g.n_energy; ++i) {
      EXPECT_GE(prox.policy(n, i), 0.0);
      EXPECT_LE(prox.policy(n, i), p.p_max);
      EXPECT_GE(prox.on_power(n, i), prox.policy(n, i) - 1e-15);
    }
  }
}
