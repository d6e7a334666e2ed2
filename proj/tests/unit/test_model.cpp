#include <gtest/gtest.h>

#include <cmath>

#include "mfeg/errors.hpp"
#include "mfeg/model.hpp"
#include "oracles.hpp"

using namespace mfeg;

TEST(SuccessFunction, ExponentialLimitsAndMonotone) {
  const auto f = SuccessFunction::exponential(0.9);
  EXPECT_EQ(f(0.0), 0.0);
  EXPECT_LT(f(1e-3), 1e-100);
  EXPECT_NEAR(f(1e6), 1.0, 1e-5);
  double prev = 0.0;
  for (double x = 0.01; x < 100.0; x *= 1.1) {
    EXPECT_GE(f(x), prev);
    prev = f(x);
  }
}

TEST(SuccessFunction, DerivativeMatchesFiniteDifference) {
  EXPECT_LT(derivative_mismatch(SuccessFunction::exponential(0.9)), 1e-6);
  EXPECT_LT(derivative_mismatch(SuccessFunction::exponential(2.5)), 1e-6);
}

TEST(SuccessFunction, WrongDerivativeIsDetected) {
  const SuccessFunction bad([](double x) { return std::exp(-0.9 / x); },
                            [](double x) { return 0.9 / (x * x) * std::exp(-0.9 / x) * 1.01; });
  EXPECT_GT(derivative_mismatch(bad), 1e-3);
}

TEST(Sinr, Definition) {
  EXPECT_DOUBLE_EQ(sinr(0.9, 1.0, 0.9, 0.1), 0.9);
  EXPECT_DOUBLE_EQ(sinr(0.0, 1.0, 0.5, 0.1), 0.0);
  EXPECT_THROW(sinr(-1.0, 1.0, 0.0, 0.1), DomainError);
  EXPECT_THROW(sinr(1.0, 1.0, 0.0, 0.0), DomainError);
}

TEST(EnergyEfficiency, ZeroPowerIsZero) {
  ModelParams p;
  EXPECT_EQ(energy_efficiency(0.0, 0.0, p), 0.0);
  EXPECT_NEAR(energy_efficiency(0.9, 0.9, p), 1e6 * std::exp(-1.0) / 0.9, 1e-6);
}

TEST(ModelParams, Validation) {
  ModelParams p;
  EXPECT_NO_THROW(p.validate());
  p.p_max = 0.0;
  EXPECT_NO_THROW(p.validate());
  p.noise_power = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = ModelParams{};
  p.t_end = p.t_start;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(SolveBeta, StaticRootMatchesClosedForm) {
  for (double a : {0.3, 0.9, 2.0}) {
    const auto f = SuccessFunction::exponential(a);
    const auto eq = solve_beta(EquilibriumMode::static_nash, 1.0, f);
    EXPECT_NEAR(eq.beta, oracle::static_beta(a), 1e-10);
    EXPECT_EQ(eq.mode, EquilibriumMode::static_nash);
  }
}

TEST(SolveBeta, RepeatedRootMatchesClosedForm) {
  for (double theta : {0.5, 1.0, 2.0}) {
    const auto f = SuccessFunction::exponential(0.9);
    const auto eq = solve_beta(EquilibriumMode::repeated_operating_point, theta, f);
    EXPECT_NEAR(eq.beta, oracle::repeated_beta(0.9, theta), 1e-10);
    EXPECT_TRUE(eq.valid);
  }
}

TEST(SolveBeta, IndependentBisectionAgrees) {
  const auto f = SuccessFunction::exponential(0.9);
  const double root = oracle::bisect(
      [&](double x) { return x * (1.0 - x) * f.deriv(x) - f(x); }, 0.1, 0.99);
  const auto eq = solve_beta(EquilibriumMode::repeated_operating_point, 1.0, f);
  EXPECT_NEAR(eq.beta, root, 1e-10);
}

TEST(SolveBeta, ValidityFlag) {
  const auto f = SuccessFunction::exponential(0.9);
  EXPECT_TRUE(solve_beta(EquilibriumMode::static_nash, 1.0, f).valid);
  EXPECT_FALSE(solve_beta(EquilibriumMode::static_nash, 1.2, f).valid);
}

// The derivative is chosen so that the static residual x f' - f equals `residual` exactly.
SuccessFunction with_static_residual(double (*residual)(double)) {
  return SuccessFunction([](double) { return 0.5; },
                         [residual](double x) { return (0.5 + residual(x)) / x; });
}

TEST(SolveBeta, NoRootThrowsWithEmptyBrackets) {
  const auto f = with_static_residual([](double x) { return -(1.0 + x * x); });
  try {
    solve_beta(EquilibriumMode::static_nash, 1.0, f);
    FAIL() << "expected RootFindingError";
  } catch (const RootFindingError& e) {
    EXPECT_TRUE(e.brackets().empty());
  }
}

TEST(SolveBeta, TwoRootsThrowWithBothBrackets) {
  const auto f = with_static_residual([](double x) { return (x - 1.0) * (x - 4.0); });
  try {
    solve_beta(EquilibriumMode::static_nash, 1.0, f);
    FAIL() << "expected RootFindingError";
  } catch (const RootFindingError& e) {
    ASSERT_EQ(e.brackets().size(), 2u);
    EXPECT_LE(e.brackets()[0].first, 1.0);
    EXPECT_GE(e.brackets()[0].second, 1.0);
    EXPECT_LE(e.brackets()[1].first, 4.0);
    EXPECT_GE(e.brackets()[1].second, 4.0);
  }
}

TEST(EquilibriumPower, ReferenceValues) {
  ModelParams p;
  const auto f = p.success;
  const auto star = solve_beta(EquilibriumMode::static_nash, 1.0, f);
  const auto tilde = solve_beta(EquilibriumMode::repeated_operating_point, 1.0, f);
  EXPECT_NEAR(equilibrium_power(1.0, star, p).watts, 0.9, 1e-10);
  EXPECT_NEAR(equilibrium_power(1.0, tilde, p).watts,
              oracle::static_power(oracle::repeated_beta(0.9, 1.0), 0.1, 1.0, 1.0), 1e-10);
}

TEST(EquilibriumPower, ClampAndErrors) {
  ModelParams p;
  const auto star = solve_beta(EquilibriumMode::static_nash, 1.0, p.success);
  const auto weak = equilibrium_power(0.1, star, p);
  EXPECT_TRUE(weak.clamped);
  EXPECT_EQ(weak.watts, p.p_max);
  EXPECT_THROW(equilibrium_power(0.0, star, p), DomainError);
  const auto saturated = solve_beta(EquilibriumMode::static_nash, 1.2, p.success);
  EXPECT_THROW(equilibrium_power(1.0, saturated, p), InfeasibleError);
}
