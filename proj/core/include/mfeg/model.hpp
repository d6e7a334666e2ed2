#pragma once

#include <functional>
#include <string>

namespace mfeg {

/// Probability of no outage as a function of SINR, carried together with its derivative.
///
/// Contract expected by the solvers: eval(0+) -> 0, eval -> 1 as SINR grows, eval is
/// non-decreasing and `deriv` agrees with a finite difference of `eval`.
/// `derivative_mismatch` measures the last point; the other properties are trusted.
class SuccessFunction {
 public:
  using Fn = std::function<double(double)>;

  SuccessFunction(Fn eval, Fn deriv, double shape = 0.0, std::string name = "custom");

  /// f(x) = exp(-shape / x), the usual BPSK-like efficiency curve.
  static SuccessFunction exponential(double shape);

  double eval(double sinr) const { return eval_(sinr); }
  double deriv(double sinr) const { return deriv_(sinr); }
  double operator()(double sinr) const { return eval_(sinr); }

  double shape() const noexcept { return shape_; }
  const std::string& name() const noexcept { return name_; }

 private:
  Fn eval_;
  Fn deriv_;
  double shape_;
  std::string name_;
};

/// Largest relative gap between f.deriv and a central difference of f.eval over
/// `samples` log-spaced points of [lo, hi].
double derivative_mismatch(const SuccessFunction& f, double lo = 0.1, double hi = 10.0,
                           int samples = 200);

/// Physical and game constants shared by every solver.
struct ModelParams {
  double rate = 1e6;                 // R, bit/s
  double noise_power = 0.1;          // sigma^2, W
  double load = 1.0;                 // theta = lim K/N
  double energy_max = 20.0;          // J
  double t_start = 0.0;              // T, s
  double t_end = 20.0;               // T', s
  double p_max = 5.0;                // upper end of the action set, W
  double channel_gain_mean = 1.0;    // E|h|^2
  SuccessFunction success = SuccessFunction::exponential(0.9);

  double horizon() const noexcept { return t_end - t_start; }

  /// Throws ConfigError. p_max = 0 is admitted as the no-transmission degenerate case.
  void validate() const;
};

/// gamma = p g / (I + sigma^2). Throws DomainError on negative inputs or sigma^2 <= 0.
double sinr(double power, double gain, double interference, double noise_power);

/// Energy efficiency R f(gamma) / p in bit/J; 0 at p = 0 by continuity.
double energy_efficiency(double power, double sinr_value, const ModelParams& params);

enum class EquilibriumMode { static_nash, repeated_operating_point };

const char* to_string(EquilibriumMode mode);

/// SINR target of a symmetric baseline equilibrium.
struct StaticEquilibrium {
  double beta = 0.0;
  EquilibriumMode mode = EquilibriumMode::static_nash;
  double load = 0.0;     // theta the validity flag was computed for
  bool valid = false;    // load * beta < 1
};

struct RootScanOptions {
  double gamma_hi = 1e4;   // upper end of the static-mode scan
  int scan_points = 4000;  // log-spaced scan resolution
  double tolerance = 1e-12;
};

/// Residual of the first-order condition solved by `solve_beta`:
///   static:   x f'(x) - f(x)
///   repeated: x (1 - theta x) f'(x) - f(x)
double beta_residual(EquilibriumMode mode, double load, const SuccessFunction& f, double x);

/// Bracket by sign-change scan, refine by bisection. Throws RootFindingError when the scan
/// finds no sign change or more than one.
StaticEquilibrium solve_beta(EquilibriumMode mode, double load, const SuccessFunction& f,
                             const RootScanOptions& options = {});

struct PowerSetting {
  double watts = 0.0;
  bool clamped = false;  // hit p_max
};

/// p = sigma^2 beta / (g (1 - theta beta)), clamped to p_max.
/// Throws InfeasibleError if theta beta >= 1 and DomainError if g <= 0.
PowerSetting equilibrium_power(double gain, const StaticEquilibrium& beta,
                               const ModelParams& params);

}  // namespace mfeg
