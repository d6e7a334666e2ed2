#include "mfeg/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "mfeg/errors.hpp"

namespace mfeg {

SuccessFunction::SuccessFunction(Fn eval, Fn deriv, double shape, std::string name)
    : eval_(std::move(eval)), deriv_(std::move(deriv)), shape_(shape), name_(std::move(name)) {
  if (!eval_ || !deriv_) {
    throw ConfigError("success function requires both eval and deriv");
  }
}

SuccessFunction SuccessFunction::exponential(double shape) {
  if (!(shape > 0.0)) {
    throw ConfigError("exponential success function needs a positive shape, got " +
                      std::to_string(shape));
  }
  auto eval = [shape](double x) { return x > 0.0 ? std::exp(-shape / x) : 0.0; };
  auto deriv = [shape](double x) {
    if (!(x > 0.0)) {
      return 0.0;
    }
    const double f = std::exp(-shape / x);
    return f == 0.0 ? 0.0 : shape / (x * x) * f;
  };
  return SuccessFunction(eval, deriv, shape, "exponential");
}

double derivative_mismatch(const SuccessFunction& f, double lo, double hi, int samples) {
  double worst = 0.0;
  const double log_lo = std::log(lo);
  const double step = samples > 1 ? (std::log(hi) - log_lo) / (samples - 1) : 0.0;
  for (int j = 0; j < samples; ++j) {
    const double x = std::exp(log_lo + step * j);
    const double h = 1e-5 * x;
    const double fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
    const double d = f.deriv(x);
    const double scale = std::max(std::abs(d), std::abs(fd));
    if (scale > 0.0) {
      worst = std::max(worst, std::abs(d - fd) / scale);
    }
  }
  return worst;
}

void ModelParams::validate() const {
  auto require_positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("model parameter '") + name + "' must be positive");
    }
  };
  require_positive(rate, "rate");
  require_positive(noise_power, "noise_power");
  require_positive(load, "load");
  require_positive(energy_max, "energy_max");
  require_positive(channel_gain_mean, "channel_gain_mean");
  if (!(p_max >= 0.0) || !std::isfinite(p_max)) {
    throw ConfigError("model parameter 'p_max' must be non-negative");
  }
  if (!(t_end > t_start)) {
    throw ConfigError("model horizon requires t_end > t_start");
  }
}

double sinr(double power, double gain, double interference, double noise_power) {
  if (power < 0.0 || gain < 0.0 || interference < 0.0) {
    throw DomainError("sinr: power, gain and interference must be non-negative");
  }
  if (!(noise_power > 0.0)) {
    throw DomainError("sinr: noise power must be positive");
  }
  return power * gain / (interference + noise_power);
}

double energy_efficiency(double power, double sinr_value, const ModelParams& params) {
  if (power < 0.0) {
    throw DomainError("energy_efficiency: power must be non-negative");
  }
  if (power == 0.0) {
    return 0.0;
  }
  return params.rate * params.success.eval(sinr_value) / power;
}

const char* to_string(EquilibriumMode mode) {
  switch (mode) {
    case EquilibriumMode::static_nash:
      return "static_nash";
    case EquilibriumMode::repeated_operating_point:
      return "repeated_operating_point";
  }
  return "unknown";
}

double beta_residual(EquilibriumMode mode, double load, const SuccessFunction& f, double x) {
  const double fx = f.eval(x);
  const double dfx = f.deriv(x);
  if (mode == EquilibriumMode::static_nash) {
    return x * dfx - fx;
  }
  return x * (1.0 - load * x) * dfx - fx;
}

StaticEquilibrium solve_beta(EquilibriumMode mode, double load, const SuccessFunction& f,
                             const RootScanOptions& options) {
  if (mode == EquilibriumMode::repeated_operating_point && !(load > 0.0)) {
    throw DomainError("solve_beta: repeated mode needs a positive load");
  }
  if (options.scan_points < 2) {
    throw ConfigError("solve_beta: scan needs at least two points");
  }

  const double hi = mode == EquilibriumMode::static_nash ? options.gamma_hi
                                                         : (1.0 - 1e-12) / load;
  const double lo = hi * 1e-12;
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / (options.scan_points - 1);
  auto residual = [&](double x) { return beta_residual(mode, load, f, x); };

  // Underflowed (exactly zero) residuals carry no sign information and are skipped.
  std::vector<std::pair<double, double>> brackets;
  double prev_x = 0.0;
  double prev_r = 0.0;
  for (int j = 0; j < options.scan_points; ++j) {
    const double x = j + 1 == options.scan_points ? hi : std::exp(log_lo + step * j);
    const double r = residual(x);
    if (r == 0.0 || !std::isfinite(r)) {
      continue;
    }
    if (prev_r != 0.0 && std::signbit(r) != std::signbit(prev_r)) {
      brackets.emplace_back(prev_x, x);
    }
    prev_x = x;
    prev_r = r;
  }

  if (brackets.empty()) {
    throw RootFindingError(std::string("solve_beta(") + to_string(mode) +
                               "): no interior root, residual never changes sign",
                           {});
  }
  if (brackets.size() > 1) {
    throw RootFindingError(std::string("solve_beta(") + to_string(mode) + "): " +
                               std::to_string(brackets.size()) +
                               " sign changes found, root is not unique",
                           brackets);
  }

  double a = brackets.front().first;
  double b = brackets.front().second;
  double ra = residual(a);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) {
      break;
    }
    const double rm = residual(mid);
    if (rm == 0.0) {
      a = b = mid;
      break;
    }
    if (std::signbit(rm) == std::signbit(ra)) {
      a = mid;
      ra = rm;
    } else {
      b = mid;
    }
  }
  const double rb = residual(b);
  const double root = std::abs(ra) <= std::abs(rb) ? a : b;
  if (!(std::abs(residual(root)) < options.tolerance)) {
    throw RootFindingError("solve_beta: bisection stalled above the residual tolerance",
                           {{a, b}});
  }

  StaticEquilibrium out;
  out.beta = root;
  out.mode = mode;
  out.load = load;
  out.valid = load * root < 1.0;
  return out;
}

PowerSetting equilibrium_power(double gain, const StaticEquilibrium& beta,
                               const ModelParams& params) {
  if (!(gain > 0.0)) {
    throw DomainError("equilibrium_power: channel gain must be positive");
  }
  const double theta_beta = params.load * beta.beta;
  if (!beta.valid || !(theta_beta < 1.0)) {
    throw InfeasibleError("equilibrium_power: theta * beta >= 1, the cell is saturated");
  }
  PowerSetting out;
  out.watts = params.noise_power * beta.beta / (gain * (1.0 - theta_beta));
  if (out.watts > params.p_max) {
    out.watts = params.p_max;
    out.clamped = true;
  }
  return out;
}

}  // namespace mfeg
