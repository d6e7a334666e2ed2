#include "mfeg/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "mfeg/errors.hpp"
#include "mfeg/parallel.hpp"

namespace mfeg {
namespace {

constexpr double kInvPhi = 0.6180339887498948482;  // 1 / golden ratio

struct Objective {
  double rate;
  double coupling;  // g / (sigma^2 + I)
  double shadow_price;
  const SuccessFunction* f;

  double operator()(double p) const {
    if (p <= 0.0) {
      return 0.0;
    }
    return rate * f->eval(p * coupling) / p - shadow_price * p;
  }

  double slope(double p) const {
    const double x = p * coupling;
    return rate * (f->deriv(x) * coupling / p - f->eval(x) / (p * p)) - shadow_price;
  }
};

Objective make_objective(double shadow_price, double interference, double gain,
                         const ModelParams& params) {
  return {params.rate, gain / (params.noise_power + interference), shadow_price,
          &params.success};
}

// Illinois-modified regula falsi on the first-order condition inside [lo, hi] where the
// slope changes sign from + to -.
double polish_stationary_point(const Objective& phi, double lo, double hi) {
  double s_lo = phi.slope(lo);
  double s_hi = phi.slope(hi);
  if (!(s_lo > 0.0 && s_hi < 0.0)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  int side = 0;
  for (int it = 0; it < 40; ++it) {
    double x = (lo * s_hi - hi * s_lo) / (s_hi - s_lo);
    if (!(x > lo && x < hi)) {
      x = 0.5 * (lo + hi);
    }
    const double s = phi.slope(x);
    if (s == 0.0) {
      return x;
    }
    if (s > 0.0) {
      lo = x;
      s_lo = s;
      if (side == -1) {
        s_hi *= 0.5;
      }
      side = -1;
    } else {
      hi = x;
      s_hi = s;
      if (side == 1) {
        s_lo *= 0.5;
      }
      side = 1;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      break;
    }
  }
  return 0.5 * (lo + hi);
}

template <class Fn>
std::pair<double, double> golden_max(const Fn& fn, double a, double b) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  for (int it = 0; it < kGoldenIterations; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = fn(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

struct ProxPoint {
  double mean_power;
  double flow;  // envelope(p) - shadow_price * p
};

ProxPoint prox_response(const RelaxedUtility& env, double shadow_price, double previous,
                        double weight, double p_max) {
  if (!(env.tangent_power > 0.0)) {
    return {0.0, 0.0};
  }
  const double kappa = weight * env.slope / env.tangent_power;
  auto flow = [&](double p) { return env(p) - shadow_price * p; };
  auto objective = [&](double p) {
    const double d = p - previous;
    return flow(p) - 0.5 * kappa * d * d;
  };

  // Chord part: concave quadratic, closed form.
  double best_p =
      std::clamp(previous + (env.slope - shadow_price) / kappa, 0.0, env.tangent_power);
  double best = objective(best_p);

  // Above the tangent point: root of the objective's slope, then the p_max boundary.
  if (p_max > env.tangent_power) {
    auto slope = [&](double p) {
      const double x = p * env.coupling;
      const double du = env.rate * (env.success->deriv(x) * env.coupling / p -
                                    env.success->eval(x) / (p * p));
      return du - shadow_price - kappa * (p - previous);
    };
    double lo = env.tangent_power;
    double hi = p_max;
    double s_lo = slope(lo);
    double s_hi = slope(hi);
    if (s_lo > 0.0 && s_hi < 0.0) {
      int side = 0;
      for (int it = 0; it < 60; ++it) {
        double x = (lo * s_hi - hi * s_lo) / (s_hi - s_lo);
        if (!(x > lo && x < hi)) {
          x = 0.5 * (lo + hi);
        }
        const double sx = slope(x);
        if (sx == 0.0) {
          lo = hi = x;
          break;
        }
        if (sx > 0.0) {
          lo = x;
          s_lo = sx;
          if (side == -1) {
            s_hi *= 0.5;
          }
          side = -1;
        } else {
          hi = x;
          s_hi = sx;
          if (side == 1) {
            s_lo *= 0.5;
          }
          side = 1;
        }
        if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() * hi) {
          break;
        }
      }
      const double root = 0.5 * (lo + hi);
      if (const double v = objective(root); v > best) {
        best_p = root;
        best = v;
      }
    }
    if (const double v_hi = objective(p_max); v_hi > best) {
      best_p = p_max;
      best = v_hi;
    }
  }
  return {best_p, flow(best_p)};
}

}  // namespace

double RelaxedUtility::operator()(double mean_power) const {
  if (!(mean_power > 0.0)) {
    return 0.0;
  }
  if (mean_power < tangent_power) {
    return slope * mean_power;
  }
  return rate * success->eval(mean_power * coupling) / mean_power;
}

double RelaxedUtility::on_power(double mean_power) const {
  if (!(mean_power > 0.0)) {
    return 0.0;
  }
  return mean_power < tangent_power ? tangent_power : mean_power;
}

RelaxedUtility relaxed_utility(double interference, double gain, const ModelParams& params) {
  RelaxedUtility env;
  env.rate = params.rate;
  env.coupling = gain / (params.noise_power + interference);
  env.success = &params.success;
  if (!(params.p_max > kMinSearchPower) || !(gain > 0.0)) {
    return env;
  }
  // u(p) / p = R f(p c) / p^2
  auto per_watt = [&](double p) { return env.rate * env.success->eval(p * env.coupling) / (p * p); };
  const auto [p_t, w_t] = golden_max(per_watt, kMinSearchPower, params.p_max);
  if (per_watt(params.p_max) >= w_t) {
    env.tangent_power = params.p_max;
    env.slope = per_watt(params.p_max);
  } else {
    env.tangent_power = p_t;
    env.slope = w_t;
  }
  return env;
}

double hamiltonian_objective(double power, double shadow_price, double interference,
                             double gain, const ModelParams& params) {
  return make_objective(shadow_price, interference, gain, params)(power);
}

double hamiltonian_slope(double power, double shadow_price, double interference, double gain,
                         const ModelParams& params) {
  return make_objective(shadow_price, interference, gain, params).slope(power);
}

HamiltonianPoint hamiltonian_argmax(double shadow_price, double interference, double gain,
                                    const ModelParams& params) {
  HamiltonianPoint best;  // p = 0, H = 0
  const double lo0 = kMinSearchPower;
  const double hi0 = params.p_max;
  if (!(hi0 > lo0) || !(gain > 0.0)) {
    return best;
  }
  const Objective phi = make_objective(shadow_price, interference, gain, params);

  auto [p_in, v_in] = golden_max(phi, lo0, hi0);

  // Golden section resolves the argmax only to ~sqrt(eps); the slope pins it down.
  const double width = 1e-6 * p_in;
  const double lo = std::max(lo0, p_in - width);
  const double hi = std::min(hi0, p_in + width);
  if (lo < p_in && p_in < hi) {
    const double polished = polish_stationary_point(phi, lo, hi);
    if (std::isfinite(polished)) {
      const double v = phi(polished);
      if (v >= v_in) {
        p_in = polished;
        v_in = v;
      }
    }
  }

  if (v_in > best.value) {
    best = {v_in, p_in};
  }
  const double v_max = phi(hi0);
  if (v_max > best.value) {
    best = {v_max, hi0};
  }
  return best;
}

namespace {

HjbSolution sweep(const InterferenceTrajectory& interference, const Grid& grid,
                  const TerminalReward& terminal, const ModelParams& params,
                  const ProxAnchor* anchor) {
  grid.validate(params);
  if (interference.size() != grid.n_time) {
    throw ConfigError("solve_hjb_backward: interference trajectory has " +
                      std::to_string(interference.size()) + " entries, grid has " +
                      std::to_string(grid.n_time) + " steps");
  }

  const std::size_t nE = grid.n_energy;
  const std::size_t nT = grid.n_time;
  const double dE = grid.dE();
  const double dt = grid.dt();
  const double gain = params.channel_gain_mean;

  if (anchor != nullptr) {
    if (anchor->previous == nullptr || anchor->previous->rows() != nT ||
        anchor->previous->cols() != nE + 1) {
      throw ConfigError("solve_hjb_backward: anchor policy does not match the grid");
    }
    if (!(anchor->weight > 0.0)) {
      throw ConfigError("solve_hjb_backward: proximal weight must be positive");
    }
  }

  HjbSolution out{ValueField(nT + 1, nE + 1), PolicyField(nT, nE + 1), PolicyField(nT, nE + 1)};
  for (std::size_t i = 0; i <= nE; ++i) {
    out.value(nT, i) = terminal(grid.energy(i));
  }

  const int threads = thread_count();
  for (std::size_t step = nT; step-- > 0;) {
    const auto next = out.value.row(step + 1);
    auto now = out.value.row(step);
    auto policy = out.policy.row(step);
    auto on_power = out.on_power.row(step);
    const double current_interference = interference[step];

    now[0] = next[0];
    policy[0] = 0.0;
    on_power[0] = 0.0;
    if (anchor == nullptr) {
#pragma omp parallel for schedule(static) num_threads(threads)
      for (std::size_t i = 1; i <= nE; ++i) {
        const double shadow_price = (next[i] - next[i - 1]) / dE;
        const HamiltonianPoint h =
            hamiltonian_argmax(shadow_price, current_interference, gain, params);
        policy[i] = h.power;
        on_power[i] = h.power;
        now[i] = next[i] + dt * h.value;
      }
    } else {
      const RelaxedUtility env = relaxed_utility(current_interference, gain, params);
      const auto previous = anchor->previous->row(step);
#pragma omp parallel for schedule(static) num_threads(threads)
      for (std::size_t i = 1; i <= nE; ++i) {
        const double shadow_price = (next[i] - next[i - 1]) / dE;
        const ProxPoint r =
            prox_response(env, shadow_price, previous[i], anchor->weight, params.p_max);
        policy[i] = r.mean_power;
        on_power[i] = env.on_power(r.mean_power);
        now[i] = next[i] + dt * r.flow;
      }
    }
  }
  return out;
}

}  // namespace

HjbSolution solve_hjb_backward(const InterferenceTrajectory& interference, const Grid& grid,
                               const TerminalReward& terminal, const ModelParams& params) {
  return sweep(interference, grid, terminal, params, nullptr);
}

HjbSolution solve_hjb_backward(const InterferenceTrajectory& interference, const Grid& grid,
                               const TerminalReward& terminal, const ModelParams& params,
                               const ProxAnchor& anchor) {
  return sweep(interference, grid, terminal, params, &anchor);
}

}  // namespace mfeg
