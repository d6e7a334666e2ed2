#pragma once

// Test-side reference computations. Nothing here calls into the library's solvers; each
// routine is a separate, deliberately naive implementation of the quantity it checks.

#include <cmath>
#include <cstdint>
#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace oracle {

/// Root of x f'(x) - f(x) = 0 for f = exp(-a/x): x = a.
inline double static_beta(double a) { return a; }

/// Root of x (1 - theta x) f'(x) - f(x) = 0 for f = exp(-a/x): x = a / (1 + a theta).
inline double repeated_beta(double a, double theta) { return a / (1.0 + a * theta); }

/// Plain bisection on a sign change.
inline double bisect(const std::function<double(double)>& fn, double lo, double hi,
                     int iterations = 200) {
  double flo = fn(lo);
  for (int k = 0; k < iterations; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double fm = fn(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// sigma^2 beta / (g (1 - theta beta)).
inline double static_power(double beta, double noise, double theta, double gain) {
  return noise * beta / (gain * (1.0 - theta * beta));
}

/// phi(p) = R exp(-a (sigma^2 + I) / (p g)) / p - lambda p, phi(0) = 0.
inline double phi(double p, double lambda, double interference, double gain, double rate,
                  double noise, double a) {
  if (p <= 0.0) return 0.0;
  return rate * std::exp(-a * (noise + interference) / (p * gain)) / p - lambda * p;
}

struct Best {
  double power;
  double value;
};

/// Dense scan of phi over [0, p_max] followed by ternary refinement around the best sample.
inline Best brute_force_argmax(double lambda, double interference, double gain, double rate,
                               double noise, double a, double p_max, int samples = 20000) {
  Best best{0.0, 0.0};
  int best_k = 0;
  for (int k = 1; k <= samples; ++k) {
    const double p = p_max * k / samples;
    const double v = phi(p, lambda, interference, gain, rate, noise, a);
    if (v > best.value) {
      best = {p, v};
      best_k = k;
    }
  }
  if (best_k == 0) return best;
  double lo = p_max * (best_k - 1) / samples;
  double hi = std::min(p_max, p_max * (best_k + 1) / samples);
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (phi(m1, lambda, interference, gain, rate, noise, a) <
        phi(m2, lambda, interference, gain, rate, noise, a)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  const double p = 0.5 * (lo + hi);
  const double v = phi(p, lambda, interference, gain, rate, noise, a);
  if (v > best.value) best = {p, v};
  return best;
}

/// Utility of a constant power p started with energy E0 against interference I_n that is
/// constant on [n dt, (n + 1) dt): the exact integral of R f(gamma(t)) / p over the active
/// time min(T, E0 / p).
inline double constant_power_utility(double p, double energy, const std::vector<double>& interference,
                                     double dt, double rate, double noise, double a, double gain) {
  if (p <= 0.0) return 0.0;
  const double active = energy / p;
  double total = 0.0;
  for (std::size_t n = 0; n < interference.size(); ++n) {
    const double t0 = static_cast<double>(n) * dt;
    if (t0 >= active) break;
    const double span = std::min(dt, active - t0);
    total += rate * std::exp(-a * (noise + interference[n]) / (p * gain)) / p * span;
  }
  return total;
}

/// Mean of the OU process h' = (mu - h) / 2 from h0.
inline std::complex<double> ou_mean(std::complex<double> mu, std::complex<double> h0, double t) {
  return mu + (h0 - mu) * std::exp(-0.5 * t);
}

/// Least-squares slope of y on x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  return sxy / sxx;
}

/// FNV-1a over a byte string.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace oracle
