#include "mfeg/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mfeg/errors.hpp"
#include "mfeg/parallel.hpp"

namespace mfeg {

namespace {

// Bernoulli function z / (e^z - 1).
double bernoulli(double z) {
  if (std::abs(z) < 1e-8) return 1.0 - 0.5 * z;
  return z / std::expm1(z);
}

// Face coefficients along one axis. The mass rate through face j + 1/2 (from cell j to
// cell j + 1) is out[j] * m_j - back[j] * m_{j+1}; there are cells - 1 interior faces.
struct AxisFluxes {
  std::vector<double> out;
  std::vector<double> back;
};

AxisFluxes axis_fluxes(double mu, double eta, const ChannelGrid& grid) {
  const std::size_t n = grid.cells;
  const double dh = grid.dh();
  const double diffusion = 0.5 * eta * eta;
  AxisFluxes f{std::vector<double>(n - 1), std::vector<double>(n - 1)};
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double face = -grid.half_width + static_cast<double>(j + 1) * dh;
    const double v = 0.5 * (mu - face);
    if (diffusion == 0.0) {
      f.out[j] = std::max(v, 0.0) / dh;
      f.back[j] = std::max(-v, 0.0) / dh;
    } else if (grid.scheme == DriftScheme::exponential_fitting) {
      const double z = v * dh / diffusion;
      f.out[j] = diffusion / (dh * dh) * bernoulli(-z);
      f.back[j] = diffusion / (dh * dh) * bernoulli(z);
    } else {
      f.out[j] = std::max(v, 0.0) / dh + diffusion / (dh * dh);
      f.back[j] = std::max(-v, 0.0) / dh + diffusion / (dh * dh);
    }
  }
  return f;
}

// Largest rate at which a single cell loses mass along one axis.
double max_axis_loss(const AxisFluxes& f) {
  const std::size_t faces = f.out.size();
  double worst = 0.0;
  for (std::size_t j = 0; j <= faces; ++j) {
    const double right = j < faces ? f.out[j] : 0.0;
    const double left = j > 0 ? f.back[j - 1] : 0.0;
    worst = std::max(worst, right + left);
  }
  return worst;
}

double gaussian_cell(double lo, double hi, double mu, double sd) {
  const double s = sd * std::sqrt(2.0);
  return 0.5 * (std::erf((hi - mu) / s) - std::erf((lo - mu) / s));
}

}  // namespace

const char* to_string(DriftScheme scheme) {
  switch (scheme) {
    case DriftScheme::exponential_fitting:
      return "exponential_fitting";
    case DriftScheme::upwind:
      return "upwind";
  }
  return "unknown";
}

void ChannelGrid::validate(std::complex<double> mu, double eta) const {
  if (cells < 3) throw ConfigError("channel grid: need at least 3 cells per axis");
  if (!(half_width > 0.0)) throw ConfigError("channel grid: half_width must be positive");
  if (!(dt > 0.0)) throw ConfigError("channel grid: dt must be positive");
  if (eta < 0.0) throw ConfigError("channel grid: eta must be non-negative");
  if (eta > 0.0 && dt > dh() * dh() / (2.0 * eta * eta)) {
    throw ConfigError("channel grid: dt " + std::to_string(dt) + " exceeds dh^2/(2 eta^2) = " +
                      std::to_string(dh() * dh() / (2.0 * eta * eta)));
  }
  const double loss = max_axis_loss(axis_fluxes(mu.real(), eta, *this)) +
                      max_axis_loss(axis_fluxes(mu.imag(), eta, *this));
  if (dt * loss > 1.0) {
    throw ConfigError("channel grid: dt too large for a positive update (dt * loss rate = " +
                      std::to_string(dt * loss) + ")");
  }
}

double ChannelDensity::total() const { return std::accumulate(mass.begin(), mass.end(), 0.0); }

std::complex<double> ChannelDensity::mean(const ChannelGrid& grid) const {
  double re = 0.0, im = 0.0;
  for (std::size_t a = 0; a < cells; ++a) {
    for (std::size_t b = 0; b < cells; ++b) {
      re += at(a, b) * grid.center(a);
      im += at(a, b) * grid.center(b);
    }
  }
  const double t = total();
  return {re / t, im / t};
}

double ChannelDensity::second_moment(const ChannelGrid& grid, std::complex<double> about) const {
  double acc = 0.0;
  for (std::size_t a = 0; a < cells; ++a) {
    for (std::size_t b = 0; b < cells; ++b) {
      acc += at(a, b) * std::norm(std::complex<double>(grid.center(a), grid.center(b)) - about);
    }
  }
  return acc / total();
}

double ChannelDensity::boundary_mass() const {
  double acc = 0.0;
  for (std::size_t a = 0; a < cells; ++a) {
    for (std::size_t b = 0; b < cells; ++b) {
      if (a == 0 || b == 0 || a + 1 == cells || b + 1 == cells) acc += at(a, b);
    }
  }
  return acc;
}

double total_variation(const ChannelDensity& a, const ChannelDensity& b) {
  if (a.mass.size() != b.mass.size()) throw DomainError("total_variation: shape mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.mass.size(); ++k) acc += std::abs(a.mass[k] - b.mass[k]);
  return 0.5 * acc;
}

ChannelDensity point_mass(const ChannelGrid& grid, std::complex<double> h0) {
  ChannelDensity d{grid.cells, std::vector<double>(grid.cells * grid.cells, 0.0)};
  auto index = [&](double x) {
    const double k = std::floor((x + grid.half_width) / grid.dh());
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(grid.cells - 1)));
  };
  d.at(index(h0.real()), index(h0.imag())) = 1.0;
  return d;
}

ChannelDensity stationary_channel_density(std::complex<double> mu, double eta,
                                          const ChannelGrid& grid) {
  if (!(eta > 0.0)) throw DomainError("stationary_channel_density: eta must be positive");
  const std::size_t n = grid.cells;
  std::vector<double> re(n), im(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = -grid.half_width + static_cast<double>(j) * grid.dh();
    re[j] = gaussian_cell(lo, lo + grid.dh(), mu.real(), eta);
    im[j] = gaussian_cell(lo, lo + grid.dh(), mu.imag(), eta);
  }
  ChannelDensity d{n, std::vector<double>(n * n)};
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) d.at(a, b) = re[a] * im[b];
  }
  const double t = d.total();
  for (double& m : d.mass) m /= t;
  return d;
}

ChannelTrajectory ou_fpk_forward(std::complex<double> mu, double eta,
                                 const ChannelDensity& initial, const ChannelGrid& grid,
                                 double duration, std::size_t stride) {
  grid.validate(mu, eta);
  if (initial.cells != grid.cells || initial.mass.size() != grid.cells * grid.cells) {
    throw ConfigError("ou_fpk_forward: initial density does not match the grid");
  }
  if (duration < 0.0) throw ConfigError("ou_fpk_forward: negative duration");
  if (stride == 0) stride = 1;

  const std::size_t n = grid.cells;
  const auto steps = static_cast<std::size_t>(std::ceil(duration / grid.dt - 1e-9));
  const double dt = steps > 0 ? duration / static_cast<double>(steps) : 0.0;
  const AxisFluxes fx = axis_fluxes(mu.real(), eta, grid);
  const AxisFluxes fy = axis_fluxes(mu.imag(), eta, grid);

  ChannelTrajectory out;
  ChannelDensity cur = initial;
  ChannelDensity next = initial;
  auto record = [&](std::size_t step) {
    out.times.push_back(static_cast<double>(step) * dt);
    out.slices.push_back(cur);
  };
  auto monitor = [&] {
    out.max_boundary_mass = std::max(out.max_boundary_mass, cur.boundary_mass());
    out.max_mass_defect = std::max(out.max_mass_defect, std::abs(cur.total() - 1.0));
  };
  record(0);
  monitor();

  const int threads = thread_count();
  for (std::size_t s = 1; s <= steps; ++s) {
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const double m = cur.at(a, b);
        double rate = 0.0;
        if (a + 1 < n) rate -= fx.out[a] * m - fx.back[a] * cur.at(a + 1, b);
        if (a > 0) rate += fx.out[a - 1] * cur.at(a - 1, b) - fx.back[a - 1] * m;
        if (b + 1 < n) rate -= fy.out[b] * m - fy.back[b] * cur.at(a, b + 1);
        if (b > 0) rate += fy.out[b - 1] * cur.at(a, b - 1) - fy.back[b - 1] * m;
        next.at(a, b) = m + dt * rate;
      }
    }
    std::swap(cur, next);
    monitor();
    if (s % stride == 0 || s == steps) record(s);
  }
  return out;
}

double channel_regime_power(double gain, const StaticEquilibrium& beta, const ModelParams& params) {
  if (gain == 0.0) {
    if (beta.load * beta.beta >= 1.0) {
      throw InfeasibleError("channel regime: theta * beta >= 1, no finite equilibrium");
    }
    return params.p_max;
  }
  return equilibrium_power(gain, beta, params).watts;
}

ChannelPolicy channel_regime_policy(const ChannelDensity& slice, const ChannelGrid& grid,
                                    const ModelParams& params) {
  if (std::abs(slice.total() - 1.0) > 1e-6) {
    throw DomainError("channel_regime_policy: density is not normalized");
  }
  const StaticEquilibrium eq =
      solve_beta(EquilibriumMode::static_nash, params.load, params.success);
  if (params.load * eq.beta >= 1.0) {
    throw InfeasibleError("channel regime: theta * beta* >= 1, no finite equilibrium");
  }
  ChannelPolicy policy;
  policy.beta = eq.beta;
  policy.interference =
      params.load * eq.beta * params.noise_power / (1.0 - params.load * eq.beta);
  policy.power.resize(slice.mass.size());
  for (std::size_t a = 0; a < slice.cells; ++a) {
    for (std::size_t b = 0; b < slice.cells; ++b) {
      const double gain = std::norm(std::complex<double>(grid.center(a), grid.center(b)));
      const double p = channel_regime_power(gain, eq, params);
      if (p >= params.p_max) ++policy.clamped_cells;
      policy.power[a * slice.cells + b] = p;
    }
  }
  return policy;
}

}  // namespace mfeg
