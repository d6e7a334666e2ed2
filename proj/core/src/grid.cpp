#include "mfeg/grid.hpp"

#include <cmath>
#include <string>

#include "mfeg/errors.hpp"

namespace mfeg {

Grid Grid::with_cfl_margin(const ModelParams& params, std::size_t n_energy, double margin) {
  Grid grid;
  grid.n_energy = n_energy;
  grid.energy_max = params.energy_max;
  grid.t_start = params.t_start;
  grid.t_end = params.t_end;
  const double dE = grid.dE();
  const double horizon = params.horizon();
  // p_max dt / dE <= 1 / margin  <=>  n_time >= margin p_max horizon / dE
  const double needed = margin * params.p_max * horizon / dE;
  grid.n_time = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(needed - 1e-9)));
  return grid;
}

void Grid::validate(const ModelParams& params) const {
  if (n_energy < 2) {
    throw ConfigError("grid: n_energy must be at least 2");
  }
  if (n_time < 2) {
    throw ConfigError("grid: n_time must be at least 2");
  }
  if (!(energy_max > 0.0) || !(t_end > t_start)) {
    throw ConfigError("grid: empty energy range or time horizon");
  }
  const double c = courant(params.p_max);
  if (c > 1.0 + 1e-12) {
    throw ConfigError("grid: CFL violated, p_max * dt / dE = " + std::to_string(c) +
                      " > 1; increase n_time");
  }
}

}  // namespace mfeg
