#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mfeg/model.hpp"

namespace mfeg {

/// Uniform time x energy discretization of [T, T'] x [0, E_max].
///
/// Energy nodes are E_i = i dE for i = 0..n_energy; node 0 is the empty battery.
/// Time nodes are t_n = T + n dt for n = 0..n_time; decisions are taken on
/// the n_time intervals [t_n, t_{n+1}).
struct Grid {
  std::size_t n_energy = 200;
  std::size_t n_time = 1200;
  double energy_max = 20.0;
  double t_start = 0.0;
  double t_end = 20.0;

  double dE() const noexcept { return energy_max / static_cast<double>(n_energy); }
  double dt() const noexcept { return (t_end - t_start) / static_cast<double>(n_time); }
  double energy(std::size_t i) const noexcept { return dE() * static_cast<double>(i); }
  double time(std::size_t n) const noexcept { return t_start + dt() * static_cast<double>(n); }

  /// Courant number p_max dt / dE.
  double courant(double p_max) const noexcept { return p_max * dt() / dE(); }

  /// Smallest n_time with courant <= 1 / margin.
  static Grid with_cfl_margin(const ModelParams& params, std::size_t n_energy,
                              double margin = 1.2);

  /// Throws ConfigError on n_energy < 2, n_time < 2 or a CFL violation.
  void validate(const ModelParams& params) const;
};

/// Dense row-major array over (time index, energy index).
class TimeEnergyField {
 public:
  TimeEnergyField() = default;
  TimeEnergyField(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t n, std::size_t i) { return data_[n * cols_ + i]; }
  double operator()(std::size_t n, std::size_t i) const { return data_[n * cols_ + i]; }

  std::span<double> row(std::size_t n) { return {data_.data() + n * cols_, cols_}; }
  std::span<const double> row(std::size_t n) const { return {data_.data() + n * cols_, cols_}; }

  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const TimeEnergyField&, const TimeEnergyField&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// v(t_n, E_i): (n_time + 1) x (n_energy + 1).
struct ValueField : TimeEnergyField {
  using TimeEnergyField::TimeEnergyField;
};

/// p*(t_n, E_i) applied on [t_n, t_{n+1}): n_time x (n_energy + 1); column 0 is always 0.
struct PolicyField : TimeEnergyField {
  using TimeEnergyField::TimeEnergyField;
};

/// Mean-field interference felt during each decision interval, W. Size n_time.
struct InterferenceTrajectory {
  std::vector<double> watts;

  std::size_t size() const noexcept { return watts.size(); }
  double operator[](std::size_t n) const { return watts[n]; }

  static InterferenceTrajectory constant(std::size_t n_time, double value) {
    return {std::vector<double>(n_time, value)};
  }

  friend bool operator==(const InterferenceTrajectory&, const InterferenceTrajectory&) = default;
};

}  // namespace mfeg
