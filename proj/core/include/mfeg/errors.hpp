#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mfeg {

/// Base class for every error raised by the solver suite.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (negative power, E0 > E_max, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or discretization detected before any computation (CFL, stability, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The symmetric equilibrium does not exist: theta * beta >= 1 saturates the cell.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A discrete invariant was broken during a run (mass defect, negative cell, ...).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Root bracketing failed: either no sign change or more than one.
class RootFindingError : public Error {
 public:
  RootFindingError(const std::string& what, std::vector<std::pair<double, double>> brackets)
      : Error(what), brackets_(std::move(brackets)) {}

  const std::vector<std::pair<double, double>>& brackets() const noexcept { return brackets_; }

 private:
  std::vector<std::pair<double, double>> brackets_;
};

}  // namespace mfeg
