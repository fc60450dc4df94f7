#pragma once

#include <stdexcept>
#include <string>

namespace panel {

/// Root of the library's exception hierarchy.
class PanelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Fields living on different grids, or sizes that do not agree.
class DimensionError : public PanelError {
public:
  using PanelError::PanelError;
};

/// A parameter outside the admissible range of an operation.
class DomainError : public PanelError {
public:
  using PanelError::PanelError;
};

/// A symbol evaluated where its denominator vanishes.
class SingularPointError : public DomainError {
public:
  using DomainError::DomainError;
};

/// Iterative or direct solver failure; carries the last residual seen.
class SolverError : public PanelError {
public:
  SolverError(const std::string& what, double residual)
      : PanelError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

/// Newton iteration whose linearization is (numerically) singular.
class NearBifurcationError : public SolverError {
public:
  using SolverError::SolverError;
};

/// Per-frequency solve in the downwash inversion did not converge.
class FrequencyResolutionError : public SolverError {
public:
  using SolverError::SolverError;
};

/// The history buffer does not cover the requested delay window.
class HistoryUnderflow : public PanelError {
public:
  using PanelError::PanelError;
};

/// Non-finite values appeared during time stepping.
class DivergenceError : public PanelError {
public:
  DivergenceError(const std::string& what, long step)
      : PanelError(what), step_(step) {}
  long step() const noexcept { return step_; }

private:
  long step_;
};

/// Invalid scenario configuration; names the offending field.
class ConfigError : public PanelError {
public:
  ConfigError(const std::string& field, const std::string& what)
      : PanelError(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

}  // namespace panel
