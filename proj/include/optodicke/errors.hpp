#pragma once

#include <stdexcept>
#include <string>

namespace optodicke {

// Operator/state used with a basis it was not built on, or a malformed basis.
class BasisMismatchError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Parameters on the wrong side of the critical coupling for the requested
// quantity (e.g. a super-radiant builder called in the normal phase).
class PhaseError : public std::invalid_argument {
public:
  PhaseError(const std::string& msg, double lambda, double lambda_c, double mu)
      : std::invalid_argument(msg), lambda_(lambda), lambda_c_(lambda_c), mu_(mu) {}
  double lambda() const noexcept { return lambda_; }
  double lambda_c() const noexcept { return lambda_c_; }
  double mu() const noexcept { return mu_; }

private:
  double lambda_;
  double lambda_c_;
  double mu_;
};

// Iterative solver failed to reach its tolerance within the iteration budget.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Population at the top retained Fock level exceeded the validation limit,
// so the truncated basis cannot be trusted for this run.
class CutoffValidationError : public std::runtime_error {
public:
  CutoffValidationError(const std::string& msg, std::string factor, double population)
      : std::runtime_error(msg), factor_(std::move(factor)), population_(population) {}
  const std::string& factor() const noexcept { return factor_; }
  double population() const noexcept { return population_; }

private:
  std::string factor_;
  double population_;
};

// Phase-space point outside the domain of the spin coherent-state map.
class ClassicalDomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Adaptive stepper pushed the step size below the configured floor.
class StepUnderflowError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A state reached an unphysical configuration (e.g. a density matrix with a
// significantly negative eigenvalue).
class CorruptedStateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace optodicke
