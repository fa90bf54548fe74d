#pragma once

#include <stdexcept>
#include <string>

namespace tangency {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Model constants violate their invariants (alpha outside (0,1), d50 == 0, ...).
class InvalidParams : public Error {
public:
  using Error::Error;
};

/// An operation was called outside its stated domain.
class PreconditionViolated : public Error {
public:
  using Error::Error;
};

/// Base for numerical-solver failures. The CLI maps these to exit code 3.
class SolverError : public Error {
public:
  using Error::Error;
};

/// An iterate left the bounding box. Signals escape, not a bug.
class EscapedDomain : public SolverError {
public:
  using SolverError::SolverError;
};

class NoConvergence : public SolverError {
public:
  using SolverError::SolverError;
};

/// Converged orbit fails the single-round certificate.
class NotSingleRound : public SolverError {
public:
  using SolverError::SolverError;
};

class NoBifurcationInRange : public SolverError {
public:
  using SolverError::SolverError;
};

/// Negative discriminant in the psi_k quadratic; the leading-order orbit is past its fold.
class ComplexRoot : public SolverError {
public:
  using SolverError::SolverError;
};

/// The predictor denominator for the requested scaling case vanishes.
class DegenerateDirection : public Error {
public:
  using Error::Error;
};

} // namespace tangency
