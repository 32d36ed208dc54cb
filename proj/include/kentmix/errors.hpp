#pragma once

#include <stdexcept>
#include <string>

namespace kentmix {

/// Input outside the documented domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative numeric routine failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The shape subproblem has no finite maximizer (b >= 0).
class UnboundedObjectiveError : public DomainError {
 public:
  using DomainError::DomainError;
};

class DegenerateDataError : public DomainError {
 public:
  using DomainError::DomainError;
};

class UnsupportedSamplingError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// QR retraction hit a rank-deficient matrix.
class RetractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed file content (CSV, PPM, model JSON).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kentmix
