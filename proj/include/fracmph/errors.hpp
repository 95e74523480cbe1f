#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fracmph {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. x < 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not reach its requested accuracy.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Raised when a closed-form joint density is requested for a model that
/// has none.
class NoClosedFormError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Parameter validation failure. Carries every violated invariant, in the
/// order they were detected; what() reports all of them.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  explicit ValidationError(std::string violation)
      : ValidationError(std::vector<std::string>{std::move(violation)}) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }
  const std::string& first() const noexcept { return violations_.front(); }

 private:
  std::vector<std::string> violations_;
};

}  // namespace fracmph
