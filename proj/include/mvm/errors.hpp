#ifndef MVM_ERRORS_HPP
#define MVM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mvm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes that do not agree with the distribution dimension.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Parameters or arguments outside their valid domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// P = diag(kappa) - Lambda is required to be positive definite.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// A mathematical guarantee failed numerically (e.g. an invalid eigenvalue bound).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class SamplerStall : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require_dimension(std::size_t got, std::size_t expected, const char* what) {
  if (got != expected) {
    throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(expected) +
                            ", got " + std::to_string(got));
  }
}

}  // namespace detail
}  // namespace mvm

#endif  // MVM_ERRORS_HPP
