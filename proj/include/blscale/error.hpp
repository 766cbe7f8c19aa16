#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace blscale {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonSymmetric : public Error {
 public:
  using Error::Error;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateOperator : public Error {
 public:
  using Error::Error;
};

class ScalingViolation : public Error {
 public:
  using Error::Error;
};

class NormalizationViolated : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Raised when a matrix that must be inverted (or square-rooted and inverted)
// has an eigenvalue at or below the relative floor. `index` identifies the
// offending map or step when the caller knows it, otherwise it is npos.
class SingularMatrix : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit SingularMatrix(const std::string& what, std::size_t index = npos)
      : Error(what), index_(index) {}

  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

}  // namespace blscale
