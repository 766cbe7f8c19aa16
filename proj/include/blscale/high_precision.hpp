#pragma once

// Optional software-float scalar for the scaling routines. Precision is set
// per thread in bits; 0 bits means "use 64-bit doubles".

#include <boost/multiprecision/mpfr.hpp>

#include "blscale/matrix.hpp"

namespace blscale {

using HighPrec = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                               boost::multiprecision::et_off>;
using HighPrecMat = BasicMat<HighPrec>;

// Sets the default MPFR precision for the lifetime of the guard.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned bits);
  ~PrecisionGuard();
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_digits_;
};

}  // namespace blscale
