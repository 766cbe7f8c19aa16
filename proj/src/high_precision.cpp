#include "blscale/high_precision.hpp"

#include <cmath>

namespace blscale {

PrecisionGuard::PrecisionGuard(unsigned bits) : saved_digits_(HighPrec::default_precision()) {
  // MPFR precision is configured in decimal digits by boost.
  const auto digits = static_cast<unsigned>(std::ceil(bits * 0.30102999566398120));
  HighPrec::default_precision(digits < 10 ? 10 : digits);
}

PrecisionGuard::~PrecisionGuard() { HighPrec::default_precision(saved_digits_); }

}  // namespace blscale
