#pragma once

// Generators and reference helpers shared by the test suites.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "blscale/matrix.hpp"
#include "blscale/rational.hpp"

namespace testing_support {

using blscale::RationalMat;
using blscale::RealMat;

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240917u);
  return gen;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline long uniform_int(long lo, long hi) {
  return std::uniform_int_distribution<long>(lo, hi)(rng());
}

inline RealMat random_mat(std::size_t r, std::size_t c, double lo = -1, double hi = 1) {
  RealMat m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = uniform(lo, hi);
  return m;
}

inline RealMat random_symmetric(std::size_t n) {
  const RealMat a = random_mat(n, n);
  return (a + a.transpose()) * 0.5;
}

inline RealMat random_spd(std::size_t n, double shift = 0.1) {
  const RealMat a = random_mat(n, n);
  return a * a.transpose() + RealMat::identity(n) * shift;
}

inline RationalMat random_int_mat(std::size_t r, std::size_t c, long lo, long hi) {
  RationalMat m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = uniform_int(lo, hi);
  return m;
}

inline double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(1e-300, std::fabs(want));
}

inline double max_abs_diff(const RealMat& a, const RealMat& b) { return (a - b).max_abs(); }

// Determinant over Q by cofactor expansion; independent of the library's
// elimination code.
inline blscale::Rational cofactor_det(const RationalMat& m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  if (n == 1) return m(0, 0);
  blscale::Rational det = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (m(0, j) == 0) continue;
    RationalMat minor(n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t c = 0, cc = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = m(r, c);
      }
    const blscale::Rational term = m(0, j) * cofactor_det(minor);
    det += (j % 2 == 0) ? term : blscale::Rational(-term);
  }
  return det;
}

}  // namespace testing_support
