#pragma once

// Exact rational matrices and the exact linear algebra used for every rank
// or dimension claim: fraction-free rank, kernels, canonical subspace bases.

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <vector>

#include "blscale/matrix.hpp"

namespace blscale {

using Rational = mpq_class;

class RationalMat {
 public:
  RationalMat() = default;
  RationalMat(std::size_t rows, std::size_t cols);
  RationalMat(std::size_t rows, std::size_t cols, std::vector<Rational> entries);
  RationalMat(std::initializer_list<std::initializer_list<long>> rows);

  static RationalMat identity(std::size_t n);
  // Exact: every double is a dyadic rational.
  static RationalMat from_real(const RealMat& m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  RationalMat transpose() const;
  RealMat to_real() const;
  bool is_integral() const;
  bool is_zero() const;
  bool operator==(const RationalMat& o) const;

  // Select columns [first, first + count).
  RationalMat columns(std::size_t first, std::size_t count) const;

  friend RationalMat operator*(const RationalMat& a, const RationalMat& b);
  friend RationalMat operator+(const RationalMat& a, const RationalMat& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

// Rank over Q by Bareiss elimination on row-wise integer scalings.
// First nonzero pivot in each column; deterministic.
std::size_t exact_rank(const RationalMat& m);

// Columns form a basis of {x : m x = 0}, read off the reduced row echelon
// form (one basis vector per free column, free entry equal to 1).
RationalMat exact_kernel_basis(const RationalMat& m);

// Reduced row echelon form over Q; returns the pivot columns as well.
struct Rref {
  RationalMat matrix;
  std::vector<std::size_t> pivots;
};
Rref rref(const RationalMat& m);

// Canonical basis (as columns) of the column space of m: the transposed
// nonzero rows of rref(mᵀ). Equal subspaces give equal matrices.
RationalMat canonical_basis(const RationalMat& m);

RationalMat hconcat(const RationalMat& a, const RationalMat& b);
RationalMat subspace_sum(const RationalMat& a, const RationalMat& b);
RationalMat subspace_intersection(const RationalMat& a, const RationalMat& b);
RationalMat orthogonal_complement(const RationalMat& basis, std::size_t ambient);

// Best rational approximation with denominator at most max_den
// (continued-fraction convergents and semiconvergents).
Rational rationalize(double x, long max_den);

// "p", "-p", "p/q" (canonicalized). Throws ParseError on anything else.
Rational parse_rational(const std::string& s);
std::string to_string(const Rational& q);

// Bits needed for max(|numerator|, denominator).
std::size_t bit_size(const Rational& q);

}  // namespace blscale
