#pragma once

// Dense row-major matrices over a real scalar type. The library uses
// `RealMat` (64-bit floats) for all iterative work; the same template is
// instantiated with a software float for the high-precision mode.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "blscale/error.hpp"

namespace blscale {

template <class T>
class BasicMat {
 public:
  using Scalar = T;

  BasicMat() = default;

  BasicMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  BasicMat(std::size_t rows, std::size_t cols, std::vector<T> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionMismatch("matrix entry count " + std::to_string(data_.size()) +
                              " does not match " + std::to_string(rows_) + "x" +
                              std::to_string(cols_));
    }
    check_finite();
  }

  BasicMat(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionMismatch("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
    check_finite();
  }

  static BasicMat identity(std::size_t n) {
    BasicMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  static BasicMat diagonal(std::span<const T> d) {
    BasicMat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const T> entries() const { return data_; }
  std::span<T> entries() { return data_; }

  BasicMat transpose() const {
    BasicMat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  BasicMat& operator+=(const BasicMat& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }

  BasicMat& operator-=(const BasicMat& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }

  BasicMat& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend BasicMat operator+(BasicMat a, const BasicMat& b) { return a += b; }
  friend BasicMat operator-(BasicMat a, const BasicMat& b) { return a -= b; }
  friend BasicMat operator*(BasicMat a, const T& s) { return a *= s; }
  friend BasicMat operator*(const T& s, BasicMat a) { return a *= s; }

  friend BasicMat operator*(const BasicMat& a, const BasicMat& b) {
    if (a.cols_ != b.rows_) {
      throw DimensionMismatch("product of " + a.shape() + " and " + b.shape());
    }
    BasicMat c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T aik = a(i, k);
        if (aik == T(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    }
    return c;
  }

  bool operator==(const BasicMat& o) const = default;

  T trace() const {
    T t(0);
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  T frobenius_norm() const {
    using std::sqrt;
    T s(0);
    for (const auto& x : data_) s += x * x;
    return sqrt(s);
  }

  T max_abs() const {
    using std::abs;
    T m(0);
    for (const auto& x : data_) m = std::max<T>(m, abs(x));
    return m;
  }

  // (M + Mᵀ)/2; removes rounding asymmetry from sums like Σ A X Aᵀ.
  BasicMat symmetrized() const {
    BasicMat s(*this);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j) {
        const T v = ((*this)(i, j) + (*this)(j, i)) / T(2);
        s(i, j) = v;
        s(j, i) = v;
      }
    return s;
  }

  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

  void check_finite() const {
    using std::isfinite;
    for (const auto& x : data_) {
      if (!isfinite(x)) throw NonFinite("matrix entry is not finite");
    }
  }

 private:
  void require_same_shape(const BasicMat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw DimensionMismatch("shape " + shape() + " vs " + o.shape());
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RealMat = BasicMat<double>;

template <class T>
std::ostream& operator<<(std::ostream& os, const BasicMat<T>& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
    os << "\n";
  }
  return os;
}

// Converts between scalar types (double <-> software float).
template <class To, class From>
BasicMat<To> convert(const BasicMat<From>& m) {
  BasicMat<To> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = static_cast<To>(m(i, j));
  return out;
}

// Vertical concatenation [a; b].
template <class T>
BasicMat<T> vstack(const BasicMat<T>& a, const BasicMat<T>& b) {
  if (a.cols() != b.cols()) throw DimensionMismatch("vstack column mismatch");
  BasicMat<T> out(a.rows() + b.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) out(a.rows() + i, j) = b(i, j);
  return out;
}

// Kronecker product a ⊗ b.
template <class T>
BasicMat<T> kron(const BasicMat<T>& a, const BasicMat<T>& b) {
  BasicMat<T> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const T aij = a(i, j);
      if (aij == T(0)) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

}  // namespace blscale
