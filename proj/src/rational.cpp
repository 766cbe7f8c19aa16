#include "blscale/rational.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <utility>

#include "blscale/error.hpp"

namespace blscale {

RationalMat::RationalMat(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

RationalMat::RationalMat(std::size_t rows, std::size_t cols, std::vector<Rational> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionMismatch("rational matrix entry count does not match shape");
  }
  for (auto& q : data_) q.canonicalize();
}

RationalMat::RationalMat(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionMismatch("ragged matrix literal");
    for (long v : r) data_.emplace_back(v);
  }
}

RationalMat RationalMat::identity(std::size_t n) {
  RationalMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalMat RationalMat::from_real(const RealMat& m) {
  m.check_finite();
  RationalMat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = Rational(m(i, j));
  return out;
}

RationalMat RationalMat::transpose() const {
  RationalMat t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

RealMat RationalMat::to_real() const {
  RealMat out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j).get_d();
  return out;
}

bool RationalMat::is_integral() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const Rational& q) { return q.get_den() == 1; });
}

bool RationalMat::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Rational& q) { return q == 0; });
}

bool RationalMat::operator==(const RationalMat& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

RationalMat RationalMat::columns(std::size_t first, std::size_t count) const {
  if (first + count > cols_) throw DimensionMismatch("column range out of bounds");
  RationalMat out(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
  return out;
}

RationalMat operator*(const RationalMat& a, const RationalMat& b) {
  if (a.cols_ != b.rows_) throw DimensionMismatch("rational product shape mismatch");
  RationalMat c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Rational& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

RationalMat operator+(const RationalMat& a, const RationalMat& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatch("rational sum shape mismatch");
  RationalMat c(a.rows_, a.cols_);
  for (std::size_t k = 0; k < a.data_.size(); ++k) c.data_[k] = a.data_[k] + b.data_[k];
  return c;
}

std::size_t exact_rank(const RationalMat& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  // Clear denominators row by row; row scaling does not change the rank.
  std::vector<std::vector<mpz_class>> a(rows, std::vector<mpz_class>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    mpz_class l = 1;
    for (std::size_t j = 0; j < cols; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).get_den_mpz_t());
    for (std::size_t j = 0; j < cols; ++j) a[i][j] = m(i, j).get_num() * (l / m(i, j).get_den());
  }

  std::size_t rank = 0;
  mpz_class prev = 1;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t piv = rank;
    while (piv < rows && a[piv][col] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[rank]);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = col + 1; j < cols; ++j) {
        a[i][j] = (a[rank][col] * a[i][j] - a[i][col] * a[rank][j]);
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
      a[i][col] = 0;
    }
    prev = a[rank][col];
    ++rank;
  }
  return rank;
}

Rref rref(const RationalMat& m) {
  Rref out{m, {}};
  RationalMat& a = out.matrix;
  std::size_t row = 0;
  for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
    std::size_t piv = row;
    while (piv < a.rows() && a(piv, col) == 0) ++piv;
    if (piv == a.rows()) continue;
    if (piv != row)
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(piv, j), a(row, j));
    const Rational d = a(row, col);
    for (std::size_t j = col; j < a.cols(); ++j) a(row, j) /= d;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == row || a(i, col) == 0) continue;
      const Rational f = a(i, col);
      for (std::size_t j = col; j < a.cols(); ++j) a(i, j) -= f * a(row, j);
    }
    out.pivots.push_back(col);
    ++row;
  }
  return out;
}

RationalMat exact_kernel_basis(const RationalMat& m) {
  const auto r = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : r.pivots) is_pivot[p] = true;
  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < m.cols(); ++j)
    if (!is_pivot[j]) free.push_back(j);

  RationalMat basis(m.cols(), free.size());
  for (std::size_t k = 0; k < free.size(); ++k) {
    basis(free[k], k) = 1;
    for (std::size_t i = 0; i < r.pivots.size(); ++i) basis(r.pivots[i], k) = -r.matrix(i, free[k]);
  }
  return basis;
}

RationalMat canonical_basis(const RationalMat& m) {
  const auto r = rref(m.transpose());
  RationalMat out(m.rows(), r.pivots.size());
  for (std::size_t k = 0; k < r.pivots.size(); ++k)
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, k) = r.matrix(k, i);
  return out;
}

RationalMat hconcat(const RationalMat& a, const RationalMat& b) {
  if (a.rows() != b.rows()) throw DimensionMismatch("hconcat row mismatch");
  RationalMat out(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) out(i, a.cols() + j) = b(i, j);
  }
  return out;
}

RationalMat subspace_sum(const RationalMat& a, const RationalMat& b) {
  return canonical_basis(hconcat(a, b));
}

RationalMat subspace_intersection(const RationalMat& a, const RationalMat& b) {
  const std::size_t n = a.rows();
  if (a.cols() == 0 || b.cols() == 0) return RationalMat(n, 0);
  // x = a·s = b·t  <=>  [a, -b] (s; t) = 0
  RationalMat neg_b = b;
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) neg_b(i, j) = -b(i, j);
  const RationalMat ker = exact_kernel_basis(hconcat(a, neg_b));
  const RationalMat s = [&] {
    RationalMat top(a.cols(), ker.cols());
    for (std::size_t i = 0; i < a.cols(); ++i)
      for (std::size_t j = 0; j < ker.cols(); ++j) top(i, j) = ker(i, j);
    return top;
  }();
  return canonical_basis(a * s);
}

RationalMat orthogonal_complement(const RationalMat& basis, std::size_t ambient) {
  if (basis.cols() == 0) return RationalMat::identity(ambient);
  return canonical_basis(exact_kernel_basis(basis.transpose()));
}

Rational rationalize(double x, long max_den) {
  if (!std::isfinite(x)) throw NonFinite("cannot rationalize a non-finite value");
  if (max_den < 1) max_den = 1;
  const bool neg = x < 0;
  double y = std::fabs(x);
  // Convergents h/k of the continued fraction of y.
  mpz_class h_prev = 1, h = static_cast<long>(std::floor(y));
  mpz_class k_prev = 0, k = 1;
  double frac = y - std::floor(y);
  Rational best(h, k);
  while (frac > 1e-15) {
    const double inv = 1.0 / frac;
    const double a_d = std::floor(inv);
    if (a_d > 1e15) break;
    const mpz_class a = static_cast<long>(a_d);
    frac = inv - a_d;
    const mpz_class h_next = a * h + h_prev;
    const mpz_class k_next = a * k + k_prev;
    if (k_next > max_den) {
      // Largest semiconvergent that fits.
      const mpz_class t = (mpz_class(max_den) - k_prev) / k;
      if (t > 0) {
        Rational semi(t * h + h_prev, t * k + k_prev);
        semi.canonicalize();
        if (std::fabs(semi.get_d() - y) < std::fabs(best.get_d() - y)) best = semi;
      }
      break;
    }
    h_prev = h;
    k_prev = k;
    h = h_next;
    k = k_next;
    best = Rational(h, k);
    best.canonicalize();
  }
  return neg ? Rational(-best) : best;
}

Rational parse_rational(const std::string& s) {
  static const std::regex pattern(R"(\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*)");
  std::smatch match;
  if (!std::regex_match(s, match, pattern)) {
    throw ParseError("not an exact rational: \"" + s + "\"");
  }
  mpz_class num(match[1].str().front() == '+' ? match[1].str().substr(1) : match[1].str());
  mpz_class den = match[2].matched ? mpz_class(match[2].str()) : mpz_class(1);
  if (den == 0) throw ParseError("zero denominator in \"" + s + "\"");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::size_t bit_size(const Rational& q) {
  const mpz_class num = abs(q.get_num());
  const std::size_t a = num == 0 ? 1 : mpz_sizeinbase(num.get_mpz_t(), 2);
  const std::size_t b = mpz_sizeinbase(q.get_den_mpz_t(), 2);
  return std::max(a, b);
}

}  // namespace blscale
