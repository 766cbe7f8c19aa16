#pragma once

// Completely positive maps X -> Σ A_i X A_iᵀ given by Kraus matrices
// A_i of shape n2 x n1, with their duals and the two normalizations used by
// operator scaling.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "blscale/eigen.hpp"
#include "blscale/error.hpp"
#include "blscale/matrix.hpp"
#include "blscale/rational.hpp"

namespace blscale {

// Number of worker threads for Kraus sums (double precision only). The
// reduction is a fixed contiguous partition followed by a pairwise tree, so
// results depend on the thread count but never on scheduling.
void set_kraus_threads(unsigned threads);
unsigned kraus_threads();

template <class T>
class KrausOperator {
 public:
  using Mat = BasicMat<T>;

  KrausOperator(std::vector<Mat> kraus, std::optional<std::vector<RationalMat>> exact = std::nullopt)
      : kraus_(std::move(kraus)), exact_(std::move(exact)) {
    if (kraus_.empty()) throw DegenerateOperator("operator needs at least one Kraus matrix");
    n2_ = kraus_.front().rows();
    n1_ = kraus_.front().cols();
    if (n1_ == 0 || n2_ == 0) throw DegenerateOperator("Kraus matrices must be nonempty");
    bool all_zero = true;
    for (const auto& a : kraus_) {
      if (a.rows() != n2_ || a.cols() != n1_) {
        throw DimensionMismatch("Kraus matrices must share one shape; got " + a.shape() +
                                " and " + kraus_.front().shape());
      }
      if (a.max_abs() != T(0)) all_zero = false;
    }
    if (all_zero) throw DegenerateOperator("all Kraus matrices are zero");
    if (exact_) {
      if (exact_->size() != kraus_.size()) throw DimensionMismatch("exact mirror size mismatch");
      for (const auto& a : *exact_)
        if (a.rows() != n2_ || a.cols() != n1_) throw DimensionMismatch("exact mirror shape mismatch");
    }
  }

  // Exact input; the float Kraus list is derived from it.
  static KrausOperator from_exact(std::vector<RationalMat> exact) {
    std::vector<Mat> kraus;
    kraus.reserve(exact.size());
    for (const auto& a : exact) kraus.push_back(convert<T>(a.to_real()));
    return KrausOperator(std::move(kraus), std::move(exact));
  }

  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n2_; }
  std::size_t size() const { return kraus_.size(); }
  const std::vector<Mat>& kraus() const { return kraus_; }
  const std::optional<std::vector<RationalMat>>& exact() const { return exact_; }

  bool has_integer_kraus() const {
    if (!exact_) return false;
    for (const auto& a : *exact_)
      if (!a.is_integral()) return false;
    return true;
  }

  T max_abs_entry() const {
    T m(0);
    for (const auto& a : kraus_) m = std::max<T>(m, a.max_abs());
    return m;
  }

  // T(X) = Σ A_i X A_iᵀ
  Mat apply(const Mat& x) const {
    if (x.rows() != n1_ || x.cols() != n1_) {
      throw DimensionMismatch("apply expects " + std::to_string(n1_) + "x" + std::to_string(n1_) +
                              ", got " + x.shape());
    }
    return kraus_sum(n2_, [&](const Mat& a) { return a * x * a.transpose(); });
  }

  // T*(Y) = Σ A_iᵀ Y A_i
  Mat dual_apply(const Mat& y) const {
    if (y.rows() != n2_ || y.cols() != n2_) {
      throw DimensionMismatch("dual_apply expects " + std::to_string(n2_) + "x" +
                              std::to_string(n2_) + ", got " + y.shape());
    }
    return kraus_sum(n1_, [&](const Mat& a) { return a.transpose() * y * a; });
  }

  // T(I) and T*(I) without forming identities.
  Mat apply_identity() const {
    return kraus_sum(n2_, [](const Mat& a) { return a * a.transpose(); });
  }
  Mat dual_apply_identity() const {
    return kraus_sum(n1_, [](const Mat& a) { return a.transpose() * a; });
  }

  KrausOperator dual() const {
    std::vector<Mat> k;
    k.reserve(kraus_.size());
    for (const auto& a : kraus_) k.push_back(a.transpose());
    std::optional<std::vector<RationalMat>> e;
    if (exact_) {
      e.emplace();
      for (const auto& a : *exact_) e->push_back(a.transpose());
    }
    return KrausOperator(std::move(k), std::move(e));
  }

  // Kraus list {left · A_i · right}; the exact mirror is dropped.
  KrausOperator scaled(const Mat& left, const Mat& right) const {
    std::vector<Mat> k;
    k.reserve(kraus_.size());
    for (const auto& a : kraus_) k.push_back(left * a * right);
    return KrausOperator(std::move(k));
  }

  KrausOperator scaled_right(const Mat& right) const {
    std::vector<Mat> k;
    k.reserve(kraus_.size());
    for (const auto& a : kraus_) k.push_back(a * right);
    return KrausOperator(std::move(k));
  }

  KrausOperator scaled_left(const Mat& left) const {
    std::vector<Mat> k;
    k.reserve(kraus_.size());
    for (const auto& a : kraus_) k.push_back(left * a);
    return KrausOperator(std::move(k));
  }

 private:
  template <class F>
  Mat kraus_sum(std::size_t dim, F term) const;

  std::vector<Mat> kraus_;
  std::optional<std::vector<RationalMat>> exact_;
  std::size_t n1_ = 0;
  std::size_t n2_ = 0;
};

using CPOperator = KrausOperator<double>;

namespace detail {

template <class T, class F>
BasicMat<T> sequential_sum(const std::vector<BasicMat<T>>& kraus, std::size_t first,
                           std::size_t last, std::size_t dim, F& term) {
  BasicMat<T> acc(dim, dim);
  for (std::size_t i = first; i < last; ++i) acc += term(kraus[i]);
  return acc;
}

}  // namespace detail

template <class T>
template <class F>
BasicMat<T> KrausOperator<T>::kraus_sum(std::size_t dim, F term) const {
  const std::size_t m = kraus_.size();
  unsigned threads = 1;
  if constexpr (std::is_same_v<T, double>) threads = kraus_threads();
  if (threads <= 1 || m < 2) {
    return detail::sequential_sum(kraus_, 0, m, dim, term).symmetrized();
  }
  const std::size_t chunks = std::min<std::size_t>(threads, m);
  const std::size_t per = (m + chunks - 1) / chunks;
  std::vector<Mat> partial(chunks, Mat(dim, dim));
  {
    std::vector<std::jthread> workers;
    for (std::size_t c = 0; c < chunks; ++c) {
      workers.emplace_back([&, c] {
        const std::size_t first = c * per;
        const std::size_t last = std::min(m, first + per);
        if (first < last) partial[c] = detail::sequential_sum(kraus_, first, last, dim, term);
      });
    }
  }
  for (std::size_t width = 1; width < chunks; width *= 2)
    for (std::size_t i = 0; i + width < chunks; i += 2 * width) partial[i] += partial[i + width];
  return partial[0].symmetrized();
}

template <class T>
T squared_frobenius_distance_to_identity(const BasicMat<T>& m) {
  T s(0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const T v = m(i, j) - (i == j ? T(1) : T(0));
      s += v * v;
    }
  return s;
}

// The two terms of ds(T): tr[(T((n2/n1)I) - I)²] and tr[(T*(I) - I)²].
struct DsTerms {
  double primal = 0;
  double dual = 0;
  double total() const { return primal + dual; }
};

template <class T>
DsTerms ds_terms(const KrausOperator<T>& op) {
  const T ratio = T(static_cast<double>(op.n2())) / T(static_cast<double>(op.n1()));
  const auto primal = squared_frobenius_distance_to_identity<T>(op.apply_identity() * ratio);
  const auto dual = squared_frobenius_distance_to_identity<T>(op.dual_apply_identity());
  return {static_cast<double>(primal), static_cast<double>(dual)};
}

template <class T>
double ds(const KrausOperator<T>& op) {
  return ds_terms(op).total();
}

// M^{-1/2} together with logdet(M^{-1/2}) = -½ logdet M.
template <class T>
struct InverseSqrt {
  BasicMat<T> factor;
  double log_det = 0;
  double log_condition = 0;
};

template <class T>
InverseSqrt<T> inverse_sqrt_with_logdet(const BasicMat<T>& m) {
  using std::log;
  using std::sqrt;
  const auto e = sym_eig(m);
  if (e.eigenvalues.empty() || e.largest() <= T(0) || e.smallest() <= default_floor(e)) {
    throw SingularMatrix("normalizing matrix is singular to working precision");
  }
  T ld(0);
  for (const auto& x : e.eigenvalues) ld += log(x);
  InverseSqrt<T> out;
  out.factor = spectral_apply(e, [](const T& x) { return T(1) / sqrt(x); });
  out.log_det = -0.5 * static_cast<double>(ld);
  out.log_condition = 0.5 * static_cast<double>(log(e.largest()) - log(e.smallest()));
  return out;
}

template <class T>
struct Normalized {
  KrausOperator<T> op;
  BasicMat<T> factor;
  double log_det_factor = 0;
  double log_condition = 0;
};

// Right normalization: A_i <- A_i T*(I)^{-1/2}, giving T_R*(I) = I.
template <class T>
Normalized<T> right_normalize(const KrausOperator<T>& op) {
  auto inv = inverse_sqrt_with_logdet(op.dual_apply_identity());
  return {op.scaled_right(inv.factor), std::move(inv.factor), inv.log_det, inv.log_condition};
}

// Left normalization: A_i <- √(n1/n2) T(I)^{-1/2} A_i, giving
// T_L((n2/n1) I) = I.
template <class T>
Normalized<T> left_normalize(const KrausOperator<T>& op) {
  using std::sqrt;
  auto inv = inverse_sqrt_with_logdet(op.apply_identity());
  const double ratio = static_cast<double>(op.n1()) / static_cast<double>(op.n2());
  const T scale = sqrt(T(ratio));
  BasicMat<T> factor = inv.factor * scale;
  const double log_det =
      inv.log_det + 0.5 * static_cast<double>(op.n2()) * std::log(ratio);
  return {op.scaled_left(factor), std::move(factor), log_det, inv.log_condition};
}

// Square embedding n1·n2 -> n1·n2 with Kraus {n1^{-1/2} E_ij ⊗ A_k}, so that
// T~(X) = I_{n1} ⊗ ((1/n1) Σ_i T(X_ii)).
template <class T>
KrausOperator<T> square_embed(const KrausOperator<T>& op) {
  using std::sqrt;
  const std::size_t n1 = op.n1();
  const std::size_t n2 = op.n2();
  const T c = T(1) / sqrt(T(static_cast<double>(n1)));
  std::vector<BasicMat<T>> out;
  out.reserve(n1 * n2 * op.size());
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) {
      BasicMat<T> e(n1, n2);
      e(i, j) = c;
      for (const auto& a : op.kraus()) out.push_back(kron(e, a));
    }
  return KrausOperator<T>(std::move(out));
}

struct ObjectiveValue {
  double value = 0;
  double log_value = 0;
  bool zero = false;  // T(X) singular: the objective is exactly 0
};

// Det((n2/n1) T(X)) / Det(X)^{n2/n1}, evaluated in the log domain.
template <class T>
ObjectiveValue capacity_objective(const KrausOperator<T>& op, const BasicMat<T>& x) {
  const double ratio = static_cast<double>(op.n2()) / static_cast<double>(op.n1());
  const double ld_x = static_cast<double>(logdet(x));
  const auto tx = op.apply(x) * T(ratio);
  const auto e = sym_eig(tx);
  if (e.smallest() <= default_floor(e) || e.largest() <= T(0)) {
    ObjectiveValue z;
    z.zero = true;
    z.log_value = -std::numeric_limits<double>::infinity();
    return z;
  }
  double ld_t = 0;
  for (const auto& v : e.eigenvalues) ld_t += std::log(static_cast<double>(v));
  ObjectiveValue out;
  out.log_value = ld_t - ratio * ld_x;
  out.value = std::exp(out.log_value);
  return out;
}

}  // namespace blscale
