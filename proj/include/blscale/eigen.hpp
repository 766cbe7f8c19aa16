#pragma once

// Symmetric eigendecomposition (cyclic Jacobi) and the PSD functional
// calculus built on it, plus LU-based inverse/determinant for general
// square matrices.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "blscale/error.hpp"
#include "blscale/matrix.hpp"

namespace blscale {

template <class T>
struct BasicSymEig {
  std::vector<T> eigenvalues;  // ascending
  BasicMat<T> eigenvectors;    // column k pairs with eigenvalues[k]

  T largest() const { return eigenvalues.empty() ? T(0) : eigenvalues.back(); }
  T smallest() const { return eigenvalues.empty() ? T(0) : eigenvalues.front(); }
};

using SymEig = BasicSymEig<double>;

namespace detail {

template <class T>
T machine_epsilon() {
  return std::numeric_limits<T>::epsilon();
}

template <class T>
void require_symmetric(const BasicMat<T>& m, double rel_tol) {
  using std::abs;
  if (!m.is_square()) throw DimensionMismatch("expected a square matrix, got " + m.shape());
  m.check_finite();
  const T scale = m.frobenius_norm();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      if (abs(m(i, j) - m(j, i)) > T(rel_tol) * scale) {
        throw NonSymmetric("matrix asymmetry exceeds tolerance at (" + std::to_string(i) + "," +
                           std::to_string(j) + ")");
      }
    }
}

}  // namespace detail

// Cyclic Jacobi. Deterministic sweep order (p < q, row-major), so repeated
// calls on the same input give bit-identical output.
template <class T>
BasicSymEig<T> sym_eig(const BasicMat<T>& input) {
  using std::abs;
  using std::sqrt;
  detail::require_symmetric(input, 1e-10);
  const std::size_t n = input.rows();
  BasicMat<T> a = input.symmetrized();
  BasicMat<T> v = BasicMat<T>::identity(n);
  const T eps = detail::machine_epsilon<T>();
  const T total = a.frobenius_norm();

  for (int sweep = 0; sweep < 100; ++sweep) {
    T off(0);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (sqrt(off) <= eps * total || off == T(0)) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const T apq = a(p, q);
        if (apq == T(0)) continue;
        const T app = a(p, p);
        const T aqq = a(q, q);
        if (abs(apq) <= eps * eps * (abs(app) + abs(aqq)) * T(0.5)) {
          a(p, q) = T(0);
          a(q, p) = T(0);
          continue;
        }
        // Golub & Van Loan sym.schur2
        const T tau = (aqq - app) / (T(2) * apq);
        const T t = (tau >= T(0) ? T(1) : T(-1)) / (abs(tau) + sqrt(T(1) + tau * tau));
        const T c = T(1) / sqrt(T(1) + t * t);
        const T s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const T akp = a(k, p);
          const T akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const T apk = a(p, k);
          const T aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = T(0);
        a(q, p) = T(0);
        for (std::size_t k = 0; k < n; ++k) {
          const T vkp = v(k, p);
          const T vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  BasicSymEig<T> out;
  out.eigenvalues.reserve(n);
  out.eigenvectors = BasicMat<T>(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues.push_back(a(order[k], order[k]));
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

// Q f(D) Qᵀ
template <class T, class F>
BasicMat<T> spectral_apply(const BasicSymEig<T>& e, F f) {
  const std::size_t n = e.eigenvalues.size();
  BasicMat<T> out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const T fk = f(e.eigenvalues[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const T qik = e.eigenvectors(i, k) * fk;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += qik * e.eigenvectors(j, k);
    }
  }
  return out.symmetrized();
}

template <class T>
T default_floor(const BasicSymEig<T>& e) {
  using std::abs;
  return T(1e-12) * abs(e.largest());
}

// M^{-1/2}. Throws SingularMatrix when the smallest eigenvalue is at or below
// `floor` (default: 1e-12 times the largest eigenvalue).
template <class T>
BasicMat<T> psd_sqrt_inv(const BasicMat<T>& m, std::optional<T> floor = std::nullopt) {
  using std::sqrt;
  const auto e = sym_eig(m);
  const T f = floor ? *floor : default_floor(e);
  if (e.eigenvalues.empty()) return m;
  if (e.smallest() <= f || e.largest() <= T(0)) {
    throw SingularMatrix("matrix is singular to working precision (smallest eigenvalue " +
                         std::to_string(static_cast<double>(e.smallest())) + ")");
  }
  return spectral_apply(e, [](const T& x) { return T(1) / sqrt(x); });
}

// M^{1/2} for PSD M; tiny negative eigenvalues from rounding are clamped.
template <class T>
BasicMat<T> psd_sqrt(const BasicMat<T>& m) {
  using std::sqrt;
  const auto e = sym_eig(m);
  return spectral_apply(e, [](const T& x) { return x > T(0) ? sqrt(x) : T(0); });
}

template <class T>
T logdet(const BasicMat<T>& m) {
  using std::log;
  const auto e = sym_eig(m);
  T s(0);
  for (const auto& x : e.eigenvalues) {
    if (x <= T(0)) throw SingularMatrix("logdet of a matrix that is not positive definite");
    s += log(x);
  }
  return s;
}

struct LogAbsDet {
  double log_abs = 0;
  int sign = 0;  // 0 when singular
};

// LU with partial pivoting; returns log|det| and the sign.
template <class T>
LogAbsDet log_abs_det(const BasicMat<T>& input) {
  using std::abs;
  using std::log;
  if (!input.is_square()) throw DimensionMismatch("determinant of " + input.shape());
  BasicMat<T> a = input;
  const std::size_t n = a.rows();
  int sign = 1;
  T acc(0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (abs(a(i, k)) > abs(a(piv, k))) piv = i;
    if (a(piv, k) == T(0)) return {0.0, 0};
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      sign = -sign;
    }
    if (a(k, k) < T(0)) sign = -sign;
    acc += log(abs(a(k, k)));
    for (std::size_t i = k + 1; i < n; ++i) {
      const T f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return {static_cast<double>(acc), sign};
}

// Gauss-Jordan inverse with partial pivoting.
template <class T>
BasicMat<T> inverse(const BasicMat<T>& input) {
  using std::abs;
  if (!input.is_square()) throw DimensionMismatch("inverse of " + input.shape());
  const std::size_t n = input.rows();
  BasicMat<T> a = input;
  BasicMat<T> inv = BasicMat<T>::identity(n);
  const T scale = input.max_abs();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (abs(a(i, k)) > abs(a(piv, k))) piv = i;
    if (abs(a(piv, k)) <= T(1e-14) * scale || a(piv, k) == T(0)) {
      throw SingularMatrix("matrix is not invertible");
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(k, j), a(piv, j));
        std::swap(inv(k, j), inv(piv, j));
      }
    }
    const T d = a(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      a(k, j) /= d;
      inv(k, j) /= d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const T f = a(i, k);
      if (f == T(0)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

}  // namespace blscale
