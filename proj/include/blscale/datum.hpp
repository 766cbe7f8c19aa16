#pragma once

// Brascamp-Lieb data (B, p): maps B_j : R^n -> R^{n_j} with exponents
// p_j = c_j / d. The exact rational maps are authoritative; the float mirror
// drives the iterative routines.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "blscale/matrix.hpp"
#include "blscale/rational.hpp"

namespace blscale {

struct Exponents {
  std::vector<std::int64_t> numerators;  // c_j >= 1
  std::int64_t denominator = 1;          // d >= 1

  Exponents() = default;
  Exponents(std::vector<std::int64_t> c, std::int64_t d);

  // Common denominator is the lcm of the reduced denominators.
  static Exponents from_rationals(const std::vector<Rational>& p);

  std::size_t size() const { return numerators.size(); }
  Rational p(std::size_t j) const;
  double p_real(std::size_t j) const;
  std::vector<double> real() const;
};

// Float-only datum; also the form of intermediate scaling states.
struct RealDatum {
  std::size_t n = 0;
  std::vector<RealMat> maps;
  Exponents exponents;

  RealDatum() = default;
  RealDatum(std::size_t n, std::vector<RealMat> maps, Exponents exponents);

  std::size_t m() const { return maps.size(); }
  std::size_t map_dim(std::size_t j) const { return maps[j].rows(); }
};

class BLDatum {
 public:
  BLDatum(std::size_t n, std::vector<RationalMat> maps, Exponents exponents);
  // Exact: every double is a dyadic rational.
  static BLDatum from_real(const RealDatum& d);

  std::size_t n() const { return n_; }
  std::size_t m() const { return maps_.size(); }
  std::size_t map_dim(std::size_t j) const { return maps_[j].rows(); }
  const std::vector<RationalMat>& maps() const { return maps_; }
  const std::vector<RealMat>& real_maps() const { return real_.maps; }
  const Exponents& exponents() const { return real_.exponents; }
  const RealDatum& real() const { return real_; }

  bool is_integral() const;
  // Largest bit size of any map entry.
  std::size_t max_bit_size() const;
  // lcm of the denominators of all map entries.
  mpz_class entry_denominator_lcm() const;

 private:
  std::size_t n_;
  std::vector<RationalMat> maps_;
  RealDatum real_;
};

struct Validation {
  bool ok = false;
  mpz_class weighted_dims;  // Σ c_j n_j
  mpz_class target;         // d·n
};

Validation validate(const BLDatum& datum);

struct GeometricCheck {
  bool geometric = false;
  double projection_residual = 0;  // max_j ‖B_j B_jᵀ − I‖_F
  double isotropy_residual = 0;    // ‖Σ p_j B_jᵀ B_j − I‖_F
};

GeometricCheck is_geometric(const RealDatum& datum, double tol);

// tr[(Σ p_j B_jᵀB_j − I)²] + Σ_j tr[(B_jB_jᵀ − I)²]
double g_distance(const RealDatum& datum);

RealMat isotropy_matrix(const RealDatum& datum);  // Σ p_j B_jᵀ B_j

struct GaussianCertificate {
  std::vector<RealMat> xs;
  double ratio = 0;
  double log_ratio = 0;
};

// [Π Det(X_j)^{p_j} / Det(Σ p_j B_jᵀ X_j B_j)]^{1/2}, a lower bound on BL.
GaussianCertificate lieb_ratio(const RealDatum& datum, std::vector<RealMat> xs);

struct IsotropyStep {
  RealDatum datum;
  RealMat factor;  // M^{-1/2}, applied on the right
  double log_det_factor = 0;
};

struct ProjectionStep {
  RealDatum datum;
  std::vector<RealMat> factors;  // (B_j B_jᵀ)^{-1/2}, applied on the left
  std::vector<double> log_det_factors;
};

// B_j <- B_j M^{-1/2} with M = Σ p_j B_jᵀ B_j. Throws SingularMatrix.
IsotropyStep isotropy_normalize(const RealDatum& datum);
// B_j <- (B_j B_jᵀ)^{-1/2} B_j. Throws SingularMatrix carrying the map index.
ProjectionStep projection_normalize(const RealDatum& datum);

// Exact kernel of Σ c_j B_jᵀ B_j (equivalently the common kernel of all B_j).
RationalMat common_kernel(const BLDatum& datum);

struct BasisChange {
  RealDatum datum;
  double ratio = 0;
  double log_ratio = 0;
};

// Maps C_j^{-1} B_j C; ratio = Π |det C_j|^{p_j} / |det C|, so that
// BL(datum') = ratio · BL(datum).
BasisChange basis_change(const RealDatum& datum, const RealMat& c, const std::vector<RealMat>& cs);

// Σ p_j tr[B_jᵀ B_j], the trace normalization quantity (equal to n when normalized).
double weighted_trace(const RealDatum& datum);

}  // namespace blscale
