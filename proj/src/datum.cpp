#include "blscale/datum.hpp"

#include <cmath>
#include <numeric>

#include "blscale/eigen.hpp"
#include "blscale/error.hpp"

namespace blscale {

Exponents::Exponents(std::vector<std::int64_t> c, std::int64_t d)
    : numerators(std::move(c)), denominator(d) {
  if (denominator < 1) throw std::invalid_argument("exponent denominator must be >= 1");
  for (auto v : numerators)
    if (v < 1) throw std::invalid_argument("exponent numerators must be >= 1");
}

Exponents Exponents::from_rationals(const std::vector<Rational>& p) {
  mpz_class l = 1;
  for (const auto& q : p) {
    if (q <= 0) throw std::invalid_argument("exponents must be positive");
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
  }
  if (!l.fits_slong_p()) throw std::invalid_argument("exponent denominator too large");
  std::vector<std::int64_t> c;
  for (const auto& q : p) {
    const mpz_class v = q.get_num() * (l / q.get_den());
    if (!v.fits_slong_p()) throw std::invalid_argument("exponent numerator too large");
    c.push_back(v.get_si());
  }
  return Exponents(std::move(c), l.get_si());
}

Rational Exponents::p(std::size_t j) const {
  Rational q(numerators.at(j), denominator);
  q.canonicalize();
  return q;
}

double Exponents::p_real(std::size_t j) const {
  return static_cast<double>(numerators.at(j)) / static_cast<double>(denominator);
}

std::vector<double> Exponents::real() const {
  std::vector<double> out;
  for (std::size_t j = 0; j < size(); ++j) out.push_back(p_real(j));
  return out;
}

RealDatum::RealDatum(std::size_t n_, std::vector<RealMat> maps_, Exponents exponents_)
    : n(n_), maps(std::move(maps_)), exponents(std::move(exponents_)) {
  if (n == 0) throw DimensionMismatch("ambient dimension must be positive");
  if (maps.empty()) throw DimensionMismatch("a datum needs at least one map");
  if (maps.size() != exponents.size()) {
    throw DimensionMismatch("got " + std::to_string(maps.size()) + " maps but " +
                            std::to_string(exponents.size()) + " exponents");
  }
  for (std::size_t j = 0; j < maps.size(); ++j) {
    if (maps[j].cols() != n || maps[j].rows() == 0) {
      throw DimensionMismatch("map " + std::to_string(j) + " has shape " + maps[j].shape() +
                              ", expected k x " + std::to_string(n) + " with k >= 1");
    }
    maps[j].check_finite();
  }
}

BLDatum::BLDatum(std::size_t n, std::vector<RationalMat> maps, Exponents exponents)
    : n_(n), maps_(std::move(maps)) {
  std::vector<RealMat> real;
  real.reserve(maps_.size());
  for (const auto& b : maps_) real.push_back(b.to_real());
  real_ = RealDatum(n, std::move(real), std::move(exponents));
}

BLDatum BLDatum::from_real(const RealDatum& d) {
  std::vector<RationalMat> maps;
  for (const auto& b : d.maps) maps.push_back(RationalMat::from_real(b));
  return BLDatum(d.n, std::move(maps), d.exponents);
}

bool BLDatum::is_integral() const {
  for (const auto& b : maps_)
    if (!b.is_integral()) return false;
  return true;
}

std::size_t BLDatum::max_bit_size() const {
  std::size_t b = 1;
  for (const auto& m : maps_)
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) b = std::max(b, bit_size(m(i, j)));
  return b;
}

mpz_class BLDatum::entry_denominator_lcm() const {
  mpz_class l = 1;
  for (const auto& m : maps_)
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).get_den_mpz_t());
  return l;
}

Validation validate(const BLDatum& datum) {
  Validation v;
  v.weighted_dims = 0;
  const auto& e = datum.exponents();
  for (std::size_t j = 0; j < datum.m(); ++j) {
    v.weighted_dims += mpz_class(static_cast<long>(e.numerators[j])) *
                       mpz_class(static_cast<unsigned long>(datum.map_dim(j)));
  }
  v.target = mpz_class(static_cast<long>(e.denominator)) *
             mpz_class(static_cast<unsigned long>(datum.n()));
  v.ok = v.weighted_dims == v.target;
  return v;
}

RealMat isotropy_matrix(const RealDatum& datum) {
  RealMat m(datum.n, datum.n);
  for (std::size_t j = 0; j < datum.m(); ++j) {
    const auto& b = datum.maps[j];
    m += (b.transpose() * b) * datum.exponents.p_real(j);
  }
  return m.symmetrized();
}

GeometricCheck is_geometric(const RealDatum& datum, double tol) {
  GeometricCheck g;
  for (const auto& b : datum.maps) {
    const RealMat r = b * b.transpose() - RealMat::identity(b.rows());
    g.projection_residual = std::max(g.projection_residual, r.frobenius_norm());
  }
  g.isotropy_residual = (isotropy_matrix(datum) - RealMat::identity(datum.n)).frobenius_norm();
  g.geometric = g.projection_residual <= tol && g.isotropy_residual <= tol;
  return g;
}

double g_distance(const RealDatum& datum) {
  auto sq = [](const RealMat& a) {
    double s = 0;
    for (double x : a.entries()) s += x * x;
    return s;
  };
  double g = sq(isotropy_matrix(datum) - RealMat::identity(datum.n));
  for (const auto& b : datum.maps) g += sq(b * b.transpose() - RealMat::identity(b.rows()));
  return g;
}

GaussianCertificate lieb_ratio(const RealDatum& datum, std::vector<RealMat> xs) {
  if (xs.size() != datum.m()) throw DimensionMismatch("need one X_j per map");
  RealMat sum(datum.n, datum.n);
  double num = 0;
  for (std::size_t j = 0; j < datum.m(); ++j) {
    const auto& b = datum.maps[j];
    if (xs[j].rows() != b.rows() || xs[j].cols() != b.rows()) {
      throw DimensionMismatch("X_" + std::to_string(j) + " must be " + std::to_string(b.rows()) +
                              "x" + std::to_string(b.rows()));
    }
    const double p = datum.exponents.p_real(j);
    num += p * logdet(xs[j]);
    sum += (b.transpose() * xs[j] * b) * p;
  }
  const auto e = sym_eig(sum.symmetrized());
  if (e.smallest() <= default_floor(e) || e.largest() <= 0) {
    throw SingularMatrix("Σ p_j B_jᵀ X_j B_j is singular; the Lieb ratio is unbounded");
  }
  double den = 0;
  for (double v : e.eigenvalues) den += std::log(v);
  GaussianCertificate c;
  c.xs = std::move(xs);
  c.log_ratio = 0.5 * (num - den);
  c.ratio = std::exp(c.log_ratio);
  return c;
}

IsotropyStep isotropy_normalize(const RealDatum& datum) {
  const auto e = sym_eig(isotropy_matrix(datum));
  if (e.smallest() <= default_floor(e) || e.largest() <= 0) {
    throw SingularMatrix("isotropy matrix is singular: the maps share a kernel direction");
  }
  IsotropyStep s;
  s.factor = spectral_apply(e, [](double x) { return 1.0 / std::sqrt(x); });
  for (double v : e.eigenvalues) s.log_det_factor -= 0.5 * std::log(v);
  std::vector<RealMat> maps;
  for (const auto& b : datum.maps) maps.push_back(b * s.factor);
  s.datum = RealDatum(datum.n, std::move(maps), datum.exponents);
  return s;
}

ProjectionStep projection_normalize(const RealDatum& datum) {
  ProjectionStep s;
  std::vector<RealMat> maps;
  for (std::size_t j = 0; j < datum.m(); ++j) {
    const auto& b = datum.maps[j];
    const auto e = sym_eig((b * b.transpose()).symmetrized());
    if (e.smallest() <= default_floor(e) || e.largest() <= 0) {
      throw SingularMatrix("map " + std::to_string(j) + " is not surjective", j);
    }
    RealMat f = spectral_apply(e, [](double x) { return 1.0 / std::sqrt(x); });
    double ld = 0;
    for (double v : e.eigenvalues) ld -= 0.5 * std::log(v);
    maps.push_back(f * b);
    s.factors.push_back(std::move(f));
    s.log_det_factors.push_back(ld);
  }
  s.datum = RealDatum(datum.n, std::move(maps), datum.exponents);
  return s;
}

RationalMat common_kernel(const BLDatum& datum) {
  RationalMat stacked(0, datum.n());
  for (const auto& b : datum.maps()) {
    RationalMat next(stacked.rows() + b.rows(), datum.n());
    for (std::size_t i = 0; i < stacked.rows(); ++i)
      for (std::size_t k = 0; k < datum.n(); ++k) next(i, k) = stacked(i, k);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t k = 0; k < datum.n(); ++k) next(stacked.rows() + i, k) = b(i, k);
    stacked = std::move(next);
  }
  return canonical_basis(exact_kernel_basis(stacked));
}

BasisChange basis_change(const RealDatum& datum, const RealMat& c, const std::vector<RealMat>& cs) {
  if (cs.size() != datum.m()) throw DimensionMismatch("need one C_j per map");
  if (c.rows() != datum.n || c.cols() != datum.n) throw DimensionMismatch("C must be n x n");
  const auto dc = log_abs_det(c);
  if (dc.sign == 0) throw SingularMatrix("C is singular");
  double log_ratio = -dc.log_abs;
  std::vector<RealMat> maps;
  for (std::size_t j = 0; j < datum.m(); ++j) {
    const auto dj = log_abs_det(cs[j]);
    if (dj.sign == 0) throw SingularMatrix("C_" + std::to_string(j) + " is singular", j);
    log_ratio += datum.exponents.p_real(j) * dj.log_abs;
    maps.push_back(inverse(cs[j]) * datum.maps[j] * c);
  }
  BasisChange out;
  out.datum = RealDatum(datum.n, std::move(maps), datum.exponents);
  out.log_ratio = log_ratio;
  out.ratio = std::exp(log_ratio);
  return out;
}

double weighted_trace(const RealDatum& datum) {
  double s = 0;
  for (std::size_t j = 0; j < datum.m(); ++j)
    s += datum.exponents.p_real(j) * (datum.maps[j].transpose() * datum.maps[j]).trace();
  return s;
}

}  // namespace blscale
