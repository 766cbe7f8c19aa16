#include "blscale/bl.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "blscale/error.hpp"
#include "blscale/high_precision.hpp"

namespace blscale {

std::string to_string(BLMethod m) {
  return m == BLMethod::Operator ? "operator" : "datum_scaling";
}

std::string to_string(BLStatus s) {
  switch (s) {
    case BLStatus::Finite: return "finite";
    case BLStatus::Infinite: return "infinite";
    case BLStatus::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

CPOperator reduce_to_operator(const BLDatum& datum) {
  const auto v = validate(datum);
  if (!v.ok) {
    throw ScalingViolation("scaling condition fails: sum c_j n_j = " + v.weighted_dims.get_str() +
                           " but d n = " + v.target.get_str());
  }
  const std::size_t n = datum.n();
  const std::size_t cols = n * static_cast<std::size_t>(datum.exponents().denominator);
  std::vector<RationalMat> kraus;
  std::size_t offset = 0;
  for (std::size_t k = 0; k < datum.m(); ++k) {
    const auto& b = datum.maps()[k];
    for (std::int64_t copy = 0; copy < datum.exponents().numerators[k]; ++copy) {
      RationalMat a(n, cols);
      for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < n; ++c) a(c, offset + r) = b(r, c);
      kraus.push_back(std::move(a));
      offset += b.rows();
    }
  }
  return CPOperator::from_exact(std::move(kraus));
}

double default_bl_g_target(double eps) { return std::min(1e-8, 1e-4 * eps * eps); }

namespace {

void set_value(BLConstantResult& r, double log_value) {
  r.log_value = log_value;
  r.value = std::exp(log_value);
  r.reverse_value = std::exp(-log_value);
}

void set_infinite(BLConstantResult& r, std::string why) {
  r.status = BLStatus::Infinite;
  r.log_value = std::numeric_limits<double>::infinity();
  r.value = std::numeric_limits<double>::infinity();
  r.reverse_value = 0;
  r.diagnostic = std::move(why);
}

// Exact reasons for BL = ∞ that need no scaling: scaling condition, a
// non-surjective map, or a shared kernel.
bool structural_infinite(const BLDatum& datum, BLConstantResult& r) {
  const auto v = validate(datum);
  if (!v.ok) {
    set_infinite(r, "scaling condition fails: sum c_j n_j = " + v.weighted_dims.get_str() +
                        " but d n = " + v.target.get_str());
    return true;
  }
  for (std::size_t j = 0; j < datum.m(); ++j) {
    if (exact_rank(datum.maps()[j]) < datum.map_dim(j)) {
      set_infinite(r, "map " + std::to_string(j) + " is not surjective");
      return true;
    }
  }
  if (common_kernel(datum).cols() > 0) {
    set_infinite(r, "the maps share a kernel direction");
    return true;
  }
  return false;
}

template <class T>
KrausOperator<T> to_scalar(const CPOperator& op) {
  std::vector<BasicMat<T>> kraus;
  for (const auto& a : *op.exact()) {
    BasicMat<T> m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j)
        m(i, j) = T(a(i, j).get_num().get_str()) / T(a(i, j).get_den().get_str());
    kraus.push_back(std::move(m));
  }
  return KrausOperator<T>(std::move(kraus), op.exact());
}

template <class T>
void finish_from_capacity(const BasicCapacityResult<T>& cap, const BLDatum& datum,
                          BLConstantResult& r) {
  r.steps = cap.trace.steps;
  r.final_distance = cap.trace.final_ds();
  const double nd = static_cast<double>(datum.n()) *
                    static_cast<double>(datum.exponents().denominator);
  switch (cap.status) {
    case CapacityStatus::Zero:
      set_infinite(r, "reduced operator has zero capacity: " + cap.diagnostic);
      r.log_alpha = -std::numeric_limits<double>::infinity();
      return;
    case CapacityStatus::Positive:
      r.status = BLStatus::Finite;
      break;
    case CapacityStatus::NonConvergence:
      r.status = BLStatus::Inconclusive;
      r.diagnostic = cap.diagnostic + "; reported value is a lower bound on BL";
      break;
  }
  r.log_alpha = nd * cap.log_value;
  // (1/α)^{1/(2nd)} = cap^{-1/2}
  set_value(r, -*r.log_alpha / (2.0 * nd));
}

}  // namespace

BLConstantResult bl_constant(const BLDatum& datum, double eps, const BLConstantOptions& options) {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("eps must lie in (0, 1)");
  BLConstantResult r;
  r.method = options.method;
  if (structural_infinite(datum, r)) return r;

  if (options.method == BLMethod::DatumScaling) {
    BLScalingOptions so;
    so.g_target = options.g_target.value_or(default_bl_g_target(eps));
    so.max_steps = options.max_steps.value_or(static_cast<std::size_t>(
        std::min<std::uint64_t>(bl_scaling_budget(datum, so.g_target), options.step_cap)));
    auto trace = run_bl_scaling(datum.real(), so);
    r.steps = trace.steps;
    r.final_distance = trace.final_g();
    set_value(r, trace.log_bl_estimate());
    if (trace.status == BLScalingStatus::Converged) {
      r.status = BLStatus::Finite;
    } else {
      r.status = BLStatus::Inconclusive;
      r.diagnostic = "datum scaling did not reach geometric position: " + trace.diagnostic;
    }
    r.datum_trace = std::move(trace);
    return r;
  }

  const CPOperator op = reduce_to_operator(datum);
  CapacityOptions co;
  co.max_steps = options.max_steps;
  co.step_cap = options.step_cap;
  co.ds_target = options.ds_target;
  if (options.precision_bits > 0) {
    PrecisionGuard guard(options.precision_bits);
    const auto hp = to_scalar<HighPrec>(op);
    // Tighter ds target to make use of the extra precision.
    if (!co.ds_target) co.ds_target = default_capacity_ds_target(eps, op.n1(), op.n2()) * 1e-4;
    const auto cap = capacity_estimate(hp, eps, co);
    finish_from_capacity(cap, datum, r);
    return r;
  }
  const auto cap = capacity_estimate(op, eps, co);
  finish_from_capacity(cap, datum, r);
  r.operator_trace = cap.trace;
  return r;
}

UpperBound bl_upper_bound(const BLDatum& datum) {
  const double n = static_cast<double>(datum.n());
  const double m = static_cast<double>(datum.m());
  const double d = static_cast<double>(datum.exponents().denominator);
  UpperBound u;
  if (datum.is_integral()) {
    const double a = 4.0 * n * std::log(n * n * d);
    const double b = 12.0 * n * m * std::log(m * n);
    u.log_value = std::min(a, b);
    u.source = a <= b ? "integer, d-dependent" : "integer, d-free";
  } else {
    // Entries must become integers after scaling by 2^b; widen b when the
    // denominators are not powers of two.
    const mpz_class l = datum.entry_denominator_lcm();
    std::size_t lb = mpz_sizeinbase(l.get_mpz_t(), 2);
    if (mpz_popcount(l.get_mpz_t()) == 1) lb -= 1;  // exact power of two
    const double b = static_cast<double>(std::max(datum.max_bit_size(), lb));
    u.log_value = 4.0 * n * std::log(n * n * d) + n * b;
    u.source = "rational, bit size " + std::to_string(static_cast<long>(b));
  }
  u.value = std::exp(u.log_value);
  return u;
}

NormalizedCheck normalized_lower_bound_check(const BLDatum& datum, double tol, double eps) {
  const double t = weighted_trace(datum.real());
  const double n = static_cast<double>(datum.n());
  if (std::fabs(t - n) > tol * std::max(1.0, n)) {
    std::ostringstream msg;
    msg << "sum p_j tr[B_j^T B_j] = " << t << " differs from n = " << datum.n();
    throw NormalizationViolated(msg.str());
  }
  NormalizedCheck c;
  c.constant = bl_constant(datum, eps);
  c.gap = c.constant.value - 1.0;
  c.geometric = is_geometric(datum.real(), std::max(tol, 1e-9)).geometric;
  c.holds = c.constant.status != BLStatus::Inconclusive && c.constant.value >= 1.0 - 3.0 * tol;
  return c;
}

}  // namespace blscale
