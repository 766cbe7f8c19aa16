#pragma once

// Brascamp-Lieb constants: the reduction of a datum to a completely positive
// operator, the constant itself (via operator capacity or via Algorithm 1),
// closed-form upper bounds, and the trace-normalized lower bound check.

#include <cstddef>
#include <optional>
#include <string>

#include "blscale/bl_scaling.hpp"
#include "blscale/datum.hpp"
#include "blscale/operator_scaling.hpp"

namespace blscale {

// Kraus matrices A_jᵀ (n x nd), one per copy of each B_k, so that
// T(X) = Σ A_jᵀ X A_j maps nd x nd to n x n. Exact entries are kept.
CPOperator reduce_to_operator(const BLDatum& datum);

enum class BLMethod { Operator, DatumScaling };
enum class BLStatus { Finite, Infinite, Inconclusive };
std::string to_string(BLMethod m);
std::string to_string(BLStatus s);

struct BLConstantOptions {
  BLMethod method = BLMethod::Operator;
  unsigned precision_bits = 0;  // > 0: run the operator route in software floats
  std::optional<std::size_t> max_steps;
  std::size_t step_cap = 20000;
  std::optional<double> ds_target;  // operator route
  std::optional<double> g_target;   // datum-scaling route
};

struct BLConstantResult {
  BLStatus status = BLStatus::Inconclusive;
  double value = 0;          // +inf when Infinite
  double log_value = 0;
  double reverse_value = 0;  // 1 / value
  BLMethod method = BLMethod::Operator;
  std::size_t steps = 0;
  double final_distance = 0;  // ds for the operator route, g for datum scaling
  // log α with α the capacity of the square embedding of the reduced operator.
  std::optional<double> log_alpha;
  std::string diagnostic;
  std::optional<ScalingTrace> operator_trace;
  std::optional<BLScalingTrace> datum_trace;
};

// Default g target for the datum-scaling route.
double default_bl_g_target(double eps);

BLConstantResult bl_constant(const BLDatum& datum, double eps, const BLConstantOptions& options = {});

struct UpperBound {
  double log_value = 0;
  double value = 0;  // may overflow to +inf; log_value stays finite
  std::string source;
};

UpperBound bl_upper_bound(const BLDatum& datum);

struct NormalizedCheck {
  BLConstantResult constant;
  double gap = 0;  // value - 1
  bool geometric = false;
  bool holds = false;  // value >= 1 - 3 tol
};

// Requires Σ p_j tr[B_jᵀ B_j] = n within tol (else NormalizationViolated).
NormalizedCheck normalized_lower_bound_check(const BLDatum& datum, double tol, double eps = 0.01);

}  // namespace blscale
