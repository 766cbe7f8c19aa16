#pragma once

// Alternating left/right normalization of completely positive operators
// (Algorithm G), capacity recovery from the accumulated scaling, and the
// rank non-decreasing test built on it.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blscale/operator.hpp"

namespace blscale {

template <class T>
struct BasicOperatorScaling {
  BasicMat<T> left;   // B, n2 x n2
  BasicMat<T> right;  // C, n1 x n1
  double log_det_left = 0;
  double log_det_right = 0;
};

using OperatorScaling = BasicOperatorScaling<double>;

enum class ScalingStatus {
  Converged,          // ds <= ds_target
  EmbeddedThreshold,  // embedded ds fell below its target
  BudgetExhausted,
  Stagnated,          // NonConvergence: ds plateaued
  Singular,           // a normalizing matrix was singular
  BelowCapacityFloor, // capacity upper bound dropped below the given floor
  IllConditioned,     // accumulated factors exceeded the conditioning limit
};

std::string to_string(ScalingStatus s);

struct ScalingOptions {
  std::size_t max_steps = 1000;
  double ds_target = 1e-9;
  // Stop once n1·P + n2·D (ds of the square embedding) drops below this.
  std::optional<double> embedded_ds_target;
  // Stop once the capacity upper bound drops below exp(log_capacity_floor).
  std::optional<double> log_capacity_floor;
  std::size_t stagnation_window = 50;
  double stagnation_rel = 1e-14;
  double max_log_condition = std::numeric_limits<double>::infinity();
};

template <class T>
struct BasicScalingTrace {
  explicit BasicScalingTrace(KrausOperator<T> start) : final_operator(std::move(start)) {}

  std::size_t steps = 0;
  std::vector<double> ds_history;           // steps + 1 entries
  std::vector<double> embedded_ds_history;  // n1·P + n2·D, same length
  BasicOperatorScaling<T> accumulated;
  KrausOperator<T> final_operator;
  // (step, log of the capacity upper bound) recorded after left steps.
  std::vector<std::pair<std::size_t, double>> capacity_checkpoints;
  ScalingStatus status = ScalingStatus::BudgetExhausted;
  std::optional<std::size_t> singular_step;
  double log_condition = 0;  // Σ log cond of the step factors
  std::string diagnostic;

  double final_ds() const { return ds_history.back(); }
};

using ScalingTrace = BasicScalingTrace<double>;

// Non-throwing driver; a singular normalization ends the run with status
// Singular and the failing step recorded.
template <class T>
BasicScalingTrace<T> run_algorithm_g(const KrausOperator<T>& op, const ScalingOptions& options);

// Step i (1-based) right-normalizes when i is odd and left-normalizes when
// even. Throws SingularMatrix carrying the step index.
template <class T>
BasicScalingTrace<T> algorithm_g(const KrausOperator<T>& op, std::size_t max_steps,
                                 double ds_target);

// log Det((n2/n1) T_t(I)) - 2 log det B - (2 n2/n1) log det C: the capacity
// objective at X = C Cᵀ, hence an upper bound on log cap(T).
template <class T>
double log_capacity_upper_bound(const BasicScalingTrace<T>& trace, std::size_t n1, std::size_t n2);

enum class CapacityStatus { Positive, Zero, NonConvergence };
std::string to_string(CapacityStatus s);

struct CapacityOptions {
  std::optional<std::size_t> max_steps;
  std::optional<double> ds_target;
  std::size_t step_cap = 20000;
};

template <class T>
struct BasicCapacityResult {
  explicit BasicCapacityResult(BasicScalingTrace<T> t) : trace(std::move(t)) {}

  double value = 0;
  double log_value = -std::numeric_limits<double>::infinity();
  CapacityStatus status = CapacityStatus::NonConvergence;
  std::string diagnostic;
  BasicScalingTrace<T> trace;
};

using CapacityResult = BasicCapacityResult<double>;

// ds target used by capacity_estimate when none is given.
double default_capacity_ds_target(double eps, std::size_t n1, std::size_t n2);

template <class T>
BasicCapacityResult<T> capacity_estimate(const KrausOperator<T>& op, double eps,
                                         const CapacityOptions& options = {});

enum class Verdict { Yes, No, Inconclusive };
std::string to_string(Verdict v);

struct RankReport {
  Verdict verdict = Verdict::Inconclusive;
  std::size_t steps = 0;
  double final_embedded_ds = 0;
  std::string reason;
};

// 1 / (N + 1) with N = n1·n2, the square-embedded dimension.
double feasibility_threshold(std::size_t n1, std::size_t n2);

// Lower bound on cap(T) > 0 valid for integer Kraus data: the floor of the
// square embedding n1^{-n2} exp(-2 n2 log(n1 n2)), in the log domain.
double log_integer_capacity_floor(std::size_t n1, std::size_t n2);

// Conditioning limit beyond which float scaling stops being trusted.
inline constexpr double kMaxLogCondition = 27.631021115928547;  // log(1e12)

template <class T>
RankReport rank_report(const KrausOperator<T>& op, std::size_t budget);

template <class T>
Verdict is_rank_nondecreasing(const KrausOperator<T>& op, std::size_t budget) {
  return rank_report(op, budget).verdict;
}

double capacity_lower_bound_integer(std::size_t n, std::size_t d);

std::uint64_t iteration_budget(std::size_t n, double max_entry, double eps);

}  // namespace blscale
