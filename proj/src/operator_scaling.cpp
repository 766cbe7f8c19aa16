#include "blscale/operator_scaling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "blscale/high_precision.hpp"

namespace blscale {

namespace {
std::atomic<unsigned> g_kraus_threads{1};
}  // namespace

void set_kraus_threads(unsigned threads) { g_kraus_threads = threads == 0 ? 1 : threads; }
unsigned kraus_threads() { return g_kraus_threads; }

std::string to_string(ScalingStatus s) {
  switch (s) {
    case ScalingStatus::Converged: return "converged";
    case ScalingStatus::EmbeddedThreshold: return "embedded_threshold";
    case ScalingStatus::BudgetExhausted: return "budget_exhausted";
    case ScalingStatus::Stagnated: return "stagnated";
    case ScalingStatus::Singular: return "singular";
    case ScalingStatus::BelowCapacityFloor: return "below_capacity_floor";
    case ScalingStatus::IllConditioned: return "ill_conditioned";
  }
  return "unknown";
}

std::string to_string(CapacityStatus s) {
  switch (s) {
    case CapacityStatus::Positive: return "positive";
    case CapacityStatus::Zero: return "zero";
    case CapacityStatus::NonConvergence: return "non_convergence";
  }
  return "unknown";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

template <class T>
BasicScalingTrace<T> run_algorithm_g(const KrausOperator<T>& op, const ScalingOptions& options) {
  const std::size_t n1 = op.n1();
  const std::size_t n2 = op.n2();
  const double ratio = static_cast<double>(n2) / static_cast<double>(n1);

  BasicScalingTrace<T> trace(op);
  trace.accumulated.left = BasicMat<T>::identity(n2);
  trace.accumulated.right = BasicMat<T>::identity(n1);

  auto record = [&] {
    const DsTerms t = ds_terms(trace.final_operator);
    trace.ds_history.push_back(t.total());
    trace.embedded_ds_history.push_back(static_cast<double>(n1) * t.primal +
                                        static_cast<double>(n2) * t.dual);
  };
  record();
  if (trace.ds_history.back() <= options.ds_target) {
    trace.status = ScalingStatus::Converged;
    return trace;
  }

  trace.status = ScalingStatus::BudgetExhausted;
  for (std::size_t step = 1; step <= options.max_steps; ++step) {
    try {
      if (step % 2 == 1) {
        auto r = right_normalize(trace.final_operator);
        trace.accumulated.right = trace.accumulated.right * r.factor;
        trace.accumulated.log_det_right += r.log_det_factor;
        trace.log_condition += r.log_condition;
        trace.final_operator = std::move(r.op);
      } else {
        auto l = left_normalize(trace.final_operator);
        trace.accumulated.left = l.factor * trace.accumulated.left;
        trace.accumulated.log_det_left += l.log_det_factor;
        trace.log_condition += l.log_condition;
        trace.final_operator = std::move(l.op);
      }
    } catch (const SingularMatrix& e) {
      trace.status = ScalingStatus::Singular;
      trace.singular_step = step;
      trace.diagnostic = std::string(step % 2 == 1 ? "right" : "left") +
                         " normalization singular at step " + std::to_string(step) + ": " +
                         e.what();
      return trace;
    }
    trace.steps = step;
    record();

    if (step % 2 == 0) {
      // After a left step (n2/n1) T_t(I) = I, so the bound is the
      // determinant correction alone.
      const double log_ub = -2.0 * trace.accumulated.log_det_left -
                            2.0 * ratio * trace.accumulated.log_det_right;
      trace.capacity_checkpoints.emplace_back(step, log_ub);
      if (options.log_capacity_floor && log_ub < *options.log_capacity_floor) {
        trace.status = ScalingStatus::BelowCapacityFloor;
        trace.diagnostic = "capacity upper bound below the integer floor at step " +
                           std::to_string(step);
        return trace;
      }
    }
    if (trace.ds_history.back() <= options.ds_target) {
      trace.status = ScalingStatus::Converged;
      return trace;
    }
    if (options.embedded_ds_target &&
        trace.embedded_ds_history.back() < *options.embedded_ds_target) {
      trace.status = ScalingStatus::EmbeddedThreshold;
      return trace;
    }
    if (trace.log_condition > options.max_log_condition) {
      trace.status = ScalingStatus::IllConditioned;
      trace.diagnostic = "accumulated conditioning exceeds limit at step " + std::to_string(step);
      return trace;
    }
    if (options.stagnation_window > 0 && step >= options.stagnation_window) {
      const double now = trace.ds_history[step];
      const double then = trace.ds_history[step - options.stagnation_window];
      if (now > then * (1.0 - options.stagnation_rel)) {
        trace.status = ScalingStatus::Stagnated;
        std::ostringstream msg;
        msg << "ds stagnated at " << now << " after " << step << " steps";
        trace.diagnostic = msg.str();
        return trace;
      }
    }
  }
  trace.diagnostic = "step budget of " + std::to_string(options.max_steps) + " exhausted";
  return trace;
}

template <class T>
BasicScalingTrace<T> algorithm_g(const KrausOperator<T>& op, std::size_t max_steps,
                                 double ds_target) {
  ScalingOptions options;
  options.max_steps = max_steps;
  options.ds_target = ds_target;
  auto trace = run_algorithm_g(op, options);
  if (trace.status == ScalingStatus::Singular) {
    throw SingularMatrix(trace.diagnostic, *trace.singular_step);
  }
  return trace;
}

template <class T>
double log_capacity_upper_bound(const BasicScalingTrace<T>& trace, std::size_t n1,
                                std::size_t n2) {
  using std::log;
  const double ratio = static_cast<double>(n2) / static_cast<double>(n1);
  const auto e = sym_eig<T>(trace.final_operator.apply_identity() * T(ratio));
  if (e.smallest() <= T(0)) return -std::numeric_limits<double>::infinity();
  double ld = 0;
  for (const auto& v : e.eigenvalues) ld += static_cast<double>(log(v));
  return ld - 2.0 * trace.accumulated.log_det_left - 2.0 * ratio * trace.accumulated.log_det_right;
}

double default_capacity_ds_target(double eps, std::size_t n1, std::size_t n2) {
  const double s = eps / (10.0 * static_cast<double>(n1 + n2));
  return s * s;
}

double feasibility_threshold(std::size_t n1, std::size_t n2) {
  return 1.0 / (static_cast<double>(n1 * n2) + 1.0);
}

double log_integer_capacity_floor(std::size_t n1, std::size_t n2) {
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  return -b * std::log(a) - 2.0 * b * std::log(a * b);
}

template <class T>
BasicCapacityResult<T> capacity_estimate(const KrausOperator<T>& op, double eps,
                                         const CapacityOptions& options) {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("eps must lie in (0, 1)");
  const std::size_t n1 = op.n1();
  const std::size_t n2 = op.n2();

  ScalingOptions so;
  so.ds_target = options.ds_target.value_or(default_capacity_ds_target(eps, n1, n2));
  const double m = std::max(1.0, static_cast<double>(op.max_abs_entry()));
  const auto budget = iteration_budget(std::max(n1, n2), m, eps);
  so.max_steps = options.max_steps.value_or(
      static_cast<std::size_t>(std::min<std::uint64_t>(budget, options.step_cap)));
  if (op.has_integer_kraus()) so.log_capacity_floor = log_integer_capacity_floor(n1, n2);

  BasicCapacityResult<T> result(run_algorithm_g(op, so));
  const auto& trace = result.trace;
  switch (trace.status) {
    case ScalingStatus::Singular:
    case ScalingStatus::BelowCapacityFloor:
      result.status = CapacityStatus::Zero;
      result.value = 0;
      result.log_value = -std::numeric_limits<double>::infinity();
      result.diagnostic = "capacity is zero: " + trace.diagnostic;
      return result;
    default: break;
  }
  double log_value = log_capacity_upper_bound(trace, n1, n2);
  for (const auto& [step, lv] : trace.capacity_checkpoints) log_value = std::min(log_value, lv);
  result.log_value = log_value;
  result.value = std::exp(log_value);
  if (trace.status == ScalingStatus::Converged) {
    result.status = CapacityStatus::Positive;
  } else {
    result.status = CapacityStatus::NonConvergence;
    std::ostringstream msg;
    msg << "ds did not reach " << so.ds_target << " (final " << trace.final_ds() << "): "
        << trace.diagnostic << "; value is an upper bound";
    result.diagnostic = msg.str();
  }
  return result;
}

template <class T>
RankReport rank_report(const KrausOperator<T>& op, std::size_t budget) {
  ScalingOptions so;
  so.max_steps = std::max<std::size_t>(budget, 1);
  so.ds_target = -1;
  so.embedded_ds_target = feasibility_threshold(op.n1(), op.n2());
  so.max_log_condition = kMaxLogCondition;
  if (op.has_integer_kraus()) so.log_capacity_floor = log_integer_capacity_floor(op.n1(), op.n2());

  const auto trace = run_algorithm_g(op, so);
  RankReport report;
  report.steps = trace.steps;
  report.final_embedded_ds = trace.embedded_ds_history.back();
  switch (trace.status) {
    case ScalingStatus::EmbeddedThreshold:
      report.verdict = Verdict::Yes;
      report.reason = "embedded ds below 1/(N+1) at step " + std::to_string(trace.steps);
      break;
    case ScalingStatus::Singular:
    case ScalingStatus::BelowCapacityFloor:
      report.verdict = Verdict::No;
      report.reason = trace.diagnostic;
      break;
    default:
      report.verdict = Verdict::Inconclusive;
      report.reason = to_string(trace.status) + ": " + trace.diagnostic;
      break;
  }
  return report;
}

double capacity_lower_bound_integer(std::size_t n, std::size_t d) {
  const double nn = static_cast<double>(n);
  return std::exp(-2.0 * nn * std::log(nn * nn * static_cast<double>(d)));
}

std::uint64_t iteration_budget(std::size_t n, double max_entry, double eps) {
  if (n == 0 || !(max_entry >= 1) || !(eps > 0 && eps <= 1)) {
    throw std::invalid_argument("iteration_budget needs n >= 1, M >= 1, 0 < eps <= 1");
  }
  const double nn = static_cast<double>(n);
  const double t = 4.0 * nn * nn * nn / (eps * eps) *
                   (1.0 + 10.0 * nn * nn * std::log(max_entry * nn));
  if (t >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(std::ceil(t));
}

#define BLSCALE_INSTANTIATE(T)                                                              \
  template BasicScalingTrace<T> run_algorithm_g(const KrausOperator<T>&,                    \
                                                const ScalingOptions&);                     \
  template BasicScalingTrace<T> algorithm_g(const KrausOperator<T>&, std::size_t, double);  \
  template double log_capacity_upper_bound(const BasicScalingTrace<T>&, std::size_t,        \
                                           std::size_t);                                    \
  template BasicCapacityResult<T> capacity_estimate(const KrausOperator<T>&, double,        \
                                                    const CapacityOptions&);                \
  template RankReport rank_report(const KrausOperator<T>&, std::size_t);

BLSCALE_INSTANTIATE(double)
BLSCALE_INSTANTIATE(HighPrec)

#undef BLSCALE_INSTANTIATE

}  // namespace blscale
