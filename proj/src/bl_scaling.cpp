#include "blscale/bl_scaling.hpp"

#include <cmath>
#include <sstream>

#include "blscale/error.hpp"

namespace blscale {

std::string to_string(BLScalingStatus s) {
  switch (s) {
    case BLScalingStatus::Converged: return "converged";
    case BLScalingStatus::BudgetExhausted: return "budget_exhausted";
    case BLScalingStatus::Stagnated: return "stagnated";
    case BLScalingStatus::Singular: return "singular";
  }
  return "unknown";
}

double BLScalingTrace::log_bl_estimate() const {
  double s = log_det_right;
  for (std::size_t j = 0; j < log_det_left.size(); ++j)
    s += final_datum.exponents.p_real(j) * log_det_left[j];
  return s;
}

std::uint64_t bl_scaling_budget(const BLDatum& datum, double eps) {
  const double n = static_cast<double>(datum.n());
  const double m = static_cast<double>(datum.m());
  const double b = static_cast<double>(datum.max_bit_size());
  const double t = (n * m * std::log(n * m) + n * b) / eps;
  if (t >= 1.8e19) return UINT64_MAX;
  return static_cast<std::uint64_t>(std::ceil(t));
}

BLScalingTrace run_bl_scaling(const RealDatum& datum, const BLScalingOptions& options) {
  BLScalingTrace trace;
  trace.final_datum = datum;
  trace.right = RealMat::identity(datum.n);
  for (std::size_t j = 0; j < datum.m(); ++j) {
    trace.left.push_back(RealMat::identity(datum.map_dim(j)));
    trace.log_det_left.push_back(0);
  }
  // Partial log corrections at checkpoints; converted to estimates at the end.
  std::vector<std::pair<std::size_t, double>> partial;
  auto checkpoint = [&](std::size_t step) {
    if (options.checkpoint_every && step % options.checkpoint_every == 0)
      partial.emplace_back(step, trace.log_bl_estimate());
  };

  trace.g_history.push_back(g_distance(datum));
  checkpoint(0);
  if (trace.g_history.back() <= options.g_target) {
    trace.status = BLScalingStatus::Converged;
  } else {
    trace.status = BLScalingStatus::BudgetExhausted;
    for (std::size_t step = 1; step <= options.max_steps; ++step) {
      try {
        if (step % 2 == 1) {
          auto s = isotropy_normalize(trace.final_datum);
          trace.right = trace.right * s.factor;
          trace.log_det_right += s.log_det_factor;
          trace.final_datum = std::move(s.datum);
        } else {
          auto s = projection_normalize(trace.final_datum);
          for (std::size_t j = 0; j < s.factors.size(); ++j) {
            trace.left[j] = s.factors[j] * trace.left[j];
            trace.log_det_left[j] += s.log_det_factors[j];
          }
          trace.final_datum = std::move(s.datum);
        }
      } catch (const SingularMatrix& e) {
        trace.status = BLScalingStatus::Singular;
        trace.singular_step = step;
        if (step % 2 == 0) trace.singular_map = e.index();
        trace.diagnostic = std::string(e.what()) + " at step " + std::to_string(step);
        break;
      }
      trace.steps = step;
      trace.g_history.push_back(g_distance(trace.final_datum));
      checkpoint(step);
      if (trace.g_history.back() <= options.g_target) {
        trace.status = BLScalingStatus::Converged;
        break;
      }
      if (options.stagnation_window && step >= options.stagnation_window) {
        const double now = trace.g_history[step];
        const double then = trace.g_history[step - options.stagnation_window];
        if (now > then * (1.0 - options.stagnation_rel)) {
          trace.status = BLScalingStatus::Stagnated;
          std::ostringstream msg;
          msg << "g stagnated at " << now << " after " << step << " steps";
          trace.diagnostic = msg.str();
          break;
        }
      }
    }
    if (trace.status == BLScalingStatus::BudgetExhausted) {
      trace.diagnostic = "step budget of " + std::to_string(options.max_steps) + " exhausted";
    }
  }
  // BL(datum after step i) = BL(input) / exp(partial_i), with BL(input)
  // estimated from the final state.
  const double total = trace.log_bl_estimate();
  for (const auto& [step, lp] : partial) trace.bl_estimates.emplace_back(step, std::exp(total - lp));
  return trace;
}

BLScalingTrace bl_scaling(const RealDatum& datum, std::size_t max_steps, double g_target) {
  BLScalingOptions options;
  options.max_steps = max_steps;
  options.g_target = g_target;
  auto trace = run_bl_scaling(datum, options);
  if (trace.status == BLScalingStatus::Singular) {
    throw SingularMatrix(trace.diagnostic, trace.singular_map.value_or(SingularMatrix::npos));
  }
  return trace;
}

}  // namespace blscale
