#pragma once

// Algorithm 1: alternate isotropy (odd steps) and projection (even steps)
// normalization of a Brascamp-Lieb datum, tracking the distance g to
// geometric position and the accumulated basis change.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blscale/datum.hpp"

namespace blscale {

enum class BLScalingStatus { Converged, BudgetExhausted, Stagnated, Singular };
std::string to_string(BLScalingStatus s);

struct BLScalingOptions {
  std::size_t max_steps = 10000;
  double g_target = 1e-8;
  std::size_t stagnation_window = 50;
  double stagnation_rel = 1e-14;
  // Record a BL estimate for the datum after every k-th step (0: never).
  std::size_t checkpoint_every = 0;
};

struct BLScalingTrace {
  std::size_t steps = 0;
  std::vector<double> g_history;  // steps + 1 entries
  // (step, estimated BL of the datum reached after that step)
  std::vector<std::pair<std::size_t, double>> bl_estimates;
  RealDatum final_datum;
  // final B_j = left[j] · B_j · right
  RealMat right;
  std::vector<RealMat> left;
  double log_det_right = 0;
  std::vector<double> log_det_left;
  BLScalingStatus status = BLScalingStatus::BudgetExhausted;
  std::optional<std::size_t> singular_step;
  std::optional<std::size_t> singular_map;  // unset: the isotropy matrix was singular
  std::string diagnostic;

  double final_g() const { return g_history.back(); }
  // log det(right) + Σ p_j log det(left_j): equals log BL(input) when the
  // final datum is geometric.
  double log_bl_estimate() const;
};

// Worst-case step count ⌈(n m log(nm) + n b) / eps⌉, b the largest entry bit size.
std::uint64_t bl_scaling_budget(const BLDatum& datum, double eps);

// Non-throwing driver; singular steps end the run with status Singular.
BLScalingTrace run_bl_scaling(const RealDatum& datum, const BLScalingOptions& options);

// Throws SingularMatrix (index = offending map, npos for a shared kernel).
BLScalingTrace bl_scaling(const RealDatum& datum, std::size_t max_steps, double g_target);

}  // namespace blscale
