#pragma once

// Feasibility of a Brascamp-Lieb datum (BL < ∞) with exactly verified
// witnesses: a subspace V with dim V > Σ p_j dim(B_j V).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "blscale/datum.hpp"

namespace blscale {

struct WitnessCheck {
  bool violated = false;  // d·dim V > Σ c_j dim(B_j V)
  std::size_t lhs_dim = 0;
  Rational rhs_value;  // Σ p_j dim(B_j V)
  std::vector<std::size_t> image_dims;
};

WitnessCheck verify_witness(const BLDatum& datum, const RationalMat& v);

enum class FeasibilityVerdict { Feasible, Infeasible, Inconclusive };
std::string to_string(FeasibilityVerdict v);

struct FeasibilityOptions {
  std::size_t budget = 4000;           // Algorithm G steps on the reduced operator
  std::size_t lattice_cap = 256;       // subspaces generated by the exact lattice search
  std::size_t spectral_steps = 2000;   // Algorithm 1 steps feeding spectral candidates
  long max_denominator = 1000000;      // rationalization of spectral candidates
};

struct FeasibilityReport {
  FeasibilityVerdict verdict = FeasibilityVerdict::Inconclusive;
  std::optional<RationalMat> witness;  // columns span V
  std::size_t lhs_dim = 0;
  Rational rhs_value;
  std::string stage;  // which step of the pipeline decided
  std::string diagnostics;
  std::optional<Validation> scaling_condition;  // set when it fails
  std::size_t scaling_steps = 0;
};

FeasibilityReport feasibility(const BLDatum& datum, const FeasibilityOptions& options = {});

// Row-reduces a float basis (columns) and rounds it to rationals with
// bounded denominators. Returns nullopt if the rounded basis loses rank.
std::optional<RationalMat> rationalize_subspace(const RealMat& basis, long max_denominator);

}  // namespace blscale
