#pragma once

// BL polytopes of rank-one data and of the rank-two matroid intersection
// encoding, with exact combinatorial oracles to compare against.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "blscale/datum.hpp"
#include "blscale/feasibility.hpp"

namespace blscale {

struct VectorFamily {
  std::size_t n = 0;
  std::vector<std::vector<Rational>> vectors;

  VectorFamily() = default;
  // Throws DimensionMismatch on ragged input or when every vector is zero.
  VectorFamily(std::size_t n, std::vector<std::vector<Rational>> vectors);
  static VectorFamily from_ints(std::size_t n, const std::vector<std::vector<long>>& vectors);

  std::size_t m() const { return vectors.size(); }
  // n x m, vector i in column i.
  RationalMat as_columns() const;
};

// Maps x -> <v_j, x>.
std::vector<RationalMat> rank1_maps(const VectorFamily& family);
BLDatum rank1_datum(const VectorFamily& family, const Exponents& p);

// Maps (x, y) -> (<v_j, x>, <w_j, y>) on R^{2n}.
std::vector<RationalMat> matroid_intersection_maps(const VectorFamily& v, const VectorFamily& w);
BLDatum matroid_intersection_datum(const VectorFamily& v, const VectorFamily& w, const Exponents& p);

using IndexSet = std::vector<std::size_t>;  // sorted, 0-based

inline constexpr std::size_t kMaxEnumerationSize = 20;

// n-subsets whose vectors have exact rank n, in lexicographic order.
// Throws BudgetExceeded when m > kMaxEnumerationSize.
std::vector<IndexSet> enumerate_bases(const VectorFamily& family);
std::vector<IndexSet> enumerate_common_bases(const VectorFamily& v, const VectorFamily& w);

std::vector<std::vector<Rational>> characteristic_vectors(const std::vector<IndexSet>& sets,
                                                          std::size_t m);

enum class Membership { Inside, Outside, Inconclusive };
std::string to_string(Membership m);

struct PolytopeMembership {
  Membership verdict = Membership::Inconclusive;
  // Hull oracle, inside: one exact weight per vertex, summing to 1.
  std::vector<Rational> weights;
  // Hull oracle, outside: h with h·(x, 1) <= 0 on every vertex and > 0 at the point.
  std::optional<std::vector<Rational>> separator;
  // BL oracle: the feasibility report on the maps with p_j > 0.
  std::optional<FeasibilityReport> report;
  std::vector<std::size_t> kept;  // indices of those maps
  std::string reason;

  bool inside() const { return verdict == Membership::Inside; }
};

// Exact phase-one simplex with Bland's rule.
PolytopeMembership hull_membership_exact(const std::vector<std::vector<Rational>>& vertices,
                                         const std::vector<Rational>& point);

// p in the BL polytope of the maps iff the datum is feasible. Maps with
// p_j = 0 are dropped; a negative p_j is outside.
PolytopeMembership bl_membership(std::size_t n, const std::vector<RationalMat>& maps,
                                 const std::vector<Rational>& p,
                                 const FeasibilityOptions& options = {});

}  // namespace blscale
