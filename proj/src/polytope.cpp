#include "blscale/polytope.hpp"

#include "blscale/error.hpp"

namespace blscale {

VectorFamily::VectorFamily(std::size_t n_, std::vector<std::vector<Rational>> vectors_)
    : n(n_), vectors(std::move(vectors_)) {
  if (n == 0) throw DimensionMismatch("vector family dimension must be positive");
  if (vectors.empty()) throw DimensionMismatch("vector family is empty");
  bool nonzero = false;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != n) {
      throw DimensionMismatch("vector " + std::to_string(i) + " has length " +
                              std::to_string(vectors[i].size()) + ", expected " + std::to_string(n));
    }
    for (const auto& x : vectors[i]) nonzero = nonzero || x != 0;
  }
  if (!nonzero) throw DimensionMismatch("every vector in the family is zero");
}

VectorFamily VectorFamily::from_ints(std::size_t n, const std::vector<std::vector<long>>& vectors) {
  std::vector<std::vector<Rational>> out;
  for (const auto& v : vectors) out.emplace_back(v.begin(), v.end());
  return VectorFamily(n, std::move(out));
}

RationalMat VectorFamily::as_columns() const {
  RationalMat a(n, m());
  for (std::size_t j = 0; j < m(); ++j)
    for (std::size_t i = 0; i < n; ++i) a(i, j) = vectors[j][i];
  return a;
}

std::vector<RationalMat> rank1_maps(const VectorFamily& family) {
  std::vector<RationalMat> maps;
  for (const auto& v : family.vectors) maps.emplace_back(1, family.n, v);
  return maps;
}

BLDatum rank1_datum(const VectorFamily& family, const Exponents& p) {
  if (p.size() != family.m()) throw DimensionMismatch("need one exponent per vector");
  return BLDatum(family.n, rank1_maps(family), p);
}

std::vector<RationalMat> matroid_intersection_maps(const VectorFamily& v, const VectorFamily& w) {
  if (v.n != w.n || v.m() != w.m()) {
    throw DimensionMismatch("families must share dimension and size");
  }
  const std::size_t n = v.n;
  std::vector<RationalMat> maps;
  for (std::size_t j = 0; j < v.m(); ++j) {
    RationalMat b(2, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      b(0, i) = v.vectors[j][i];
      b(1, n + i) = w.vectors[j][i];
    }
    maps.push_back(std::move(b));
  }
  return maps;
}

BLDatum matroid_intersection_datum(const VectorFamily& v, const VectorFamily& w, const Exponents& p) {
  if (p.size() != v.m()) throw DimensionMismatch("need one exponent per vector");
  return BLDatum(2 * v.n, matroid_intersection_maps(v, w), p);
}

namespace {

bool spans(const VectorFamily& f, const IndexSet& s) {
  RationalMat a(f.n, s.size());
  for (std::size_t k = 0; k < s.size(); ++k)
    for (std::size_t i = 0; i < f.n; ++i) a(i, k) = f.vectors[s[k]][i];
  return exact_rank(a) == f.n;
}

template <class Keep>
std::vector<IndexSet> for_each_subset(std::size_t m, std::size_t k, Keep keep) {
  if (m > kMaxEnumerationSize) {
    throw BudgetExceeded("enumeration over " + std::to_string(m) + " vectors exceeds the limit of " +
                         std::to_string(kMaxEnumerationSize));
  }
  std::vector<IndexSet> out;
  if (k > m) return out;
  IndexSet s(k);
  for (std::size_t i = 0; i < k; ++i) s[i] = i;
  for (;;) {
    if (keep(s)) out.push_back(s);
    std::size_t i = k;
    while (i > 0 && s[i - 1] == m - k + i - 1) --i;
    if (i == 0) break;
    ++s[i - 1];
    for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
  }
  return out;
}

}  // namespace

std::vector<IndexSet> enumerate_bases(const VectorFamily& family) {
  return for_each_subset(family.m(), family.n, [&](const IndexSet& s) { return spans(family, s); });
}

std::vector<IndexSet> enumerate_common_bases(const VectorFamily& v, const VectorFamily& w) {
  if (v.n != w.n || v.m() != w.m()) {
    throw DimensionMismatch("families must share dimension and size");
  }
  return for_each_subset(v.m(), v.n,
                         [&](const IndexSet& s) { return spans(v, s) && spans(w, s); });
}

std::vector<std::vector<Rational>> characteristic_vectors(const std::vector<IndexSet>& sets,
                                                          std::size_t m) {
  std::vector<std::vector<Rational>> out;
  for (const auto& s : sets) {
    std::vector<Rational> x(m, Rational(0));
    for (auto i : s) x.at(i) = 1;
    out.push_back(std::move(x));
  }
  return out;
}

std::string to_string(Membership m) {
  switch (m) {
    case Membership::Inside:
      return "inside";
    case Membership::Outside:
      return "outside";
    case Membership::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

PolytopeMembership hull_membership_exact(const std::vector<std::vector<Rational>>& vertices,
                                         const std::vector<Rational>& point) {
  PolytopeMembership out;
  if (vertices.empty()) {
    out.verdict = Membership::Outside;
    out.reason = "no vertices: the polytope is empty";
    return out;
  }
  const std::size_t dim = point.size();
  for (const auto& v : vertices)
    if (v.size() != dim) throw DimensionMismatch("vertex and point lengths differ");

  // Rows: coordinates then Σλ = 1. Columns: vertices, artificials, rhs.
  const std::size_t rows = dim + 1;
  const std::size_t k = vertices.size();
  const std::size_t cols = k + rows + 1;
  const std::size_t rhs = cols - 1;
  std::vector<Rational> t(rows * cols, Rational(0));
  auto at = [&](std::size_t i, std::size_t j) -> Rational& { return t[i * cols + j]; };
  std::vector<int> sign(rows, 1);
  for (std::size_t i = 0; i < rows; ++i) {
    const Rational b = i < dim ? point[i] : Rational(1);
    if (b < 0) sign[i] = -1;
    for (std::size_t j = 0; j < k; ++j) at(i, j) = sign[i] * (i < dim ? vertices[j][i] : Rational(1));
    at(i, k + i) = 1;
    at(i, rhs) = sign[i] * b;
  }
  std::vector<std::size_t> basis(rows);
  for (std::size_t i = 0; i < rows; ++i) basis[i] = k + i;

  // Reduced costs for minimizing the sum of artificials.
  std::vector<Rational> d(cols, Rational(0));
  for (std::size_t j = 0; j < cols; ++j) {
    if (j >= k && j < rhs) continue;
    for (std::size_t i = 0; i < rows; ++i) d[j] -= at(i, j);
  }

  for (;;) {
    std::size_t enter = rhs;
    for (std::size_t j = 0; j < rhs; ++j)
      if (d[j] < 0) {
        enter = j;
        break;
      }
    if (enter == rhs) break;
    std::size_t leave = rows;
    Rational best;
    for (std::size_t i = 0; i < rows; ++i) {
      if (at(i, enter) <= 0) continue;
      const Rational r = at(i, rhs) / at(i, enter);
      if (leave == rows || r < best || (r == best && basis[i] < basis[leave])) {
        leave = i;
        best = r;
      }
    }
    // Phase one is bounded below by 0, so a ratio row always exists.
    const Rational piv = at(leave, enter);
    for (std::size_t j = 0; j < cols; ++j) at(leave, j) /= piv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == leave || at(i, enter) == 0) continue;
      const Rational f = at(i, enter);
      for (std::size_t j = 0; j < cols; ++j) at(i, j) -= f * at(leave, j);
    }
    const Rational f = d[enter];
    for (std::size_t j = 0; j < cols; ++j) d[j] -= f * at(leave, j);
    basis[leave] = enter;
  }

  // -d[rhs] is the optimal sum of artificials.
  if (d[rhs] == 0) {
    out.verdict = Membership::Inside;
    out.weights.assign(k, Rational(0));
    for (std::size_t i = 0; i < rows; ++i)
      if (basis[i] < k) out.weights[basis[i]] = at(i, rhs);
    return out;
  }
  // Dual of the phase-one optimum: y_i = 1 - d(artificial i), undone row flips.
  std::vector<Rational> h(rows);
  for (std::size_t i = 0; i < rows; ++i) h[i] = sign[i] * (1 - d[k + i]);
  out.verdict = Membership::Outside;
  out.separator = std::move(h);
  out.reason = "not a convex combination of the vertices";
  return out;
}

PolytopeMembership bl_membership(std::size_t n, const std::vector<RationalMat>& maps,
                                 const std::vector<Rational>& p, const FeasibilityOptions& options) {
  if (p.size() != maps.size()) throw DimensionMismatch("need one exponent per map");
  PolytopeMembership out;
  std::vector<RationalMat> kept_maps;
  std::vector<Rational> kept_p;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] < 0) {
      out.verdict = Membership::Outside;
      out.reason = "exponent " + std::to_string(j) + " is negative";
      return out;
    }
    if (p[j] == 0) continue;
    out.kept.push_back(j);
    kept_maps.push_back(maps[j]);
    kept_p.push_back(p[j]);
  }
  if (kept_p.empty()) {
    out.verdict = Membership::Outside;
    out.reason = "all exponents are zero: scaling condition fails";
    return out;
  }
  const BLDatum datum(n, std::move(kept_maps), Exponents::from_rationals(kept_p));
  auto report = feasibility(datum, options);
  switch (report.verdict) {
    case FeasibilityVerdict::Feasible:
      out.verdict = Membership::Inside;
      break;
    case FeasibilityVerdict::Infeasible:
      out.verdict = Membership::Outside;
      break;
    case FeasibilityVerdict::Inconclusive:
      out.verdict = Membership::Inconclusive;
      break;
  }
  out.reason = report.diagnostics;
  out.report = std::move(report);
  return out;
}

}  // namespace blscale
