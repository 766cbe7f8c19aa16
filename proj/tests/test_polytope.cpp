#include <algorithm>
#include <numeric>

#include "blscale/bl.hpp"
#include "blscale/error.hpp"
#include "blscale/polytope.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace blscale;
using namespace testing_support;

namespace {

std::vector<Rational> q(std::initializer_list<Rational> xs) { return xs; }

Rational third(long k) { return Rational(k, 3); }

// Random family with small rational entries; some vectors repeat or vanish.
VectorFamily random_family(std::size_t n, std::size_t m) {
  for (;;) {
    std::vector<std::vector<Rational>> vs;
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<Rational> v(n);
      const long den = uniform_int(1, 2);
      for (auto& x : v) {
        x = Rational(uniform_int(-2, 2), den);
        x.canonicalize();
      }
      if (j > 0 && uniform_int(0, 5) == 0) v = vs[uniform_int(0, static_cast<long>(j) - 1)];
      vs.push_back(std::move(v));
    }
    bool nonzero = false;
    for (const auto& v : vs)
      for (const auto& x : v) nonzero = nonzero || x != 0;
    if (nonzero) return VectorFamily(n, std::move(vs));
  }
}

// Points on Σ p_j = n: random convex combinations of vertices (inside) and
// random positive points (either side).
std::vector<std::vector<Rational>> sample_points(const std::vector<std::vector<Rational>>& vertices,
                                                 std::size_t m, std::size_t n, int count) {
  std::vector<std::vector<Rational>> out;
  for (int s = 0; s < count; ++s) {
    std::vector<Rational> p(m, Rational(0));
    if (s % 2 == 0 && !vertices.empty()) {
      std::vector<long> w(vertices.size());
      long total = 0;
      for (auto& x : w) total += (x = uniform_int(0, 3));
      if (total == 0) w[0] = total = 1;
      for (std::size_t k = 0; k < vertices.size(); ++k)
        for (std::size_t j = 0; j < m; ++j) p[j] += Rational(w[k], total) * vertices[k][j];
    } else {
      std::vector<long> a(m);
      long total = 0;
      for (auto& x : a) total += (x = uniform_int(0, 4));
      if (total == 0) a[0] = total = 1;
      for (std::size_t j = 0; j < m; ++j) p[j] = Rational(a[j] * static_cast<long>(n), total);
    }
    for (auto& x : p) x.canonicalize();
    out.push_back(std::move(p));
  }
  return out;
}

void check_separator(const PolytopeMembership& r, const std::vector<std::vector<Rational>>& vertices,
                     const std::vector<Rational>& point) {
  REQUIRE(r.separator);
  const auto& h = *r.separator;
  auto eval = [&](const std::vector<Rational>& x) {
    Rational s = h.back();
    for (std::size_t i = 0; i < x.size(); ++i) s += h[i] * x[i];
    return s;
  };
  for (const auto& v : vertices) CHECK(eval(v) <= 0);
  CHECK(eval(point) > 0);
}

void check_weights(const PolytopeMembership& r, const std::vector<std::vector<Rational>>& vertices,
                   const std::vector<Rational>& point) {
  REQUIRE(r.weights.size() == vertices.size());
  Rational total = 0;
  std::vector<Rational> sum(point.size(), Rational(0));
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    CHECK(r.weights[k] >= 0);
    total += r.weights[k];
    for (std::size_t i = 0; i < point.size(); ++i) sum[i] += r.weights[k] * vertices[k][i];
  }
  CHECK(total == 1);
  CHECK(sum == point);
}

void check_witness(std::size_t n, const std::vector<RationalMat>& maps, const std::vector<Rational>& p,
                   const PolytopeMembership& r) {
  REQUIRE(r.report);
  if (!r.report->witness) {
    CHECK(r.report->scaling_condition);
    return;
  }
  std::vector<RationalMat> kept;
  std::vector<Rational> kp;
  for (auto j : r.kept) {
    kept.push_back(maps[j]);
    kp.push_back(p[j]);
  }
  const BLDatum d(n, kept, Exponents::from_rationals(kp));
  CHECK(verify_witness(d, *r.report->witness).violated);
}

struct Tally {
  int agree = 0;
  int inconclusive = 0;
  int total = 0;
};

void compare(std::size_t n, const std::vector<RationalMat>& maps,
             const std::vector<std::vector<Rational>>& vertices, const std::vector<Rational>& p,
             Tally& tally) {
  const auto hull = hull_membership_exact(vertices, p);
  if (hull.inside()) check_weights(hull, vertices, p);
  else if (!vertices.empty()) check_separator(hull, vertices, p);
  const auto bl = bl_membership(n, maps, p);
  ++tally.total;
  if (bl.verdict == Membership::Inconclusive) {
    ++tally.inconclusive;
    return;
  }
  CHECK(bl.verdict == hull.verdict);
  if (bl.verdict == hull.verdict) ++tally.agree;
  if (bl.verdict == Membership::Outside) check_witness(n, maps, p, bl);
}

}  // namespace

TEST_CASE("vector family validation") {
  CHECK_THROWS_AS(VectorFamily::from_ints(2, {{1, 0}, {1}}), DimensionMismatch);
  CHECK_THROWS_AS(VectorFamily::from_ints(2, {{0, 0}, {0, 0}}), DimensionMismatch);
  CHECK_THROWS_AS(VectorFamily::from_ints(2, {}), DimensionMismatch);
  CHECK(VectorFamily::from_ints(2, {{0, 0}, {1, 0}}).m() == 2);
}

TEST_CASE("rank1_datum examples") {
  const auto f = VectorFamily::from_ints(2, {{1, 0}, {0, 1}});
  const auto d = rank1_datum(f, Exponents({1, 1}, 1));
  CHECK(d.m() == 2);
  CHECK(d.maps()[1] == RationalMat{{0, 1}});
  CHECK(feasibility(d).verdict == FeasibilityVerdict::Feasible);
  CHECK(bl_constant(d, 0.01).value == doctest::Approx(1).epsilon(0.01));

  const auto tri = VectorFamily::from_ints(2, {{1, 0}, {0, 1}, {1, 1}});
  CHECK(feasibility(rank1_datum(tri, Exponents({2, 2, 2}, 3))).verdict == FeasibilityVerdict::Feasible);

  const auto dup = VectorFamily::from_ints(2, {{1, 0}, {1, 0}});
  const auto r = feasibility(rank1_datum(dup, Exponents({1, 1}, 1)));
  REQUIRE(r.verdict == FeasibilityVerdict::Infeasible);
  CHECK(canonical_basis(*r.witness) == canonical_basis(RationalMat{{0}, {1}}));

  CHECK_THROWS_AS(rank1_datum(f, Exponents({1}, 1)), DimensionMismatch);
}

TEST_CASE("matroid_intersection_datum examples") {
  const auto e = VectorFamily::from_ints(2, {{1, 0}, {0, 1}});
  const auto d = matroid_intersection_datum(e, e, Exponents({1, 1}, 1));
  CHECK(d.n() == 4);
  CHECK(d.maps()[0] == RationalMat{{1, 0, 0, 0}, {0, 0, 1, 0}});
  CHECK(d.maps()[1] == RationalMat{{0, 1, 0, 0}, {0, 0, 0, 1}});
  CHECK(enumerate_common_bases(e, e) == std::vector<IndexSet>{{0, 1}});

  const auto v = VectorFamily::from_ints(2, {{1, 0}, {0, 1}, {1, 1}});
  const auto w = VectorFamily::from_ints(2, {{0, 1}, {1, 0}, {1, 1}});
  CHECK(enumerate_common_bases(v, w) == std::vector<IndexSet>{{0, 1}, {0, 2}, {1, 2}});

  // K_{2,2}: edges (a1,b1), (a1,b2), (a2,b1), (a2,b2).
  const auto left = VectorFamily::from_ints(2, {{1, 0}, {1, 0}, {0, 1}, {0, 1}});
  const auto right = VectorFamily::from_ints(2, {{1, 0}, {0, 1}, {1, 0}, {0, 1}});
  CHECK(enumerate_common_bases(left, right) == std::vector<IndexSet>{{0, 3}, {1, 2}});

  CHECK_THROWS_AS(matroid_intersection_datum(e, v, Exponents({1, 1}, 1)), DimensionMismatch);
}

TEST_CASE("enumerate_common_bases examples") {
  const auto e = VectorFamily::from_ints(2, {{1, 0}, {0, 1}});
  CHECK(enumerate_common_bases(e, e) == std::vector<IndexSet>{{0, 1}});
  const auto tri = VectorFamily::from_ints(2, {{1, 0}, {0, 1}, {1, 1}});
  CHECK(enumerate_common_bases(tri, tri) == std::vector<IndexSet>{{0, 1}, {0, 2}, {1, 2}});
  const auto dup = VectorFamily::from_ints(2, {{1, 0}, {1, 0}});
  CHECK(enumerate_common_bases(dup, e).empty());

  std::vector<std::vector<long>> many(21, {1, 0});
  const auto big = VectorFamily::from_ints(2, many);
  CHECK_THROWS_AS(enumerate_common_bases(big, big), BudgetExceeded);
  CHECK_THROWS_AS(enumerate_bases(big), BudgetExceeded);
}

TEST_CASE("hull_membership_exact examples") {
  const std::vector<std::vector<Rational>> one{q({1, 1})};
  const auto a = hull_membership_exact(one, q({1, 1}));
  CHECK(a.inside());
  CHECK(a.weights == q({1}));

  const std::vector<std::vector<Rational>> tri{q({1, 1, 0}), q({1, 0, 1}), q({0, 1, 1})};
  const auto b = hull_membership_exact(tri, {third(2), third(2), third(2)});
  CHECK(b.inside());
  CHECK(b.weights == std::vector<Rational>{third(1), third(1), third(1)});

  const auto c = hull_membership_exact(tri, q({1, 1, 1}));
  CHECK(c.verdict == Membership::Outside);
  check_separator(c, tri, q({1, 1, 1}));

  const auto neg = hull_membership_exact(tri, q({-1, 2, 1}));
  CHECK(neg.verdict == Membership::Outside);
  check_separator(neg, tri, q({-1, 2, 1}));

  CHECK(hull_membership_exact({}, q({1})).verdict == Membership::Outside);
}

TEST_CASE("bl_membership examples") {
  const auto e = VectorFamily::from_ints(2, {{1, 0}, {0, 1}});
  const auto maps = matroid_intersection_maps(e, e);
  CHECK(bl_membership(4, maps, q({1, 1})).inside());

  const std::vector<Rational> off{Rational(3, 2), Rational(1, 2)};
  const auto out = bl_membership(4, maps, off);
  REQUIRE(out.verdict == Membership::Outside);
  REQUIRE(out.report->witness);
  check_witness(4, maps, off, out);
  CHECK(hull_membership_exact(characteristic_vectors(enumerate_common_bases(e, e), 2), off).verdict ==
        Membership::Outside);

  const auto tri = VectorFamily::from_ints(2, {{1, 0}, {0, 1}, {1, 1}});
  CHECK(bl_membership(2, rank1_maps(tri), {third(2), third(2), third(2)}).inside());

  // Zero exponents drop maps; a vertex of the basis polytope is inside.
  const auto v = bl_membership(2, rank1_maps(tri), q({1, 0, 1}));
  CHECK(v.inside());
  CHECK(v.kept == std::vector<std::size_t>{0, 2});
  CHECK(bl_membership(2, rank1_maps(tri), q({3, -1, 0})).verdict == Membership::Outside);
}

TEST_CASE("property: rank-one membership agrees with the basis polytope") {
  Tally tally;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
    const std::size_t m = n + static_cast<std::size_t>(uniform_int(0, 6 - static_cast<long>(n)));
    const auto f = random_family(n, m);
    const auto vertices = characteristic_vectors(enumerate_bases(f), m);
    const auto maps = rank1_maps(f);
    for (const auto& p : sample_points(vertices, m, n, 6)) compare(n, maps, vertices, p, tally);
  }
  CHECK(tally.agree + tally.inconclusive == tally.total);
  CHECK(tally.inconclusive * 20 < tally.total);
}

TEST_CASE("property: matroid intersection membership agrees with common bases") {
  Tally tally;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
    const std::size_t m = n + static_cast<std::size_t>(uniform_int(0, 6 - static_cast<long>(n)));
    const auto v = random_family(n, m);
    const auto w = random_family(n, m);
    const auto vertices = characteristic_vectors(enumerate_common_bases(v, w), m);
    const auto maps = matroid_intersection_maps(v, w);
    for (const auto& p : sample_points(vertices, m, n, 6)) compare(2 * n, maps, vertices, p, tally);
  }
  CHECK(tally.agree + tally.inconclusive == tally.total);
  CHECK(tally.inconclusive * 20 < tally.total);
}

TEST_CASE("property: membership is invariant under permuting maps with exponents") {
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2;
    const std::size_t m = 4;
    const auto f = random_family(n, m);
    const auto vertices = characteristic_vectors(enumerate_bases(f), m);
    const auto maps = rank1_maps(f);
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng());
    std::vector<RationalMat> pm;
    for (auto j : perm) pm.push_back(maps[j]);
    for (const auto& p : sample_points(vertices, m, n, 4)) {
      std::vector<Rational> pp;
      for (auto j : perm) pp.push_back(p[j]);
      CHECK(bl_membership(n, maps, p).verdict == bl_membership(n, pm, pp).verdict);
    }
  }
}
