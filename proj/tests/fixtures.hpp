#pragma once

// Standard data used across suites and an independent Lieb-formula oracle.

#include <cmath>
#include <vector>

#include "blscale/bl_scaling.hpp"
#include "blscale/datum.hpp"
#include "blscale/eigen.hpp"
#include "support.hpp"

namespace fixtures {

using namespace blscale;

inline BLDatum loomis_whitney() {
  return BLDatum(3,
                 {RationalMat{{0, 1, 0}, {0, 0, 1}}, RationalMat{{1, 0, 0}, {0, 0, 1}},
                  RationalMat{{1, 0, 0}, {0, 1, 0}}},
                 Exponents({1, 1, 1}, 2));
}

inline BLDatum holder() {
  return BLDatum(1, {RationalMat{{1}}, RationalMat{{1}}}, Exponents({1, 1}, 2));
}

// Rank-one datum: B_j = v_jᵀ.
inline BLDatum rank_one(const std::vector<std::vector<long>>& vs, std::vector<std::int64_t> c,
                        std::int64_t d) {
  std::vector<RationalMat> maps;
  for (const auto& v : vs) {
    RationalMat b(1, v.size());
    for (std::size_t i = 0; i < v.size(); ++i) b(0, i) = v[i];
    maps.push_back(b);
  }
  return BLDatum(vs.front().size(), std::move(maps), Exponents(std::move(c), d));
}

// Random integer maps with the given row counts; exponents must satisfy the
// scaling condition for the datum to be valid.
inline BLDatum random_integer_datum(std::size_t n, const std::vector<std::size_t>& dims,
                                    Exponents e, long lo = -5, long hi = 5) {
  for (;;) {
    std::vector<RationalMat> maps;
    bool ok = true;
    for (auto k : dims) {
      maps.push_back(testing_support::random_int_mat(k, n, lo, hi));
      ok = ok && exact_rank(maps.back()) == k;
    }
    if (ok) return BLDatum(n, std::move(maps), e);
  }
}

// Drives a feasible datum to (float) geometric position.
inline RealDatum geometric_from(const BLDatum& d) {
  BLScalingOptions so;
  so.g_target = 1e-26;
  so.max_steps = 20000;
  so.stagnation_window = 0;
  return run_bl_scaling(d.real(), so).final_datum;
}

// log BL from Lieb's formula: ½ sup over X_j = exp(S_j) of
// Σ p_j log det X_j − log det Σ p_j B_jᵀ X_j B_j, by finite-difference
// gradient ascent. Independent of the scaling code.
inline double lieb_oracle_log_bl(const RealDatum& d, int iterations = 4000) {
  struct Coord {
    std::size_t map, i, j;
  };
  std::vector<Coord> coords;
  for (std::size_t k = 0; k < d.m(); ++k)
    for (std::size_t i = 0; i < d.map_dim(k); ++i)
      for (std::size_t j = i; j < d.map_dim(k); ++j) coords.push_back({k, i, j});

  auto f = [&](const std::vector<double>& s) {
    std::vector<RealMat> xs;
    for (std::size_t k = 0; k < d.m(); ++k) xs.emplace_back(d.map_dim(k), d.map_dim(k));
    double num = 0;
    for (std::size_t c = 0; c < coords.size(); ++c) {
      xs[coords[c].map](coords[c].i, coords[c].j) = s[c];
      xs[coords[c].map](coords[c].j, coords[c].i) = s[c];
      if (coords[c].i == coords[c].j) num += d.exponents.p_real(coords[c].map) * s[c];
    }
    RealMat sum(d.n, d.n);
    for (std::size_t k = 0; k < d.m(); ++k) {
      const RealMat x = spectral_apply(sym_eig(xs[k]), [](double v) { return std::exp(v); });
      sum += d.maps[k].transpose() * x * d.maps[k] * d.exponents.p_real(k);
    }
    return num - logdet(sum.symmetrized());
  };

  std::vector<double> s(coords.size(), 0.0);
  double fs = f(s);
  double step = 0.5;
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> g(s.size());
    double gn = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      auto sp = s, sm = s;
      sp[k] += 1e-6;
      sm[k] -= 1e-6;
      g[k] = (f(sp) - f(sm)) / 2e-6;
      gn += g[k] * g[k];
    }
    if (gn < 1e-20) break;
    step *= 2;
    for (;;) {
      auto t = s;
      for (std::size_t k = 0; k < s.size(); ++k) t[k] += step * g[k];
      const double ft = f(t);
      if (ft >= fs + 0.25 * step * gn) {
        s = t;
        fs = ft;
        break;
      }
      step *= 0.5;
      if (step < 1e-16) return 0.5 * fs;
    }
  }
  return 0.5 * fs;
}

}  // namespace fixtures
