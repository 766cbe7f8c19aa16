// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "blscale/bl.hpp"
#include "blscale/cli.hpp"
#include "blscale/feasibility.hpp"
#include "blscale/io.hpp"
#include "blscale/polytope.hpp"
#include "fixtures.hpp"
#include "support.hpp"

using namespace blscale;
using namespace testing_support;
using io::Json;

namespace {

const std::string kData = BLSCALE_DATA_DIR;
constexpr double kEps = 0.01;

// Tolerances pinned by the criteria.
constexpr double kLwTol = 0.01;
constexpr double kLwSeconds = 10;
constexpr double kGeometricTol = 0.02;
constexpr double kBridgeTol = 0.05;
constexpr double kEmbeddingTol = 0.05;
constexpr double kDualityTol = 0.05;
constexpr double kInconclusiveRate = 0.05;
constexpr double kNormalizedFloor = 0.98;
constexpr double kNearOne = 0.02;
constexpr double kGeometricCheckTol = 1e-6;
constexpr double kDescentSlack = 2 * kEps;
constexpr double kDescentG = 1e-6;
constexpr double kPerturbation = 1e-8;
constexpr double kContinuityTol = 1e-3;

struct Shape {
  std::size_t n;
  std::vector<std::size_t> dims;
  Exponents e;
};

// n <= 4, m <= 5. Generic data of these shapes is simple, so geometric
// position is attained rather than only approached.
const std::vector<Shape>& geometric_shapes() {
  static const std::vector<Shape> s{
      {2, {1, 1}, Exponents({1, 1}, 1)},
      {2, {1, 1, 1}, Exponents({2, 2, 2}, 3)},
      {3, {2, 2, 2}, Exponents({1, 1, 1}, 2)},
      {3, {1, 1, 1, 2}, Exponents({2, 2, 2, 3}, 4)},
      {4, {2, 2, 2, 2}, Exponents({1, 1, 1, 1}, 2)},
      {4, {3, 3, 3, 3}, Exponents({1, 1, 1, 1}, 3)},
      {4, {1, 1, 1, 1, 2}, Exponents({2, 2, 2, 2, 2}, 3)},
  };
  return s;
}

// n <= 3, d <= 3.
const std::vector<Shape>& bridge_shapes() {
  static const std::vector<Shape> s{
      {2, {1, 1}, Exponents({1, 1}, 1)},
      {2, {1, 1, 1}, Exponents({2, 2, 2}, 3)},
      {3, {2, 2, 2}, Exponents({1, 1, 1}, 2)},
      {3, {1, 1, 1, 2}, Exponents({1, 1, 1, 3}, 3)},
      {2, {1, 1, 1, 1}, Exponents({1, 1, 1, 1}, 2)},
  };
  return s;
}

BLDatum random_feasible(const Shape& s) {
  for (;;) {
    auto d = fixtures::random_integer_datum(s.n, s.dims, s.e);
    if (feasibility(d).verdict == FeasibilityVerdict::Feasible) return d;
  }
}

CPOperator random_op(std::size_t n1, std::size_t n2, std::size_t m) {
  m = std::max(m, (std::max(n1, n2) + std::min(n1, n2) - 1) / std::min(n1, n2));
  std::vector<RealMat> k;
  for (std::size_t i = 0; i < m; ++i) k.push_back(random_mat(n2, n1));
  return CPOperator(std::move(k));
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Everything a run computes; `record` is the machine-readable part compared
// across runs, timings stay outside it.
struct Suite {
  Json record = Json::object();
  std::map<int, Outcome> outcome;
  double lw_seconds = 0;
  std::vector<std::pair<BLDatum, BLConstantResult>> constants;
  std::vector<BLDatum> feasible_battery;

  BLConstantResult constant(const BLDatum& d, double eps, const BLConstantOptions& o = {}) {
    auto r = bl_constant(d, eps, o);
    constants.emplace_back(d, r);
    return r;
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string cli_output(const std::vector<std::string>& args, int* code = nullptr) {
  std::ostringstream out, err;
  const int c = cli::run(args, out, err);
  if (code) *code = c;
  return out.str() + err.str();
}

void criterion_1(Suite& s) {
  const auto t0 = std::chrono::steady_clock::now();
  int code = -1;
  const auto out = cli_output({"constant", kData + "/loomis_whitney.json", "--eps", "0.01"}, &code);
  s.lw_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::istringstream lines(out);
  std::string line;
  std::getline(lines, line);
  const auto j = io::parse_json(line);
  const double v = j["value"].is_number() ? j["value"].get<double>() : NAN;
  s.record["c1"] = out;
  s.constants.emplace_back(fixtures::loomis_whitney(), bl_constant(fixtures::loomis_whitney(), kEps));
  s.outcome[1] = {code == 0 && std::fabs(v - 1) <= kLwTol && s.lw_seconds < kLwSeconds,
                  "Loomis-Whitney via CLI: value " + fmt("%.6f", v) + ", |value-1| <= 0.01, " +
                      fmt("%.3f", s.lw_seconds) + " s < 10 s"};
}

void criterion_2(Suite& s) {
  double worst = 0;
  int retries = 0;
  Json vals = Json::array();
  for (int i = 0; i < 20; ++i) {
    const auto& sh = geometric_shapes()[i % geometric_shapes().size()];
    for (;;) {
      const auto d = random_feasible(sh);
      const auto geo = BLDatum::from_real(fixtures::geometric_from(d));
      if (!is_geometric(geo.real(), kGeometricCheckTol).geometric) {
        if (++retries > 100) {
          worst = INFINITY;
          break;
        }
        continue;
      }
      const auto r = s.constant(geo, kEps);
      s.feasible_battery.push_back(geo);
      worst = std::max(worst, r.status == BLStatus::Finite ? std::fabs(r.value - 1) : INFINITY);
      vals.push_back(io::real(r.value));
      break;
    }
  }
  s.record["c2"] = vals;
  s.outcome[2] = {worst <= kGeometricTol,
                  "20 geometric data (n<=4, m<=5): max |BL-1| = " + fmt("%.2e", worst) + " <= 0.02 (" +
                      std::to_string(retries) + " non-geometric draws redrawn)"};
}

void criterion_3(Suite& s) {
  double worst = 0;
  Json vals = Json::array();
  for (int i = 0; i < 10; ++i) {
    const auto d = random_feasible(bridge_shapes()[i % bridge_shapes().size()]);
    s.feasible_battery.push_back(d);
    const auto cap = capacity_estimate(reduce_to_operator(d), kEps);
    const auto bl = s.constant(d, kEps, {.method = BLMethod::DatumScaling});
    const double prod = std::exp(cap.log_value + 2 * bl.log_value);
    const bool ok = cap.status == CapacityStatus::Positive && bl.status == BLStatus::Finite;
    worst = std::max(worst, ok ? std::fabs(prod - 1) : INFINITY);
    vals.push_back(io::real(prod));
  }
  s.record["c3"] = vals;
  s.outcome[3] = {worst <= kBridgeTol, "cap(T_B)*BL^2 on 10 feasible integer data (n<=3, d<=3): max |x-1| = " +
                                           fmt("%.2e", worst) + " <= 0.05"};
}

void criteria_4_5(Suite& s) {
  double worst_embed = 0, worst_dual = 0;
  Json vals = Json::array();
  int used = 0;
  for (int i = 0; used < 10; ++i) {
    const std::size_t n1 = 1 + i % 3;
    const std::size_t n2 = 1 + (i / 3) % 3;
    if (n1 == n2 && i % 2 == 0) continue;  // favor rectangular shapes
    const auto op = random_op(n1, n2, 2 + i % 2);
    const auto a = capacity_estimate(op, kEps);
    if (a.status != CapacityStatus::Positive) continue;
    ++used;
    const auto b = capacity_estimate(square_embed(op), kEps);
    const auto c = capacity_estimate(op.dual(), kEps);
    const bool ok = b.status == CapacityStatus::Positive && c.status == CapacityStatus::Positive;
    const double embed = std::exp(b.log_value / n1 - a.log_value);
    const double dual = std::exp(a.log_value / n2 - std::log(double(n2) / n1) - c.log_value / n1);
    worst_embed = std::max(worst_embed, ok ? std::fabs(embed - 1) : INFINITY);
    worst_dual = std::max(worst_dual, ok ? std::fabs(dual - 1) : INFINITY);
    vals.push_back({io::real(embed), io::real(dual)});
  }
  s.record["c4_5"] = vals;
  s.outcome[4] = {worst_embed <= kEmbeddingTol,
                  "square embedding cap(T~)^(1/n1) vs cap(T) on 10 operators: max rel dev " +
                      fmt("%.2e", worst_embed) + " <= 0.05"};
  s.outcome[5] = {worst_dual <= kDualityTol,
                  "duality cap(T)^(1/n2) vs (n2/n1) cap(T*)^(1/n1): max rel dev " + fmt("%.2e", worst_dual) +
                      " <= 0.05"};
}

std::vector<BLDatum> infeasible_battery() {
  using fixtures::rank_one;
  const auto left = VectorFamily::from_ints(2, {{1, 0}, {1, 0}, {0, 1}, {0, 1}});
  const auto right = VectorFamily::from_ints(2, {{1, 0}, {0, 1}, {1, 0}, {0, 1}});
  const auto e = VectorFamily::from_ints(2, {{1, 0}, {0, 1}});
  return {
      rank_one({{1, 0}, {1, 0}}, {1, 1}, 1),
      rank_one({{1, 0}, {1, 0}, {0, 1}}, {1, 1, 4}, 3),
      rank_one({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}}, {2, 2, 1, 1}, 2),
      rank_one({{1, 2}, {2, 4}, {1, 1}}, {2, 2, 2}, 3),
      rank_one({{1, 3}, {1, 3}, {2, -1}}, {1, 1, 4}, 3),
      BLDatum(3, {RationalMat{{1, 0, 0}, {0, 1, 0}}, RationalMat{{1, 0, 0}, {0, 1, 0}}, RationalMat{{1, 0, 0}}},
              Exponents({1, 1, 2}, 2)),
      BLDatum(2, {RationalMat{{1, 1}, {2, 2}}}, Exponents({1}, 1)),
      BLDatum(3, fixtures::loomis_whitney().maps(), Exponents({4, 1, 1}, 4)),
      matroid_intersection_datum(e, e, Exponents({3, 1}, 2)),
      matroid_intersection_datum(left, right, Exponents({3, 3, 1, 1}, 4)),
  };
}

void criterion_6(Suite& s) {
  int sound = 0;
  Json vals = Json::array();
  for (const auto& d : infeasible_battery()) {
    const auto r = feasibility(d);
    const bool ok = r.verdict == FeasibilityVerdict::Infeasible && r.witness &&
                    verify_witness(d, *r.witness).violated;
    sound += ok ? 1 : 0;
    vals.push_back({to_string(r.verdict), r.stage, r.witness ? io::columns(*r.witness) : Json()});
  }
  std::vector<BLDatum> feasible = s.feasible_battery;
  feasible.push_back(fixtures::loomis_whitney());
  feasible.push_back(fixtures::holder());
  feasible.push_back(fixtures::rank_one({{1, 0}, {0, 1}, {1, 1}}, {2, 2, 2}, 3));
  int false_infeasible = 0;
  for (const auto& d : feasible)
    false_infeasible += feasibility(d).verdict == FeasibilityVerdict::Infeasible ? 1 : 0;
  s.record["c6"] = vals;
  s.outcome[6] = {sound == 10 && false_infeasible == 0,
                  std::to_string(sound) + "/10 infeasible instances with exactly verified witnesses; " +
                      std::to_string(false_infeasible) + " false infeasible on " +
                      std::to_string(feasible.size()) + " feasible data"};
}

// All p with entries k/D, D <= 6, k >= 0, on Σ p_j = total.
std::vector<std::vector<Rational>> grid(std::size_t m, long total) {
  std::set<std::vector<Rational>> seen;
  std::vector<std::vector<Rational>> out;
  for (long den = 1; den <= 6; ++den) {
    std::vector<long> k(m, 0);
    std::function<void(std::size_t, long)> rec = [&](std::size_t j, long left) {
      if (j + 1 == m) {
        k[j] = left;
        std::vector<Rational> p;
        for (long x : k) {
          Rational q(x, den);
          q.canonicalize();
          p.push_back(q);
        }
        if (seen.insert(p).second) out.push_back(std::move(p));
        return;
      }
      for (long x = 0; x <= left; ++x) {
        k[j] = x;
        rec(j + 1, left - x);
      }
    };
    rec(0, total * den);
  }
  return out;
}

void criterion_7(Suite& s) {
  struct Family {
    std::string name;
    std::size_t n;
    std::vector<RationalMat> maps;
    std::vector<IndexSet> bases;
    std::size_t m;
  };
  const auto tri = VectorFamily::from_ints(2, {{1, 0}, {0, 1}, {1, 1}});
  const auto dup = VectorFamily::from_ints(2, {{1, 0}, {1, 0}, {0, 1}, {1, 1}});
  const auto cube = VectorFamily::from_ints(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}});
  const auto v = VectorFamily::from_ints(2, {{1, 0}, {0, 1}, {1, 1}});
  const auto w = VectorFamily::from_ints(2, {{0, 1}, {1, 0}, {1, 1}});
  const auto left = VectorFamily::from_ints(2, {{1, 0}, {1, 0}, {0, 1}, {0, 1}});
  const auto right = VectorFamily::from_ints(2, {{1, 0}, {0, 1}, {1, 0}, {0, 1}});
  const std::vector<Family> families{
      {"rank1 triangle", 2, rank1_maps(tri), enumerate_bases(tri), 3},
      {"rank1 with duplicate", 2, rank1_maps(dup), enumerate_bases(dup), 4},
      {"rank1 in R^3", 3, rank1_maps(cube), enumerate_bases(cube), 4},
      {"matroid 3 elements", 4, matroid_intersection_maps(v, w), enumerate_common_bases(v, w), 3},
      {"matroid K22", 4, matroid_intersection_maps(left, right), enumerate_common_bases(left, right), 4},
  };
  int total = 0, agree = 0, inconclusive = 0, disagree = 0;
  Json vals = Json::array();
  for (const auto& f : families) {
    const auto vertices = characteristic_vectors(f.bases, f.m);
    const long rank = static_cast<long>(f.n == 4 ? 2 : f.n);
    std::string verdicts;
    for (const auto& p : grid(f.m, rank)) {
      const auto hull = hull_membership_exact(vertices, p);
      const auto bl = bl_membership(f.n, f.maps, p);
      ++total;
      if (bl.verdict == Membership::Inconclusive) {
        ++inconclusive;
        verdicts += '?';
      } else if (bl.verdict == hull.verdict) {
        ++agree;
        verdicts += bl.inside() ? 'i' : 'o';
      } else {
        ++disagree;
        verdicts += '!';
      }
    }
    vals.push_back({f.name, verdicts});
  }
  s.record["c7"] = vals;
  const double rate = total ? double(inconclusive) / total : 1;
  s.outcome[7] = {disagree == 0 && rate < kInconclusiveRate,
                  "grid p=k/D (D<=6) over 5 families: " + std::to_string(total) + " queries, " +
                      std::to_string(agree) + " agree, " + std::to_string(disagree) + " disagree, inconclusive " +
                      fmt("%.2f%%", 100 * rate) + " < 5%"};
}

void criterion_9(Suite& s) {
  int ok = 0;
  double lowest = INFINITY;
  Json vals = Json::array();
  for (int i = 0; i < 10; ++i) {
    const auto raw = random_feasible(geometric_shapes()[i % geometric_shapes().size()]);
    const RealDatum normalized =
        i % 2 == 0 ? isotropy_normalize(raw.real()).datum : projection_normalize(raw.real()).datum;
    const auto d = BLDatum::from_real(normalized);
    s.feasible_battery.push_back(d);
    const auto c = normalized_lower_bound_check(d, 1e-9, kEps);
    s.constants.emplace_back(d, c.constant);
    const double v = c.constant.value;
    lowest = std::min(lowest, v);
    const bool near_one = std::fabs(v - 1) <= kNearOne;
    const bool geometric = is_geometric(d.real(), kGeometricCheckTol).geometric;
    ok += (c.constant.status == BLStatus::Finite && v >= kNormalizedFloor && (!near_one || geometric)) ? 1 : 0;
    vals.push_back(io::real(v));
  }
  s.record["c9"] = vals;
  s.outcome[9] = {ok == 10, std::to_string(ok) + "/10 normalized data with BL >= 0.98 (min " + fmt("%.4f", lowest) +
                                ") and near-1 only when geometric"};
}

void criterion_10(Suite& s) {
  int ok = 0;
  double worst_ratio = 0;
  Json vals = Json::array();
  for (int i = 0; i < 5; ++i) {
    const auto raw = random_feasible(geometric_shapes()[i % geometric_shapes().size()]);
    const RealDatum start = isotropy_normalize(raw.real()).datum;
    const auto start_datum = BLDatum::from_real(start);
    BLScalingOptions so;
    so.g_target = kDescentG;
    so.max_steps = static_cast<std::size_t>(
        std::min<std::uint64_t>(bl_scaling_budget(start_datum, kDescentG), 1000000));
    const auto full = run_bl_scaling(start, so);
    const double budget = static_cast<double>(bl_scaling_budget(start_datum, kDescentG));
    const bool reached = full.status == BLScalingStatus::Converged;
    worst_ratio = std::max(worst_ratio, full.steps / budget);

    // Independent estimates: the operator route on each checkpointed state.
    bool monotone = true;
    double prev = INFINITY;
    Json est = Json::array();
    for (std::size_t k = 0;; k = k == 0 ? 1 : 2 * k) {
      k = std::min(k, full.steps);
      BLScalingOptions step;
      step.max_steps = k;
      step.g_target = 0;
      step.stagnation_window = 0;
      const auto state = BLDatum::from_real(run_bl_scaling(start, step).final_datum);
      const double v = s.constant(state, kEps).value;
      monotone = monotone && v <= prev * (1 + kDescentSlack);
      prev = v;
      est.push_back({k, io::real(v)});
      if (k == full.steps) break;
    }
    ok += (reached && monotone && full.steps <= budget / 100) ? 1 : 0;
    vals.push_back(est);
  }
  s.record["c10"] = vals;
  s.outcome[10] = {ok == 5, std::to_string(ok) + "/5 normalized runs with non-increasing checkpoint BL (2 eps slack) "
                                                 "and g <= 1e-6 within " +
                                fmt("%.2e", worst_ratio) + " of the iteration budget"};
}

void criterion_11(Suite& s) {
  const auto lw = fixtures::loomis_whitney();
  const double base = s.constant(lw, 1e-4).value;
  double worst = 0;
  Json vals = Json::array();
  for (int trial = 0; trial < 5; ++trial) {
    RealDatum p = lw.real();
    for (auto& b : p.maps)
      for (auto& x : b.entries()) x += uniform(-kPerturbation, kPerturbation);
    const double v = s.constant(BLDatum::from_real(p), 1e-4).value;
    worst = std::max(worst, std::fabs(v / base - 1));
    vals.push_back(io::real(v));
  }
  s.record["c11"] = vals;
  s.outcome[11] = {worst <= kContinuityTol, "Loomis-Whitney entries perturbed by 1e-8: max relative change " +
                                                fmt("%.2e", worst) + " <= 1e-3"};
}

void criterion_8(Suite& s) {
  int finite = 0, violations = 0;
  for (const auto& [d, r] : s.constants) {
    if (r.status != BLStatus::Finite) continue;
    ++finite;
    if (r.log_value > bl_upper_bound(d).log_value + std::log1p(kEps)) ++violations;
  }
  s.outcome[8] = {finite > 0 && violations == 0,
                  std::to_string(finite) + " finite constants, " + std::to_string(violations) +
                      " above upper bound * (1+eps)"};
}

Suite run_suite() {
  rng().seed(20240917);
  Suite s;
  const std::vector<std::pair<const char*, void (*)(Suite&)>> steps{
      {"1", criterion_1},  {"2", criterion_2},   {"3", criterion_3},   {"4-5", criteria_4_5},
      {"9", criterion_9},  {"10", criterion_10}, {"11", criterion_11}, {"6", criterion_6},
      {"7", criterion_7},  {"8", criterion_8},
  };
  for (const auto& [name, f] : steps) {
    const auto t0 = std::chrono::steady_clock::now();
    f(s);
    std::fprintf(stderr, "  [criterion %s: %.1f s]\n", name,
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return s;
}

Outcome criterion_12(const Suite& first, const Suite& second) {
  const std::vector<std::vector<std::string>> runs{
      {"feasible", kData + "/loomis_whitney.json"},
      {"feasible", kData + "/duplicate_row.json"},
      {"constant", kData + "/loomis_whitney_scaled.json", "--trace"},
      {"constant", kData + "/skew_basis.json", "--method", "datum", "--trace"},
      {"scale", kData + "/loomis_whitney_scaled.json", "--trace", "--factors"},
      {"capacity", kData + "/pinching_operator.json", "--trace", "--threads", "4"},
      {"polytope", "matroid", kData + "/k22_left.json", kData + "/k22_right.json", "--p", "1/2,1/2,1/2,1/2",
       "--oracle"},
  };
  int same = 0;
  for (const auto& args : runs) same += cli_output(args) == cli_output(args) ? 1 : 0;
  set_kraus_threads(1);
  const bool suite_same = io::dump(first.record) == io::dump(second.record);
  return {suite_same && same == static_cast<int>(runs.size()),
          std::string("suite record ") + (suite_same ? "identical" : "differs") + " across two runs (" +
              std::to_string(io::dump(first.record).size()) + " bytes); " + std::to_string(same) + "/" +
              std::to_string(runs.size()) + " CLI invocations byte-identical"};
}

}  // namespace

int main() {
  const auto first = run_suite();
  const auto second = run_suite();
  auto outcome = first.outcome;
  outcome[12] = criterion_12(first, second);
  int failed = 0;
  for (const auto& [k, o] : outcome) {
    std::printf("criterion %2d %s: %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(outcome.size()) - failed, outcome.size());
  return failed;
}
