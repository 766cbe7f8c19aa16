#include "blscale/cli.hpp"

#include <algorithm>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "blscale/bl.hpp"
#include "blscale/error.hpp"
#include "blscale/feasibility.hpp"
#include "blscale/io.hpp"
#include "blscale/polytope.hpp"

namespace blscale::cli {

namespace {

using io::Json;

struct Config {
  double eps = 0.01;
  std::optional<std::size_t> max_steps;
  std::optional<double> g_target;
  std::optional<double> ds_target;
  std::string format = "json";
  bool trace = false;
  bool oracle = false;
  bool factors = false;
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;
  unsigned precision_bits = 0;
  std::string method = "operator";
  std::string p;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string plain(const Json& v) { return v.is_string() ? v.get<std::string>() : io::dump(v); }

void emit(const Json& report, const Config& cfg, std::ostream& out) {
  if (cfg.format == "json") {
    out << io::dump(report) << '\n';
  } else if (cfg.format == "human") {
    for (auto it = report.begin(); it != report.end(); ++it) out << it.key() << ": " << plain(it.value()) << '\n';
  } else {
    out << "key,value\n";
    for (auto it = report.begin(); it != report.end(); ++it)
      out << csv_field(it.key()) << ',' << csv_field(plain(it.value())) << '\n';
  }
}

Json witness_fields(const FeasibilityReport& r) {
  Json j;
  if (r.witness) {
    j["witness"] = io::columns(*r.witness);
    j["lhs"] = io::rational(Rational(static_cast<unsigned long>(r.lhs_dim)));
    j["rhs"] = io::rational(r.rhs_value);
  }
  if (r.scaling_condition) {
    j["weighted_dims"] = r.scaling_condition->weighted_dims.get_str();
    j["target"] = r.scaling_condition->target.get_str();
  }
  return j;
}

void merge(Json& into, const Json& from) {
  if (!from.is_object()) return;
  for (auto it = from.begin(); it != from.end(); ++it) into[it.key()] = it.value();
}

BLDatum load_datum(const std::string& path) { return io::datum_from_json(io::parse_json(io::read_file(path))); }

VectorFamily load_family(const std::string& path) {
  return io::family_from_json(io::parse_json(io::read_file(path)));
}

FeasibilityOptions feasibility_options(const Config& cfg) {
  FeasibilityOptions o;
  if (cfg.max_steps) o.budget = *cfg.max_steps;
  return o;
}

int cmd_feasible(const std::string& path, const Config& cfg, std::ostream& out) {
  const BLDatum datum = load_datum(path);
  const auto r = feasibility(datum, feasibility_options(cfg));
  Json j;
  j["command"] = "feasible";
  j["verdict"] = to_string(r.verdict);
  j["stage"] = r.stage;
  merge(j, witness_fields(r));
  j["scaling_steps"] = r.scaling_steps;
  j["diagnostics"] = r.diagnostics;
  emit(j, cfg, out);
  switch (r.verdict) {
    case FeasibilityVerdict::Feasible:
      return kExitOk;
    case FeasibilityVerdict::Infeasible:
      return kExitNegative;
    case FeasibilityVerdict::Inconclusive:
      break;
  }
  return kExitInconclusive;
}

int cmd_constant(const std::string& path, const Config& cfg, std::ostream& out) {
  const BLDatum datum = load_datum(path);
  BLConstantOptions o;
  if (cfg.method == "datum") {
    o.method = BLMethod::DatumScaling;
  } else if (cfg.method != "operator") {
    throw ParseError("--method must be operator or datum");
  }
  o.precision_bits = cfg.precision_bits;
  o.max_steps = cfg.max_steps;
  o.ds_target = cfg.ds_target;
  o.g_target = cfg.g_target;
  const auto r = bl_constant(datum, cfg.eps, o);
  Json j;
  j["command"] = "constant";
  j["status"] = to_string(r.status);
  j["value"] = io::real(r.value);
  j["log_value"] = io::real(r.log_value);
  j["reverse_value"] = io::real(r.reverse_value);
  j["eps"] = cfg.eps;
  j["method"] = to_string(r.method);
  j["steps"] = r.steps;
  j["final_distance"] = io::real(r.final_distance);
  const auto bound = bl_upper_bound(datum);
  j["upper_bound"] = io::real(bound.value);
  j["log_upper_bound"] = io::real(bound.log_value);
  j["bound_source"] = bound.source;
  j["diagnostic"] = r.diagnostic;
  if (cfg.trace) {
    if (r.operator_trace) j["ds_history"] = io::real_list(r.operator_trace->ds_history);
    if (r.datum_trace) j["g_history"] = io::real_list(r.datum_trace->g_history);
  }
  emit(j, cfg, out);
  switch (r.status) {
    case BLStatus::Finite:
      return kExitOk;
    case BLStatus::Infinite:
      return kExitNegative;
    case BLStatus::Inconclusive:
      break;
  }
  return kExitInconclusive;
}

int cmd_scale(const std::string& path, const Config& cfg, std::ostream& out) {
  const BLDatum datum = load_datum(path);
  const bool csv = cfg.format == "csv";
  const bool human = cfg.format == "human";
  if (csv) out << "step,g" << (cfg.trace ? ",bl_estimate" : "") << ",event\n";

  auto final_row = [&](const Json& j) {
    if (csv) {
      std::string event = plain(j["status"]);
      if (!plain(j["diagnostic"]).empty()) event += ": " + plain(j["diagnostic"]);
      out << ',' << (cfg.trace ? "," : "") << ',' << csv_field(event) << '\n';
    } else if (human) {
      for (auto it = j.begin(); it != j.end(); ++it) out << it.key() << ": " << plain(it.value()) << '\n';
    } else {
      out << io::dump(j) << '\n';
    }
  };

  const auto v = validate(datum);
  if (!v.ok) {
    Json j;
    j["status"] = "infeasible";
    j["diagnostic"] = "scaling condition fails: sum c_j n_j = " + v.weighted_dims.get_str() +
                      " but d n = " + v.target.get_str();
    final_row(j);
    return kExitNegative;
  }

  BLScalingOptions so;
  so.g_target = cfg.g_target.value_or(1e-8);
  so.max_steps = cfg.max_steps.value_or(
      static_cast<std::size_t>(std::min<std::uint64_t>(bl_scaling_budget(datum, so.g_target), 20000)));
  so.checkpoint_every = cfg.trace ? 1 : 0;
  const auto t = run_bl_scaling(datum.real(), so);

  std::vector<std::optional<double>> est(t.g_history.size());
  for (const auto& [step, value] : t.bl_estimates)
    if (step < est.size()) est[step] = value;
  for (std::size_t i = 0; i < t.g_history.size(); ++i) {
    if (csv) {
      out << i << ',' << io::format_double(t.g_history[i]);
      if (cfg.trace) out << ',' << (est[i] ? io::format_double(*est[i]) : "");
      out << ",\n";
      continue;
    }
    Json row;
    row["step"] = i;
    row["g"] = io::real(t.g_history[i]);
    if (cfg.trace && est[i]) row["bl_estimate"] = io::real(*est[i]);
    if (human) {
      out << "step " << i << ": g = " << io::format_double(t.g_history[i]);
      if (cfg.trace && est[i]) out << ", bl_estimate = " << io::format_double(*est[i]);
      out << '\n';
    } else {
      out << io::dump(row) << '\n';
    }
  }

  Json j;
  j["status"] = to_string(t.status);
  j["steps"] = t.steps;
  j["final_g"] = io::real(t.final_g());
  j["bl_estimate"] = io::real(std::exp(t.log_bl_estimate()));
  j["diagnostic"] = t.diagnostic;
  if (t.status == BLScalingStatus::Singular) {
    if (t.singular_step) j["singular_step"] = *t.singular_step;
    if (t.singular_map) j["singular_map"] = *t.singular_map;
  }
  if (cfg.factors && !csv) {
    j["right"] = io::real_matrix(t.right);
    Json left = Json::array();
    for (const auto& l : t.left) left.push_back(io::real_matrix(l));
    j["left"] = std::move(left);
  }
  final_row(j);
  switch (t.status) {
    case BLScalingStatus::Converged:
      return kExitOk;
    case BLScalingStatus::Singular:
      return kExitNegative;
    default:
      return kExitInconclusive;
  }
}

int cmd_capacity(const std::string& path, const Config& cfg, std::ostream& out) {
  const CPOperator op = io::operator_from_json(io::parse_json(io::read_file(path)));
  CapacityOptions o;
  o.max_steps = cfg.max_steps;
  o.ds_target = cfg.ds_target;
  const auto c = capacity_estimate(op, cfg.eps, o);
  const auto rank = rank_report(op, cfg.max_steps.value_or(4000));
  Json j;
  j["command"] = "capacity";
  j["status"] = to_string(c.status);
  j["value"] = io::real(c.value);
  j["log_value"] = io::real(c.log_value);
  j["eps"] = cfg.eps;
  j["rank_nondecreasing"] = to_string(rank.verdict);
  j["steps"] = c.trace.steps;
  j["final_ds"] = io::real(c.trace.final_ds());
  j["diagnostic"] = c.diagnostic;
  if (cfg.trace) j["ds_history"] = io::real_list(c.trace.ds_history);
  emit(j, cfg, out);
  switch (c.status) {
    case CapacityStatus::Positive:
      return kExitOk;
    case CapacityStatus::Zero:
      return kExitNegative;
    case CapacityStatus::NonConvergence:
      break;
  }
  return kExitInconclusive;
}

Json index_sets(const std::vector<IndexSet>& sets) {
  Json j = Json::array();
  for (const auto& s : sets) j.push_back(s);
  return j;
}

int cmd_polytope(bool matroid, const std::vector<std::string>& files, const Config& cfg,
                 std::ostream& out) {
  if (cfg.p.empty()) throw ParseError("--p is required for polytope queries");
  const auto p = io::parse_rational_list(cfg.p);
  const VectorFamily v = load_family(files.at(0));
  std::optional<VectorFamily> w;
  if (matroid) w = load_family(files.at(1));
  const auto maps = matroid ? matroid_intersection_maps(v, *w) : rank1_maps(v);
  const std::size_t n = matroid ? 2 * v.n : v.n;
  if (p.size() != v.m()) {
    throw ParseError("--p has " + std::to_string(p.size()) + " entries, expected " + std::to_string(v.m()));
  }
  const auto r = bl_membership(n, maps, p, feasibility_options(cfg));

  Json j;
  j["command"] = matroid ? "polytope matroid" : "polytope rank1";
  j["p"] = io::rational_list(p);
  j["verdict"] = to_string(r.verdict);
  j["kept"] = r.kept;
  if (r.report) {
    j["stage"] = r.report->stage;
    merge(j, witness_fields(*r.report));
  }
  j["reason"] = r.reason;
  if (cfg.oracle) {
    const auto bases = matroid ? enumerate_common_bases(v, *w) : enumerate_bases(v);
    const auto h = hull_membership_exact(characteristic_vectors(bases, v.m()), p);
    Json o;
    o["verdict"] = to_string(h.verdict);
    o["bases"] = index_sets(bases);
    if (h.inside()) o["weights"] = io::rational_list(h.weights);
    if (h.separator) o["separator"] = io::rational_list(*h.separator);
    j["oracle"] = std::move(o);
    if (r.verdict == Membership::Inconclusive) {
      j["agree"] = nullptr;
    } else {
      j["agree"] = r.verdict == h.verdict;
    }
  }
  emit(j, cfg, out);
  switch (r.verdict) {
    case Membership::Inside:
      return kExitOk;
    case Membership::Outside:
      return kExitNegative;
    case Membership::Inconclusive:
      break;
  }
  return kExitInconclusive;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Brascamp-Lieb constants, feasibility and operator scaling", "blscale"};
  app.require_subcommand(1);
  Config cfg;
  double max_steps = 0;
  double g_target = 0, ds_target = 0;
  std::uint64_t seed = 0;
  app.add_option("--eps", cfg.eps, "accuracy, 0 < eps < 1 (default 0.01)");
  auto* ms = app.add_option("--max-steps", max_steps, "step budget override");
  auto* gt = app.add_option("--g-target", g_target, "g threshold for datum scaling");
  auto* dt = app.add_option("--ds-target", ds_target, "ds threshold for operator scaling");
  app.add_option("--format", cfg.format, "json, csv or human")->check(CLI::IsMember({"json", "csv", "human"}));
  app.add_flag("--trace", cfg.trace, "include iteration histories");
  app.add_flag("--oracle", cfg.oracle, "also run the brute-force polytope oracle");
  app.add_option("--threads", cfg.threads, "Kraus-sum threads (default 1)");
  auto* sd = app.add_option("--seed", seed, "seed for randomized steps (echoed; current steps are deterministic)");
  app.add_option("--precision-bits", cfg.precision_bits, "run the operator route in software floats");
  app.add_option("--method", cfg.method, "operator or datum");
  app.add_option("--p", cfg.p, "exponents, e.g. 2/3,2/3,2/3");

  std::string datum_path;
  std::vector<std::string> family_paths;
  auto* feasible = app.add_subcommand("feasible", "decide BL < inf with an exact witness");
  feasible->add_option("datum", datum_path)->required();
  auto* constant = app.add_subcommand("constant", "estimate the BL constant");
  constant->add_option("datum", datum_path)->required();
  auto* scale = app.add_subcommand("scale", "trace Algorithm 1 on a datum");
  scale->add_option("datum", datum_path)->required();
  scale->add_flag("--factors", cfg.factors, "print the accumulated scaling matrices");
  auto* capacity = app.add_subcommand("capacity", "estimate the capacity of an operator");
  capacity->add_option("operator", datum_path)->required();
  auto* polytope = app.add_subcommand("polytope", "BL polytope membership");
  polytope->require_subcommand(1);
  auto* rank1 = polytope->add_subcommand("rank1", "rank-one datum from a vector family");
  rank1->add_option("family", family_paths)->required()->expected(1);
  auto* matroid = polytope->add_subcommand("matroid", "matroid intersection datum from two families");
  matroid->add_option("families", family_paths)->required()->expected(2);
  for (auto* s : {feasible, constant, scale, capacity, polytope, rank1, matroid}) s->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  if (!(cfg.eps > 0 && cfg.eps < 1)) {
    err << "error: --eps must lie in (0, 1)\n";
    return kExitInputError;
  }
  if (ms->count()) {
    if (!(max_steps >= 0) || max_steps != std::floor(max_steps)) {
      err << "error: --max-steps must be a nonnegative integer\n";
      return kExitInputError;
    }
    cfg.max_steps = static_cast<std::size_t>(max_steps);
  }
  for (auto [opt, value, slot] : {std::tuple{gt, g_target, &cfg.g_target}, std::tuple{dt, ds_target, &cfg.ds_target}}) {
    if (!opt->count()) continue;
    if (!(value > 0)) {
      err << "error: targets must be positive\n";
      return kExitInputError;
    }
    *slot = value;
  }
  if (sd->count()) cfg.seed = seed;
  if (cfg.threads < 1) {
    err << "error: --threads must be at least 1\n";
    return kExitInputError;
  }
  set_kraus_threads(cfg.threads);

  try {
    if (feasible->parsed()) return cmd_feasible(datum_path, cfg, out);
    if (constant->parsed()) return cmd_constant(datum_path, cfg, out);
    if (scale->parsed()) return cmd_scale(datum_path, cfg, out);
    if (capacity->parsed()) return cmd_capacity(datum_path, cfg, out);
    return cmd_polytope(matroid->parsed(), family_paths, cfg, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace blscale::cli
