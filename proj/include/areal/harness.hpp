#pragma once

// Declarative experiments, parameter sweeps and the full verification suite.
//
// Exit codes: 0 all checks pass, 1 some check failed, 2 invalid configuration,
// 3 enumeration budget exceeded. A failure takes precedence over a budget stop.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "areal/census.hpp"
#include "areal/constructions.hpp"
#include "areal/json_io.hpp"

namespace areal {

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitInvalidConfig = 2, kExitBudget = 3 };

inline constexpr std::size_t kMaxK = 16;

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{"census",    "nu",        "f-moments", "lemma-2.2",
                                              "lemma-2.3", "lemma-2.4", "lemma-3.1", "lemma-4.1",
                                              "lemma-4.2", "theorem-6.1", "sharpness"};
  return names;
}

enum class OutputFormat { json, csv };

struct ExperimentConfig {
  RingSpec ring;
  ConstructionSpec construction;
  std::size_t k = 1;
  std::vector<std::string> checks;
  std::uint64_t budget = kDefaultBudget;
  std::optional<std::string> output_path;  // stdout when absent
  OutputFormat format = OutputFormat::json;
  unsigned threads = 0;
};

namespace detail {

/// Accepts a nonnegative JSON integer or a decimal string.
inline std::uint64_t get_count(const Json& j, const char* key, const std::string& where) {
  const auto& v = j.at(key);
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.empty() || s.size() > 20 || s.find_first_not_of("0123456789") != std::string::npos)
      throw InvalidConfig(where + ": \"" + key + "\" must be a nonnegative integer");
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw InvalidConfig(where + ": \"" + key + "\" out of range");
    }
  }
  return get_uint(j, key, where);
}

inline void check_construction_fits(const RingSpec& ring, const ConstructionSpec& c) {
  if (c.kind == ConstructionKind::mod_sharpness && ring.family == RingFamily::galois_field)
    throw InvalidConfig("construction: mod-sharpness requires a mod-prime-power or prime-field ring");
}

}  // namespace detail

/// With require_checks = false the "checks" list may be absent (sweep bases).
inline ExperimentConfig experiment_from_json(const Json& j, bool require_checks = true) {
  if (!j.is_object()) throw InvalidConfig("config: expected an object");
  ExperimentConfig c;
  if (!j.contains("ring")) throw InvalidConfig("config: missing \"ring\"");
  c.ring = ring_spec_from_json(j.at("ring"));
  c.ring.validate();
  if (!j.contains("construction")) throw InvalidConfig("config: missing \"construction\"");
  c.construction = construction_from_json(j.at("construction"));
  detail::check_construction_fits(c.ring, c.construction);
  c.k = detail::get_uint(j, "k", "config");
  if (c.k < 1 || c.k > kMaxK) throw InvalidConfig("config: k must be in [1, " + std::to_string(kMaxK) + "]");
  if (j.contains("checks")) {
    if (!j.at("checks").is_array()) throw InvalidConfig("config: \"checks\" must be an array");
    for (const auto& name : j.at("checks")) {
      if (!name.is_string()) throw InvalidConfig("config: check names must be strings");
      const auto s = name.get<std::string>();
      const auto& known = known_checks();
      if (std::find(known.begin(), known.end(), s) == known.end())
        throw InvalidConfig("config: unknown check \"" + s + "\"");
      if (std::find(c.checks.begin(), c.checks.end(), s) != c.checks.end())
        throw InvalidConfig("config: duplicate check \"" + s + "\"");
      c.checks.push_back(s);
    }
  }
  if (require_checks && c.checks.empty()) throw InvalidConfig("config: \"checks\" must be nonempty");
  const bool sharpness = std::find(c.checks.begin(), c.checks.end(), "sharpness") != c.checks.end();
  if (sharpness && c.construction.kind != ConstructionKind::mod_sharpness &&
      c.construction.kind != ConstructionKind::circle && c.construction.kind != ConstructionKind::union_circles)
    throw InvalidConfig("config: the sharpness check needs a mod-sharpness, circle or union-circles construction");
  if (j.contains("budget")) c.budget = detail::get_count(j, "budget", "config");
  if (c.budget == 0) throw InvalidConfig("config: budget must be positive");
  if (j.contains("threads")) c.threads = detail::narrow32(detail::get_uint(j, "threads", "config"), "threads");
  if (j.contains("output")) {
    const auto& out = j.at("output");
    if (!out.is_object()) throw InvalidConfig("config: \"output\" must be an object");
    if (out.contains("path")) {
      if (!out.at("path").is_string()) throw InvalidConfig("config: output.path must be a string");
      c.output_path = out.at("path").get<std::string>();
    }
    if (out.contains("format")) {
      const auto f = out.at("format").is_string() ? out.at("format").get<std::string>() : "";
      if (f == "json")
        c.format = OutputFormat::json;
      else if (f == "csv")
        c.format = OutputFormat::csv;
      else
        throw InvalidConfig("config: output.format must be \"json\" or \"csv\"");
    }
  }
  return c;
}

inline Json to_json(const ExperimentConfig& c) {
  Json j;
  j["ring"] = to_json(c.ring);
  j["construction"] = to_json(c.construction);
  j["k"] = c.k;
  j["checks"] = c.checks;
  j["budget"] = dec(c.budget);
  return j;
}

// ----------------------------------------------------------------------------
// Report fragments

inline Json to_json(const Configuration& x) {
  Json j = Json::array();
  for (const auto& v : x.points()) j.push_back(to_json(v));
  return j;
}

inline Json rational_json(const Rational& v) {
  Json j;
  j["exact"] = to_fraction(v);
  j["decimal"] = to_fixed(v, 6);
  return j;
}

inline Json to_json(const BadTupleBoundReport& b) {
  Json j;
  Json per = Json::array();
  for (auto c : b.counts.per_level) per.push_back(dec(c));
  j["tuples_per_level"] = std::move(per);
  j["bad_tuples"] = dec(b.counts.bad());
  j["bad_bound_shape"] = dec(b.bad_bound);
  j["bad_constant"] = rational_json(b.bad_constant);
  Json levels = Json::array();
  for (std::size_t m = 1; m < b.level_bounds.size(); ++m) {
    Json lv;
    lv["m"] = m;
    lv["tuples"] = dec(b.counts.per_level[m]);
    lv["bound_shape"] = dec(b.level_bounds[m]);
    lv["constant"] = rational_json(b.level_constants[m]);
    levels.push_back(std::move(lv));
  }
  j["levels"] = std::move(levels);
  j["max_constant"] = dec(kBoundConstant);
  return j;
}

inline Json to_json(const FLemmaReport& f) {
  Json j;
  j["point_count"] = dec(f.point_count);
  j["tuples_squared"] = dec(f.tuples_squared);
  j["good_tuples"] = dec(f.good_tuples);
  j["good_classes"] = dec(f.good_classes);
  j["equivalent_good_pairs"] = dec(f.equivalent_good_pairs);
  j["classes"] = dec(f.classes);
  j["sum_f_power"] = dec(f.sum_f_power);
  j["cauchy_schwarz"] = {{"lhs", dec(f.good_tuples * f.good_tuples)},
                         {"rhs", dec(f.good_classes * f.equivalent_good_pairs)},
                         {"holds", f.cauchy_schwarz_holds}};
  j["pair_bound"] = {
      {"lhs", dec(f.equivalent_good_pairs)}, {"rhs", dec(f.sum_f_power)}, {"holds", f.pair_bound_holds}};
  j["chain"] = {{"lhs", dec(f.good_tuples * f.good_tuples)},
                {"rhs", dec(f.classes * f.sum_f_power)},
                {"holds", f.chain_holds}};
  return j;
}

inline Json to_json(const MomentLiftReport& m) {
  Json j;
  j["k"] = m.k;
  j["set_size"] = dec(m.set_size);
  j["A"] = to_fraction(m.mean);
  j["M"] = to_fraction(m.max);
  j["R"] = to_fraction(m.residual);
  j["c_k"] = dec(m.c_k);
  j["lhs"] = to_fraction(m.lhs);
  j["rhs"] = to_fraction(m.rhs);
  return j;
}

inline Json to_json(const TransitivityReport& t) {
  Json j;
  j["group_order"] = dec(t.group_order);
  j["orbit_size"] = dec(t.set_size);
  j["expected"] = to_fraction(t.expected);
  j["constant"] = t.constant ? Json(dec(*t.constant)) : Json(nullptr);
  if (t.counterexample) {
    const auto& [x, y, v] = *t.counterexample;
    j["counterexample"] = {{"x", to_json(x)}, {"y", to_json(y)}, {"phi", dec(v)}};
  }
  return j;
}

inline Json to_json(const MomentIdentityReport& m) {
  Json j;
  j["sum_f_squared"] = dec(m.sum_f_squared);
  j["sum_nu_squared"] = dec(m.sum_nu_squared);
  j["unit_area_part"] = dec(m.unit_area_part);
  j["collinear_part"] = dec(m.collinear_part);
  j["rhs"] = dec(m.unit_area_part + m.collinear_part);
  j["quadruple_sum"] = m.quadruple_sum ? Json(dec(*m.quadruple_sum)) : Json(nullptr);
  return j;
}

inline Json to_json(const MBadClassReport& r) {
  Json j;
  j["census"] = to_json(r.census);
  j["group_order"] = dec(r.group_order);
  Json levels = Json::array();
  for (std::size_t m = 0; m < r.census.levels.size(); ++m) {
    const auto& lv = r.census.levels[m];
    Json e;
    e["m"] = m;
    e["classes"] = dec(lv.classes);
    e["tuples"] = dec(lv.tuples);
    e["min_class_size"] = dec(lv.min_class_size);
    e["required_min_size"] = dec(r.required_min_size[m]);
    if (m > 0) {
      e["class_bound_shape"] = dec(r.class_bounds[m]);
      e["class_constant"] = rational_json(r.class_constants[m]);
    }
    levels.push_back(std::move(e));
  }
  j["levels"] = std::move(levels);
  j["good_classes_exact"] = r.good_classes_exact();
  j["min_sizes_hold"] = r.min_sizes_hold();
  j["class_bounds_hold"] = r.class_bounds_hold();
  j["single_bad_class_over_field"] = r.single_bad_class_over_field();
  j["max_constant"] = dec(kBoundConstant);
  return j;
}

inline Json to_json(const RecoveryReport& r) {
  Json j;
  j["pairs_checked"] = dec(r.pairs_checked);
  j["failures"] = dec(r.failures);
  if (r.counterexample) j["counterexample"] = {{"x", to_json(r.counterexample->first)}, {"y", to_json(r.counterexample->second)}};
  return j;
}

inline Json to_json(const RotationOrbitReport& r) {
  Json j;
  j["rotation_count"] = dec(r.rotation_count);
  j["rotation_closed"] = r.closed;
  j["min_orbit_size"] = dec(r.min_orbit_size);
  j["min_orbit_ok"] = r.min_orbit_ok();
  j["classes"] = dec(r.classes);
  j["tuples"] = dec(r.tuples);
  j["class_bound"] = {{"lhs", dec(BigInt(r.classes) * r.min_orbit_size)}, {"rhs", dec(r.tuples)}};
  return j;
}

inline Json to_json(const AllBadReport& r) {
  Json j;
  j["bad_tuples"] = dec(r.bad);
  j["total_tuples"] = dec(r.total);
  j["pairwise_non_unit"] = r.pairwise_non_unit;
  return j;
}

// ----------------------------------------------------------------------------
// Checks

using OrderFormula = std::function<BigInt(const RingSpec&)>;

/// Lazily computed shared inputs of the checks for one (ring, E, k).
class CheckContext {
 public:
  CheckContext(const RingSpec& spec, PointSet e, std::size_t k, EnumerationOptions opts,
               ConstructionKind kind = ConstructionKind::full_plane, OrderFormula order = sl2_order)
      : ring_(spec), e_(std::move(e)), k_(k), opts_(opts), kind_(kind), order_(std::move(order)) {}

  const Ring& ring() const { return ring_; }
  const PointSet& points() const { return e_; }
  std::size_t k() const { return k_; }
  const EnumerationOptions& options() const { return opts_; }
  ConstructionKind kind() const { return kind_; }
  const OrderFormula& order_formula() const { return order_; }

  const std::vector<SL2Elem>& group() {
    if (!group_) {
      charge("SL_2 enumeration", sat_pow(ring_.size(), 3), opts_);
      group_ = enumerate_sl2(ring_);
    }
    return *group_;
  }

  const CensusReport& census() {
    if (!census_) census_ = count_classes(ring_, e_, k_, opts_);
    return *census_;
  }

  const FProfile& profile() {
    if (!profile_) profile_ = f_profile(ring_, e_, group(), opts_);
    return *profile_;
  }

  const NuHistogram& nu() {
    if (!nu_) nu_ = nu_histogram(ring_, e_, opts_);
    return *nu_;
  }

  const std::optional<NuHistogram>& nu_if_computed() const { return nu_; }

 private:
  Ring ring_;
  PointSet e_;
  std::size_t k_;
  EnumerationOptions opts_;
  ConstructionKind kind_;
  OrderFormula order_;
  std::optional<std::vector<SL2Elem>> group_;
  std::optional<CensusReport> census_;
  std::optional<FProfile> profile_;
  std::optional<NuHistogram> nu_;
};

struct CheckOutcome {
  std::string name;
  bool pass = false;
  Json detail;
};

namespace checks {

inline CheckOutcome census(CheckContext& ctx) {
  const auto& c = ctx.census();
  const auto counts = count_bad_tuples(ctx.ring(), ctx.points(), ctx.k(), ctx.options());
  bool agree = true;
  BigInt sum = 0;
  for (std::size_t m = 0; m < c.levels.size(); ++m) {
    sum += c.levels[m].tuples;
    agree = agree && c.levels[m].tuples == counts.per_level[m];
  }
  Json d = to_json(c);
  d["levels_match_tuple_scan"] = agree;
  d["level_sum_matches_total"] = sum == c.total_tuples;
  return {"census", agree && sum == c.total_tuples, std::move(d)};
}

inline CheckOutcome nu(CheckContext& ctx) {
  const auto& h = ctx.nu();
  const auto pairs = count_classes(ctx.ring(), ctx.points(), 1, ctx.options());
  BigInt pair_sq = 0;
  for (const auto& lv : pairs.levels) pair_sq += lv.sum_sq_class_sizes;
  const BigInt n = ctx.points().size();
  Json d;
  Json counts = Json::object();
  for (std::size_t t = 0; t < h.counts.size(); ++t) counts[std::to_string(t)] = dec(h.counts[t]);
  d["nu"] = std::move(counts);
  d["sum_nu"] = dec(h.total());
  d["point_count_squared"] = dec(n * n);
  d["sum_nu_squared"] = dec(h.sum_squares());
  d["sum_pair_class_sizes_squared"] = dec(pair_sq);
  const bool pass = BigInt(h.total()) == n * n && h.sum_squares() == pair_sq;
  return {"nu", pass, std::move(d)};
}

inline CheckOutcome f_moments(CheckContext& ctx) {
  const auto& p = ctx.profile();
  const auto& group = ctx.group();
  const auto id = std::lower_bound(group.begin(), group.end(), SL2Elem::from_matrix(ctx.ring(), identity(ctx.ring())));
  const std::uint64_t f_id = p.f[static_cast<std::size_t>(id - group.begin())];
  const auto identity_report = moment_identity_check(ctx.ring(), ctx.points(), group, ctx.options());
  Json d = to_json(summarize(p, ctx.k()));
  d["group_order"] = dec(p.group_order());
  d["f_identity"] = dec(f_id);
  d["sum_f"] = dec(p.sum());
  d["sum_f_expected"] = dec(BigInt(ctx.points().size()) * ctx.points().size());
  d["moment_identity"] = to_json(identity_report);
  const bool pass = f_id == ctx.points().size() && p.max() <= ctx.points().size() && p.residual() >= 0 &&
                    identity_report.holds();
  return {"f-moments", pass, std::move(d)};
}

inline CheckOutcome recovery(CheckContext& ctx) {
  const auto rep = recovery_check(ctx.ring(), ctx.points(), ctx.k(), ctx.group(), ctx.options());
  return {"lemma-2.2", rep.holds(), to_json(rep)};
}

inline CheckOutcome bad_tuples(CheckContext& ctx) {
  const auto counts = count_bad_tuples(ctx.ring(), ctx.points(), ctx.k(), ctx.options());
  const auto& c = ctx.census();
  bool agree = true;
  for (std::size_t m = 0; m < c.levels.size(); ++m) agree = agree && c.levels[m].tuples == counts.per_level[m];
  const auto bounds = bad_tuple_bounds(ctx.ring(), ctx.points(), ctx.k(), counts);
  Json d = to_json(bounds);
  d["matches_census"] = agree;
  return {"lemma-2.3", agree && bounds.holds(), std::move(d)};
}

inline CheckOutcome flemma(CheckContext& ctx) {
  const auto rep = flemma_check(ctx.census(), ctx.profile());
  return {"lemma-2.4", rep.holds(), to_json(rep)};
}

inline CheckOutcome moment_lift(CheckContext& ctx) {
  const auto rep = moment_lift_check(ctx.profile(), ctx.k());
  return {"lemma-3.1", rep.holds, to_json(rep)};
}

inline CheckOutcome transitivity(CheckContext& ctx) {
  const auto rep = transitivity_constant(ctx.ring(), ctx.group(), ctx.options());
  return {"lemma-4.1", rep.holds(), to_json(rep)};
}

inline CheckOutcome group_order(CheckContext& ctx) {
  const BigInt formula = ctx.order_formula()(ctx.ring().spec());
  const BigInt enumerated = ctx.group().size();
  Json d;
  d["formula"] = dec(formula);
  d["enumerated"] = dec(enumerated);
  return {"lemma-4.2", formula == enumerated, std::move(d)};
}

/// Always over the full plane R^2, whatever the configured construction.
inline CheckOutcome class_sizes(CheckContext& ctx) {
  const auto census = ctx.kind() == ConstructionKind::full_plane
                          ? ctx.census()
                          : count_classes(ctx.ring(), full_plane_points(ctx.ring()), ctx.k(), ctx.options());
  const auto rep = mbad_class_size_check(ctx.ring(), census);
  Json d = to_json(rep);
  d["point_set"] = "full-plane";
  return {"theorem-6.1", rep.holds(), std::move(d)};
}

inline CheckOutcome sharpness(CheckContext& ctx) {
  Json d;
  if (ctx.kind() == ConstructionKind::mod_sharpness) {
    const auto rep = all_bad_check(ctx.ring(), ctx.points(), ctx.k(), ctx.options());
    d = to_json(rep);
    const auto& spec = ctx.ring().spec();
    const BigInt expected_size = ipow(BigInt(spec.p), 2 * spec.depth() - 1);
    d["point_count"] = dec(ctx.points().size());
    d["expected_point_count"] = dec(expected_size);
    d["construction"] = "mod-sharpness";
    return {"sharpness", rep.holds() && expected_size == ctx.points().size(), std::move(d)};
  }
  const auto rep = rotation_orbit_check(ctx.ring(), ctx.points(), ctx.k(), ctx.options());
  d = to_json(rep);
  d["construction"] = "rotation-closed";
  return {"sharpness", rep.holds(), std::move(d)};
}

using CheckFn = CheckOutcome (*)(CheckContext&);

inline CheckFn lookup(const std::string& name) {
  static const std::map<std::string, CheckFn> table{
      {"census", census},         {"nu", nu},                 {"f-moments", f_moments},
      {"lemma-2.2", recovery},    {"lemma-2.3", bad_tuples},  {"lemma-2.4", flemma},
      {"lemma-3.1", moment_lift}, {"lemma-4.1", transitivity}, {"lemma-4.2", group_order},
      {"theorem-6.1", class_sizes}, {"sharpness", sharpness}};
  const auto it = table.find(name);
  if (it == table.end()) throw InvalidConfig("unknown check \"" + name + "\"");
  return it->second;
}

}  // namespace checks

inline Json budget_json(const BudgetExceeded& e) {
  Json j;
  j["operation"] = e.what();
  j["required"] = dec(e.required());
  j["budget"] = dec(e.budget());
  return j;
}

// ----------------------------------------------------------------------------
// run

struct RunResult {
  int exit_code = kExitPass;
  Json report;
  std::optional<NuHistogram> nu;
  std::optional<PointSet> points;
};

/// Runs the configured checks in order. Stops at the first budget overrun.
inline RunResult run_experiment(const ExperimentConfig& config, OrderFormula order = sl2_order) {
  RunResult out;
  Json& rep = out.report;
  rep["config"] = to_json(config);
  const EnumerationOptions opts{config.budget, config.threads};
  const Ring ring(config.ring);
  PointSet e = build(ring, config.construction);
  rep["point_count"] = dec(e.size());
  out.points = e;
  CheckContext ctx(config.ring, std::move(e), config.k, opts, config.construction.kind, std::move(order));
  Json results = Json::array();
  bool failed = false;
  bool budget = false;
  for (const auto& name : config.checks) {
    try {
      auto outcome = checks::lookup(name)(ctx);
      failed = failed || !outcome.pass;
      Json entry;
      entry["check"] = outcome.name;
      entry["pass"] = outcome.pass;
      entry["detail"] = std::move(outcome.detail);
      results.push_back(std::move(entry));
    } catch (const BudgetExceeded& ex) {
      Json entry;
      entry["check"] = name;
      entry["pass"] = false;
      entry["budget_exceeded"] = budget_json(ex);
      results.push_back(std::move(entry));
      budget = true;
      break;
    }
  }
  rep["checks"] = std::move(results);
  out.exit_code = failed ? kExitCheckFailed : budget ? kExitBudget : kExitPass;
  rep["status"] = failed ? "fail" : budget ? "budget-exceeded" : "pass";
  out.nu = ctx.nu_if_computed();
  return out;
}

/// Flattens a JSON report to rows of (path, value); object keys and array indices
/// are joined with '.'.
inline void flatten_json(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [key, v] : j.items()) flatten_json(v, prefix.empty() ? key : prefix + "." + key, rows);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten_json(j[i], prefix + "." + std::to_string(i), rows);
  } else if (j.is_string()) {
    rows.emplace_back(prefix, j.get<std::string>());
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Report rows: check,quantity,value. The check column is "run" for run-level fields.
inline void write_report_csv(std::ostream& os, const Json& report) {
  os << "check,quantity,value\n";
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& [key, v] : report.items()) {
    if (key == "checks") continue;
    flatten_json(v, key, rows);
  }
  for (const auto& [path, value] : rows) os << "run," << csv_field(path) << ',' << csv_field(value) << '\n';
  for (const auto& entry : report.at("checks")) {
    rows.clear();
    for (const auto& [key, v] : entry.items())
      if (key != "check") flatten_json(v, key, rows);
    for (const auto& [path, value] : rows)
      os << csv_field(entry.at("check").get<std::string>()) << ',' << csv_field(path) << ',' << csv_field(value) << '\n';
  }
}

inline std::string sidecar_path(const std::string& path, const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  const std::string stem = dot != std::string::npos && (slash == std::string::npos || dot > slash) ? path.substr(0, dot) : path;
  return stem + suffix;
}

/// Writes the report (and, with an output path, the point set and nu histogram as
/// sidecar CSVs next to it). Returns false when a file cannot be written.
inline bool write_outputs(const ExperimentConfig& config, const RunResult& result, std::ostream& fallback) {
  auto emit = [&](std::ostream& os) {
    if (config.format == OutputFormat::json)
      os << result.report.dump(2) << '\n';
    else
      write_report_csv(os, result.report);
  };
  if (!config.output_path) {
    emit(fallback);
    return true;
  }
  std::ofstream main(*config.output_path);
  if (!main) return false;
  emit(main);
  if (result.points) {
    std::ofstream pts(sidecar_path(*config.output_path, ".points.csv"));
    if (!pts) return false;
    write_points_csv(pts, *result.points);
  }
  if (result.nu) {
    std::ofstream nu(sidecar_path(*config.output_path, ".nu.csv"));
    if (!nu) return false;
    write_nu_csv(nu, *result.nu);
  }
  return true;
}

// ----------------------------------------------------------------------------
// sweep

enum class SweepVariable { size, ell, k };

struct SweepConfig {
  ExperimentConfig base;
  SweepVariable variable = SweepVariable::size;
  std::vector<std::uint64_t> values;
  std::vector<std::uint64_t> seeds{0};
  std::optional<std::string> output_path;
};

inline SweepConfig sweep_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidConfig("sweep: expected an object");
  if (!j.contains("base")) throw InvalidConfig("sweep: missing \"base\"");
  SweepConfig s;
  s.base = experiment_from_json(j.at("base"), false);
  if (!j.contains("variable") || !j.at("variable").is_string()) throw InvalidConfig("sweep: missing \"variable\"");
  const auto var = j.at("variable").get<std::string>();
  if (var == "size")
    s.variable = SweepVariable::size;
  else if (var == "ell")
    s.variable = SweepVariable::ell;
  else if (var == "k")
    s.variable = SweepVariable::k;
  else
    throw InvalidConfig("sweep: variable must be \"size\", \"ell\" or \"k\"");
  auto read_list = [&](const char* key) {
    std::vector<std::uint64_t> out;
    if (!j.at(key).is_array()) throw InvalidConfig(std::string("sweep: \"") + key + "\" must be an array");
    for (const auto& v : j.at(key)) {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw InvalidConfig(std::string("sweep: \"") + key + "\" entries must be nonnegative integers");
      out.push_back(v.get<std::uint64_t>());
    }
    if (out.empty()) throw InvalidConfig(std::string("sweep: \"") + key + "\" must be nonempty");
    return out;
  };
  if (!j.contains("values")) throw InvalidConfig("sweep: missing \"values\"");
  s.values = read_list("values");
  if (j.contains("seeds")) s.seeds = read_list("seeds");
  if (s.variable == SweepVariable::ell && s.base.ring.family != RingFamily::mod_prime_power)
    throw InvalidConfig("sweep: variable \"ell\" needs a mod-prime-power ring");
  for (auto v : s.values) {
    if (s.variable == SweepVariable::k && (v < 1 || v > kMaxK)) throw InvalidConfig("sweep: k values must be in [1, 16]");
    if (s.variable == SweepVariable::ell) RingSpec::mod_prime_power(s.base.ring.p, detail::narrow32(v, "ell")).validate();
  }
  if (j.contains("output")) {
    const auto& out = j.at("output");
    if (!out.is_object() || (out.contains("path") && !out.at("path").is_string()))
      throw InvalidConfig("sweep: \"output\" must be an object with a string \"path\"");
    if (out.contains("path")) s.output_path = out.at("path").get<std::string>();
  }
  return s;
}

struct SweepRow {
  std::string variable;
  std::uint64_t value = 0;
  std::uint64_t seed = 0;
  std::uint64_t point_count = 0;
  std::uint64_t classes = 0;
  std::uint64_t plane_classes = 0;
  Rational proportion;
};

inline const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::size:
      return "size";
    case SweepVariable::ell:
      return "ell";
    case SweepVariable::k:
      return "k";
  }
  return "?";
}

/// One row per (value, seed), values outermost. Throws BudgetExceeded / InvalidConfig.
inline std::vector<SweepRow> sweep(const SweepConfig& s) {
  const EnumerationOptions opts{s.base.budget, s.base.threads};
  std::map<std::pair<std::string, std::size_t>, std::uint64_t> plane_cache;
  std::vector<SweepRow> rows;
  for (auto value : s.values) {
    for (auto seed : s.seeds) {
      ExperimentConfig c = s.base;
      switch (s.variable) {
        case SweepVariable::size:
          c.construction.kind = ConstructionKind::random_subset;
          c.construction.size = value;
          break;
        case SweepVariable::ell:
          c.ring = RingSpec::mod_prime_power(c.ring.p, static_cast<std::uint32_t>(value));
          break;
        case SweepVariable::k:
          c.k = value;
          break;
      }
      if (c.construction.kind == ConstructionKind::random_subset) c.construction.seed = seed;
      const Ring ring(c.ring);
      const PointSet e = build(ring, c.construction);
      const auto key = std::make_pair(c.ring.name(), c.k);
      if (!plane_cache.contains(key))
        plane_cache[key] = count_classes(ring, full_plane_points(ring), c.k, opts).total_classes;
      SweepRow row;
      row.variable = to_string(s.variable);
      row.value = value;
      row.seed = seed;
      row.point_count = e.size();
      row.classes = count_classes(ring, e, c.k, opts).total_classes;
      row.plane_classes = plane_cache[key];
      row.proportion = Rational(BigInt(row.classes), BigInt(row.plane_classes));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "variable,value,seed,point_count,classes,plane_classes,proportion\n";
  for (const auto& r : rows)
    os << r.variable << ',' << r.value << ',' << r.seed << ',' << r.point_count << ',' << r.classes << ','
       << r.plane_classes << ',' << to_fixed(r.proportion, 6) << '\n';
}

// ----------------------------------------------------------------------------
// verify-all

/// Per-item cost ceiling for the recovery scan inside verify-all; larger cells are
/// listed as skipped.
inline constexpr std::uint64_t kRecoveryScanLimit = 10'000'000;

inline constexpr std::size_t kVerifySeeds = 20;

struct VerifyOptions {
  std::uint64_t budget = kDefaultBudget;
  unsigned threads = 0;
  OrderFormula order_formula = sl2_order;
};

struct VerifyResult {
  int exit_code = kExitPass;
  Json report;
};

inline std::vector<RingSpec> verify_rings() {
  return {RingSpec::prime_field(3),        RingSpec::prime_field(5),        RingSpec::prime_field(7),
          RingSpec::galois_field(3, 2),    RingSpec::mod_prime_power(3, 2), RingSpec::mod_prime_power(3, 3),
          RingSpec::mod_prime_power(5, 2)};
}

namespace detail {

/// Runs or skips one verification item and records it. Items whose estimated cost
/// exceeds `limit` are skipped; items within the limit but over the budget are
/// budget failures.
class VerifyLedger {
 public:
  explicit VerifyLedger(std::uint64_t budget) : budget_(budget) {}

  template <class Fn>
  void item(Json& sink, Json head, std::uint64_t cost, std::uint64_t limit, Fn&& fn) {
    head["cost"] = dec(cost);
    if (cost > limit) {
      head["status"] = "skipped";
      ++skipped_;
    } else if (cost > budget_) {
      head["status"] = "budget-exceeded";
      ++budget_exceeded_;
    } else {
      try {
        CheckOutcome o = fn();
        head["status"] = o.pass ? "pass" : "fail";
        head["detail"] = std::move(o.detail);
        ++(o.pass ? passed_ : failed_);
      } catch (const BudgetExceeded& e) {
        head["status"] = "budget-exceeded";
        head["budget_exceeded"] = budget_json(e);
        ++budget_exceeded_;
      }
    }
    sink.push_back(std::move(head));
  }

  Json summary() const {
    Json j;
    j["passed"] = passed_;
    j["failed"] = failed_;
    j["skipped"] = skipped_;
    j["budget_exceeded"] = budget_exceeded_;
    return j;
  }

  int exit_code() const { return failed_ ? kExitCheckFailed : budget_exceeded_ ? kExitBudget : kExitPass; }

 private:
  std::uint64_t budget_;
  std::uint64_t passed_ = 0, failed_ = 0, skipped_ = 0, budget_exceeded_ = 0;
};

inline Json head(const char* check, std::optional<std::size_t> k, const char* point_set) {
  Json j;
  j["check"] = check;
  if (k) j["k"] = *k;
  j["point_set"] = point_set;
  return j;
}

}  // namespace detail

/// Every check over the matrix {F_3, F_5, F_7, F_9, Z/9Z, Z/27Z, Z/25Z} x {k = 1, 2, 3}.
/// The report is deterministic: no timings, no thread counts.
inline VerifyResult verify_all(const VerifyOptions& vo = {}) {
  const EnumerationOptions opts{vo.budget, vo.threads};
  detail::VerifyLedger ledger(vo.budget);
  Json rings = Json::array();
  for (const auto& spec : verify_rings()) {
    const Ring ring(spec);
    const std::uint64_t n = ring.size();
    const PointSet plane = full_plane_points(ring);
    const std::uint64_t order = static_cast<std::uint64_t>(sl2_order(spec));
    Json items = Json::array();

    // Group-level items; the plane context keeps the enumerated group for later items.
    CheckContext plane_ctx(spec, plane, 1, opts, ConstructionKind::full_plane, vo.order_formula);
    const std::uint64_t group_cost = sat_pow(n, 3);
    ledger.item(items, detail::head("lemma-4.2", std::nullopt, "none"), group_cost, kDefaultBudget,
                [&] { return checks::group_order(plane_ctx); });
    ledger.item(items, detail::head("lemma-4.1", std::nullopt, "unit-orbit"),
                sat_add(group_cost, sat_mul(order, n * n)), kDefaultBudget,
                [&] { return checks::transitivity(plane_ctx); });
    ledger.item(items, detail::head("f-moments", std::nullopt, "full-plane"),
                sat_add(group_cost, sat_mul(order, sat_add(n * n, n * n * n * n))), kDefaultBudget,
                [&] { return checks::f_moments(plane_ctx); });
    ledger.item(items, detail::head("nu", std::nullopt, "full-plane"), sat_mul(n * n, n * n), kDefaultBudget,
                [&] { return checks::nu(plane_ctx); });

    for (std::size_t k = 1; k <= 3; ++k) {
      CheckContext ctx(spec, plane, k, opts, ConstructionKind::full_plane, vo.order_formula);
      const std::uint64_t census_cost = tuple_count(plane.size(), k);
      const std::uint64_t profile_cost = sat_add(group_cost, sat_mul(order, n * n));
      ledger.item(items, detail::head("theorem-6.1", k, "full-plane"), census_cost, kDefaultBudget,
                  [&] { return checks::class_sizes(ctx); });
      ledger.item(items, detail::head("lemma-2.3", k, "full-plane"), sat_mul(census_cost, 2), kDefaultBudget,
                  [&] { return checks::bad_tuples(ctx); });
      ledger.item(items, detail::head("lemma-3.1", k, "full-plane"), profile_cost, kDefaultBudget,
                  [&] { return checks::moment_lift(ctx); });
      ledger.item(items, detail::head("lemma-2.4", k, "full-plane"), sat_add(census_cost, profile_cost),
                  kDefaultBudget, [&] { return checks::flemma(ctx); });

      // Recovery scan cost: every ordered pair of equivalent good tuples against the whole group.
      const std::uint64_t good_tuples_bound = census_cost;
      const std::uint64_t recovery = sat_add(census_cost, sat_mul(sat_mul(good_tuples_bound, order), order));
      ledger.item(items, detail::head("lemma-2.2", k, "full-plane"), recovery, kRecoveryScanLimit,
                  [&] { return checks::recovery(ctx); });

      // Seeded random subsets of size |R|.
      for (std::uint64_t seed = 0; seed < kVerifySeeds; ++seed) {
        Json h = detail::head("lemma-2.4", k, "random-subset");
        h["size"] = n;
        h["seed"] = seed;
        const std::uint64_t cost = sat_add(tuple_count(n, k), sat_add(group_cost, sat_mul(order, n)));
        ledger.item(items, std::move(h), cost, kDefaultBudget, [&] {
          CheckContext sub(spec, random_subset(ring, n, seed), k, opts, ConstructionKind::random_subset,
                           vo.order_formula);
          auto flemma = checks::flemma(sub);
          auto lift = checks::moment_lift(sub);
          CheckOutcome o{"lemma-2.4", flemma.pass && lift.pass, Json::object()};
          o.detail["flemma"] = std::move(flemma.detail);
          o.detail["moment_lift"] = std::move(lift.detail);
          return o;
        });
      }

      // Sharpness constructions.
      if (spec.family == RingFamily::mod_prime_power) {
        const PointSet e = mod_sharpness_set(ring);
        ledger.item(items, detail::head("sharpness", k, "mod-sharpness"), sat_mul(tuple_count(e.size(), k), 2),
                    kDefaultBudget, [&] {
                      CheckContext sc(spec, e, k, opts, ConstructionKind::mod_sharpness, vo.order_formula);
                      return checks::sharpness(sc);
                    });
      } else {
        std::vector<Elem> squares;
        for (auto a : ring.elements())
          if (a != ring.zero()) squares.push_back(ring.mul(a, a));
        std::sort(squares.begin(), squares.end());
        squares.erase(std::unique(squares.begin(), squares.end()), squares.end());
        const PointSet e = union_circles(ring, squares);
        const std::uint64_t rot = n + 1;  // |SO_2| <= q + 1
        ledger.item(items, detail::head("sharpness", k, "union-circles"),
                    sat_mul(tuple_count(e.size(), k), sat_add(rot, 1)), kDefaultBudget, [&] {
                      CheckContext sc(spec, e, k, opts, ConstructionKind::union_circles, vo.order_formula);
                      return checks::sharpness(sc);
                    });
      }
    }
    Json entry;
    entry["ring"] = to_json(spec);
    entry["name"] = spec.name();
    entry["items"] = std::move(items);
    rings.push_back(std::move(entry));
  }
  VerifyResult out;
  out.report["budget"] = dec(vo.budget);
  out.report["rings"] = std::move(rings);
  out.report["summary"] = ledger.summary();
  out.exit_code = ledger.exit_code();
  out.report["status"] = out.exit_code == kExitPass           ? "pass"
                         : out.exit_code == kExitCheckFailed ? "fail"
                                                               : "budget-exceeded";
  return out;
}

}  // namespace areal
