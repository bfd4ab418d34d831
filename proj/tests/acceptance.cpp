// Acceptance suite: one PASS/FAIL line per criterion, each under its own time limit.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "support.hpp"

using namespace areal;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> body;
};

std::string str(const Rational& r) { return to_fraction(r); }

Outcome group_orders() {
  std::ostringstream os;
  bool ok = true;
  for (const auto& spec : {RingSpec::prime_field(3), RingSpec::prime_field(5), RingSpec::prime_field(7),
                           RingSpec::galois_field(3, 2), RingSpec::mod_prime_power(3, 2),
                           RingSpec::mod_prime_power(3, 3), RingSpec::mod_prime_power(5, 2)}) {
    const auto n = enumerate_sl2(Ring(spec)).size();
    ok = ok && BigInt(n) == sl2_order(spec);
    os << spec.name() << '=' << n << ' ';
  }
  return {ok, os.str()};
}

Outcome transitivity() {
  std::ostringstream os;
  bool ok = true;
  for (std::uint32_t p : {3u, 5u}) {
    const Ring r(RingSpec::prime_field(p));
    const auto rep = transitivity_constant(r, enumerate_sl2(r));
    ok = ok && rep.holds() && rep.constant == p;
    os << r.spec().name() << " phi=" << (rep.constant ? std::to_string(*rep.constant) : "varies")
       << " |X|=" << rep.set_size << ' ';
  }
  return {ok, os.str()};
}

Outcome recovery() {
  std::ostringstream os;
  bool ok = true;
  const Ring r(RingSpec::prime_field(3));
  const auto group = enumerate_sl2(r);
  for (std::size_t k = 1; k <= 2; ++k) {
    const auto rep = recovery_check(r, full_plane(r), k, group);
    ok = ok && rep.holds() && rep.pairs_checked > 0;
    os << "k=" << k << " pairs=" << rep.pairs_checked << " failures=" << rep.failures << ' ';
  }
  return {ok, os.str()};
}

Outcome bad_tuples() {
  std::ostringstream os;
  bool ok = true;
  const std::vector<std::pair<RingSpec, std::size_t>> cases{
      {RingSpec::prime_field(3), 3}, {RingSpec::prime_field(5), 3}, {RingSpec::mod_prime_power(3, 2), 2}};
  for (const auto& [spec, max_k] : cases) {
    const Ring r(spec);
    const auto e = full_plane(r);
    for (std::size_t k = 1; k <= max_k; ++k) {
      const auto counts = count_bad_tuples(r, e, k);
      const auto naive = areal::testing::naive_level_counts(r, e, k);
      const auto rep = bad_tuple_bounds(r, e, k, counts);
      ok = ok && counts.per_level == naive && rep.holds(kBoundConstant);
      os << spec.name() << " k=" << k << " bad=" << counts.bad() << " C=" << str(rep.bad_constant);
      for (std::size_t m = 1; m < rep.level_constants.size(); ++m) os << " C" << m << '=' << str(rep.level_constants[m]);
      os << "; ";
    }
  }
  return {ok, os.str()};
}

// The sets of the flemma criterion: full plane plus 20 seeded subsets of size |R|.
std::vector<std::pair<std::string, PointSet>> flemma_sets(const Ring& r) {
  std::vector<std::pair<std::string, PointSet>> out;
  out.emplace_back("full-plane", full_plane(r));
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    out.emplace_back("subset seed " + std::to_string(seed), random_subset(r, r.size(), seed));
  return out;
}

Outcome moment_lift() {
  std::mt19937_64 g(20240601);
  std::uint64_t violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto size = std::uniform_int_distribution<std::size_t>(1, 200)(g);
    const auto k = std::uniform_int_distribution<std::size_t>(1, 4)(g);
    // Mix sparse and dense tables so the max term is exercised.
    const auto top = std::uniform_int_distribution<std::uint64_t>(0, t % 3 == 0 ? 3 : 1000)(g);
    std::vector<Rational> values;
    for (std::size_t i = 0; i < size; ++i) {
      const auto num = std::uniform_int_distribution<std::uint64_t>(0, top)(g);
      const auto den = std::uniform_int_distribution<std::uint64_t>(1, 7)(g);
      values.emplace_back(BigInt(num), BigInt(den));
    }
    violations += !moment_lift_check(values, k).holds;
  }
  std::uint64_t profiles = 0;
  for (std::uint32_t p : {3u, 5u}) {
    const Ring r(RingSpec::prime_field(p));
    const auto group = enumerate_sl2(r);
    for (const auto& [name, e] : flemma_sets(r)) {
      const auto profile = f_profile(r, e, group);
      for (std::size_t k = 1; k <= 2; ++k) {
        violations += !moment_lift_check(profile, k).holds;
        ++profiles;
      }
    }
  }
  return {violations == 0,
          "random tables=1000 f-profiles=" + std::to_string(profiles) + " violations=" + std::to_string(violations)};
}

Outcome flemma() {
  std::uint64_t checked = 0, failed = 0;
  for (std::uint32_t p : {3u, 5u}) {
    const Ring r(RingSpec::prime_field(p));
    const auto group = enumerate_sl2(r);
    for (const auto& [name, e] : flemma_sets(r))
      for (std::size_t k = 1; k <= 2; ++k) {
        ++checked;
        failed += !flemma_check(r, e, k, group).holds();
      }
  }
  return {failed == 0, "cases=" + std::to_string(checked) + " failures=" + std::to_string(failed)};
}

Outcome class_sizes_z9() {
  const Ring r(RingSpec::mod_prime_power(3, 2));
  const auto rep = mbad_class_size_check(r, 2);
  std::ostringstream os;
  for (std::size_t m = 0; m < rep.census.levels.size(); ++m) {
    const auto& lv = rep.census.levels[m];
    os << "m=" << m << " classes=" << lv.classes << " tuples=" << lv.tuples << " min=" << lv.min_class_size;
    if (m > 0) os << " C=" << str(rep.class_constants[m]);
    os << "; ";
  }
  return {rep.holds(), os.str()};
}

Outcome field_structure() {
  std::ostringstream os;
  bool ok = true;
  for (std::uint32_t p : {3u, 5u}) {
    const Ring r(RingSpec::prime_field(p));
    for (std::size_t k = 1; k <= 2; ++k) {
      const auto rep = mbad_class_size_check(r, k);
      const auto& good = rep.census.levels[0];
      ok = ok && rep.census.bad_classes() == 1 && rep.good_classes_exact() &&
           BigInt(good.classes) * sl2_order(r.spec()) == BigInt(good.tuples);
      os << r.spec().name() << " k=" << k << " good classes=" << good.classes
         << " bad classes=" << rep.census.bad_classes() << "; ";
    }
  }
  return {ok, os.str()};
}

Outcome sharpness() {
  std::ostringstream os;
  const Ring z9(RingSpec::mod_prime_power(3, 2));
  const auto e = mod_sharpness_set(z9);
  bool ok = e.size() == 27;
  os << "mod set |E|=" << e.size();
  for (std::size_t k = 1; k <= 2; ++k) {
    const auto rep = all_bad_check(z9, e, k);
    ok = ok && rep.holds();
    os << " k=" << k << " bad=" << rep.bad << '/' << rep.total;
  }
  const Ring f5(RingSpec::prime_field(5));
  const std::vector<std::vector<Elem>> radii_sets{{Elem{1}}, {Elem{1}, Elem{4}}, {Elem{1}, Elem{2}, Elem{3}, Elem{4}}};
  for (const auto& radii : radii_sets) {
    const auto u = union_circles(f5, radii);
    for (std::size_t k = 1; k <= 2; ++k) {
      const auto rep = rotation_orbit_check(f5, u, k);
      ok = ok && rep.holds();
      os << "; F_5 union(" << radii.size() << ") |E|=" << u.size() << " k=" << k << " classes=" << rep.classes
         << " min orbit=" << rep.min_orbit_size << '/' << rep.rotation_count;
    }
  }
  return {ok, os.str()};
}

Outcome nu_identities() {
  const Ring r(RingSpec::prime_field(3));
  const auto e = full_plane(r);
  const auto nu = nu_histogram(r, e);
  const auto rep = moment_identity_check(r, e, enumerate_sl2(r));
  const bool total_ok = BigInt(nu.total()) == BigInt(e.size()) * e.size();
  std::ostringstream os;
  os << "sum nu=" << nu.total() << " sum f^2=" << rep.sum_f_squared << " unit part=" << rep.unit_area_part
     << " collinear part=" << rep.collinear_part
     << " quadruples=" << (rep.quadruple_sum ? rep.quadruple_sum->str() : std::string("skipped"));
  return {total_ok && rep.holds() && rep.quadruple_sum.has_value(), os.str()};
}

Outcome determinism() {
  VerifyOptions one;
  one.threads = 1;
  VerifyOptions many;
  many.threads = std::max(2u, std::thread::hardware_concurrency());
  const auto a = verify_all(one);
  const auto b = verify_all(many);
  const bool same = a.report.dump() == b.report.dump();
  return {same && a.exit_code == b.exit_code,
          "threads 1 vs " + std::to_string(many.threads) + (same ? ": identical" : ": differ") +
              ", exit " + std::to_string(a.exit_code)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "group orders", 10, group_orders},
      {2, "transitivity constant", 30, transitivity},
      {3, "unique g recovery", 300, recovery},
      {4, "bad tuple counts", 300, bad_tuples},
      {5, "moment lift", 60, moment_lift},
      {6, "flemma chain", 600, flemma},
      {7, "class sizes over Z/9Z", 900, class_sizes_z9},
      {8, "field full-plane structure", 300, field_structure},
      {9, "sharpness constructions", 300, sharpness},
      {10, "nu identities", 60, nu_identities},
      {11, "thread determinism", 1800, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& ex) {
      out = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool pass = out.pass && in_time;
    failures += !pass;
    std::printf("%s %2d %s (%.2fs / %.0fs) %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                c.limit_seconds, out.detail.c_str(), in_time ? "" : " [time limit exceeded]");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
