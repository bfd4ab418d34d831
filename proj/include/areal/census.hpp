#pragma once

// The counting engine. Everything here is exact: counts are integers (BigInt
// where they can outgrow 64 bits) and averages are rationals.
//
// Tuple enumeration over E^{k+1} works from a precomputed |E| x |E| table of
// pairwise areas, so the inner loop is table lookups only. Work is split by the
// first point of the tuple; per-worker partial results are merged with sums,
// which makes every result independent of the thread count.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <variant>
#include <vector>

#include "areal/bigint.hpp"
#include "areal/configs.hpp"
#include "areal/error.hpp"
#include "areal/linalg2.hpp"
#include "areal/parallel.hpp"
#include "areal/point_set.hpp"
#include "areal/ring.hpp"

namespace areal {

inline constexpr std::uint64_t kDefaultBudget = 1'000'000'000;

/// Largest constant C accepted in the bad-tuple and bad-class bound shapes.
inline constexpr std::uint64_t kBoundConstant = 4;

struct EnumerationOptions {
  std::uint64_t budget = kDefaultBudget;  // maximum visits for one operation
  unsigned threads = 0;                   // 0: AREAL_THREADS or hardware concurrency
};

inline void charge(const std::string& what, std::uint64_t required, const EnumerationOptions& opts) {
  if (required > opts.budget) throw BudgetExceeded(what, required, opts.budget);
}

inline std::uint64_t tuple_count(std::size_t points, std::size_t k) {
  return sat_pow(points, static_cast<unsigned>(k + 1));
}

/// All pairwise areas perp_dot(E[i], E[j]) as 16-bit codes.
class PairAreaTable {
 public:
  PairAreaTable(const Ring& r, const PointSet& e)
      : m_(e.size()), n_(r.size()), depth_(r.spec().depth()), table_(m_ * m_) {
    const auto vals = r.valuation_table();
    valuation_.assign(vals.begin(), vals.end());
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < m_; ++j)
        table_[i * m_ + j] = static_cast<std::uint16_t>(perp_dot(r, e[i], e[j]).code);
  }

  std::size_t points() const { return m_; }
  std::uint32_t ring_size() const { return n_; }
  std::uint32_t depth() const { return depth_; }
  std::uint16_t area(std::size_t i, std::size_t j) const { return table_[i * m_ + j]; }
  const std::uint16_t* row(std::size_t i) const { return table_.data() + i * m_; }
  std::uint8_t valuation(std::uint16_t code) const { return valuation_[code]; }

 private:
  std::size_t m_;
  std::uint32_t n_;
  std::uint32_t depth_;
  std::vector<std::uint16_t> table_;
  std::vector<std::uint8_t> valuation_;
};

namespace detail {

/// Depth-first walk over all tuples with a fixed first point. At each leaf,
/// `areas` holds the tuple's pair areas in lexicographic pair order, `key` the
/// mixed-radix signature index (meaningful only when it fits in 64 bits) and
/// `level` the minimum valuation over all areas.
template <class OnTuple>
class TupleWalker {
 public:
  TupleWalker(const PairAreaTable& t, std::size_t npoints, OnTuple& on_tuple)
      : t_(t), npoints_(npoints), idx_(npoints), areas_(pair_count(npoints)), on_tuple_(on_tuple) {
    const std::size_t npairs = pair_count(npoints);
    weights_.assign(npairs, 0);
    std::uint64_t w = 1;
    for (std::size_t pos = npairs; pos-- > 0;) {
      weights_[pos] = w;
      w *= t.ring_size();  // wraps harmlessly when keys are not used
    }
    positions_.assign(npoints * npoints, 0);
    for (std::size_t i = 0; i < npoints; ++i)
      for (std::size_t j = i + 1; j < npoints; ++j) positions_[i * npoints + j] = pair_position(i, j, npoints);
  }

  void run(std::size_t first) {
    idx_[0] = first;
    descend(1, 0, static_cast<std::uint8_t>(t_.depth()));
  }

  std::span<const std::size_t> indices() const { return idx_; }
  std::span<const std::uint16_t> areas() const { return areas_; }

 private:
  void descend(std::size_t d, std::uint64_t key, std::uint8_t level) {
    const std::size_t m = t_.points();
    const bool leaf = d + 1 == npoints_;
    for (std::size_t i = 0; i < m; ++i) {
      idx_[d] = i;
      std::uint64_t k = key;
      std::uint8_t lv = level;
      for (std::size_t j = 0; j < d; ++j) {
        const std::uint16_t a = t_.area(idx_[j], i);
        const std::size_t pos = positions_[j * npoints_ + d];
        areas_[pos] = a;
        k += a * weights_[pos];
        lv = std::min(lv, t_.valuation(a));
      }
      if (leaf)
        on_tuple_(k, lv, *this);
      else
        descend(d + 1, k, lv);
    }
  }

  const PairAreaTable& t_;
  std::size_t npoints_;
  std::vector<std::size_t> idx_;
  std::vector<std::uint16_t> areas_;
  std::vector<std::uint64_t> weights_;
  std::vector<std::size_t> positions_;
  OnTuple& on_tuple_;
};

template <class OnTuple>
void walk_tuples(const PairAreaTable& t, std::size_t npoints, std::size_t first, OnTuple& on_tuple) {
  TupleWalker<OnTuple> w(t, npoints, on_tuple);
  w.run(first);
}

inline std::string encode_areas(std::size_t k, std::span<const std::uint16_t> areas) {
  std::string out;
  out.reserve(2 + 2 * areas.size());
  auto put = [&](std::uint32_t v) {
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>(v & 0xff));
  };
  put(static_cast<std::uint32_t>(k));
  for (auto a : areas) put(a);
  return out;
}

}  // namespace detail

/// Signature -> number of tuples of E^{k+1} realizing it.
///
/// Storage is a dense array when the signature space is small, a hash map keyed by
/// the mixed-radix index when that index fits in 64 bits, and otherwise a hash map
/// keyed by the AreaSignature byte encoding.
class ClassTally {
 public:
  using Dense = std::vector<std::uint64_t>;
  using Keyed = std::unordered_map<std::uint64_t, std::uint64_t>;
  using Encoded = std::unordered_map<std::string, std::uint64_t>;

  static constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 22;

  std::size_t k = 1;
  std::uint32_t ring_size = 0;
  std::variant<Dense, Keyed, Encoded> counts;

  std::uint64_t class_count() const {
    return std::visit(
        [](const auto& c) -> std::uint64_t {
          if constexpr (std::is_same_v<std::decay_t<decltype(c)>, Dense>)
            return static_cast<std::uint64_t>(std::count_if(c.begin(), c.end(), [](auto v) { return v != 0; }));
          else
            return c.size();
        },
        counts);
  }

  /// fn(span<const uint16_t> areas, uint64_t count) for every realized signature.
  template <class Fn>
  void for_each_class(Fn&& fn) const {
    const std::size_t npairs = pair_count(k + 1);
    std::vector<std::uint16_t> areas(npairs);
    auto decode_index = [&](std::uint64_t key) {
      for (std::size_t pos = npairs; pos-- > 0;) {
        areas[pos] = static_cast<std::uint16_t>(key % ring_size);
        key /= ring_size;
      }
    };
    if (const auto* dense = std::get_if<Dense>(&counts)) {
      for (std::uint64_t key = 0; key < dense->size(); ++key) {
        if ((*dense)[key] == 0) continue;
        decode_index(key);
        fn(std::span<const std::uint16_t>(areas), (*dense)[key]);
      }
    } else if (const auto* keyed = std::get_if<Keyed>(&counts)) {
      for (const auto& [key, c] : *keyed) {
        decode_index(key);
        fn(std::span<const std::uint16_t>(areas), c);
      }
    } else {
      for (const auto& [key, c] : std::get<Encoded>(counts)) {
        for (std::size_t pos = 0; pos < npairs; ++pos)
          areas[pos] = static_cast<std::uint16_t>((static_cast<unsigned char>(key[2 + 2 * pos]) << 8) |
                                                  static_cast<unsigned char>(key[3 + 2 * pos]));
        fn(std::span<const std::uint16_t>(areas), c);
      }
    }
  }
};

/// Distinct signatures of E^{k+1} with multiplicities.
inline ClassTally tally_signatures(const Ring& r, const PointSet& e, std::size_t k,
                                   const EnumerationOptions& opts = {}) {
  if (k < 1) throw InvalidArgument("k must be at least 1");
  charge("signature census", tuple_count(e.size(), k), opts);
  const std::size_t npoints = k + 1;
  const std::size_t npairs = pair_count(npoints);
  const std::uint64_t domain = sat_pow(r.size(), static_cast<unsigned>(npairs));
  ClassTally out;
  out.k = k;
  out.ring_size = r.size();
  if (e.empty()) {
    out.counts = ClassTally::Keyed{};
    return out;
  }
  const PairAreaTable table(r, e);
  const std::size_t m = e.size();

  auto run = [&]<class Store>(Store init, auto insert) {
    auto states = parallel_states<Store>(
        m, opts.threads, [&] { return init; },
        [&](std::size_t first, Store& store) {
          auto on_tuple = [&](std::uint64_t key, std::uint8_t, const auto& walker) {
            insert(store, key, walker);
          };
          detail::walk_tuples(table, npoints, first, on_tuple);
        });
    Store merged = std::move(states[0]);
    for (std::size_t s = 1; s < states.size(); ++s) {
      if constexpr (std::is_same_v<Store, ClassTally::Dense>) {
        for (std::size_t i = 0; i < merged.size(); ++i) merged[i] += states[s][i];
      } else {
        for (auto& [key, c] : states[s]) merged[key] += c;
      }
    }
    out.counts = std::move(merged);
  };

  if (domain <= ClassTally::kDenseLimit) {
    run(ClassTally::Dense(domain, 0), [](ClassTally::Dense& d, std::uint64_t key, const auto&) { ++d[key]; });
  } else if (domain != std::numeric_limits<std::uint64_t>::max()) {
    run(ClassTally::Keyed{}, [](ClassTally::Keyed& d, std::uint64_t key, const auto&) { ++d[key]; });
  } else {
    run(ClassTally::Encoded{}, [k](ClassTally::Encoded& d, std::uint64_t, const auto& walker) {
      ++d[detail::encode_areas(k, walker.areas())];
    });
  }
  return out;
}

struct LevelStats {
  std::uint64_t tuples = 0;
  std::uint64_t classes = 0;
  std::uint64_t min_class_size = 0;  // 0 when the level is empty
  std::uint64_t max_class_size = 0;
  BigInt sum_sq_class_sizes = 0;
};

struct NuHistogram {
  RingSpec ring;
  std::vector<std::uint64_t> counts;  // indexed by area code

  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }

  BigInt sum_squares() const {
    BigInt s = 0;
    for (auto c : counts) s += BigInt(c) * c;
    return s;
  }
};

/// f(g) = |{x in E : g x in E}| for every g of the group, in group order.
struct FProfile {
  std::vector<std::uint64_t> f;
  std::uint64_t point_count = 0;

  std::uint64_t group_order() const { return f.size(); }

  BigInt power_sum(unsigned exponent) const {
    BigInt s = 0;
    for (auto v : f) s += ipow(BigInt(v), exponent);
    return s;
  }

  BigInt sum() const { return power_sum(1); }
  BigInt sum_squares() const { return power_sum(2); }

  /// A: average of f over the group.
  Rational mean() const { return f.empty() ? Rational(0) : Rational(sum(), BigInt(f.size())); }

  /// M: maximum of f.
  std::uint64_t max() const { return f.empty() ? 0 : *std::max_element(f.begin(), f.end()); }

  /// R with sum f^2 = A^2 |S| + R.
  Rational residual() const {
    const Rational a = mean();
    return Rational(sum_squares()) - a * a * Rational(BigInt(f.size()));
  }
};

/// Summary of f used inside reports.
struct FMomentSummary {
  Rational mean;
  std::uint64_t max = 0;
  Rational residual;
  BigInt sum_squares;
  BigInt sum_power;  // sum f^{k+1}
};

inline FMomentSummary summarize(const FProfile& p, std::size_t k) {
  return FMomentSummary{p.mean(), p.max(), p.residual(), p.sum_squares(),
                        p.power_sum(static_cast<unsigned>(k + 1))};
}

struct CensusReport {
  RingSpec ring;
  std::size_t k = 1;
  std::uint64_t point_count = 0;
  BigInt total_tuples = 0;
  std::vector<LevelStats> levels;  // index m = badness level, 0..depth
  std::uint64_t total_classes = 0;
  std::optional<NuHistogram> nu;
  std::optional<FMomentSummary> f_moments;

  std::uint64_t good_tuples() const { return levels.empty() ? 0 : levels[0].tuples; }
  std::uint64_t good_classes() const { return levels.empty() ? 0 : levels[0].classes; }
  std::uint64_t bad_tuples() const {
    std::uint64_t s = 0;
    for (std::size_t m = 1; m < levels.size(); ++m) s += levels[m].tuples;
    return s;
  }
  std::uint64_t bad_classes() const {
    std::uint64_t s = 0;
    for (std::size_t m = 1; m < levels.size(); ++m) s += levels[m].classes;
    return s;
  }
};

inline CensusReport summarize(const Ring& r, const PointSet& e, const ClassTally& tally) {
  CensusReport rep;
  rep.ring = r.spec();
  rep.k = tally.k;
  rep.point_count = e.size();
  rep.total_tuples = ipow(BigInt(e.size()), static_cast<unsigned>(tally.k + 1));
  rep.levels.assign(r.spec().depth() + 1, LevelStats{});
  const auto vals = r.valuation_table();
  tally.for_each_class([&](std::span<const std::uint16_t> areas, std::uint64_t count) {
    std::uint32_t m = r.spec().depth();
    for (auto a : areas) m = std::min<std::uint32_t>(m, vals[a]);
    auto& lv = rep.levels[m];
    lv.tuples += count;
    lv.classes += 1;
    lv.min_class_size = lv.min_class_size == 0 ? count : std::min(lv.min_class_size, count);
    lv.max_class_size = std::max(lv.max_class_size, count);
    lv.sum_sq_class_sizes += BigInt(count) * count;
  });
  for (const auto& lv : rep.levels) rep.total_classes += lv.classes;
  return rep;
}

/// C_{k+1}(E) split by badness level.
inline CensusReport count_classes(const Ring& r, const PointSet& e, std::size_t k,
                                  const EnumerationOptions& opts = {}) {
  return summarize(r, e, tally_signatures(r, e, k, opts));
}

struct BadTupleCounts {
  std::vector<std::uint64_t> per_level;  // index m = badness level

  std::uint64_t good() const { return per_level.empty() ? 0 : per_level[0]; }
  std::uint64_t bad() const {
    std::uint64_t s = 0;
    for (std::size_t m = 1; m < per_level.size(); ++m) s += per_level[m];
    return s;
  }
};

/// Tuples of E^{k+1} at each badness level, from per-tuple minimum valuations.
inline BadTupleCounts count_bad_tuples(const Ring& r, const PointSet& e, std::size_t k,
                                       const EnumerationOptions& opts = {}) {
  if (k < 1) throw InvalidArgument("k must be at least 1");
  charge("bad-tuple count", tuple_count(e.size(), k), opts);
  const std::size_t levels = r.spec().depth() + 1;
  BadTupleCounts out{std::vector<std::uint64_t>(levels, 0)};
  if (e.empty()) return out;
  const PairAreaTable table(r, e);
  using Counts = std::vector<std::uint64_t>;
  auto states = parallel_states<Counts>(
      e.size(), opts.threads, [&] { return Counts(levels, 0); },
      [&](std::size_t first, Counts& counts) {
        auto on_tuple = [&](std::uint64_t, std::uint8_t level, const auto&) { ++counts[level]; };
        detail::walk_tuples(table, k + 1, first, on_tuple);
      });
  for (const auto& s : states)
    for (std::size_t m = 0; m < levels; ++m) out.per_level[m] += s[m];
  return out;
}

/// nu(t) = |{(x, y) in E x E : x . y^perp = t}|.
inline NuHistogram nu_histogram(const Ring& r, const PointSet& e, const EnumerationOptions& opts = {}) {
  charge("nu histogram", tuple_count(e.size(), 1), opts);
  NuHistogram h{r.spec(), std::vector<std::uint64_t>(r.size(), 0)};
  for (const auto& x : e.points())
    for (const auto& y : e.points()) ++h.counts[perp_dot(r, x, y).code];
  return h;
}

inline FProfile f_profile(const Ring& r, const PointSet& e, std::span<const SL2Elem> group,
                          const EnumerationOptions& opts = {}) {
  charge("f profile", sat_mul(group.size(), e.size()), opts);
  FProfile out{std::vector<std::uint64_t>(group.size(), 0), e.size()};
  struct None {};
  parallel_states<None>(group.size(), opts.threads, [] { return None{}; },
                        [&](std::size_t gi, None&) {
                          const Mat2& g = group[gi].matrix();
                          std::uint64_t c = 0;
                          for (const auto& x : e.points()) c += e.contains(apply(r, g, x)) ? 1 : 0;
                          out.f[gi] = c;
                        });
  return out;
}

// ---------------------------------------------------------------------------
// Moment lift: sum F^{k+1} <= c_k (M^{k-1} R + A^{k+1} |S|), c_k = 2^{k^2}.

struct MomentLiftReport {
  std::size_t k = 1;
  std::uint64_t set_size = 0;
  Rational mean, max, residual;
  BigInt c_k = 1;
  Rational lhs, rhs;
  bool holds = false;
};

inline BigInt moment_lift_constant(std::size_t k) { return ipow(BigInt(2), static_cast<unsigned>(k * k)); }

inline MomentLiftReport moment_lift_check(std::span<const Rational> values, std::size_t k) {
  if (values.empty()) throw InvalidArgument("moment_lift_check: empty table");
  if (k < 1) throw InvalidArgument("moment_lift_check: k must be at least 1");
  MomentLiftReport rep;
  rep.k = k;
  rep.set_size = values.size();
  Rational sum = 0, sum_sq = 0, lhs = 0, mx = 0;
  for (const auto& v : values) {
    if (v < 0) throw InvalidArgument("moment_lift_check: negative value");
    sum += v;
    sum_sq += v * v;
    Rational pw = 1;
    for (std::size_t i = 0; i <= k; ++i) pw *= v;
    lhs += pw;
    mx = std::max(mx, v);
  }
  const Rational size(BigInt(values.size()));
  rep.mean = sum / size;
  rep.max = mx;
  rep.residual = sum_sq - rep.mean * rep.mean * size;
  rep.c_k = moment_lift_constant(k);
  Rational m_pow = 1, a_pow = 1;
  for (std::size_t i = 0; i + 1 < k; ++i) m_pow *= mx;
  for (std::size_t i = 0; i <= k; ++i) a_pow *= rep.mean;
  rep.lhs = lhs;
  rep.rhs = Rational(rep.c_k) * (m_pow * rep.residual + a_pow * size);
  rep.holds = rep.residual >= 0 && rep.lhs <= rep.rhs;
  return rep;
}

inline MomentLiftReport moment_lift_check(const FProfile& p, std::size_t k) {
  std::vector<Rational> values(p.f.begin(), p.f.end());
  return moment_lift_check(values, k);
}

// ---------------------------------------------------------------------------
// Orbit counting for the linear action on vectors.

/// Vectors with at least one unit coordinate: the SL_2-orbit of (1, 0).
/// Over a field these are exactly the nonzero vectors.
inline std::vector<Vec2> unit_orbit(const Ring& r) {
  std::vector<Vec2> out;
  for (auto a : r.elements())
    for (auto b : r.elements())
      if (r.is_unit(a) || r.is_unit(b)) out.push_back(Vec2{a, b});
  return out;
}

struct TransitivityReport {
  std::uint64_t group_order = 0;
  std::uint64_t set_size = 0;
  Rational expected;                     // |G| / |X|
  std::optional<std::uint64_t> constant; // phi when it is constant on X x X
  /// First pair (x, y) in lexicographic order whose phi(x, y) differs from |G| / |X|.
  std::optional<std::tuple<Vec2, Vec2, std::uint64_t>> counterexample;

  bool holds() const { return !counterexample.has_value() && constant.has_value(); }
};

/// phi(x, y) = |{g : g x = y}| over all of X x X, compared against |G| / |X|.
inline TransitivityReport transitivity_constant(const Ring& r, std::span<const SL2Elem> group,
                                                std::span<const Vec2> set,
                                                const EnumerationOptions& opts = {}) {
  std::vector<Vec2> xs(set.begin(), set.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (xs.empty()) throw InvalidArgument("transitivity_constant: empty set");
  const std::uint64_t nx = xs.size();
  charge("transitivity", std::max(sat_mul(group.size(), nx), sat_mul(nx, nx)), opts);
  const std::size_t n = r.size();
  std::vector<std::int64_t> position(n * n, -1);
  for (std::size_t i = 0; i < xs.size(); ++i) position[std::size_t{xs[i].x1.code} * n + xs[i].x2.code] = i;
  std::vector<std::uint64_t> phi(nx * nx, 0);
  for (const auto& g : group)
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const Vec2 y = apply(r, g.matrix(), xs[i]);
      const auto j = position[std::size_t{y.x1.code} * n + y.x2.code];
      if (j >= 0) ++phi[i * nx + static_cast<std::size_t>(j)];
    }
  TransitivityReport rep;
  rep.group_order = group.size();
  rep.set_size = nx;
  rep.expected = Rational(BigInt(group.size()), BigInt(nx));
  bool constant = true;
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < nx; ++j) {
      const auto v = phi[i * nx + j];
      if (v != phi[0]) constant = false;
      if (!rep.counterexample && Rational(BigInt(v)) != rep.expected)
        rep.counterexample = std::make_tuple(xs[i], xs[j], v);
    }
  if (constant) rep.constant = phi[0];
  return rep;
}

inline TransitivityReport transitivity_constant(const Ring& r, std::span<const SL2Elem> group,
                                                const EnumerationOptions& opts = {}) {
  const auto xs = unit_orbit(r);
  return transitivity_constant(r, group, xs, opts);
}

// ---------------------------------------------------------------------------
// Lemma checks.

/// The exact ingredients of |E|^{2(k+1)} <~ C_{k+1}(E) sum_g f(g)^{k+1}, where G is
/// the set of good tuples of E^{k+1} and P the equivalent pairs inside G:
///   |G|^2 <= |G/~| P            (Cauchy-Schwarz)
///   P     <= sum_g f(g)^{k+1}
struct FLemmaReport {
  std::size_t k = 1;
  std::uint64_t point_count = 0;
  BigInt tuples_squared;  // |E|^{2(k+1)}
  BigInt good_tuples, good_classes, equivalent_good_pairs;
  BigInt classes;  // C_{k+1}(E)
  BigInt sum_f_power;
  bool cauchy_schwarz_holds = false;
  bool pair_bound_holds = false;
  bool chain_holds = false;  // |G|^2 <= C_{k+1}(E) sum f^{k+1}

  bool holds() const { return cauchy_schwarz_holds && pair_bound_holds && chain_holds; }
};

inline FLemmaReport flemma_check(const CensusReport& census, const FProfile& profile) {
  FLemmaReport rep;
  rep.k = census.k;
  rep.point_count = census.point_count;
  rep.tuples_squared = ipow(BigInt(census.point_count), static_cast<unsigned>(2 * (census.k + 1)));
  const auto& good = census.levels.at(0);
  rep.good_tuples = good.tuples;
  rep.good_classes = good.classes;
  rep.equivalent_good_pairs = good.sum_sq_class_sizes;
  rep.classes = census.total_classes;
  rep.sum_f_power = profile.power_sum(static_cast<unsigned>(census.k + 1));
  const BigInt g2 = rep.good_tuples * rep.good_tuples;
  rep.cauchy_schwarz_holds = g2 <= rep.good_classes * rep.equivalent_good_pairs;
  rep.pair_bound_holds = rep.equivalent_good_pairs <= rep.sum_f_power;
  rep.chain_holds = g2 <= rep.classes * rep.sum_f_power;
  return rep;
}

inline FLemmaReport flemma_check(const Ring& r, const PointSet& e, std::size_t k,
                                 std::span<const SL2Elem> group, const EnumerationOptions& opts = {}) {
  return flemma_check(count_classes(r, e, k, opts), f_profile(r, e, group, opts));
}

/// sum_g f(g)^2 split two ways. The left side comes from the f-profile. The right
/// side counts quadruples (x1, x2, y1, y2) in E^4 weighted by the number of g with
/// g x1 = y1, g x2 = y2: pairs with a unit area contribute exactly the matching
/// ones, sum over unit t of nu(t)^2, and the remaining (collinear) pairs are
/// counted directly over the group.
struct MomentIdentityReport {
  BigInt sum_f_squared;
  BigInt sum_nu_squared;  // over all t
  BigInt unit_area_part;  // over unit t only
  BigInt collinear_part;
  std::optional<BigInt> quadruple_sum;  // brute force, when within budget

  bool holds() const {
    return sum_f_squared == unit_area_part + collinear_part &&
           (!quadruple_sum || *quadruple_sum == sum_f_squared);
  }
};

inline MomentIdentityReport moment_identity_check(const Ring& r, const PointSet& e,
                                                  std::span<const SL2Elem> group,
                                                  const EnumerationOptions& opts = {}) {
  MomentIdentityReport rep;
  rep.sum_f_squared = f_profile(r, e, group, opts).sum_squares();
  const NuHistogram nu = nu_histogram(r, e, opts);
  rep.sum_nu_squared = nu.sum_squares();
  for (std::uint32_t t = 0; t < r.size(); ++t)
    if (r.is_unit(Elem{t})) rep.unit_area_part += BigInt(nu.counts[t]) * nu.counts[t];

  std::vector<std::pair<std::size_t, std::size_t>> collinear;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = 0; j < e.size(); ++j)
      if (!r.is_unit(perp_dot(r, e[i], e[j]))) collinear.emplace_back(i, j);
  charge("collinear moment part", sat_mul(group.size(), sat_add(e.size(), collinear.size())), opts);
  std::vector<std::uint8_t> image_in(e.size());
  for (const auto& g : group) {
    for (std::size_t i = 0; i < e.size(); ++i) image_in[i] = e.contains(apply(r, g.matrix(), e[i])) ? 1 : 0;
    for (const auto& [i, j] : collinear) rep.collinear_part += (image_in[i] & image_in[j]);
  }

  const std::uint64_t brute_cost = sat_mul(tuple_count(e.size(), 3), group.size());
  if (brute_cost <= opts.budget) {
    BigInt total = 0;
    for (const auto& x1 : e.points())
      for (const auto& x2 : e.points())
        for (const auto& y1 : e.points())
          for (const auto& y2 : e.points())
            for (const auto& g : group)
              if (apply(r, g.matrix(), x1) == y1 && apply(r, g.matrix(), x2) == y2) ++total;
    rep.quadruple_sum = total;
  }
  return rep;
}

/// Bad-tuple counts against the bound shapes
///   F_q:    bad tuples of E^{k+1}   <= C q^k |E|
///   Z/p^l:  bad tuples              <= C p^{(2l-1)(k+1)+1}
///   m-bad:  m-bad tuples            <= C p^{(2l-m)(k+1)+m}   (q in place of p over F_q, l = 1)
struct BadTupleBoundReport {
  BadTupleCounts counts;
  BigInt bad_bound;
  Rational bad_constant;
  std::vector<BigInt> level_bounds;         // index m >= 1; entry 0 unused
  std::vector<Rational> level_constants;

  bool holds(std::uint64_t max_constant = kBoundConstant) const {
    if (bad_constant > Rational(BigInt(max_constant))) return false;
    for (std::size_t m = 1; m < level_constants.size(); ++m)
      if (level_constants[m] > Rational(BigInt(max_constant))) return false;
    return true;
  }
};

inline BadTupleBoundReport bad_tuple_bounds(const Ring& r, const PointSet& e, std::size_t k,
                                            const BadTupleCounts& counts) {
  BadTupleBoundReport rep;
  rep.counts = counts;
  const auto& spec = r.spec();
  const std::uint64_t base = spec.is_field() ? spec.size() : spec.p;
  const unsigned ell = spec.depth();
  const auto kk = static_cast<unsigned>(k);
  if (spec.is_field())
    rep.bad_bound = ipow(BigInt(base), kk) * e.size();
  else
    rep.bad_bound = ipow(BigInt(base), (2 * ell - 1) * (kk + 1) + 1);
  rep.bad_constant = Rational(BigInt(counts.bad()), rep.bad_bound);
  rep.level_bounds.assign(ell + 1, BigInt(0));
  rep.level_constants.assign(ell + 1, Rational(0));
  for (unsigned m = 1; m <= ell; ++m) {
    rep.level_bounds[m] = ipow(BigInt(base), (2 * ell - m) * (kk + 1) + m);
    rep.level_constants[m] = Rational(BigInt(counts.per_level[m]), rep.level_bounds[m]);
  }
  return rep;
}

/// Class structure of the full plane (R^2)^{k+1} by badness level:
///   m = 0: every class is one free SL_2-orbit, so it has exactly |SL_2| tuples.
///   m >= 1: every class has at least base^{3l-2m} tuples, and the number of m-bad
///           classes is at most C base^{l(2k-1)+(2-k)m}.
/// base is p for Z/p^l Z and q (with l = 1) for F_q. Over a field there is one bad class.
struct MBadClassReport {
  CensusReport census;
  BigInt group_order;
  std::vector<BigInt> required_min_size;  // index m
  std::vector<BigInt> class_bounds;       // index m
  std::vector<Rational> class_constants;  // index m

  bool good_classes_exact() const {
    const auto& g = census.levels.at(0);
    return g.classes == 0 || (BigInt(g.min_class_size) == group_order && BigInt(g.max_class_size) == group_order &&
                              BigInt(g.classes) * group_order == BigInt(g.tuples));
  }

  bool min_sizes_hold() const {
    for (std::size_t m = 1; m < census.levels.size(); ++m) {
      const auto& lv = census.levels[m];
      if (lv.classes > 0 && BigInt(lv.min_class_size) < required_min_size[m]) return false;
    }
    return true;
  }

  bool class_bounds_hold(std::uint64_t max_constant = kBoundConstant) const {
    for (std::size_t m = 1; m < class_constants.size(); ++m)
      if (class_constants[m] > Rational(BigInt(max_constant))) return false;
    return true;
  }

  bool single_bad_class_over_field() const { return !census.ring.is_field() || census.bad_classes() <= 1; }

  bool holds() const {
    return good_classes_exact() && min_sizes_hold() && class_bounds_hold() && single_bad_class_over_field();
  }
};

inline PointSet full_plane_points(const Ring& r) {
  std::vector<Vec2> pts;
  pts.reserve(std::size_t{r.size()} * r.size());
  for (auto a : r.elements())
    for (auto b : r.elements()) pts.push_back(Vec2{a, b});
  return PointSet(r, std::move(pts));
}

inline MBadClassReport mbad_class_size_check(const Ring& r, const CensusReport& census) {
  const auto& spec = r.spec();
  MBadClassReport rep;
  rep.census = census;
  rep.group_order = sl2_order(spec);
  const std::uint64_t base = spec.is_field() ? spec.size() : spec.p;
  const unsigned ell = spec.depth();
  const auto k = static_cast<long>(census.k);
  rep.required_min_size.assign(ell + 1, BigInt(0));
  rep.class_bounds.assign(ell + 1, BigInt(0));
  rep.class_constants.assign(ell + 1, Rational(0));
  rep.required_min_size[0] = rep.group_order;
  for (unsigned m = 1; m <= ell; ++m) {
    rep.required_min_size[m] = ipow(BigInt(base), 3 * ell - 2 * m);
    const long exp = static_cast<long>(ell) * (2 * k - 1) + (2 - k) * static_cast<long>(m);
    rep.class_bounds[m] = ipow(BigInt(base), static_cast<unsigned>(exp));
    rep.class_constants[m] = Rational(BigInt(census.levels[m].classes), rep.class_bounds[m]);
  }
  return rep;
}

inline MBadClassReport mbad_class_size_check(const Ring& r, std::size_t k, const EnumerationOptions& opts = {}) {
  return mbad_class_size_check(r, count_classes(r, full_plane_points(r), k, opts));
}

/// Every ordered pair (x, y) of equivalent good tuples of E^{k+1}: recover_g must
/// return some g, and a scan of the whole group must find g as the only element
/// mapping x to y.
struct RecoveryReport {
  std::uint64_t pairs_checked = 0;
  std::uint64_t failures = 0;
  std::optional<std::pair<Configuration, Configuration>> counterexample;

  bool holds() const { return failures == 0; }
};

inline std::uint64_t recovery_cost(const CensusReport& census, std::uint64_t group_order) {
  const BigInt c = census.levels.at(0).sum_sq_class_sizes * group_order;
  return c > BigInt(std::numeric_limits<std::uint64_t>::max()) ? std::numeric_limits<std::uint64_t>::max()
                                                                : static_cast<std::uint64_t>(c);
}

inline RecoveryReport recovery_check(const Ring& r, const PointSet& e, std::size_t k,
                                     std::span<const SL2Elem> group, const EnumerationOptions& opts = {}) {
  charge("recovery census", tuple_count(e.size(), k), opts);
  charge("recovery scan", recovery_cost(count_classes(r, e, k, opts), group.size()), opts);
  // Group the good tuples by signature.
  std::map<std::string, std::vector<Configuration>> classes;
  const PairAreaTable table(r, e);
  if (!e.empty()) {
    for (std::size_t first = 0; first < e.size(); ++first) {
      auto on_tuple = [&](std::uint64_t, std::uint8_t level, const auto& walker) {
        if (level != 0) return;
        std::vector<Vec2> pts;
        for (auto i : walker.indices()) pts.push_back(e[i]);
        classes[detail::encode_areas(k, walker.areas())].emplace_back(std::move(pts));
      };
      detail::walk_tuples(table, k + 1, first, on_tuple);
    }
  }
  RecoveryReport rep;
  for (const auto& [key, members] : classes) {
    for (const auto& x : members)
      for (const auto& y : members) {
        ++rep.pairs_checked;
        const auto result = recover_g(r, x, y);
        const SL2Elem* g = std::get_if<SL2Elem>(&result);
        std::uint64_t matches = 0;
        bool found = false;
        for (const auto& h : group)
          if (apply(r, h.matrix(), x) == y) {
            ++matches;
            if (g && h == *g) found = true;
          }
        if (!g || matches != 1 || !found) {
          ++rep.failures;
          if (!rep.counterexample) rep.counterexample = std::make_pair(x, y);
        }
      }
  }
  return rep;
}

}  // namespace areal
