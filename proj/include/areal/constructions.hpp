#pragma once

// Point-set generators: circles and unions of circles with their rotation group,
// the all-bad set over Z/p^l Z, lines through the origin, seeded random subsets
// and the full plane.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "areal/census.hpp"
#include "areal/error.hpp"
#include "areal/linalg2.hpp"
#include "areal/point_set.hpp"
#include "areal/ring.hpp"

namespace areal {

/// { x : x1^2 + x2^2 = radius }.
inline PointSet circle(const Ring& r, Elem radius) {
  r.check(radius);
  std::vector<Vec2> pts;
  for (auto a : r.elements())
    for (auto b : r.elements())
      if (r.add(r.mul(a, a), r.mul(b, b)) == radius) pts.push_back(Vec2{a, b});
  return PointSet(r, std::move(pts));
}

/// Throws InvalidArgument on repeated radii.
inline PointSet union_circles(const Ring& r, std::span<const Elem> radii) {
  std::set<Elem> seen;
  std::vector<Vec2> pts;
  for (auto rad : radii) {
    if (!seen.insert(rad).second)
      throw InvalidArgument("union_circles: duplicate radius " + std::to_string(rad.code));
    const auto c = circle(r, rad);
    pts.insert(pts.end(), c.points().begin(), c.points().end());
  }
  return PointSet(r, std::move(pts));
}

/// The rotations [[a, -b], [b, a]] with a^2 + b^2 = 1, sorted.
inline std::vector<SL2Elem> rotation_group(const Ring& r) {
  std::vector<SL2Elem> out;
  for (auto a : r.elements())
    for (auto b : r.elements())
      if (r.add(r.mul(a, a), r.mul(b, b)) == r.one())
        out.push_back(SL2Elem::from_matrix(r, Mat2{a, r.neg(b), b, a}));
  std::sort(out.begin(), out.end());
  return out;
}

/// { (t + p n, t + p m) : 0 <= t < p, 0 <= n, m < p^{l-1} } in (Z/p^l Z)^2, of size
/// p^{2l-1}; no pair of its points spans a unit area.
inline PointSet mod_sharpness_set(const Ring& r) {
  const auto& spec = r.spec();
  if (spec.family == RingFamily::galois_field && spec.e > 1)
    throw InvalidArgument("mod_sharpness_set needs Z/p^l Z");
  const std::uint32_t p = spec.p;
  const std::uint32_t span = r.size() / p;  // p^{l-1}
  std::vector<Vec2> pts;
  for (std::uint32_t t = 0; t < p; ++t)
    for (std::uint32_t n = 0; n < span; ++n)
      for (std::uint32_t m = 0; m < span; ++m)
        pts.push_back(Vec2{Elem{t + p * n}, Elem{t + p * m}});
  return PointSet(r, std::move(pts));
}

/// { t d : t in R }; d must be nonzero.
inline PointSet line_through_origin(const Ring& r, const Vec2& direction) {
  r.check(direction.x1);
  r.check(direction.x2);
  if (direction.x1 == r.zero() && direction.x2 == r.zero())
    throw InvalidArgument("line_through_origin: zero direction");
  std::vector<Vec2> pts;
  for (auto t : r.elements()) pts.push_back(Vec2{r.mul(t, direction.x1), r.mul(t, direction.x2)});
  return PointSet(r, std::move(pts));
}

inline PointSet full_plane(const Ring& r) { return full_plane_points(r); }

/// 64-bit multiplicative congruential generator: state_{i+1} = state_i * a mod 2^64
/// with a = 0xd1342543de82ef95, state_0 = 2 seed + 1, output = top 32 bits.
class Mcg64 {
 public:
  static constexpr std::uint64_t kMultiplier = 0xd1342543de82ef95ULL;

  explicit Mcg64(std::uint64_t seed) : state_(seed * 2 + 1) {}

  std::uint32_t next() {
    state_ *= kMultiplier;
    return static_cast<std::uint32_t>(state_ >> 32);
  }

  /// floor(next() * bound / 2^32), in [0, bound).
  std::uint64_t below(std::uint64_t bound) { return (std::uint64_t{next()} * bound) >> 32; }

 private:
  std::uint64_t state_;
};

/// `size` distinct points of R^2 chosen by a partial Fisher-Yates shuffle of the
/// plane in row-major order: for i = 0, 1, ..., swap slot i with slot i + below(N - i).
inline PointSet random_subset(const Ring& r, std::uint64_t size, std::uint64_t seed) {
  const std::uint64_t n = r.size();
  const std::uint64_t total = n * n;
  if (size > total)
    throw InvalidArgument("random_subset: size " + std::to_string(size) + " exceeds plane size " +
                          std::to_string(total));
  std::vector<std::uint64_t> slots(total);
  std::iota(slots.begin(), slots.end(), std::uint64_t{0});
  Mcg64 rng(seed);
  std::vector<Vec2> pts;
  pts.reserve(size);
  for (std::uint64_t i = 0; i < size; ++i) {
    const std::uint64_t j = i + rng.below(total - i);
    std::swap(slots[i], slots[j]);
    pts.push_back(Vec2{Elem{static_cast<std::uint32_t>(slots[i] / n)}, Elem{static_cast<std::uint32_t>(slots[i] % n)}});
  }
  return PointSet(r, std::move(pts));
}

/// Rotation orbits of tuples in E^{k+1} for a rotation-closed E. Each orbit lies in
/// E^{k+1} and inside one equivalence class, so C_{k+1}(E) <= |E|^{k+1} / min orbit size.
struct RotationOrbitReport {
  std::uint64_t rotation_count = 0;
  std::uint64_t min_orbit_size = 0;
  bool closed = false;  // every rotation maps E into E
  BigInt tuples;
  std::uint64_t classes = 0;

  bool min_orbit_ok() const { return 2 * min_orbit_size >= rotation_count; }
  bool class_bound_holds() const { return closed && min_orbit_size > 0 && BigInt(classes) * min_orbit_size <= tuples; }
  bool holds() const { return min_orbit_ok() && class_bound_holds(); }
};

inline RotationOrbitReport rotation_orbit_check(const Ring& r, const PointSet& e, std::size_t k,
                                                const EnumerationOptions& opts = {}) {
  const auto rotations = rotation_group(r);
  RotationOrbitReport rep;
  rep.rotation_count = rotations.size();
  rep.closed = true;
  for (const auto& g : rotations)
    for (const auto& x : e.points())
      if (!e.contains(apply(r, g.matrix(), x))) rep.closed = false;
  const auto census = count_classes(r, e, k, opts);
  rep.tuples = census.total_tuples;
  rep.classes = census.total_classes;
  charge("rotation orbits", sat_mul(tuple_count(e.size(), k), rotations.size()), opts);
  if (e.empty()) return rep;
  // The orbit of a tuple has size |rotations| / |common stabilizer|.
  std::vector<std::vector<std::uint8_t>> fixes(rotations.size(), std::vector<std::uint8_t>(e.size()));
  for (std::size_t g = 0; g < rotations.size(); ++g)
    for (std::size_t i = 0; i < e.size(); ++i) fixes[g][i] = apply(r, rotations[g].matrix(), e[i]) == e[i];
  std::uint64_t min_orbit = rotations.size();
  std::vector<std::size_t> idx(k + 1, 0);
  const std::uint64_t total = tuple_count(e.size(), k);
  for (std::uint64_t t = 0; t < total; ++t) {
    std::uint64_t rest = t;
    for (auto& i : idx) {
      i = rest % e.size();
      rest /= e.size();
    }
    std::uint64_t stab = 0;
    for (std::size_t g = 0; g < rotations.size(); ++g) {
      bool all = true;
      for (auto i : idx) all = all && fixes[g][i];
      stab += all;
    }
    min_orbit = std::min(min_orbit, rotations.size() / stab);
  }
  rep.min_orbit_size = min_orbit;
  return rep;
}

/// Share of tuples of E^{k+1} that are bad, as (bad, total).
struct AllBadReport {
  std::uint64_t bad = 0;
  std::uint64_t total = 0;
  bool pairwise_non_unit = false;  // no two points of E span a unit area

  bool holds() const { return bad == total && pairwise_non_unit; }
};

inline AllBadReport all_bad_check(const Ring& r, const PointSet& e, std::size_t k,
                                  const EnumerationOptions& opts = {}) {
  AllBadReport rep;
  const auto counts = count_bad_tuples(r, e, k, opts);
  rep.bad = counts.bad();
  rep.total = counts.bad() + counts.good();
  rep.pairwise_non_unit = true;
  for (const auto& x : e.points())
    for (const auto& y : e.points())
      if (r.is_unit(perp_dot(r, x, y))) rep.pairwise_non_unit = false;
  return rep;
}

}  // namespace areal
