#pragma once

// Configurations (ordered tuples of points), their area signatures and the
// SL_2 element relating two equivalent good configurations.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "areal/error.hpp"
#include "areal/linalg2.hpp"
#include "areal/ring.hpp"

namespace areal {

/// An ordered (k+1)-tuple of points, k >= 1.
class Configuration {
 public:
  explicit Configuration(std::vector<Vec2> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw InvalidArgument("a configuration needs at least two points");
  }
  Configuration(std::initializer_list<Vec2> points) : Configuration(std::vector<Vec2>(points)) {}

  std::span<const Vec2> points() const { return points_; }
  std::size_t k() const { return points_.size() - 1; }
  std::size_t size() const { return points_.size(); }
  const Vec2& operator[](std::size_t i) const { return points_[i]; }

  friend auto operator<=>(const Configuration&, const Configuration&) = default;
  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<Vec2> points_;
};

/// Position of the pair (i, j), i < j, in lexicographic pair order among n points.
constexpr std::size_t pair_position(std::size_t i, std::size_t j, std::size_t n) {
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

constexpr std::size_t pair_count(std::size_t points) { return points * (points - 1) / 2; }

/// The pairwise areas x^i . x^{j perp}, i < j, in lexicographic (i, j) order.
struct AreaSignature {
  RingSpec ring;
  std::size_t k = 1;
  std::vector<Elem> areas;

  /// Area for any index pair, recovering i > j by antisymmetry and i = j as zero.
  Elem area(const Ring& r, std::size_t i, std::size_t j) const {
    if (i == j) return r.zero();
    if (i > j) return r.neg(areas[pair_position(j, i, k + 1)]);
    return areas[pair_position(i, j, k + 1)];
  }

  /// Stable byte encoding: k as a 16-bit big-endian integer followed by every area
  /// code as a 16-bit big-endian integer. Ring codes are < 2^16 by construction.
  std::string encode() const {
    std::string out;
    out.reserve(2 + 2 * areas.size());
    auto put = [&](std::uint32_t v) {
      out.push_back(static_cast<char>((v >> 8) & 0xff));
      out.push_back(static_cast<char>(v & 0xff));
    };
    put(static_cast<std::uint32_t>(k));
    for (auto a : areas) put(a.code);
    return out;
  }

  friend bool operator==(const AreaSignature&, const AreaSignature&) = default;
};

inline void require_ring(const Ring& r, const Configuration& x) {
  for (const auto& v : x.points()) {
    r.check(v.x1);
    r.check(v.x2);
  }
}

inline AreaSignature signature(const Ring& r, const Configuration& x) {
  require_ring(r, x);
  AreaSignature s{r.spec(), x.k(), {}};
  s.areas.reserve(pair_count(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) s.areas.push_back(perp_dot(r, x[i], x[j]));
  return s;
}

/// m is minimal with p^m dividing every pairwise area; 0 means good.
struct BadnessLevel {
  std::uint32_t m = 0;

  bool good() const { return m == 0; }
  friend constexpr auto operator<=>(BadnessLevel, BadnessLevel) = default;
};

inline BadnessLevel badness_level(const Ring& r, const AreaSignature& s) {
  std::uint32_t m = r.spec().depth();
  for (auto a : s.areas) m = std::min(m, r.valuation(a));
  return BadnessLevel{m};
}

inline BadnessLevel badness_level(const Ring& r, const Configuration& x) {
  return badness_level(r, signature(r, x));
}

inline bool is_good(const Ring& r, const Configuration& x) { return badness_level(r, x).good(); }

inline bool equivalent(const Ring& r, const Configuration& x, const Configuration& y) {
  return x.size() == y.size() && signature(r, x) == signature(r, y);
}

struct NotEquivalent {
  friend bool operator==(NotEquivalent, NotEquivalent) = default;
};
struct BothBad {
  friend bool operator==(BothBad, BothBad) = default;
};

using RecoverResult = std::variant<SL2Elem, NotEquivalent, BothBad>;

/// The unique g in SL_2(R) with g x^i = y^i for all i, when x is good and equivalent to y.
///
/// g = (y^i y^j)(x^i x^j)^{-1} for the first index pair (i, j) whose area is a unit;
/// the candidate is then checked against every point.
inline RecoverResult recover_g(const Ring& r, const Configuration& x, const Configuration& y) {
  if (x.size() != y.size()) throw InvalidArgument("recover_g: configurations differ in length");
  const AreaSignature sx = signature(r, x);
  if (sx != signature(r, y)) return NotEquivalent{};
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      if (!r.is_unit(sx.areas[pair_position(i, j, x.size())])) continue;
      const Mat2 g = mat_mul(r, from_columns(y[i], y[j]), inverse(r, from_columns(x[i], x[j])));
      if (det(r, g) != r.one()) return NotEquivalent{};
      for (std::size_t n = 0; n < x.size(); ++n)
        if (apply(r, g, x[n]) != y[n]) return NotEquivalent{};
      return SL2Elem::from_matrix(r, g);
    }
  return BothBad{};
}

inline Configuration apply(const Ring& r, const Mat2& g, const Configuration& x) {
  std::vector<Vec2> pts;
  pts.reserve(x.size());
  for (const auto& v : x.points()) pts.push_back(apply(r, g, v));
  return Configuration(std::move(pts));
}

/// { g x : g in group }, sorted and deduplicated.
inline std::vector<Configuration> orbit(const Ring& r, const Configuration& x,
                                        std::span<const SL2Elem> group) {
  require_ring(r, x);
  std::vector<Configuration> out;
  out.reserve(group.size());
  for (const auto& g : group) out.push_back(apply(r, g.matrix(), x));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<Configuration> orbit(const Ring& r, const Configuration& x) {
  const auto group = enumerate_sl2(r);
  return orbit(r, x, group);
}

}  // namespace areal
