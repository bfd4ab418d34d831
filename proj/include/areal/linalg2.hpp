#pragma once

// Points of R^2, 2x2 matrices, the area form and SL_2(R).

#include <algorithm>
#include <compare>
#include <cstdint>
#include <vector>

#include "areal/bigint.hpp"
#include "areal/ring.hpp"

namespace areal {

struct Vec2 {
  Elem x1, x2;

  friend constexpr auto operator<=>(const Vec2&, const Vec2&) = default;
};

/// Row-major [[a, b], [c, d]].
struct Mat2 {
  Elem a, b, c, d;

  friend constexpr auto operator<=>(const Mat2&, const Mat2&) = default;
};

/// x . y^perp with y^perp = (y2, -y1), i.e. x1*y2 - x2*y1: the determinant of the
/// matrix whose columns are x and y.
inline Elem perp_dot(const Ring& r, const Vec2& x, const Vec2& y) {
  return r.sub(r.mul(x.x1, y.x2), r.mul(x.x2, y.x1));
}

inline Mat2 identity(const Ring& r) { return Mat2{r.one(), r.zero(), r.zero(), r.one()}; }

/// Matrix with columns u and v.
inline Mat2 from_columns(const Vec2& u, const Vec2& v) { return Mat2{u.x1, v.x1, u.x2, v.x2}; }

inline Elem det(const Ring& r, const Mat2& m) {
  return r.sub(r.mul(m.a, m.d), r.mul(m.b, m.c));
}

inline Mat2 mat_add(const Ring& r, const Mat2& m, const Mat2& n) {
  return Mat2{r.add(m.a, n.a), r.add(m.b, n.b), r.add(m.c, n.c), r.add(m.d, n.d)};
}

inline Mat2 scale(const Ring& r, Elem s, const Mat2& m) {
  return Mat2{r.mul(s, m.a), r.mul(s, m.b), r.mul(s, m.c), r.mul(s, m.d)};
}

inline Mat2 mat_mul(const Ring& r, const Mat2& m, const Mat2& n) {
  return Mat2{r.add(r.mul(m.a, n.a), r.mul(m.b, n.c)), r.add(r.mul(m.a, n.b), r.mul(m.b, n.d)),
              r.add(r.mul(m.c, n.a), r.mul(m.d, n.c)), r.add(r.mul(m.c, n.b), r.mul(m.d, n.d))};
}

inline Vec2 apply(const Ring& r, const Mat2& m, const Vec2& v) {
  return Vec2{r.add(r.mul(m.a, v.x1), r.mul(m.b, v.x2)), r.add(r.mul(m.c, v.x1), r.mul(m.d, v.x2))};
}

/// The adjugate B of m, which satisfies m B = B m = det(m) I.
inline Mat2 adjugate(const Ring& r, const Mat2& m) { return Mat2{m.d, r.neg(m.b), r.neg(m.c), m.a}; }

/// Throws SingularMatrix when det(m) is not a unit.
inline Mat2 inverse(const Ring& r, const Mat2& m) {
  const Elem dt = det(r, m);
  if (!r.is_unit(dt)) throw SingularMatrix("matrix determinant is not a unit of " + r.spec().name());
  return scale(r, r.inv(dt), adjugate(r, m));
}

/// The cross term in det(A + B) = det(A) + det(B) + B(A, B); bilinear and symmetric.
inline Elem det_cross_term(const Ring& r, const Mat2& m, const Mat2& n) {
  const Elem ad = r.add(r.mul(m.a, n.d), r.mul(n.a, m.d));
  const Elem bc = r.add(r.mul(m.b, n.c), r.mul(n.b, m.c));
  return r.sub(ad, bc);
}

/// A determinant-one matrix. Only constructible through checked paths.
class SL2Elem {
 public:
  /// Throws InvalidArgument unless det(m) = 1.
  static SL2Elem from_matrix(const Ring& r, const Mat2& m) {
    if (det(r, m) != r.one()) throw InvalidArgument("matrix is not in SL_2(" + r.spec().name() + ")");
    return SL2Elem(m);
  }

  const Mat2& matrix() const { return m_; }

  friend constexpr auto operator<=>(const SL2Elem&, const SL2Elem&) = default;

 private:
  explicit SL2Elem(const Mat2& m) : m_(m) {}
  Mat2 m_;

  friend std::vector<SL2Elem> enumerate_sl2(const Ring& r);
};

/// |SL_2(R)|: q^3 - q for F_q, p^{3l} - p^{3l-2} for Z/p^l Z.
inline BigInt sl2_order(const RingSpec& spec) {
  if (spec.is_field()) {
    const BigInt q = spec.size();
    return q * q * q - q;
  }
  return ipow(spec.p, 3 * spec.ell) - ipow(spec.p, 3 * spec.ell - 2);
}

/// Every determinant-one matrix exactly once, in lexicographic (a, b, c, d) order.
///
/// Solutions are generated by splitting on whether a is a unit: if so, b and c are
/// free and d = (1 + bc) / a; otherwise b must be a unit, a and d are free and
/// c = (ad - 1) / b.
inline std::vector<SL2Elem> enumerate_sl2(const Ring& r) {
  const std::uint32_t n = r.size();
  std::vector<SL2Elem> out;
  for (std::uint32_t a = 0; a < n; ++a) {
    const Elem ea{a};
    if (r.is_unit(ea)) {
      const Elem ainv = r.inv(ea);
      for (std::uint32_t b = 0; b < n; ++b)
        for (std::uint32_t c = 0; c < n; ++c) {
          const Elem d = r.mul(ainv, r.add(r.one(), r.mul(Elem{b}, Elem{c})));
          out.push_back(SL2Elem(Mat2{ea, Elem{b}, Elem{c}, d}));
        }
    } else {
      for (std::uint32_t b = 0; b < n; ++b) {
        if (!r.is_unit(Elem{b})) continue;
        const Elem binv = r.inv(Elem{b});
        for (std::uint32_t d = 0; d < n; ++d) {
          const Elem c = r.mul(binv, r.sub(r.mul(ea, Elem{d}), r.one()));
          out.push_back(SL2Elem(Mat2{ea, Elem{b}, c, Elem{d}}));
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace areal
