#pragma once

// Exact arithmetic for the three finite ring families used throughout the
// library: prime fields F_p, Galois fields F_{p^e} = F_p[x]/(f), and the
// residue rings Z/p^l Z. Characteristic is always an odd prime.
//
// Elements are plain codes in [0, size). For Z/p^l Z (and F_p) the code is the
// residue itself. For F_{p^e} the code packs the coefficient vector
// (c_0, ..., c_{e-1}) of the reduced polynomial as sum c_i p^i, so two elements
// are equal iff their codes are equal and code order is the lexicographic
// order of the coefficient vector read from the top coefficient down.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <ranges>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "areal/error.hpp"

namespace areal {

enum class RingFamily { prime_field, galois_field, mod_prime_power };

inline const char* to_string(RingFamily f) {
  switch (f) {
    case RingFamily::prime_field:
      return "prime-field";
    case RingFamily::galois_field:
      return "galois-field";
    case RingFamily::mod_prime_power:
      return "mod-prime-power";
  }
  return "?";
}

inline std::optional<RingFamily> parse_ring_family(std::string_view s) {
  if (s == "prime-field") return RingFamily::prime_field;
  if (s == "galois-field") return RingFamily::galois_field;
  if (s == "mod-prime-power") return RingFamily::mod_prime_power;
  return std::nullopt;
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

namespace detail {

/// Dense polynomials over F_p, ascending coefficients, no trailing zeros (zero = empty).
using Poly = std::vector<std::uint32_t>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline std::uint32_t inv_mod_prime(std::uint32_t a, std::uint32_t p) {
  // Fermat; p is small.
  std::uint64_t r = 1, b = a % p;
  for (std::uint32_t e = p - 2; e > 0; e >>= 1) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
  }
  return static_cast<std::uint32_t>(r);
}

/// Remainder of a modulo b over F_p; b must be nonzero.
inline Poly poly_mod(Poly a, const Poly& b, std::uint32_t p) {
  trim(a);
  const std::uint32_t lead_inv = inv_mod_prime(b.back(), p);
  while (a.size() >= b.size()) {
    const std::uint64_t factor = std::uint64_t{a.back()} * lead_inv % p;
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::uint64_t sub = factor * b[i] % p;
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - sub) % p);
    }
    trim(a);
  }
  return a;
}

inline Poly poly_mul(const Poly& a, const Poly& b, std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      r[i + j] = static_cast<std::uint32_t>((r[i + j] + std::uint64_t{a[i]} * b[j]) % p);
  trim(r);
  return r;
}

/// Monic polynomial of the given degree whose lower coefficients are the base-p digits of `index`.
inline Poly monic_from_index(std::uint64_t index, std::uint32_t degree, std::uint32_t p) {
  Poly f(degree + 1, 0);
  for (std::uint32_t i = 0; i < degree; ++i) {
    f[i] = static_cast<std::uint32_t>(index % p);
    index /= p;
  }
  f[degree] = 1;
  return f;
}

/// Exhaustive trial division by every monic polynomial of degree 1..deg/2.
inline bool is_irreducible(const Poly& f, std::uint32_t p) {
  if (f.size() < 2) return false;
  const auto degree = static_cast<std::uint32_t>(f.size() - 1);
  for (std::uint32_t d = 1; 2 * d <= degree; ++d) {
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < d; ++i) count *= p;
    for (std::uint64_t idx = 0; idx < count; ++idx)
      if (poly_mod(f, monic_from_index(idx, d, p), p).empty()) return false;
  }
  return true;
}

}  // namespace detail

/// Lexicographically smallest monic irreducible polynomial of degree `degree` over F_p,
/// comparing coefficient vectors from the x^{e-1} coefficient down to the constant term.
/// Returned as an ascending coefficient list of length degree + 1.
inline std::vector<std::uint32_t> find_irreducible(std::uint32_t p, std::uint32_t degree) {
  if (degree < 2) throw InvalidArgument("find_irreducible: degree must be >= 2");
  if (!is_prime(p)) throw InvalidArgument("find_irreducible: p must be prime");
  for (std::uint64_t idx = 0;; ++idx) {
    auto f = detail::monic_from_index(idx, degree, p);
    if (detail::is_irreducible(f, p)) return f;
  }
}

struct RingSpec {
  RingFamily family = RingFamily::prime_field;
  std::uint32_t p = 3;
  std::uint32_t e = 1;    // galois-field only
  std::uint32_t ell = 1;  // mod-prime-power only
  std::vector<std::uint32_t> modulus;  // galois-field only; ascending, monic, length e + 1

  static constexpr std::uint64_t kMaxSize = 1u << 16;

  static RingSpec prime_field(std::uint32_t p) {
    RingSpec s;
    s.family = RingFamily::prime_field;
    s.p = p;
    s.validate();
    return s;
  }

  /// F_{p^e}; the modulus defaults to find_irreducible(p, e).
  static RingSpec galois_field(std::uint32_t p, std::uint32_t e,
                               std::vector<std::uint32_t> modulus = {}) {
    RingSpec s;
    s.family = RingFamily::galois_field;
    s.p = p;
    s.e = e;
    if (modulus.empty() && e >= 2 && is_prime(p) && p != 2) modulus = find_irreducible(p, e);
    s.modulus = std::move(modulus);
    s.validate();
    return s;
  }

  static RingSpec mod_prime_power(std::uint32_t p, std::uint32_t ell) {
    RingSpec s;
    s.family = RingFamily::mod_prime_power;
    s.p = p;
    s.ell = ell;
    s.validate();
    return s;
  }

  bool is_field() const { return family != RingFamily::mod_prime_power; }

  /// Largest meaningful p-adic valuation: l for Z/p^l Z, 1 for fields.
  std::uint32_t depth() const { return family == RingFamily::mod_prime_power ? ell : 1; }

  std::uint32_t degree() const { return family == RingFamily::galois_field ? e : 1; }

  std::uint64_t size() const {
    const std::uint32_t exp = family == RingFamily::galois_field      ? e
                              : family == RingFamily::mod_prime_power ? ell
                                                                      : 1;
    std::uint64_t n = 1;
    for (std::uint32_t i = 0; i < exp; ++i) n = n > std::numeric_limits<std::uint64_t>::max() / p ? std::numeric_limits<std::uint64_t>::max() : n * p;
    return n;
  }

  std::string name() const {
    switch (family) {
      case RingFamily::prime_field:
        return "F_" + std::to_string(p);
      case RingFamily::galois_field:
        return "F_" + std::to_string(size());
      case RingFamily::mod_prime_power:
        return "Z/" + std::to_string(size()) + "Z";
    }
    return "?";
  }

  void validate() const {
    if (p == 2) throw InvalidRingSpec("characteristic 2 is not supported");
    if (!is_prime(p)) throw InvalidRingSpec("p = " + std::to_string(p) + " is not prime");
    switch (family) {
      case RingFamily::prime_field:
        if (e != 1 || ell != 1 || !modulus.empty())
          throw InvalidRingSpec("prime-field takes only p");
        break;
      case RingFamily::galois_field: {
        if (e < 1) throw InvalidRingSpec("galois-field needs e >= 1");
        if (ell != 1) throw InvalidRingSpec("galois-field does not take ell");
        if (e == 1 && modulus.empty()) break;
        if (modulus.size() != e + 1) throw InvalidRingSpec("modulus must have e + 1 coefficients");
        if (modulus.back() != 1) throw InvalidRingSpec("modulus must be monic");
        for (auto c : modulus)
          if (c >= p) throw InvalidRingSpec("modulus coefficient out of range");
        if (!detail::is_irreducible(modulus, p))
          throw InvalidRingSpec("modulus is reducible over F_" + std::to_string(p));
        break;
      }
      case RingFamily::mod_prime_power:
        if (ell < 1) throw InvalidRingSpec("mod-prime-power needs ell >= 1");
        if (e != 1 || !modulus.empty()) throw InvalidRingSpec("mod-prime-power takes only p and ell");
        break;
    }
    if (size() > kMaxSize) throw InvalidRingSpec("ring too large: " + std::to_string(size()));
  }

  friend bool operator==(const RingSpec&, const RingSpec&) = default;
};

/// A ring element: its canonical code. Carries no reference to its ring.
struct Elem {
  std::uint32_t code = 0;

  friend constexpr auto operator<=>(Elem, Elem) = default;
};

/// Arithmetic context for one RingSpec. Immutable after construction and safe to share.
class Ring {
 public:
  explicit Ring(RingSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    n_ = static_cast<std::uint32_t>(spec_.size());
    modulus_ = spec_.modulus;
    if (modulus_.empty()) modulus_ = {0, 1};
    build_tables();
  }

  const RingSpec& spec() const { return spec_; }
  std::uint32_t size() const { return n_; }
  std::uint32_t characteristic() const { return spec_.p; }

  Elem zero() const { return Elem{0}; }
  Elem one() const { return Elem{1}; }

  /// Image of an integer under Z -> R.
  Elem from_int(std::int64_t v) const {
    const std::int64_t m = spec_.family == RingFamily::galois_field ? spec_.p : n_;
    return Elem{static_cast<std::uint32_t>(((v % m) + m) % m)};
  }

  Elem from_coefficients(std::span<const std::uint32_t> coeffs) const {
    if (spec_.family != RingFamily::galois_field) {
      if (coeffs.size() != 1) throw DomainMismatch("expected a single residue");
      return checked(Elem{coeffs[0]});
    }
    if (coeffs.size() != spec_.e) throw DomainMismatch("expected e coefficients");
    std::uint32_t code = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) {
      if (coeffs[i] >= spec_.p) throw DomainMismatch("coefficient out of range");
      code = code * spec_.p + coeffs[i];
    }
    return Elem{code};
  }

  /// Coefficient vector (galois-field) or the one-entry residue list.
  std::vector<std::uint32_t> coefficients(Elem a) const {
    check(a);
    if (spec_.family != RingFamily::galois_field) return {a.code};
    std::vector<std::uint32_t> c(spec_.e);
    std::uint32_t v = a.code;
    for (auto& x : c) {
      x = v % spec_.p;
      v /= spec_.p;
    }
    return c;
  }

  void check(Elem a) const {
    if (a.code >= n_)
      throw DomainMismatch("element code " + std::to_string(a.code) + " is not in " + spec_.name());
  }

  Elem checked(Elem a) const {
    check(a);
    return a;
  }

  Elem add(Elem a, Elem b) const {
    check(a);
    check(b);
    if (!add_.empty()) return Elem{add_[a.code * n_ + b.code]};
    return raw_add(a, b);
  }

  Elem neg(Elem a) const {
    check(a);
    return Elem{neg_[a.code]};
  }

  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }

  Elem mul(Elem a, Elem b) const {
    check(a);
    check(b);
    if (!mul_.empty()) return Elem{mul_[a.code * n_ + b.code]};
    return raw_mul(a, b);
  }

  bool is_unit(Elem a) const {
    check(a);
    return valuation_[a.code] == 0;
  }

  Elem inv(Elem a) const {
    check(a);
    if (valuation_[a.code] != 0)
      throw NonInvertible("element " + std::to_string(a.code) + " is not a unit of " + spec_.name());
    return Elem{inv_[a.code]};
  }

  /// p-adic valuation: largest m <= depth() with p^m | a; depth() for zero.
  std::uint32_t valuation(Elem a) const {
    check(a);
    return valuation_[a.code];
  }

  /// All elements in ascending code order.
  auto elements() const {
    return std::views::iota(std::uint32_t{0}, n_) |
           std::views::transform([](std::uint32_t c) { return Elem{c}; });
  }

  std::vector<Elem> units() const {
    std::vector<Elem> out;
    for (std::uint32_t c = 0; c < n_; ++c)
      if (valuation_[c] == 0) out.push_back(Elem{c});
    return out;
  }

  /// Valuation of every code, indexable by Elem::code.
  std::span<const std::uint8_t> valuation_table() const { return valuation_; }

 private:
  static constexpr std::uint32_t kTableLimit = 1024;

  Elem raw_add(Elem a, Elem b) const {
    if (spec_.family != RingFamily::galois_field) return Elem{(a.code + b.code) % n_};
    std::uint32_t x = a.code, y = b.code, out = 0, place = 1;
    for (std::uint32_t i = 0; i < spec_.e; ++i) {
      out += ((x % spec_.p + y % spec_.p) % spec_.p) * place;
      x /= spec_.p;
      y /= spec_.p;
      place *= spec_.p;
    }
    return Elem{out};
  }

  Elem raw_mul(Elem a, Elem b) const {
    if (spec_.family != RingFamily::galois_field)
      return Elem{static_cast<std::uint32_t>(std::uint64_t{a.code} * b.code % n_)};
    auto to_poly = [&](std::uint32_t v) {
      detail::Poly out(spec_.e);
      for (auto& c : out) {
        c = v % spec_.p;
        v /= spec_.p;
      }
      detail::trim(out);
      return out;
    };
    auto r = detail::poly_mod(detail::poly_mul(to_poly(a.code), to_poly(b.code), spec_.p),
                              modulus_, spec_.p);
    std::uint32_t code = 0;
    for (std::size_t i = r.size(); i-- > 0;) code = code * spec_.p + r[i];
    return Elem{code};
  }

  void build_tables() {
    neg_.resize(n_);
    for (std::uint32_t a = 0; a < n_; ++a) {
      // -a is the unique b with a + b = 0.
      if (spec_.family != RingFamily::galois_field) {
        neg_[a] = (n_ - a) % n_;
      } else {
        std::uint32_t x = a, out = 0, place = 1;
        for (std::uint32_t i = 0; i < spec_.e; ++i) {
          out += ((spec_.p - x % spec_.p) % spec_.p) * place;
          x /= spec_.p;
          place *= spec_.p;
        }
        neg_[a] = out;
      }
    }
    if (n_ <= kTableLimit) {
      add_.resize(std::size_t{n_} * n_);
      mul_.resize(std::size_t{n_} * n_);
      for (std::uint32_t a = 0; a < n_; ++a)
        for (std::uint32_t b = 0; b < n_; ++b) {
          add_[a * n_ + b] = raw_add(Elem{a}, Elem{b}).code;
          mul_[a * n_ + b] = raw_mul(Elem{a}, Elem{b}).code;
        }
    }
    valuation_.assign(n_, 0);
    inv_.assign(n_, 0);
    if (spec_.is_field()) {
      valuation_[0] = 1;
      for (std::uint32_t a = 1; a < n_; ++a) {
        // a^(q-2) = a^-1 in F_q^*.
        Elem r{1}, b{a};
        for (std::uint32_t e = n_ - 2; e > 0; e >>= 1) {
          if (e & 1) r = raw_mul(r, b);
          b = raw_mul(b, b);
        }
        inv_[a] = r.code;
      }
    } else {
      for (std::uint32_t a = 0; a < n_; ++a) {
        std::uint32_t v = 0, x = a;
        if (x == 0) {
          v = spec_.ell;
        } else {
          while (x % spec_.p == 0) {
            x /= spec_.p;
            ++v;
          }
        }
        valuation_[a] = static_cast<std::uint8_t>(v);
        if (v == 0) {
          // Extended Euclid modulo n.
          std::int64_t t = 0, new_t = 1, r = n_, new_r = a;
          while (new_r != 0) {
            const std::int64_t q = r / new_r;
            t = std::exchange(new_t, t - q * new_t);
            r = std::exchange(new_r, r - q * new_r);
          }
          inv_[a] = static_cast<std::uint32_t>((t % n_ + n_) % n_);
        }
      }
    }
  }

  RingSpec spec_;
  detail::Poly modulus_;
  std::uint32_t n_ = 0;
  std::vector<std::uint32_t> add_, mul_, neg_, inv_;
  std::vector<std::uint8_t> valuation_;
};

}  // namespace areal
