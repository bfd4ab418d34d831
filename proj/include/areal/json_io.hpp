#pragma once

// JSON and CSV forms of the library's data. Exact integers are written as
// decimal strings so that no consumer truncates them to 53 bits. Ring elements
// are written as their integer codes (for F_{p^e}, sum c_i p^i).

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "areal/bigint.hpp"
#include "areal/census.hpp"
#include "areal/constructions.hpp"
#include "areal/linalg2.hpp"
#include "areal/point_set.hpp"
#include "areal/ring.hpp"

namespace areal {

using Json = nlohmann::ordered_json;

inline std::string dec(const BigInt& v) { return to_decimal(v); }
inline std::string dec(std::uint64_t v) { return std::to_string(v); }

// ----------------------------------------------------------------------------
// RingSpec

inline Json to_json(const RingSpec& s) {
  Json j;
  j["family"] = to_string(s.family);
  j["p"] = s.p;
  if (s.family == RingFamily::galois_field) {
    j["e"] = s.e;
    if (!s.modulus.empty()) j["modulus"] = s.modulus;
  }
  if (s.family == RingFamily::mod_prime_power) j["ell"] = s.ell;
  return j;
}

namespace detail {

inline std::uint64_t get_uint(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InvalidConfig(where + ": missing \"" + key + "\"");
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    throw InvalidConfig(where + ": \"" + key + "\" must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

inline std::uint64_t get_uint_or(const Json& j, const char* key, std::uint64_t fallback, const std::string& where) {
  return j.contains(key) ? get_uint(j, key, where) : fallback;
}

inline std::uint32_t narrow32(std::uint64_t v, const std::string& what) {
  if (v > 0xffffffffULL) throw InvalidConfig(what + " out of range");
  return static_cast<std::uint32_t>(v);
}

}  // namespace detail

/// Throws InvalidConfig for structural problems and InvalidRingSpec for invalid rings.
inline RingSpec ring_spec_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidConfig("ring: expected an object");
  if (!j.contains("family") || !j.at("family").is_string()) throw InvalidConfig("ring: missing \"family\"");
  const auto family = parse_ring_family(j.at("family").get<std::string>());
  if (!family) throw InvalidConfig("ring: unknown family \"" + j.at("family").get<std::string>() + "\"");
  const auto p = detail::narrow32(detail::get_uint(j, "p", "ring"), "ring.p");
  switch (*family) {
    case RingFamily::prime_field:
      return RingSpec::prime_field(p);
    case RingFamily::galois_field: {
      const auto e = detail::narrow32(detail::get_uint(j, "e", "ring"), "ring.e");
      std::vector<std::uint32_t> modulus;
      if (j.contains("modulus")) {
        if (!j.at("modulus").is_array()) throw InvalidConfig("ring.modulus must be an array");
        for (const auto& c : j.at("modulus")) {
          if (!c.is_number_integer() || c.get<std::int64_t>() < 0) throw InvalidConfig("ring.modulus entries must be nonnegative integers");
          modulus.push_back(detail::narrow32(c.get<std::uint64_t>(), "ring.modulus entry"));
        }
      }
      return RingSpec::galois_field(p, e, std::move(modulus));
    }
    case RingFamily::mod_prime_power:
      return RingSpec::mod_prime_power(p, detail::narrow32(detail::get_uint(j, "ell", "ring"), "ring.ell"));
  }
  throw InvalidConfig("ring: unreachable");
}

// ----------------------------------------------------------------------------
// Elements, vectors, matrices

inline Json to_json(const Vec2& v) { return Json::array({v.x1.code, v.x2.code}); }

/// Row-major [[a, b], [c, d]].
inline Json to_json(const Mat2& m) {
  return Json::array({Json::array({m.a.code, m.b.code}), Json::array({m.c.code, m.d.code})});
}

inline Elem elem_from_json(const Ring& r, const Json& j, const std::string& where) {
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    const auto v = j.get<std::uint64_t>();
    if (v >= r.size()) throw InvalidConfig(where + ": element " + std::to_string(v) + " is not in " + r.spec().name());
    return Elem{static_cast<std::uint32_t>(v)};
  }
  if (j.is_array() && r.spec().family == RingFamily::galois_field) {
    std::vector<std::uint32_t> coeffs;
    for (const auto& c : j) {
      if (!c.is_number_integer() || c.get<std::int64_t>() < 0) throw InvalidConfig(where + ": coefficients must be nonnegative integers");
      coeffs.push_back(detail::narrow32(c.get<std::uint64_t>(), where));
    }
    try {
      return r.from_coefficients(coeffs);
    } catch (const DomainMismatch& e) {
      throw InvalidConfig(where + ": " + e.what());
    }
  }
  throw InvalidConfig(where + ": expected a ring element");
}

// ----------------------------------------------------------------------------
// Constructions

enum class ConstructionKind { circle, union_circles, mod_sharpness, line_through_origin, random_subset, full_plane };

inline const char* to_string(ConstructionKind k) {
  switch (k) {
    case ConstructionKind::circle:
      return "circle";
    case ConstructionKind::union_circles:
      return "union-circles";
    case ConstructionKind::mod_sharpness:
      return "mod-sharpness";
    case ConstructionKind::line_through_origin:
      return "line-through-origin";
    case ConstructionKind::random_subset:
      return "random-subset";
    case ConstructionKind::full_plane:
      return "full-plane";
  }
  return "?";
}

/// Declarative description of a point set. Elements are stored as integer codes and
/// checked against the ring when the set is built.
struct ConstructionSpec {
  ConstructionKind kind = ConstructionKind::full_plane;
  std::vector<std::uint32_t> radii;             // circle (one entry), union-circles
  std::array<std::uint32_t, 2> direction{1, 0};  // line-through-origin
  std::uint64_t size = 0;                        // random-subset
  std::uint64_t seed = 0;                        // random-subset

  friend bool operator==(const ConstructionSpec&, const ConstructionSpec&) = default;
};

inline Json to_json(const ConstructionSpec& c) {
  Json j;
  j["kind"] = to_string(c.kind);
  switch (c.kind) {
    case ConstructionKind::circle:
      j["radius"] = c.radii.at(0);
      break;
    case ConstructionKind::union_circles:
      j["radii"] = c.radii;
      break;
    case ConstructionKind::line_through_origin:
      j["direction"] = Json::array({c.direction[0], c.direction[1]});
      break;
    case ConstructionKind::random_subset:
      j["size"] = c.size;
      j["seed"] = c.seed;
      break;
    default:
      break;
  }
  return j;
}

inline ConstructionSpec construction_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw InvalidConfig("construction: expected an object with a \"kind\"");
  const auto kind = j.at("kind").get<std::string>();
  ConstructionSpec c;
  auto read_elems = [&](const Json& arr, const char* what) {
    if (!arr.is_array()) throw InvalidConfig(std::string("construction.") + what + " must be an array");
    std::vector<std::uint32_t> out;
    for (const auto& v : arr) {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw InvalidConfig(std::string("construction.") + what + ": expected integers");
      out.push_back(detail::narrow32(v.get<std::uint64_t>(), what));
    }
    return out;
  };
  if (kind == "circle") {
    c.kind = ConstructionKind::circle;
    c.radii = {detail::narrow32(detail::get_uint(j, "radius", "construction"), "radius")};
  } else if (kind == "union-circles") {
    c.kind = ConstructionKind::union_circles;
    if (!j.contains("radii")) throw InvalidConfig("construction: missing \"radii\"");
    c.radii = read_elems(j.at("radii"), "radii");
  } else if (kind == "mod-sharpness") {
    c.kind = ConstructionKind::mod_sharpness;
  } else if (kind == "line-through-origin") {
    c.kind = ConstructionKind::line_through_origin;
    if (!j.contains("direction")) throw InvalidConfig("construction: missing \"direction\"");
    const auto d = read_elems(j.at("direction"), "direction");
    if (d.size() != 2) throw InvalidConfig("construction.direction must have two entries");
    c.direction = {d[0], d[1]};
  } else if (kind == "random-subset") {
    c.kind = ConstructionKind::random_subset;
    c.size = detail::get_uint(j, "size", "construction");
    c.seed = detail::get_uint_or(j, "seed", 0, "construction");
  } else if (kind == "full-plane") {
    c.kind = ConstructionKind::full_plane;
  } else {
    throw InvalidConfig("construction: unknown kind \"" + kind + "\"");
  }
  return c;
}

/// Throws InvalidConfig when the parameters do not fit the ring.
inline PointSet build(const Ring& r, const ConstructionSpec& c) {
  auto elem = [&](std::uint32_t code, const char* what) {
    if (code >= r.size())
      throw InvalidConfig(std::string("construction.") + what + ": " + std::to_string(code) + " is not in " +
                          r.spec().name());
    return Elem{code};
  };
  try {
    switch (c.kind) {
      case ConstructionKind::circle:
        return circle(r, elem(c.radii.at(0), "radius"));
      case ConstructionKind::union_circles: {
        std::vector<Elem> radii;
        for (auto v : c.radii) radii.push_back(elem(v, "radii"));
        return union_circles(r, radii);
      }
      case ConstructionKind::mod_sharpness:
        if (r.spec().family == RingFamily::galois_field)
          throw InvalidConfig("construction: mod-sharpness requires a mod-prime-power ring");
        return mod_sharpness_set(r);
      case ConstructionKind::line_through_origin:
        return line_through_origin(r, Vec2{elem(c.direction[0], "direction"), elem(c.direction[1], "direction")});
      case ConstructionKind::random_subset:
        return random_subset(r, c.size, c.seed);
      case ConstructionKind::full_plane:
        return full_plane(r);
    }
  } catch (const InvalidArgument& e) {
    throw InvalidConfig(std::string("construction: ") + e.what());
  }
  throw InvalidConfig("construction: unreachable");
}

// ----------------------------------------------------------------------------
// Reports

inline Json to_json(const LevelStats& s) {
  Json j;
  j["tuples"] = dec(s.tuples);
  j["classes"] = dec(s.classes);
  j["min_class_size"] = dec(s.min_class_size);
  j["max_class_size"] = dec(s.max_class_size);
  j["sum_sq_class_sizes"] = dec(s.sum_sq_class_sizes);
  return j;
}

inline Json to_json(const FMomentSummary& f) {
  Json j;
  j["A"] = to_fraction(f.mean);
  j["M"] = dec(f.max);
  j["R"] = to_fraction(f.residual);
  j["sum_f_squared"] = dec(f.sum_squares);
  j["sum_f_power"] = dec(f.sum_power);
  return j;
}

inline Json to_json(const CensusReport& c) {
  Json j;
  j["ring"] = to_json(c.ring);
  j["k"] = c.k;
  j["point_count"] = dec(c.point_count);
  j["total_tuples"] = dec(c.total_tuples);
  j["total_classes"] = dec(c.total_classes);
  Json levels = Json::array();
  for (std::size_t m = 0; m < c.levels.size(); ++m) {
    Json lv = to_json(c.levels[m]);
    lv["m"] = m;
    levels.push_back(std::move(lv));
  }
  j["levels"] = std::move(levels);
  if (c.nu) {
    Json nu = Json::object();
    for (std::size_t t = 0; t < c.nu->counts.size(); ++t) nu[std::to_string(t)] = dec(c.nu->counts[t]);
    j["nu"] = std::move(nu);
  }
  if (c.f_moments) j["f_moments"] = to_json(*c.f_moments);
  return j;
}

inline void write_nu_csv(std::ostream& os, const NuHistogram& h) {
  os << "t,count\n";
  for (std::size_t t = 0; t < h.counts.size(); ++t) os << t << ',' << h.counts[t] << '\n';
}

inline void write_points_csv(std::ostream& os, const PointSet& e) {
  os << "x1,x2\n";
  for (const auto& v : e.points()) os << v.x1.code << ',' << v.x2.code << '\n';
}

}  // namespace areal
