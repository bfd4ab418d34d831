#pragma once

// Shared fixtures and brute-force oracles. The oracles deliberately avoid the
// library's fast paths: they work from Configuration objects and plain loops.

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "areal/areal.hpp"

namespace areal::testing {

inline std::vector<RingSpec> small_rings() {
  return {RingSpec::prime_field(3),     RingSpec::prime_field(5),     RingSpec::prime_field(7),
          RingSpec::galois_field(3, 2), RingSpec::galois_field(5, 2), RingSpec::galois_field(3, 3),
          RingSpec::galois_field(3, 4), RingSpec::mod_prime_power(3, 2), RingSpec::mod_prime_power(3, 3),
          RingSpec::mod_prime_power(3, 4), RingSpec::mod_prime_power(5, 2), RingSpec::mod_prime_power(7, 2)};
}

inline Vec2 v(std::uint32_t a, std::uint32_t b) { return Vec2{Elem{a}, Elem{b}}; }

inline Configuration cfg(std::initializer_list<Vec2> pts) { return Configuration(std::vector<Vec2>(pts)); }

/// Calls fn(Configuration) for every tuple of E^{k+1}, first coordinate slowest.
template <class Fn>
void for_each_tuple(const PointSet& e, std::size_t k, Fn&& fn) {
  const std::size_t n = e.size();
  if (n == 0) return;
  std::vector<std::size_t> idx(k + 1, 0);
  while (true) {
    std::vector<Vec2> pts;
    for (auto i : idx) pts.push_back(e[i]);
    fn(Configuration(std::move(pts)));
    std::size_t pos = k + 1;
    while (pos > 0 && ++idx[pos - 1] == n) idx[--pos] = 0;
    if (pos == 0) return;
  }
}

inline std::vector<std::uint64_t> naive_level_counts(const Ring& r, const PointSet& e, std::size_t k) {
  std::vector<std::uint64_t> out(r.spec().depth() + 1, 0);
  for_each_tuple(e, k, [&](const Configuration& x) { ++out[badness_level(r, x).m]; });
  return out;
}

inline std::uint64_t naive_class_count(const Ring& r, const PointSet& e, std::size_t k) {
  std::set<std::string> seen;
  for_each_tuple(e, k, [&](const Configuration& x) { seen.insert(signature(r, x).encode()); });
  return seen.size();
}

inline std::vector<SL2Elem> naive_sl2(const Ring& r) {
  std::vector<SL2Elem> out;
  for (auto a : r.elements())
    for (auto b : r.elements())
      for (auto c : r.elements())
        for (auto d : r.elements()) {
          const Mat2 m{a, b, c, d};
          if (det(r, m) == r.one()) out.push_back(SL2Elem::from_matrix(r, m));
        }
  return out;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Elem random_elem(const Ring& r, std::mt19937_64& g) {
  return Elem{static_cast<std::uint32_t>(std::uniform_int_distribution<std::uint32_t>(0, r.size() - 1)(g))};
}

inline Vec2 random_vec(const Ring& r, std::mt19937_64& g) { return Vec2{random_elem(r, g), random_elem(r, g)}; }

inline Configuration random_config(const Ring& r, std::size_t k, std::mt19937_64& g) {
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i <= k; ++i) pts.push_back(random_vec(r, g));
  return Configuration(std::move(pts));
}

}  // namespace areal::testing
