#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "areal/linalg2.hpp"
#include "areal/ring.hpp"

namespace areal {

/// A finite subset E of R^2: sorted, deduplicated, with O(1) membership for small rings.
class PointSet {
 public:
  PointSet(const Ring& r, std::vector<Vec2> pts) : spec_(r.spec()), n_(r.size()), pts_(std::move(pts)) {
    for (const auto& v : pts_) {
      r.check(v.x1);
      r.check(v.x2);
    }
    std::sort(pts_.begin(), pts_.end());
    pts_.erase(std::unique(pts_.begin(), pts_.end()), pts_.end());
    if (std::uint64_t{n_} * n_ <= kBitmapLimit) {
      member_.assign(std::size_t{n_} * n_, 0);
      for (const auto& v : pts_) member_[plane_index(v)] = 1;
    }
  }

  const RingSpec& ring() const { return spec_; }
  std::span<const Vec2> points() const { return pts_; }
  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }
  const Vec2& operator[](std::size_t i) const { return pts_[i]; }

  bool contains(const Vec2& v) const {
    if (v.x1.code >= n_ || v.x2.code >= n_) return false;
    if (!member_.empty()) return member_[plane_index(v)] != 0;
    return std::binary_search(pts_.begin(), pts_.end(), v);
  }

  /// Row-major position of v in the full plane.
  std::size_t plane_index(const Vec2& v) const { return std::size_t{v.x1.code} * n_ + v.x2.code; }

  friend bool operator==(const PointSet& a, const PointSet& b) {
    return a.spec_ == b.spec_ && a.pts_ == b.pts_;
  }

 private:
  static constexpr std::uint64_t kBitmapLimit = std::uint64_t{1} << 26;

  RingSpec spec_;
  std::uint32_t n_;
  std::vector<Vec2> pts_;
  std::vector<std::uint8_t> member_;
};

}  // namespace areal
