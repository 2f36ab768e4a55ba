#pragma once

#include <compare>
#include <cstdint>
#include <utility>

namespace threatgraph {

using PersonId = std::int64_t;
using FrameIndex = std::int64_t;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Unordered person pair, stored with first < second.
class PairKey {
 public:
  PairKey(PersonId a, PersonId b) : lo_(a < b ? a : b), hi_(a < b ? b : a) {}

  PersonId first() const noexcept { return lo_; }
  PersonId second() const noexcept { return hi_; }

  friend auto operator<=>(const PairKey&, const PairKey&) = default;

 private:
  PersonId lo_;
  PersonId hi_;
};

}  // namespace threatgraph
