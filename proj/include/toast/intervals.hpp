#pragma once

#include "toast/time.hpp"

#include <optional>
#include <string>
#include <vector>

namespace toast {

// One interval of non-negative rationals. An absent upper bound means +inf.
struct Interval {
  Rat lo = 0;
  bool lo_open = false;
  std::optional<Rat> hi;
  bool hi_open = false;

  bool empty() const;
  bool contains(const Rat& t) const;
};

// Finite union of disjoint intervals kept sorted and merged.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(const Interval& i);
  static IntervalSet all();  // [0, inf)

  bool empty() const { return parts_.empty(); }
  bool contains(const Rat& t) const;
  const std::vector<Interval>& parts() const { return parts_; }

  IntervalSet unite(const IntervalSet& o) const;
  IntervalSet intersect(const IntervalSet& o) const;
  IntervalSet shifted_down(const Rat& t) const;  // { s - t | s in this, s >= t }

  bool operator==(const IntervalSet& o) const;
  std::string str() const;

 private:
  void add(const Interval& i);
  void normalize();
  std::vector<Interval> parts_;
};

}  // namespace toast
