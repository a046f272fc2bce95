#pragma once

#include "toast/constraint.hpp"
#include "toast/intervals.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace toast {

// Upper bound on a clock difference: xi - xj < c or xi - xj <= c, or none.
struct Bound {
  std::int64_t c = 0;
  bool strict = false;
  bool inf = true;

  static Bound infinity() { return {}; }
  static Bound le(std::int64_t c) { return {c, false, false}; }
  static Bound lt(std::int64_t c) { return {c, true, false}; }

  bool operator<(const Bound& o) const;
  bool operator==(const Bound& o) const;
  bool operator<=(const Bound& o) const { return *this < o || *this == o; }
  Bound operator+(const Bound& o) const;
};

// Difference-bound matrix over clocks plus the reference clock at index 0.
class Zone {
 public:
  explicit Zone(std::vector<ClockId> clocks);

  const std::vector<ClockId>& clocks() const { return clocks_; }
  std::size_t dim() const { return clocks_.size() + 1; }
  std::size_t index(const ClockId& x) const;

  const Bound& at(std::size_t i, std::size_t j) const { return d_[i * dim() + j]; }
  void constrain(std::size_t i, std::size_t j, const Bound& b);

  // Floyd-Warshall closure; returns false when the zone is empty.
  bool canonicalize();
  bool empty() const { return empty_; }

  void down();
  void reset(std::size_t i);

  bool contains(const Valuation& nu) const;
  bool includes(const Zone& o) const;
  bool operator==(const Zone& o) const;

  Constraint to_constraint() const;
  // { t >= 0 | nu + t in zone }
  IntervalSet delay_set(const Valuation& nu) const;

 private:
  Bound& ref(std::size_t i, std::size_t j) { return d_[i * dim() + j]; }
  std::vector<ClockId> clocks_;
  std::vector<Bound> d_;
  bool empty_ = false;
};

struct ZoneDNF {
  std::vector<ClockId> clocks;
  std::vector<Zone> zones;

  bool empty() const { return zones.empty(); }
  bool contains(const Valuation& nu) const;
};

ZoneDNF normalize(const Constraint& d);
ZoneDNF normalize(const Constraint& d, const ClockSet& clocks);
Constraint denormalize(const ZoneDNF& z);

bool satisfiable(const Constraint& d);
bool entails(const Constraint& d1, const Constraint& d2);
bool equivalent(const Constraint& d1, const Constraint& d2);
Constraint constraint_reset(const Constraint& d, const ClockSet& lambda);
Constraint past(const Constraint& d);

// { t >= 0 | nu + t satisfies d }; exact.
IntervalSet delay_set(const Valuation& nu, const Constraint& d);

// Points of {0, 1/2, ..., M+1} satisfying d, where every clock of d is read as the delay.
std::vector<Rat> representative_delays(const Constraint& d, std::int64_t M);

}  // namespace toast
