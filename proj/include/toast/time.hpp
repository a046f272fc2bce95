#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace toast {

// Exact rational with int64 parts, kept normalised (den > 0, gcd 1).
// Overflow is checked through 128-bit intermediates.
class Rat {
 public:
  constexpr Rat() = default;
  Rat(std::int64_t n) : num_(n) {}  // NOLINT: implicit on purpose
  Rat(std::int64_t n, std::int64_t d);

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  std::int64_t floor() const;

  Rat operator-() const { return Rat(-num_, den_); }
  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  friend Rat operator+(const Rat& a, const Rat& b);
  friend Rat operator-(const Rat& a, const Rat& b);
  friend Rat operator*(const Rat& a, const Rat& b);
  friend Rat operator/(const Rat& a, const Rat& b);
  friend bool operator==(const Rat& a, const Rat& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b);

 private:
  static Rat make(__int128 n, __int128 d);
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};
using ClockId = std::string;
using ClockSet = std::set<ClockId>;

std::string to_string(const Rat& r);
// Accepts "3", "7/2" and "3.5".
Rat parse_rat(const std::string& s);

class Valuation {
 public:
  Valuation() = default;
  static Valuation zero(const ClockSet& clocks);

  bool has(const ClockId& x) const { return m_.count(x) != 0; }
  Rat get(const ClockId& x) const;
  void set(const ClockId& x, const Rat& v);
  const std::map<ClockId, Rat>& values() const { return m_; }
  ClockSet domain() const;

  Valuation advanced(const Rat& t) const;
  Valuation reset(const ClockSet& lambda) const;
  // Adds clocks missing from this valuation, initialised to zero.
  Valuation extended(const ClockSet& clocks) const;

  std::string str() const;

  bool operator==(const Valuation& o) const { return m_ == o.m_; }
  bool operator!=(const Valuation& o) const { return m_ != o.m_; }
  bool operator<(const Valuation& o) const { return m_ < o.m_; }

 private:
  std::map<ClockId, Rat> m_;
};

Valuation val_advance(const Valuation& nu, const Rat& t);
Valuation val_reset(const Valuation& nu, const ClockSet& lambda);

}  // namespace toast
