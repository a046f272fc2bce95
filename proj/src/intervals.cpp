#include "toast/intervals.hpp"

#include <algorithm>

namespace toast {

bool Interval::empty() const
{
  if (!hi) return false;
  if (*hi < lo) return true;
  if (*hi == lo) return lo_open || hi_open;
  return false;
}

bool Interval::contains(const Rat& t) const
{
  if (t < lo || (lo_open && t == lo)) return false;
  if (!hi) return true;
  if (t > *hi || (hi_open && t == *hi)) return false;
  return true;
}

IntervalSet::IntervalSet(const Interval& i)
{
  add(i);
  normalize();
}

IntervalSet IntervalSet::all()
{
  Interval i;
  return IntervalSet(i);
}

bool IntervalSet::contains(const Rat& t) const
{
  for (const auto& p : parts_)
    if (p.contains(t)) return true;
  return false;
}

void IntervalSet::add(const Interval& i0)
{
  Interval i = i0;
  if (i.lo < 0) {
    i.lo = 0;
    i.lo_open = false;
  }
  if (!i.empty()) parts_.push_back(i);
}

static bool lo_less(const Interval& a, const Interval& b)
{
  if (a.lo != b.lo) return a.lo < b.lo;
  return !a.lo_open && b.lo_open;
}

void IntervalSet::normalize()
{
  std::sort(parts_.begin(), parts_.end(), lo_less);
  std::vector<Interval> out;
  for (const auto& p : parts_) {
    if (!out.empty()) {
      auto& last = out.back();
      bool touches;
      if (!last.hi)
        touches = true;
      else if (p.lo < *last.hi)
        touches = true;
      else if (p.lo == *last.hi)
        touches = !(last.hi_open && p.lo_open);
      else
        touches = false;
      if (touches) {
        if (!last.hi) continue;
        if (!p.hi) {
          last.hi.reset();
          last.hi_open = false;
        } else if (*p.hi > *last.hi) {
          last.hi = p.hi;
          last.hi_open = p.hi_open;
        } else if (*p.hi == *last.hi) {
          last.hi_open = last.hi_open && p.hi_open;
        }
        continue;
      }
    }
    out.push_back(p);
  }
  parts_ = std::move(out);
}

IntervalSet IntervalSet::unite(const IntervalSet& o) const
{
  IntervalSet r = *this;
  for (const auto& p : o.parts_) r.parts_.push_back(p);
  r.normalize();
  return r;
}

IntervalSet IntervalSet::intersect(const IntervalSet& o) const
{
  IntervalSet r;
  for (const auto& a : parts_) {
    for (const auto& b : o.parts_) {
      Interval i;
      if (a.lo > b.lo || (a.lo == b.lo && a.lo_open)) {
        i.lo = a.lo;
        i.lo_open = a.lo_open;
      } else {
        i.lo = b.lo;
        i.lo_open = b.lo_open;
      }
      if (!a.hi) {
        i.hi = b.hi;
        i.hi_open = b.hi_open;
      } else if (!b.hi) {
        i.hi = a.hi;
        i.hi_open = a.hi_open;
      } else if (*a.hi < *b.hi || (*a.hi == *b.hi && a.hi_open)) {
        i.hi = a.hi;
        i.hi_open = a.hi_open;
      } else {
        i.hi = b.hi;
        i.hi_open = b.hi_open;
      }
      r.add(i);
    }
  }
  r.normalize();
  return r;
}

IntervalSet IntervalSet::shifted_down(const Rat& t) const
{
  IntervalSet r;
  for (const auto& p : parts_) {
    Interval i = p;
    i.lo -= t;
    if (i.hi) *i.hi -= t;
    r.add(i);
  }
  r.normalize();
  return r;
}

bool IntervalSet::operator==(const IntervalSet& o) const
{
  if (parts_.size() != o.parts_.size()) return false;
  for (std::size_t k = 0; k < parts_.size(); ++k) {
    const auto& a = parts_[k];
    const auto& b = o.parts_[k];
    if (a.lo != b.lo || a.lo_open != b.lo_open) return false;
    if (a.hi.has_value() != b.hi.has_value()) return false;
    if (a.hi && (*a.hi != *b.hi || a.hi_open != b.hi_open)) return false;
  }
  return true;
}

std::string IntervalSet::str() const
{
  if (parts_.empty()) return "{}";
  std::string s;
  for (const auto& p : parts_) {
    if (!s.empty()) s += " u ";
    s += p.lo_open ? "(" : "[";
    s += to_string(p.lo) + ", ";
    if (p.hi)
      s += to_string(*p.hi) + (p.hi_open ? ")" : "]");
    else
      s += "inf)";
  }
  return s;
}

}  // namespace toast
