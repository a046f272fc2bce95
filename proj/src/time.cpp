#include "toast/time.hpp"

#include <limits>
#include <stdexcept>

namespace toast {

Rat Rat::make(__int128 n, __int128 d)
{
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 a = n < 0 ? -n : n, b = d;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  constexpr __int128 lim = std::numeric_limits<std::int64_t>::max();
  if (n > lim || n < -lim || d > lim) throw std::overflow_error("rational overflow");
  Rat r;
  r.num_ = static_cast<std::int64_t>(n);
  r.den_ = static_cast<std::int64_t>(d);
  return r;
}

Rat::Rat(std::int64_t n, std::int64_t d) { *this = make(n, d); }

std::int64_t Rat::floor() const
{
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

Rat operator+(const Rat& a, const Rat& b)
{
  return Rat::make(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                   static_cast<__int128>(a.den_) * b.den_);
}
Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }
Rat operator*(const Rat& a, const Rat& b)
{
  return Rat::make(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}
Rat operator/(const Rat& a, const Rat& b)
{
  return Rat::make(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
}
std::strong_ordering operator<=>(const Rat& a, const Rat& b)
{
  return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
}

std::string to_string(const Rat& r)
{
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rat parse_rat(const std::string& s)
{
  if (s.empty()) throw std::invalid_argument("empty number");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    auto n = std::stoll(s.substr(0, slash));
    auto d = std::stoll(s.substr(slash + 1));
    if (d == 0) throw std::invalid_argument("zero denominator in " + s);
    return Rat(n, d);
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    std::int64_t den = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
    std::int64_t num = (ip.empty() ? 0 : std::stoll(ip)) * den + (fp.empty() ? 0 : std::stoll(fp));
    return Rat(num, den);
  }
  return Rat(std::stoll(s));
}

Valuation Valuation::zero(const ClockSet& clocks)
{
  Valuation v;
  for (const auto& c : clocks) v.m_[c] = Rat(0);
  return v;
}

Rat Valuation::get(const ClockId& x) const
{
  auto it = m_.find(x);
  if (it == m_.end()) throw std::out_of_range("clock '" + x + "' is not in the valuation domain");
  return it->second;
}

void Valuation::set(const ClockId& x, const Rat& v)
{
  if (v < 0) throw std::invalid_argument("negative clock value");
  m_[x] = v;
}

ClockSet Valuation::domain() const
{
  ClockSet s;
  for (const auto& [k, v] : m_) s.insert(k);
  return s;
}

Valuation Valuation::advanced(const Rat& t) const
{
  if (t < 0) throw std::invalid_argument("negative delay");
  Valuation r = *this;
  for (auto& [k, v] : r.m_) v += t;
  return r;
}

Valuation Valuation::reset(const ClockSet& lambda) const
{
  Valuation r = *this;
  for (const auto& x : lambda) {
    auto it = r.m_.find(x);
    if (it == r.m_.end()) throw std::out_of_range("reset of unknown clock '" + x + "'");
    it->second = 0;
  }
  return r;
}

Valuation Valuation::extended(const ClockSet& clocks) const
{
  Valuation r = *this;
  for (const auto& c : clocks) r.m_.try_emplace(c, Rat(0));
  return r;
}

std::string Valuation::str() const
{
  std::string s = "{";
  bool first = true;
  for (const auto& [k, v] : m_) {
    if (!first) s += ", ";
    first = false;
    s += k + "=" + to_string(v);
  }
  return s + "}";
}

Valuation val_advance(const Valuation& nu, const Rat& t) { return nu.advanced(t); }
Valuation val_reset(const Valuation& nu, const ClockSet& lambda) { return nu.reset(lambda); }

}  // namespace toast
