#include "toast/zone.hpp"

#include <algorithm>
#include <stdexcept>

namespace toast {

bool Bound::operator<(const Bound& o) const
{
  if (inf) return false;
  if (o.inf) return true;
  if (c != o.c) return c < o.c;
  return strict && !o.strict;
}

bool Bound::operator==(const Bound& o) const
{
  if (inf || o.inf) return inf == o.inf;
  return c == o.c && strict == o.strict;
}

Bound Bound::operator+(const Bound& o) const
{
  if (inf || o.inf) return infinity();
  return {c + o.c, strict || o.strict, false};
}

Zone::Zone(std::vector<ClockId> clocks) : clocks_(std::move(clocks)), d_(dim() * dim(), Bound::infinity())
{
  for (std::size_t i = 0; i < dim(); ++i) {
    ref(i, i) = Bound::le(0);
    ref(0, i) = Bound::le(0);
  }
}

std::size_t Zone::index(const ClockId& x) const
{
  for (std::size_t k = 0; k < clocks_.size(); ++k)
    if (clocks_[k] == x) return k + 1;
  throw std::out_of_range("clock '" + x + "' not in zone");
}

void Zone::constrain(std::size_t i, std::size_t j, const Bound& b)
{
  if (b < ref(i, j)) ref(i, j) = b;
}

bool Zone::canonicalize()
{
  const std::size_t n = dim();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      if (ref(i, k).inf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        Bound s = ref(i, k) + ref(k, j);
        if (s < ref(i, j)) ref(i, j) = s;
      }
    }
  empty_ = false;
  for (std::size_t i = 0; i < n; ++i)
    if (ref(i, i) < Bound::le(0)) empty_ = true;
  return !empty_;
}

void Zone::down()
{
  if (empty_) return;
  for (std::size_t i = 1; i < dim(); ++i) ref(0, i) = Bound::le(0);
  canonicalize();
}

void Zone::reset(std::size_t i)
{
  if (empty_) return;
  for (std::size_t j = 0; j < dim(); ++j) {
    if (j == i) continue;
    ref(i, j) = at(0, j);
    ref(j, i) = at(j, 0);
  }
  ref(i, i) = Bound::le(0);
}

static bool within(const Rat& diff, const Bound& b)
{
  if (b.inf) return true;
  return b.strict ? diff < b.c : diff <= b.c;
}

bool Zone::contains(const Valuation& nu) const
{
  if (empty_) return false;
  std::vector<Rat> v(dim(), Rat(0));
  for (std::size_t k = 0; k < clocks_.size(); ++k) v[k + 1] = nu.get(clocks_[k]);
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j)
      if (!within(v[i] - v[j], at(i, j))) return false;
  return true;
}

bool Zone::includes(const Zone& o) const
{
  if (o.empty_) return true;
  if (empty_) return false;
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j)
      if (!(o.at(i, j) <= at(i, j))) return false;
  return true;
}

bool Zone::operator==(const Zone& o) const
{
  if (empty_ || o.empty_) return empty_ == o.empty_;
  return clocks_ == o.clocks_ && d_ == o.d_;
}

namespace {

struct Entry {
  std::size_t i, j;
};

Zone rebuild(const std::vector<ClockId>& clocks, const Zone& src, const std::vector<Entry>& keep)
{
  Zone z(clocks);
  for (const auto& e : keep) z.constrain(e.i, e.j, src.at(e.i, e.j));
  z.canonicalize();
  return z;
}

Constraint atom_for(const Zone& z, std::size_t i, std::size_t j)
{
  const Bound& b = z.at(i, j);
  const auto& cl = z.clocks();
  if (j == 0) {
    const ClockId& x = cl[i - 1];
    if (!b.strict && b.c == 0) return cc::eq(x, 0);
    return b.strict ? cc::lt(x, b.c) : cc::le(x, b.c);
  }
  if (i == 0) {
    const ClockId& x = cl[j - 1];
    return b.strict ? cc::gt(x, -b.c) : cc::ge(x, -b.c);
  }
  const ClockId& x = cl[i - 1];
  const ClockId& y = cl[j - 1];
  if (b.c >= 0) return b.strict ? cc::diff_lt(x, y, b.c) : cc::diff_le(x, y, b.c);
  return b.strict ? cc::diff_gt(y, x, -b.c) : cc::diff_ge(y, x, -b.c);
}

Constraint conj_all(const std::vector<Constraint>& v)
{
  if (v.empty()) return cc::tru();
  Constraint r = v[0];
  for (std::size_t k = 1; k < v.size(); ++k) r = cc::conj(r, v[k]);
  return r;
}

}  // namespace

Constraint Zone::to_constraint() const
{
  if (empty_) return cc::fls();
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j) {
      if (i == j || at(i, j).inf) continue;
      if (i == 0 && at(i, j) == Bound::le(0)) continue;
      entries.push_back({i, j});
    }
  for (std::size_t k = 0; k < entries.size();) {
    std::vector<Entry> rest = entries;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
    if (rebuild(clocks_, *this, rest) == *this)
      entries = std::move(rest);
    else
      ++k;
  }
  std::vector<Constraint> atoms;
  std::vector<bool> used(entries.size(), false);
  for (std::size_t a = 0; a < entries.size(); ++a) {
    if (used[a]) continue;
    const Entry& e = entries[a];
    used[a] = true;
    bool paired = false;
    for (std::size_t b = a + 1; b < entries.size(); ++b) {
      const Entry& f = entries[b];
      if (used[b] || f.i != e.j || f.j != e.i) continue;
      const Bound& p = at(e.i, e.j);
      const Bound& q = at(f.i, f.j);
      if (p.strict || q.strict || p.c != -q.c) continue;
      used[b] = true;
      paired = true;
      std::size_t i = e.i, j = e.j;
      if (i == 0) std::swap(i, j);
      std::int64_t c = at(i, j).c;
      if (j == 0)
        atoms.push_back(cc::eq(clocks_[i - 1], c));
      else if (c >= 0)
        atoms.push_back(cc::diff_eq(clocks_[i - 1], clocks_[j - 1], c));
      else
        atoms.push_back(cc::diff_eq(clocks_[j - 1], clocks_[i - 1], -c));
      break;
    }
    if (!paired) atoms.push_back(atom_for(*this, e.i, e.j));
  }
  return conj_all(atoms);
}

IntervalSet Zone::delay_set(const Valuation& nu) const
{
  if (empty_) return {};
  std::vector<Rat> v(dim(), Rat(0));
  for (std::size_t k = 0; k < clocks_.size(); ++k) v[k + 1] = nu.get(clocks_[k]);
  for (std::size_t i = 1; i < dim(); ++i)
    for (std::size_t j = 1; j < dim(); ++j)
      if (!within(v[i] - v[j], at(i, j))) return {};
  Interval iv;
  for (std::size_t i = 1; i < dim(); ++i) {
    const Bound& up = at(i, 0);  // v[i] + t <= c
    if (!up.inf) {
      Rat h = Rat(up.c) - v[i];
      if (!iv.hi || h < *iv.hi || (h == *iv.hi && up.strict)) {
        iv.hi = h;
        iv.hi_open = up.strict;
      }
    }
    const Bound& lo = at(0, i);  // -(v[i] + t) <= c  ->  t >= -c - v[i]
    if (!lo.inf) {
      Rat l = Rat(-lo.c) - v[i];
      if (l > iv.lo || (l == iv.lo && lo.strict)) {
        iv.lo = l;
        iv.lo_open = lo.strict;
      }
    }
  }
  if (iv.lo < 0) {
    iv.lo = 0;
    iv.lo_open = false;
  }
  return IntervalSet(iv);
}

bool ZoneDNF::contains(const Valuation& nu) const
{
  for (const auto& z : zones)
    if (z.contains(nu)) return true;
  return false;
}

namespace {

void prune(std::vector<Zone>& zs)
{
  std::vector<Zone> out;
  for (std::size_t a = 0; a < zs.size(); ++a) {
    if (zs[a].empty()) continue;
    bool covered = false;
    for (std::size_t b = 0; b < zs.size() && !covered; ++b) {
      if (a == b || zs[b].empty()) continue;
      if (zs[b].includes(zs[a]) && (!zs[a].includes(zs[b]) || b < a)) covered = true;
    }
    if (!covered) out.push_back(zs[a]);
  }
  zs = std::move(out);
}

std::vector<Zone> atom_zone(const std::vector<ClockId>& cl, std::size_t i, std::size_t j, const Bound& b)
{
  Zone z(cl);
  z.constrain(i, j, b);
  if (!z.canonicalize()) return {};
  return {z};
}

std::vector<Zone> build(const Constraint& d, bool neg, const std::vector<ClockId>& cl, const Zone& proto)
{
  auto idx = [&](const ClockId& x) { return proto.index(x); };
  switch (d->kind) {
    case CKind::True:
      if (neg) return {};
      return {Zone(cl)};
    case CKind::Not: return build(d->a, !neg, cl, proto);
    case CKind::And: {
      auto l = build(d->a, neg, cl, proto);
      auto r = build(d->b, neg, cl, proto);
      std::vector<Zone> out;
      if (neg) {
        out = l;
        out.insert(out.end(), r.begin(), r.end());
      } else {
        for (const auto& za : l)
          for (const auto& zb : r) {
            Zone z = za;
            for (std::size_t i = 0; i < z.dim(); ++i)
              for (std::size_t j = 0; j < z.dim(); ++j) z.constrain(i, j, zb.at(i, j));
            if (z.canonicalize()) out.push_back(z);
          }
      }
      prune(out);
      return out;
    }
    case CKind::Gt: {
      std::size_t x = idx(d->x);
      if (!neg) return atom_zone(cl, 0, x, Bound::lt(-d->n));
      return atom_zone(cl, x, 0, Bound::le(d->n));
    }
    case CKind::Eq: {
      std::size_t x = idx(d->x);
      if (!neg) {
        Zone z(cl);
        z.constrain(x, 0, Bound::le(d->n));
        z.constrain(0, x, Bound::le(-d->n));
        if (!z.canonicalize()) return {};
        return {z};
      }
      auto a = atom_zone(cl, x, 0, Bound::lt(d->n));
      auto b = atom_zone(cl, 0, x, Bound::lt(-d->n));
      a.insert(a.end(), b.begin(), b.end());
      return a;
    }
    case CKind::DiffGt: {
      std::size_t x = idx(d->x), y = idx(d->y);
      if (!neg) return atom_zone(cl, y, x, Bound::lt(-d->n));
      return atom_zone(cl, x, y, Bound::le(d->n));
    }
    case CKind::DiffEq: {
      std::size_t x = idx(d->x), y = idx(d->y);
      if (!neg) {
        Zone z(cl);
        z.constrain(x, y, Bound::le(d->n));
        z.constrain(y, x, Bound::le(-d->n));
        if (!z.canonicalize()) return {};
        return {z};
      }
      auto a = atom_zone(cl, x, y, Bound::lt(d->n));
      auto b = atom_zone(cl, y, x, Bound::lt(-d->n));
      a.insert(a.end(), b.begin(), b.end());
      return a;
    }
  }
  return {};
}

}  // namespace

ZoneDNF normalize(const Constraint& d, const ClockSet& clocks)
{
  ClockSet all = clocks;
  for (const auto& c : clocks_of(d)) all.insert(c);
  ZoneDNF r;
  r.clocks.assign(all.begin(), all.end());
  Zone proto(r.clocks);
  r.zones = build(d, false, r.clocks, proto);
  prune(r.zones);
  return r;
}

ZoneDNF normalize(const Constraint& d) { return normalize(d, {}); }

Constraint denormalize(const ZoneDNF& z)
{
  if (z.zones.empty()) return cc::fls();
  Constraint r = z.zones[0].to_constraint();
  for (std::size_t k = 1; k < z.zones.size(); ++k) r = cc::disj(r, z.zones[k].to_constraint());
  return r;
}

bool satisfiable(const Constraint& d) { return !normalize(d).empty(); }

bool entails(const Constraint& d1, const Constraint& d2) { return !satisfiable(cc::conj(d1, cc::neg(d2))); }

bool equivalent(const Constraint& d1, const Constraint& d2) { return entails(d1, d2) && entails(d2, d1); }

Constraint constraint_reset(const Constraint& d, const ClockSet& lambda)
{
  ZoneDNF z = normalize(d, lambda);
  for (auto& zone : z.zones)
    for (const auto& x : lambda) zone.reset(zone.index(x));
  prune(z.zones);
  return denormalize(z);
}

Constraint past(const Constraint& d)
{
  ZoneDNF z = normalize(d);
  for (auto& zone : z.zones) zone.down();
  prune(z.zones);
  return denormalize(z);
}

IntervalSet delay_set(const Valuation& nu, const Constraint& d)
{
  ZoneDNF z = normalize(d);
  IntervalSet r;
  for (const auto& zone : z.zones) r = r.unite(zone.delay_set(nu));
  return r;
}

std::vector<Rat> representative_delays(const Constraint& d, std::int64_t M)
{
  std::vector<Rat> out;
  ClockSet cl = clocks_of(d);
  for (std::int64_t k = 0; k <= 2 * (M + 1); ++k) {
    Rat t(k, 2);
    Valuation v;
    for (const auto& c : cl) v.set(c, t);
    if (sat(v, d)) out.push_back(t);
  }
  return out;
}

}  // namespace toast
