#include "toast/constraint.hpp"

#include <algorithm>
#include <stdexcept>

namespace toast {

namespace {

Constraint make(CKind k, ClockId x = {}, ClockId y = {}, std::int64_t n = 0, Constraint a = nullptr,
                Constraint b = nullptr)
{
  auto c = std::make_shared<CNode>();
  c->kind = k;
  c->x = std::move(x);
  c->y = std::move(y);
  c->n = n;
  c->a = std::move(a);
  c->b = std::move(b);
  return c;
}

void check_nat(std::int64_t n)
{
  if (n < 0) throw std::invalid_argument("clock constants must be natural numbers");
}

}  // namespace

namespace cc {
Constraint tru()
{
  static const Constraint t = make(CKind::True);
  return t;
}
Constraint fls() { return neg(tru()); }
Constraint gt(const ClockId& x, std::int64_t n)
{
  check_nat(n);
  return make(CKind::Gt, x, {}, n);
}
Constraint eq(const ClockId& x, std::int64_t n)
{
  check_nat(n);
  return make(CKind::Eq, x, {}, n);
}
Constraint diff_gt(const ClockId& x, const ClockId& y, std::int64_t n)
{
  check_nat(n);
  return make(CKind::DiffGt, x, y, n);
}
Constraint diff_eq(const ClockId& x, const ClockId& y, std::int64_t n)
{
  check_nat(n);
  return make(CKind::DiffEq, x, y, n);
}
Constraint neg(Constraint a) { return make(CKind::Not, {}, {}, 0, std::move(a)); }
Constraint conj(Constraint a, Constraint b) { return make(CKind::And, {}, {}, 0, std::move(a), std::move(b)); }

Constraint disj(Constraint a, Constraint b) { return neg(conj(neg(std::move(a)), neg(std::move(b)))); }
Constraint lt(const ClockId& x, std::int64_t n) { return conj(neg(gt(x, n)), neg(eq(x, n))); }
Constraint le(const ClockId& x, std::int64_t n) { return neg(gt(x, n)); }
Constraint ge(const ClockId& x, std::int64_t n) { return neg(conj(neg(gt(x, n)), neg(eq(x, n)))); }
Constraint diff_lt(const ClockId& x, const ClockId& y, std::int64_t n)
{
  return conj(neg(diff_gt(x, y, n)), neg(diff_eq(x, y, n)));
}
Constraint diff_le(const ClockId& x, const ClockId& y, std::int64_t n) { return neg(diff_gt(x, y, n)); }
Constraint diff_ge(const ClockId& x, const ClockId& y, std::int64_t n)
{
  return neg(conj(neg(diff_gt(x, y, n)), neg(diff_eq(x, y, n))));
}
}  // namespace cc

bool equal(const Constraint& a, const Constraint& b)
{
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case CKind::True: return true;
    case CKind::Gt:
    case CKind::Eq: return a->x == b->x && a->n == b->n;
    case CKind::DiffGt:
    case CKind::DiffEq: return a->x == b->x && a->y == b->y && a->n == b->n;
    case CKind::Not: return equal(a->a, b->a);
    case CKind::And: return equal(a->a, b->a) && equal(a->b, b->b);
  }
  return false;
}

static void collect_clocks(const Constraint& d, ClockSet& out)
{
  switch (d->kind) {
    case CKind::True: return;
    case CKind::Gt:
    case CKind::Eq: out.insert(d->x); return;
    case CKind::DiffGt:
    case CKind::DiffEq:
      out.insert(d->x);
      out.insert(d->y);
      return;
    case CKind::Not: collect_clocks(d->a, out); return;
    case CKind::And:
      collect_clocks(d->a, out);
      collect_clocks(d->b, out);
      return;
  }
}

ClockSet clocks_of(const Constraint& d)
{
  ClockSet s;
  collect_clocks(d, s);
  return s;
}

std::int64_t max_constant(const Constraint& d)
{
  switch (d->kind) {
    case CKind::True: return 0;
    case CKind::Gt:
    case CKind::Eq:
    case CKind::DiffGt:
    case CKind::DiffEq: return d->n;
    case CKind::Not: return max_constant(d->a);
    case CKind::And: return std::max(max_constant(d->a), max_constant(d->b));
  }
  return 0;
}

bool sat(const Valuation& nu, const Constraint& d)
{
  switch (d->kind) {
    case CKind::True: return true;
    case CKind::Gt: return nu.get(d->x) > d->n;
    case CKind::Eq: return nu.get(d->x) == d->n;
    case CKind::DiffGt: return nu.get(d->x) - nu.get(d->y) > d->n;
    case CKind::DiffEq: return nu.get(d->x) - nu.get(d->y) == d->n;
    case CKind::Not: return !sat(nu, d->a);
    case CKind::And: return sat(nu, d->a) && sat(nu, d->b);
  }
  return false;
}

std::string core_str(const Constraint& d)
{
  switch (d->kind) {
    case CKind::True: return "true";
    case CKind::Gt: return d->x + ">" + std::to_string(d->n);
    case CKind::Eq: return d->x + "=" + std::to_string(d->n);
    case CKind::DiffGt: return d->x + "-" + d->y + ">" + std::to_string(d->n);
    case CKind::DiffEq: return d->x + "-" + d->y + "=" + std::to_string(d->n);
    case CKind::Not: return "!" + core_str(d->a);
    case CKind::And: return "(" + core_str(d->a) + " && " + core_str(d->b) + ")";
  }
  return "?";
}

Constraint rename_clocks(const Constraint& d, const std::map<ClockId, ClockId>& m)
{
  auto r = [&](const ClockId& c) {
    auto it = m.find(c);
    return it == m.end() ? c : it->second;
  };
  switch (d->kind) {
    case CKind::True: return d;
    case CKind::Gt: return cc::gt(r(d->x), d->n);
    case CKind::Eq: return cc::eq(r(d->x), d->n);
    case CKind::DiffGt: return cc::diff_gt(r(d->x), r(d->y), d->n);
    case CKind::DiffEq: return cc::diff_eq(r(d->x), r(d->y), d->n);
    case CKind::Not: return cc::neg(rename_clocks(d->a, m));
    case CKind::And: return cc::conj(rename_clocks(d->a, m), rename_clocks(d->b, m));
  }
  return d;
}

}  // namespace toast
