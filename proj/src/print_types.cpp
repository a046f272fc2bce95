#include "toast/print.hpp"

namespace toast {

namespace {

// precedence: 0 = ||, 1 = &&, 2 = unary/atom
struct Sugar {
  std::string text;
  int prec;
};

bool is_neg_of(const Constraint& d, CKind k)
{
  return d->kind == CKind::Not && d->a->kind == k;
}

// !(x>n) && !(x=n), or the difference version
bool lt_pattern(const Constraint& d)
{
  if (d->kind != CKind::And) return false;
  const auto& a = d->a;
  const auto& b = d->b;
  if (is_neg_of(a, CKind::Gt) && is_neg_of(b, CKind::Eq))
    return a->a->x == b->a->x && a->a->n == b->a->n;
  if (is_neg_of(a, CKind::DiffGt) && is_neg_of(b, CKind::DiffEq))
    return a->a->x == b->a->x && a->a->y == b->a->y && a->a->n == b->a->n;
  return false;
}

std::string lhs(const Constraint& atom)
{
  if (atom->kind == CKind::DiffGt || atom->kind == CKind::DiffEq) return atom->x + "-" + atom->y;
  return atom->x;
}

Sugar render(const Constraint& d);

std::string at(const Constraint& d, int prec)
{
  Sugar s = render(d);
  return s.prec < prec ? "(" + s.text + ")" : s.text;
}

Sugar render(const Constraint& d)
{
  switch (d->kind) {
    case CKind::True: return {"true", 2};
    case CKind::Gt:
    case CKind::DiffGt: return {lhs(d) + ">" + std::to_string(d->n), 2};
    case CKind::Eq:
    case CKind::DiffEq: return {lhs(d) + "=" + std::to_string(d->n), 2};
    case CKind::And:
      if (lt_pattern(d)) return {lhs(d->a->a) + "<" + std::to_string(d->a->a->n), 2};
      {
        int rp = d->b->kind == CKind::And && !lt_pattern(d->b) ? 2 : 1;
        return {at(d->a, 1) + " && " + at(d->b, rp), 1};
      }
    case CKind::Not: {
      const auto& a = d->a;
      if (a->kind == CKind::True) return {"false", 2};
      if (a->kind == CKind::Gt || a->kind == CKind::DiffGt) return {lhs(a) + "<=" + std::to_string(a->n), 2};
      if (lt_pattern(a)) return {lhs(a->a->a) + ">=" + std::to_string(a->a->a->n), 2};
      if (a->kind == CKind::And && a->a->kind == CKind::Not && a->b->kind == CKind::Not) {
        return {at(a->a->a, 0) + " || " + at(a->b->a, 1), 0};
      }
      return {"!" + at(a, 2), 2};
    }
  }
  return {"?", 2};
}

}  // namespace

std::string pretty(const Constraint& d) { return render(d).text; }

std::string pretty(const Sort& s)
{
  switch (s.kind) {
    case SortKind::Nat: return "nat";
    case SortKind::Bool: return "bool";
    case SortKind::String: return "string";
    case SortKind::None: return "none";
    case SortKind::Delegate: return "(" + pretty(s.init) + ", " + pretty(s.proto) + ")";
  }
  return "?";
}

std::string pretty(const Option& o)
{
  std::string out = (o.dir == Dir::Send ? "!" : "?") + o.label;
  if (o.payload.kind != SortKind::None) out += "<" + pretty(o.payload) + ">";
  bool trivial_guard = o.guard->kind == CKind::True;
  if (!trivial_guard || !o.resets.empty()) {
    out += "(" + pretty(o.guard);
    if (!o.resets.empty()) {
      out += ", {";
      bool first = true;
      for (const auto& r : o.resets) {
        out += (first ? "" : ", ") + r;
        first = false;
      }
      out += "}";
    }
    out += ")";
  }
  return out + "." + pretty(o.cont);
}

std::string pretty(const SessionType& s)
{
  switch (s->kind) {
    case TKind::End: return "end";
    case TKind::Var: return s->var;
    case TKind::Rec: return "rec " + s->var + " . " + pretty(s->body);
    case TKind::Choice: {
      if (s->options.size() == 1) return pretty(s->options[0]);
      std::string out = "{ ";
      for (std::size_t k = 0; k < s->options.size(); ++k) out += (k ? ", " : "") + pretty(s->options[k]);
      return out + " }";
    }
  }
  return "?";
}

}  // namespace toast
