#include "toast/print.hpp"

namespace toast {

namespace {

// 0: def, 1: par, 2: prefix forms and atoms
int prec(const Process& p)
{
  if (p->kind == PKind::Def) return 0;
  if (p->kind == PKind::Par) return 1;
  return 2;
}

std::string list(const std::vector<std::string>& xs)
{
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? ", " : "") + xs[k];
  return s;
}

std::string print(const Process& p, int min);

std::string arms(const Process& p)
{
  std::string s = "{";
  for (std::size_t k = 0; k < p->arms.size(); ++k) {
    const auto& a = p->arms[k];
    s += (k ? ", " : "") + a.label;
    if (!a.binder.empty()) s += "(" + a.binder + ")";
    s += ": " + print(a.body, 0);
  }
  return s + "}";
}

std::string print(const Process& p, int min)
{
  if (prec(p) < min) return "(" + print(p, 0) + ")";
  switch (p->kind) {
    case PKind::Term: return "0";
    case PKind::Set: return "set(" + p->name + ")." + print(p->a, 2);
    case PKind::Send: {
      std::string v = p->value.kind == Value::Kind::Unit ? "" : "(" + str(p->value) + ")";
      return p->role + "!" + p->label + v + "." + print(p->a, 2);
    }
    case PKind::Branch: {
      std::string d = p->deadline.infinite() ? "" : "[" + str(p->deadline) + "]";
      return p->role + "?" + d + arms(p);
    }
    case PKind::Timeout: return p->role + "?" + arms(p) + " after" + str(p->deadline) + " " + print(p->b, 2);
    case PKind::If: return "if (" + pretty(p->cond) + ") " + print(p->a, 2) + " else " + print(p->b, 2);
    case PKind::DelayC: return "delay(" + pretty(p->cond) + ")." + print(p->a, 2);
    case PKind::DelayT: return "delay(" + to_string(p->t) + ")." + print(p->a, 2);
    case PKind::Def:
      return "def " + p->name + "(" + list(p->vparams) + "; " + list(p->rparams) + ") = " + print(p->a, 0) + " in " +
             print(p->b, 0);
    case PKind::Call: {
      std::vector<std::string> vs;
      for (const auto& v : p->vargs) vs.push_back(str(v));
      return p->name + "(" + list(vs) + "; " + list(p->rargs) + ")";
    }
    case PKind::Scope: return "new (" + p->role + " " + p->peer + ") " + print(p->a, 2);
    case PKind::Par: return print(p->a, 1) + " | " + print(p->b, 2);
    case PKind::Queue: {
      std::string s = p->role + "->" + p->peer + ":[";
      for (std::size_t k = 0; k < p->items.size(); ++k) {
        s += (k ? ", " : "") + p->items[k].label;
        if (p->items[k].v.kind != Value::Kind::Unit) s += " " + str(p->items[k].v);
      }
      return s + "]";
    }
  }
  return "?";
}

}  // namespace

std::string pretty(const Process& p) { return print(p, 0); }

}  // namespace toast
