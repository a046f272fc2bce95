#include "toast/types.hpp"

#include "toast/zone.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <stdexcept>

namespace toast {

namespace ty {
SessionType end()
{
  static const SessionType e = std::make_shared<TNode>();
  return e;
}
SessionType var(const std::string& a)
{
  auto n = std::make_shared<TNode>();
  n->kind = TKind::Var;
  n->var = a;
  return n;
}
SessionType rec(const std::string& a, SessionType body)
{
  auto n = std::make_shared<TNode>();
  n->kind = TKind::Rec;
  n->var = a;
  n->body = std::move(body);
  return n;
}
SessionType choice(std::vector<Option> opts)
{
  if (opts.empty()) throw std::invalid_argument("choice needs at least one option");
  auto n = std::make_shared<TNode>();
  n->kind = TKind::Choice;
  n->options = std::move(opts);
  return n;
}
Option opt(Dir d, std::string label, Sort payload, Constraint guard, ClockSet resets, SessionType cont)
{
  if (label.empty()) throw std::invalid_argument("empty label");
  return Option{d, std::move(label), std::move(payload), guard ? std::move(guard) : cc::tru(), std::move(resets),
                std::move(cont)};
}
Option send(std::string label, Constraint guard, ClockSet resets, SessionType cont, Sort payload)
{
  return opt(Dir::Send, std::move(label), std::move(payload), std::move(guard), std::move(resets), std::move(cont));
}
Option recv(std::string label, Constraint guard, ClockSet resets, SessionType cont, Sort payload)
{
  return opt(Dir::Recv, std::move(label), std::move(payload), std::move(guard), std::move(resets), std::move(cont));
}
}  // namespace ty

bool equal(const Sort& a, const Sort& b)
{
  if (a.kind != b.kind) return false;
  if (a.kind != SortKind::Delegate) return true;
  return equal(a.init, b.init) && equal(a.proto, b.proto);
}

bool equal(const SessionType& a, const SessionType& b)
{
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case TKind::End: return true;
    case TKind::Var: return a->var == b->var;
    case TKind::Rec: return a->var == b->var && equal(a->body, b->body);
    case TKind::Choice:
      if (a->options.size() != b->options.size()) return false;
      for (std::size_t k = 0; k < a->options.size(); ++k) {
        const auto& o = a->options[k];
        const auto& p = b->options[k];
        if (o.dir != p.dir || o.label != p.label || !equal(o.payload, p.payload) || !equal(o.guard, p.guard) ||
            o.resets != p.resets || !equal(o.cont, p.cont))
          return false;
      }
      return true;
  }
  return false;
}

SessionType dual(const SessionType& s)
{
  switch (s->kind) {
    case TKind::End:
    case TKind::Var: return s;
    case TKind::Rec: return ty::rec(s->var, dual(s->body));
    case TKind::Choice: {
      std::vector<Option> opts = s->options;
      for (auto& o : opts) {
        o.dir = flip(o.dir);
        o.cont = dual(o.cont);
      }
      return ty::choice(std::move(opts));
    }
  }
  return s;
}

static void fn(const SessionType& s, std::set<std::string>& bound, std::set<std::string>& out)
{
  switch (s->kind) {
    case TKind::End: return;
    case TKind::Var:
      if (!bound.count(s->var)) out.insert(s->var);
      return;
    case TKind::Rec: {
      bool had = bound.count(s->var) != 0;
      bound.insert(s->var);
      fn(s->body, bound, out);
      if (!had) bound.erase(s->var);
      return;
    }
    case TKind::Choice:
      for (const auto& o : s->options) fn(o.cont, bound, out);
      return;
  }
}

std::set<std::string> free_names(const SessionType& s)
{
  std::set<std::string> bound, out;
  fn(s, bound, out);
  return out;
}

std::string fresh_name(const std::string& base)
{
  static std::atomic<unsigned long> counter{0};
  std::string stem = base;
  auto us = stem.find("__");
  if (us != std::string::npos) stem = stem.substr(0, us);
  return stem + "__" + std::to_string(++counter);
}

SessionType substitute(const SessionType& s, const std::string& a, const SessionType& r)
{
  switch (s->kind) {
    case TKind::End: return s;
    case TKind::Var: return s->var == a ? r : s;
    case TKind::Rec: {
      if (s->var == a) return s;
      if (!free_names(s->body).count(a)) return s;
      if (free_names(r).count(s->var)) {
        std::string b = fresh_name(s->var);
        SessionType body = substitute(s->body, s->var, ty::var(b));
        return ty::rec(b, substitute(body, a, r));
      }
      return ty::rec(s->var, substitute(s->body, a, r));
    }
    case TKind::Choice: {
      std::vector<Option> opts = s->options;
      for (auto& o : opts) o.cont = substitute(o.cont, a, r);
      return ty::choice(std::move(opts));
    }
  }
  return s;
}

SessionType unfold(const SessionType& s)
{
  if (s->kind != TKind::Rec) throw std::invalid_argument("unfold expects a recursive type");
  return substitute(s->body, s->var, s);
}

SessionType unfold_top(const SessionType& s)
{
  SessionType t = s;
  for (int k = 0; t->kind == TKind::Rec; ++k) {
    if (k == 64 && !contractive(s)) throw std::invalid_argument("type is not contractive");
    t = unfold(t);
  }
  return t;
}

namespace {

std::string ckey(const Constraint& d)
{
  switch (d->kind) {
    case CKind::True: return "T";
    case CKind::Gt: return d->x + ">" + std::to_string(d->n);
    case CKind::Eq: return d->x + "=" + std::to_string(d->n);
    case CKind::DiffGt: return d->x + "-" + d->y + ">" + std::to_string(d->n);
    case CKind::DiffEq: return d->x + "-" + d->y + "=" + std::to_string(d->n);
    case CKind::Not: return "!(" + ckey(d->a) + ")";
    case CKind::And: return "(" + ckey(d->a) + "&" + ckey(d->b) + ")";
  }
  return "?";
}

std::string tkey(const SessionType& s, std::vector<std::string>& env)
{
  switch (s->kind) {
    case TKind::End: return "end";
    case TKind::Var: {
      for (std::size_t k = env.size(); k-- > 0;)
        if (env[k] == s->var) return "#" + std::to_string(env.size() - 1 - k);
      return "$" + s->var;
    }
    case TKind::Rec: {
      env.push_back(s->var);
      std::string b = tkey(s->body, env);
      env.pop_back();
      return "mu." + b;
    }
    case TKind::Choice: {
      std::vector<std::string> parts;
      for (const auto& o : s->options) {
        std::string p = (o.dir == Dir::Send ? "!" : "?") + o.label + "<";
        switch (o.payload.kind) {
          case SortKind::Nat: p += "nat"; break;
          case SortKind::Bool: p += "bool"; break;
          case SortKind::String: p += "string"; break;
          case SortKind::None: p += "none"; break;
          case SortKind::Delegate: {
            std::vector<std::string> e2;
            p += "(" + ckey(o.payload.init) + "," + tkey(o.payload.proto, e2) + ")";
            break;
          }
        }
        p += ">(" + ckey(o.guard) + ",{";
        for (const auto& r : o.resets) p += r + ",";
        p += "})." + tkey(o.cont, env);
        parts.push_back(p);
      }
      std::sort(parts.begin(), parts.end());
      std::string out = "{";
      for (const auto& p : parts) out += p + ";";
      return out + "}";
    }
  }
  return "?";
}

struct EquivCtx {
  std::set<std::pair<std::string, std::string>> seen;
};

bool guard_equiv(const Constraint& a, const Constraint& b) { return equal(a, b) || equivalent(a, b); }

bool eqv(const SessionType& a0, const SessionType& b0, EquivCtx& ctx);

bool option_equiv(const Option& o, const Option& p, EquivCtx& ctx)
{
  return o.dir == p.dir && o.label == p.label && equal_up_to_unfold(o.payload, p.payload) &&
         guard_equiv(o.guard, p.guard) && o.resets == p.resets && eqv(o.cont, p.cont, ctx);
}

bool eqv(const SessionType& a0, const SessionType& b0, EquivCtx& ctx)
{
  SessionType a = unfold_top(a0), b = unfold_top(b0);
  auto key = std::make_pair(canonical_key(a), canonical_key(b));
  if (key.first == key.second) return true;
  if (!ctx.seen.insert(key).second) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TKind::End: return true;
    case TKind::Var: return a->var == b->var;
    case TKind::Rec: return false;
    case TKind::Choice: {
      if (a->options.size() != b->options.size()) return false;
      for (const auto& o : a->options) {
        auto it = std::find_if(b->options.begin(), b->options.end(),
                               [&](const Option& p) { return p.label == o.label; });
        if (it == b->options.end() || !option_equiv(o, *it, ctx)) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

std::string canonical_key(const SessionType& s)
{
  std::vector<std::string> env;
  return tkey(s, env);
}

bool unfold_equiv(const SessionType& a, const SessionType& b)
{
  EquivCtx ctx;
  return eqv(a, b, ctx);
}

bool equal_up_to_unfold(const Sort& a, const Sort& b)
{
  if (a.kind != b.kind) return false;
  if (a.kind != SortKind::Delegate) return true;
  return guard_equiv(a.init, b.init) && unfold_equiv(a.proto, b.proto);
}

bool is_end(const SessionType& s) { return unfold_equiv(s, ty::end()); }

static void collect_clocks(const SessionType& s, ClockSet& out)
{
  switch (s->kind) {
    case TKind::End:
    case TKind::Var: return;
    case TKind::Rec: collect_clocks(s->body, out); return;
    case TKind::Choice:
      for (const auto& o : s->options) {
        for (const auto& c : clocks_of(o.guard)) out.insert(c);
        for (const auto& c : o.resets) out.insert(c);
        collect_clocks(o.cont, out);
      }
      return;
  }
}

ClockSet clocks_of(const SessionType& s)
{
  ClockSet out;
  collect_clocks(s, out);
  return out;
}

std::int64_t max_constant(const SessionType& s)
{
  switch (s->kind) {
    case TKind::End:
    case TKind::Var: return 0;
    case TKind::Rec: return max_constant(s->body);
    case TKind::Choice: {
      std::int64_t m = 0;
      for (const auto& o : s->options) {
        m = std::max(m, max_constant(o.guard));
        if (o.payload.kind == SortKind::Delegate) {
          m = std::max(m, max_constant(o.payload.init));
          m = std::max(m, max_constant(o.payload.proto));
        }
        m = std::max(m, max_constant(o.cont));
      }
      return m;
    }
  }
  return 0;
}

static bool contractive_in(const SessionType& s, std::set<std::string>& unguarded)
{
  switch (s->kind) {
    case TKind::End: return true;
    case TKind::Var: return !unguarded.count(s->var);
    case TKind::Rec: {
      unguarded.insert(s->var);
      bool ok = contractive_in(s->body, unguarded);
      unguarded.erase(s->var);
      return ok;
    }
    case TKind::Choice:
      for (const auto& o : s->options) {
        std::set<std::string> none;
        if (!contractive_in(o.cont, none)) return false;
        if (o.payload.kind == SortKind::Delegate && !contractive(o.payload.proto)) return false;
      }
      return true;
  }
  return true;
}

bool contractive(const SessionType& s)
{
  std::set<std::string> unguarded;
  return contractive_in(s, unguarded);
}

SessionType rename_clocks(const SessionType& s, const std::map<ClockId, ClockId>& m)
{
  switch (s->kind) {
    case TKind::End:
    case TKind::Var: return s;
    case TKind::Rec: return ty::rec(s->var, rename_clocks(s->body, m));
    case TKind::Choice: {
      std::vector<Option> opts = s->options;
      for (auto& o : opts) {
        o.guard = toast::rename_clocks(o.guard, m);
        ClockSet r;
        for (const auto& c : o.resets) {
          auto it = m.find(c);
          r.insert(it == m.end() ? c : it->second);
        }
        o.resets = r;
        o.cont = rename_clocks(o.cont, m);
      }
      return ty::choice(std::move(opts));
    }
  }
  return s;
}

}  // namespace toast
