#include "toast/calculus.hpp"

#include "toast/print.hpp"
#include "toast/zone.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace toast {

std::string str(const Value& v)
{
  switch (v.kind) {
    case Value::Kind::Nat: return std::to_string(v.nat);
    case Value::Kind::Bool: return v.boolean ? "true" : "false";
    case Value::Kind::String: {
      std::string s = "\"";
      for (char c : v.text) {
        if (c == '"' || c == '\\') s += '\\';
        s += c;
      }
      return s + "\"";
    }
    case Value::Kind::Unit: return "()";
    case Value::Kind::Name: return v.text;
  }
  return "?";
}

Deadline Deadline::lt(Rat n)
{
  if (n <= 0) throw std::invalid_argument("deadline <" + to_string(n) + " admits no time");
  return {Kind::Bounded, true, n};
}

Deadline Deadline::le(Rat n)
{
  if (n < 0) throw std::invalid_argument("negative deadline");
  return {Kind::Bounded, false, n};
}

bool Deadline::admits(const Rat& t) const
{
  if (infinite()) return true;
  return strict ? t < n : t <= n;
}

std::string str(const Deadline& e)
{
  if (e.infinite()) return "inf";
  return (e.strict ? "<" : "<=") + to_string(e.n);
}

std::string endpoint(const std::string& from, const std::string& to) { return from + "->" + to; }

namespace pr {
namespace {
std::shared_ptr<PNode> mk(PKind k)
{
  auto n = std::make_shared<PNode>();
  n->kind = k;
  return n;
}
void check_arms(const std::vector<Arm>& arms)
{
  if (arms.empty()) throw std::invalid_argument("receive needs at least one branch");
  std::set<std::string> seen;
  for (const auto& a : arms)
    if (!seen.insert(a.label).second) throw std::invalid_argument("duplicate branch label " + a.label);
}
}  // namespace

Process set(const std::string& x, Process p)
{
  auto n = mk(PKind::Set);
  n->name = x;
  n->a = std::move(p);
  return n;
}
Process send(const std::string& role, const std::string& label, Value v, Process p)
{
  auto n = mk(PKind::Send);
  n->role = role;
  n->label = label;
  n->value = std::move(v);
  n->a = std::move(p);
  return n;
}
Process branch(const std::string& role, Deadline e, std::vector<Arm> arms)
{
  check_arms(arms);
  auto n = mk(PKind::Branch);
  n->role = role;
  n->deadline = e;
  n->arms = std::move(arms);
  return n;
}
Process timeout(const std::string& role, Deadline e, std::vector<Arm> arms, Process q)
{
  if (e.infinite()) throw std::invalid_argument("a timeout needs a finite deadline");
  check_arms(arms);
  auto n = mk(PKind::Timeout);
  n->role = role;
  n->deadline = e;
  n->arms = std::move(arms);
  n->b = std::move(q);
  return n;
}
Process if_(Constraint d, Process p, Process q)
{
  auto n = mk(PKind::If);
  n->cond = std::move(d);
  n->a = std::move(p);
  n->b = std::move(q);
  return n;
}
Process delay(Constraint d, Process p)
{
  auto n = mk(PKind::DelayC);
  n->cond = std::move(d);
  n->a = std::move(p);
  return n;
}
Process delay(Rat t, Process p)
{
  if (t < 0) throw std::invalid_argument("negative delay");
  auto n = mk(PKind::DelayT);
  n->t = t;
  n->a = std::move(p);
  return n;
}
Process def(const std::string& x, std::vector<std::string> vs, std::vector<std::string> rs, Process body, Process in)
{
  auto n = mk(PKind::Def);
  n->name = x;
  n->vparams = std::move(vs);
  n->rparams = std::move(rs);
  n->a = std::move(body);
  n->b = std::move(in);
  return n;
}
Process call(const std::string& x, std::vector<Value> vs, std::vector<std::string> rs)
{
  auto n = mk(PKind::Call);
  n->name = x;
  n->vargs = std::move(vs);
  n->rargs = std::move(rs);
  return n;
}
Process scope(const std::string& p, const std::string& q, Process body)
{
  auto n = mk(PKind::Scope);
  n->role = p;
  n->peer = q;
  n->a = std::move(body);
  return n;
}
Process par(Process a, Process b)
{
  auto n = mk(PKind::Par);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}
Process par(const std::vector<Process>& ps)
{
  if (ps.empty()) return term();
  Process r = ps[0];
  for (std::size_t k = 1; k < ps.size(); ++k) r = par(r, ps[k]);
  return r;
}
Process term()
{
  static const Process t = mk(PKind::Term);
  return t;
}
Process queue(const std::string& from, const std::string& to, std::vector<QItem> h)
{
  auto n = mk(PKind::Queue);
  n->role = from;
  n->peer = to;
  n->items = std::move(h);
  return n;
}
}  // namespace pr

bool equal(const Process& a, const Process& b)
{
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  if (a->role != b->role || a->peer != b->peer || a->name != b->name || a->label != b->label ||
      !(a->value == b->value) || !(a->deadline == b->deadline) || a->t != b->t || a->vparams != b->vparams ||
      a->rparams != b->rparams || a->vargs != b->vargs || a->rargs != b->rargs || a->items != b->items)
    return false;
  if (bool(a->cond) != bool(b->cond) || (a->cond && !toast::equal(a->cond, b->cond))) return false;
  if (a->arms.size() != b->arms.size()) return false;
  for (std::size_t k = 0; k < a->arms.size(); ++k)
    if (a->arms[k].label != b->arms[k].label || a->arms[k].binder != b->arms[k].binder ||
        !equal(a->arms[k].body, b->arms[k].body))
      return false;
  if (bool(a->a) != bool(b->a) || (a->a && !equal(a->a, b->a))) return false;
  if (bool(a->b) != bool(b->b) || (a->b && !equal(a->b, b->b))) return false;
  return true;
}

std::set<std::string> fq(const Process& p)
{
  switch (p->kind) {
    case PKind::Queue: return {endpoint(p->role, p->peer)};
    case PKind::Scope: {
      auto s = fq(p->a);
      s.erase(endpoint(p->role, p->peer));
      s.erase(endpoint(p->peer, p->role));
      return s;
    }
    case PKind::Send:
    case PKind::Set:
    case PKind::DelayC:
    case PKind::DelayT: return fq(p->a);
    case PKind::Def: return fq(p->b);
    case PKind::Branch: {
      std::set<std::string> s;
      for (const auto& a : p->arms)
        for (const auto& e : fq(a.body)) s.insert(e);
      return s;
    }
    case PKind::Timeout: {
      std::set<std::string> s = fq(p->b);
      for (const auto& a : p->arms)
        for (const auto& e : fq(a.body)) s.insert(e);
      return s;
    }
    case PKind::Par:
    case PKind::If: {
      auto s = fq(p->a);
      for (const auto& e : fq(p->b)) s.insert(e);
      return s;
    }
    case PKind::Term:
    case PKind::Call: return {};
  }
  return {};
}

bool wf_process(const Process& p)
{
  auto closed = [](const Process& q) { return wf_process(q) && fq(q).empty(); };
  switch (p->kind) {
    case PKind::Term:
    case PKind::Call:
    case PKind::Queue: return true;
    case PKind::Scope:
      return wf_process(p->a) &&
             fq(p->a) == std::set<std::string>{endpoint(p->role, p->peer), endpoint(p->peer, p->role)};
    case PKind::Send:
    case PKind::Set:
    case PKind::DelayC:
    case PKind::DelayT: return closed(p->a);
    case PKind::Def: return closed(p->a) && closed(p->b);
    case PKind::Branch:
      return std::all_of(p->arms.begin(), p->arms.end(), [&](const Arm& a) { return closed(a.body); });
    case PKind::Timeout:
      return std::all_of(p->arms.begin(), p->arms.end(), [&](const Arm& a) { return closed(a.body); }) &&
             wf_process(p->b);
    case PKind::Par:
    case PKind::If: return wf_process(p->a) && wf_process(p->b);
  }
  return false;
}

static std::set<std::string> scoped(std::set<std::string> s, const Process& p)
{
  s.erase(p->role);
  s.erase(p->peer);
  return s;
}

std::set<std::string> wait_set(const Process& p)
{
  switch (p->kind) {
    case PKind::Branch:
    case PKind::Timeout: return {p->role};
    case PKind::Scope: return scoped(wait_set(p->a), p);
    case PKind::Def: return wait_set(p->b);
    case PKind::Par: {
      auto s = wait_set(p->a);
      for (const auto& r : wait_set(p->b)) s.insert(r);
      return s;
    }
    default: return {};
  }
}

std::set<std::string> neq_set(const Process& p)
{
  switch (p->kind) {
    case PKind::Queue:
      if (!p->items.empty()) return {p->peer};
      return {};
    case PKind::Scope: return scoped(neq_set(p->a), p);
    case PKind::Def: return neq_set(p->b);
    case PKind::Par: {
      auto s = neq_set(p->a);
      for (const auto& r : neq_set(p->b)) s.insert(r);
      return s;
    }
    default: return {};
  }
}

static bool disjoint(const std::set<std::string>& a, const std::set<std::string>& b)
{
  for (const auto& x : a)
    if (b.count(x)) return false;
  return true;
}

static Process with_deadline(const Process& p, Deadline e)
{
  auto n = std::make_shared<PNode>(*p);
  n->deadline = e;
  return n;
}

std::optional<Process> time_pass(const Process& p, const Rat& t)
{
  if (t < 0) return std::nullopt;
  if (t == 0) return p;
  switch (p->kind) {
    case PKind::Timeout:
      if (p->deadline.admits(t)) return with_deadline(p, {Deadline::Kind::Bounded, p->deadline.strict, p->deadline.n - t});
      return time_pass(p->b, t - p->deadline.n);
    case PKind::Branch:
      if (p->deadline.infinite()) return p;
      if (p->deadline.admits(t)) return with_deadline(p, {Deadline::Kind::Bounded, p->deadline.strict, p->deadline.n - t});
      return std::nullopt;
    case PKind::DelayT:
      if (p->t > t) return pr::delay(p->t - t, p->a);
      if (p->t == t) return p->a;  // delay(0).P == P
      return time_pass(p->a, t - p->t);
    case PKind::Par: {
      if (!disjoint(wait_set(p->a), neq_set(p->b)) || !disjoint(wait_set(p->b), neq_set(p->a))) return std::nullopt;
      auto l = time_pass(p->a, t);
      if (!l) return std::nullopt;
      auto r = time_pass(p->b, t);
      if (!r) return std::nullopt;
      return pr::par(*l, *r);
    }
    case PKind::Term:
    case PKind::Queue: return p;
    case PKind::Scope: {
      auto b = time_pass(p->a, t);
      if (!b) return std::nullopt;
      return pr::scope(p->role, p->peer, *b);
    }
    case PKind::Def: {
      auto b = time_pass(p->b, t);
      if (!b) return std::nullopt;
      return pr::def(p->name, p->vparams, p->rparams, p->a, *b);
    }
    default: return std::nullopt;
  }
}

namespace {

std::set<std::string> free_names_of(const std::map<std::string, Value>& s)
{
  std::set<std::string> out;
  for (const auto& [k, v] : s)
    if (v.kind == Value::Kind::Name) out.insert(v.text);
  return out;
}

Value subst_value(const Value& v, const std::map<std::string, Value>& s)
{
  if (v.kind != Value::Kind::Name) return v;
  auto it = s.find(v.text);
  return it == s.end() ? v : it->second;
}

std::string subst_role(const std::string& r, const std::map<std::string, Value>& s)
{
  auto it = s.find(r);
  if (it == s.end() || it->second.kind != Value::Kind::Name) return r;
  return it->second.text;
}

// Drops bindings shadowed by bs and renames binders that would capture.
std::map<std::string, Value> under(const std::map<std::string, Value>& s, std::vector<std::string>& bs,
                                   std::map<std::string, Value>& rename)
{
  auto inner = s;
  for (const auto& b : bs) inner.erase(b);
  auto fns = free_names_of(inner);
  for (auto& b : bs)
    if (fns.count(b)) {
      std::string f = fresh_name(b);
      rename[b] = Value::name(f);
      b = f;
    }
  for (const auto& [k, v] : rename) inner[k] = v;
  return inner;
}

}  // namespace

Process subst(const Process& p, const std::map<std::string, Value>& s)
{
  if (s.empty()) return p;
  auto n = std::make_shared<PNode>(*p);
  switch (p->kind) {
    case PKind::Term: return p;
    case PKind::Set: n->a = subst(p->a, s); break;
    case PKind::Send:
      n->role = subst_role(p->role, s);
      n->value = subst_value(p->value, s);
      n->a = subst(p->a, s);
      break;
    case PKind::Timeout: n->b = subst(p->b, s); [[fallthrough]];
    case PKind::Branch:
      n->role = subst_role(p->role, s);
      for (auto& a : n->arms) {
        if (a.binder.empty()) {
          a.body = subst(a.body, s);
          continue;
        }
        std::vector<std::string> bs{a.binder};
        std::map<std::string, Value> ren;
        auto inner = under(s, bs, ren);
        a.binder = bs[0];
        a.body = subst(a.body, inner);
      }
      break;
    case PKind::If:
      n->a = subst(p->a, s);
      n->b = subst(p->b, s);
      break;
    case PKind::DelayC:
    case PKind::DelayT: n->a = subst(p->a, s); break;
    case PKind::Def: {
      std::vector<std::string> bs = p->vparams;
      bs.insert(bs.end(), p->rparams.begin(), p->rparams.end());
      std::map<std::string, Value> ren;
      auto inner = under(s, bs, ren);
      n->vparams.assign(bs.begin(), bs.begin() + p->vparams.size());
      n->rparams.assign(bs.begin() + p->vparams.size(), bs.end());
      n->a = subst(p->a, inner);
      n->b = subst(p->b, s);
      break;
    }
    case PKind::Call:
      for (auto& v : n->vargs) v = subst_value(v, s);
      for (auto& r : n->rargs) r = subst_role(r, s);
      break;
    case PKind::Scope:
      n->role = subst_role(p->role, s);
      n->peer = subst_role(p->peer, s);
      n->a = subst(p->a, s);
      break;
    case PKind::Par:
      n->a = subst(p->a, s);
      n->b = subst(p->b, s);
      break;
    case PKind::Queue:
      n->role = subst_role(p->role, s);
      n->peer = subst_role(p->peer, s);
      for (auto& it : n->items) it.v = subst_value(it.v, s);
      break;
  }
  return n;
}

std::int64_t max_constant(const Process& p)
{
  std::int64_t m = 0;
  auto up = [&](const Rat& r) { m = std::max(m, r.floor() + (r.denominator() == 1 ? 0 : 1)); };
  if (p->cond) m = std::max(m, max_constant(p->cond));
  if (p->kind == PKind::DelayT) up(p->t);
  if ((p->kind == PKind::Branch || p->kind == PKind::Timeout) && !p->deadline.infinite()) up(p->deadline.n);
  for (const auto& a : p->arms) m = std::max(m, max_constant(a.body));
  if (p->a) m = std::max(m, max_constant(p->a));
  if (p->b) m = std::max(m, max_constant(p->b));
  return m;
}

std::set<std::string> free_process_vars(const Process& p)
{
  std::set<std::string> out;
  if (p->kind == PKind::Call) out.insert(p->name);
  auto add = [&](const Process& q) {
    if (q)
      for (const auto& x : free_process_vars(q)) out.insert(x);
  };
  if (p->kind == PKind::Def) {
    add(p->a);
    add(p->b);
    out.erase(p->name);
    return out;
  }
  add(p->a);
  add(p->b);
  for (const auto& a : p->arms) add(a.body);
  return out;
}

Process prune_defs(const Process& p)
{
  if (p->kind == PKind::Term || p->kind == PKind::Call || p->kind == PKind::Queue) return p;
  if (p->kind == PKind::Def && !free_process_vars(p->b).count(p->name)) return prune_defs(p->b);
  auto n = std::make_shared<PNode>(*p);
  if (p->a) n->a = prune_defs(p->a);
  if (p->b) n->b = prune_defs(p->b);
  for (auto& a : n->arms) a.body = prune_defs(a.body);
  return n;
}

namespace {

// A component reached from the root through Par, Def (in-part), Scope and delay(0).
struct Leaf {
  std::vector<int> path;  // 0 = a, 1 = b
  Process node;
  std::vector<Process> defs;  // enclosing definitions, innermost last
};

void collect(const Process& p, std::vector<int>& path, std::vector<Process>& defs, std::vector<Leaf>& out)
{
  switch (p->kind) {
    case PKind::Par:
      path.push_back(0);
      collect(p->a, path, defs, out);
      path.back() = 1;
      collect(p->b, path, defs, out);
      path.pop_back();
      return;
    case PKind::Def:
      defs.push_back(p);
      path.push_back(1);
      collect(p->b, path, defs, out);
      path.pop_back();
      defs.pop_back();
      return;
    case PKind::Scope:
      path.push_back(0);
      collect(p->a, path, defs, out);
      path.pop_back();
      return;
    case PKind::DelayT:
      if (p->t == 0) {
        path.push_back(0);
        collect(p->a, path, defs, out);
        path.pop_back();
        return;
      }
      break;
    default: break;
  }
  out.push_back({path, p, defs});
}

std::vector<Leaf> leaves(const Process& p)
{
  std::vector<Leaf> out;
  std::vector<int> path;
  std::vector<Process> defs;
  collect(p, path, defs, out);
  return out;
}

Process replace(const Process& p, const std::vector<int>& path, std::size_t k, const Process& leaf)
{
  if (k == path.size()) return leaf;
  auto n = std::make_shared<PNode>(*p);
  if (path[k] == 0)
    n->a = replace(p->a, path, k + 1, leaf);
  else
    n->b = replace(p->b, path, k + 1, leaf);
  return n;
}

Process with_items(const Process& q, std::vector<QItem> items)
{
  return pr::queue(q->role, q->peer, std::move(items));
}

void receive(const Process& root, const TimerEnv& theta, const std::vector<Leaf>& ls, const Leaf& l,
             std::vector<PStep>& out)
{
  for (const auto& q : ls) {
    if (q.node->kind != PKind::Queue || q.node->peer != l.node->role || q.node->items.empty()) continue;
    const QItem& head = q.node->items.front();
    for (const auto& arm : l.node->arms) {
      if (arm.label != head.label) continue;
      Process body = arm.binder.empty() ? arm.body : subst(arm.body, {{arm.binder, head.v}});
      std::vector<QItem> rest(q.node->items.begin() + 1, q.node->items.end());
      Process r = replace(root, l.path, 0, body);
      r = replace(r, q.path, 0, with_items(q.node, rest));
      std::string rule = l.node->kind == PKind::Branch ? "Recv" : "RecvT";
      out.push_back({rule, l.node->role + "?" + head.label, theta, r});
    }
  }
}

}  // namespace

static std::vector<PStep> raw_steps(const TimerEnv& theta, const Process& p)
{
  std::vector<PStep> out;
  auto ls = leaves(p);
  for (const auto& l : ls) {
    const Process& n = l.node;
    switch (n->kind) {
      case PKind::Send:
        for (const auto& q : ls) {
          if (q.node->kind != PKind::Queue || q.node->role != n->role) continue;
          auto items = q.node->items;
          items.push_back({n->label, n->value});
          Process r = replace(p, l.path, 0, n->a);
          r = replace(r, q.path, 0, with_items(q.node, items));
          std::string v = n->value.kind == Value::Kind::Unit ? "" : "(" + str(n->value) + ")";
          out.push_back({"Send", n->role + "!" + n->label + v, theta, r});
        }
        break;
      case PKind::Branch:
      case PKind::Timeout: receive(p, theta, ls, l, out); break;
      case PKind::Set: {
        TimerEnv th = theta;
        th.set(n->name, 0);
        out.push_back({"Set", n->name, th, replace(p, l.path, 0, n->a)});
        break;
      }
      case PKind::If: {
        bool holds;
        try {
          holds = sat(theta, n->cond);
        } catch (const std::exception&) {
          break;  // condition over an unset timer: no step
        }
        out.push_back({holds ? "IfT" : "IfF", pretty(n->cond), theta, replace(p, l.path, 0, holds ? n->a : n->b)});
        break;
      }
      case PKind::DelayC:
        for (const Rat& t : representative_delays(n->cond, max_constant(n->cond)))
          out.push_back({"Det", to_string(t), theta, replace(p, l.path, 0, t == 0 ? n->a : pr::delay(t, n->a))});
        break;
      case PKind::Call:
        for (auto it = l.defs.rbegin(); it != l.defs.rend(); ++it) {
          const Process& d = *it;
          if (d->name != n->name) continue;
          if (d->vparams.size() != n->vargs.size() || d->rparams.size() != n->rargs.size())
            throw std::invalid_argument("call " + n->name + " has the wrong number of arguments");
          std::map<std::string, Value> s;
          for (std::size_t k = 0; k < d->vparams.size(); ++k) s[d->vparams[k]] = n->vargs[k];
          for (std::size_t k = 0; k < d->rparams.size(); ++k) s[d->rparams[k]] = Value::name(n->rargs[k]);
          out.push_back({"Call", n->name, theta, replace(p, l.path, 0, subst(d->a, s))});
          break;
        }
        break;
      default: break;
    }
  }
  return out;
}

std::vector<PStep> reduce_step(const TimerEnv& theta, const Process& p)
{
  auto out = raw_steps(theta, p);
  for (auto& s : out) s.next = prune_defs(s.next);
  return out;
}

std::optional<PStep> reduce_delay(const TimerEnv& theta, const Process& p, const Rat& t)
{
  auto q = time_pass(p, t);
  if (!q) return std::nullopt;
  return PStep{"Delay", to_string(t), theta.advanced(t), prune_defs(*q)};
}

bool terminated(const Process& p)
{
  for (const auto& l : leaves(p)) {
    if (l.node->kind == PKind::Term) continue;
    if (l.node->kind == PKind::Queue && l.node->items.empty()) continue;
    return false;
  }
  return true;
}

std::string str(RunOutcome o)
{
  switch (o) {
    case RunOutcome::Terminated: return "terminated";
    case RunOutcome::Quiescent: return "quiescent";
    case RunOutcome::FuelExhausted: return "fuel-exhausted";
    case RunOutcome::Divergent: return "divergent";
  }
  return "?";
}

namespace {

std::vector<Rat> delay_grid(std::int64_t M)
{
  std::vector<Rat> g;
  for (std::int64_t k = 1; k <= 2 * (M + 1); ++k) g.push_back(Rat(k, 2));
  return g;
}

std::vector<PStep> all_steps(const TimerEnv& theta, const Process& p, std::int64_t M, bool& has_instant)
{
  auto out = reduce_step(theta, p);
  has_instant = !out.empty();
  for (const Rat& t : delay_grid(M))
    if (auto d = reduce_delay(theta, p, t)) out.push_back(*d);
  return out;
}

TimerEnv clamp(const TimerEnv& th, std::int64_t M)
{
  TimerEnv r;
  for (const auto& [x, v] : th.values()) r.set(x, v > Rat(M + 1) ? Rat(M + 1) : v);
  return r;
}

}  // namespace

RunReport run(const TimerEnv& theta, const Process& p, Schedule sched, int fuel, std::uint64_t seed)
{
  if (fuel < 0) throw std::invalid_argument("fuel must be non-negative");
  const std::int64_t M = max_constant(p);
  RunReport rep;
  if (sched == Schedule::Random) {
    std::mt19937_64 rng(seed);
    rep.trace.push_back({"start", "", theta, p});
    rep.states = 1;
    for (int k = 0;; ++k) {
      const RunStep& cur = rep.trace.back();
      if (terminated(cur.proc)) {
        rep.outcome = RunOutcome::Terminated;
        return rep;
      }
      bool instant = false;
      auto succ = all_steps(cur.theta, cur.proc, M, instant);
      if (succ.empty()) {
        rep.outcome = RunOutcome::Quiescent;
        return rep;
      }
      if (k >= fuel) {
        rep.outcome = RunOutcome::FuelExhausted;
        return rep;
      }
      std::size_t n_instant = reduce_step(cur.theta, cur.proc).size();
      std::size_t pick;
      bool take_instant = n_instant > 0 && (n_instant == succ.size() || std::bernoulli_distribution(0.5)(rng));
      if (take_instant)
        pick = std::uniform_int_distribution<std::size_t>(0, n_instant - 1)(rng);
      else
        pick = std::uniform_int_distribution<std::size_t>(n_instant, succ.size() - 1)(rng);
      const auto& s = succ[pick];
      rep.trace.push_back({s.rule, s.detail, s.theta, s.next});
      ++rep.states;
    }
  }

  struct Node {
    RunStep step;
    long parent;
    int depth;
  };
  std::vector<Node> nodes{{{"start", "", clamp(theta, M), p}, -1, 0}};
  std::unordered_map<std::string, long> seen;
  auto key = [](const RunStep& s) { return s.theta.str() + "#" + pretty(s.proc); };
  seen[key(nodes[0].step)] = 0;
  std::deque<long> work{0};
  long quiescent = -1;
  bool cut = false;
  auto trace_of = [&](long i) {
    std::vector<RunStep> tr;
    for (; i >= 0; i = nodes[i].parent) tr.push_back(nodes[i].step);
    return std::vector<RunStep>(tr.rbegin(), tr.rend());
  };
  while (!work.empty()) {
    long i = work.front();
    work.pop_front();
    const RunStep cur = nodes[i].step;
    if (terminated(cur.proc)) {
      rep.outcome = RunOutcome::Terminated;
      rep.trace = trace_of(i);
      rep.states = nodes.size();
      return rep;
    }
    bool instant = false;
    auto succ = all_steps(cur.theta, cur.proc, M, instant);
    if (succ.empty()) {
      if (quiescent < 0) quiescent = i;
      continue;
    }
    if (nodes[i].depth >= fuel) {
      cut = true;
      continue;
    }
    for (auto& s : succ) {
      RunStep st{s.rule, s.detail, clamp(s.theta, M), s.next};
      auto k = key(st);
      if (seen.count(k)) continue;
      seen[k] = static_cast<long>(nodes.size());
      nodes.push_back({st, i, nodes[i].depth + 1});
      work.push_back(static_cast<long>(nodes.size()) - 1);
    }
  }
  rep.states = nodes.size();
  if (quiescent >= 0) {
    rep.outcome = RunOutcome::Quiescent;
    rep.trace = trace_of(quiescent);
  } else {
    rep.outcome = cut ? RunOutcome::FuelExhausted : RunOutcome::Divergent;
  }
  return rep;
}

}  // namespace toast
