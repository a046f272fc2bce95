#include "toast/typecheck.hpp"

#include "toast/print.hpp"
#include "toast/wellformed.hpp"
#include "toast/zone.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <unordered_set>

namespace toast {

// --- session environments

std::string str(const SessionEnv& d)
{
  std::string s;
  for (const auto& [r, c] : d.roles) {
    if (!s.empty()) s += ", ";
    s += r + ":(" + c.nu.str() + ", " + pretty(c.type) + ")";
  }
  for (const auto& [e, q] : d.queues) {
    if (!s.empty()) s += ", ";
    s += e + ":" + str(q);
  }
  return s.empty() ? "∅" : s;
}

std::string env_key(const SessionEnv& d)
{
  std::string s;
  for (const auto& [r, c] : d.roles) s += r + ":" + c.nu.str() + canonical_key(unfold_top(c.type)) + ";";
  for (const auto& [e, q] : d.queues) s += e + ":" + str(q) + ";";
  return s;
}

SessionEnv delta_advance(const SessionEnv& d, const Rat& t)
{
  SessionEnv r = d;
  for (auto& [_, c] : r.roles) c.nu = c.nu.advanced(t);
  return r;
}

TimerEnv theta_advance(const TimerEnv& th, const Rat& t) { return th.advanced(t); }

namespace {

IntervalSet deadline_set(const Deadline& e)
{
  if (e.infinite()) return IntervalSet::all();
  Interval i;
  i.lo = 0;
  i.hi = e.n;
  i.hi_open = e.strict;
  return IntervalSet(i);
}

IntervalSet before(const Rat& t)
{
  Interval i;
  i.lo = 0;
  i.hi = t;
  i.hi_open = true;
  return IntervalSet(i);
}

bool reading_within(const SessionEnv& d, const IntervalSet& window)
{
  for (const auto& [_, c] : d.roles) {
    auto s = unfold_top(c.type);
    if (s->kind != TKind::Choice) continue;
    for (const auto& o : s->options)
      if (o.dir == Dir::Recv && !delay_set(c.nu, o.guard).intersect(window).empty()) return true;
  }
  return false;
}

std::int64_t ceil_of(const Rat& r) { return r.floor() + (r.denominator() == 1 ? 0 : 1); }

}  // namespace

bool t_reading(const SessionEnv& d, const Rat& t) { return reading_within(d, before(t)); }
bool t_reading(const SessionEnv& d, const Deadline& e) { return reading_within(d, deadline_set(e)); }

bool wf_session(const SessionEnv& d)
{
  for (const auto& [_, c] : d.roles)
    if (!wf_config(c.nu, c.type)) return false;
  return true;
}

namespace {

// The partner of p is the writer of p's inbound queue.
std::optional<std::string> partner_of(const SessionEnv& d, const std::string& p)
{
  for (const auto& [e, _] : d.queues) {
    auto arrow = e.find("->");
    if (e.substr(arrow + 2) == p) return e.substr(0, arrow);
  }
  return std::nullopt;
}

std::pair<std::string, std::string> split_endpoint(const std::string& e)
{
  auto arrow = e.find("->");
  return {e.substr(0, arrow), e.substr(arrow + 2)};
}

}  // namespace

bool balanced(const SessionEnv& d)
{
  // (1) queued heads are receivable now, and consuming them stays balanced
  for (const auto& [e, q] : d.queues) {
    if (q.empty()) continue;
    auto [from, to] = split_endpoint(e);
    auto it = d.roles.find(to);
    if (it == d.roles.end()) continue;
    std::optional<Configuration> next;
    for (const auto& a : cfg_actions(it->second))
      if (a.label.kind == LabelKind::Recv && same_message(a.label.msg, q.front())) next = a.next;
    if (!next) return false;
    SessionEnv r = d;
    r.roles[to] = *next;
    r.queues[e].erase(r.queues[e].begin());
    if (!balanced(r)) return false;
  }
  for (const auto& [e, q1] : d.queues) {
    auto [q, p] = split_endpoint(e);  // e = qp, read by p
    auto ip = d.roles.find(p), iq = d.roles.find(q);
    if (ip == d.roles.end() || iq == d.roles.end()) continue;
    auto back = d.queues.find(endpoint(p, q));
    // (2) without the reverse queue, some queue must make the pair compatible; we try the empty one
    MsgQueue q2 = back == d.queues.end() ? MsgQueue{} : back->second;
    // (3)
    if (!compatible({ip->second, q1}, {iq->second, q2})) return false;
  }
  return true;
}

bool fully_balanced(const SessionEnv& d)
{
  if (!balanced(d)) return false;
  for (const auto& [p, _] : d.roles) {
    auto q = partner_of(d, p);
    if (!q || !d.roles.count(*q) || !d.queues.count(endpoint(p, *q))) return false;
  }
  for (const auto& [e, _] : d.queues) {
    auto [q, p] = split_endpoint(e);
    if (!d.roles.count(p) || !d.roles.count(q) || !d.queues.count(endpoint(p, q))) return false;
  }
  return true;
}

bool delayable(const SessionEnv& d)
{
  for (const auto& [e, q] : d.queues)
    if (!q.empty() && d.roles.count(split_endpoint(e).second)) return false;
  return true;
}

std::vector<EnvStep> session_step(const SessionEnv& d)
{
  std::vector<EnvStep> out;
  for (const auto& [p, c] : d.roles) {
    for (const auto& a : cfg_actions(c)) {
      if (a.label.kind == LabelKind::Send) {
        for (const auto& [e, q] : d.queues) {
          if (split_endpoint(e).first != p) continue;
          SessionEnv r = d;
          r.roles[p] = a.next;
          r.queues[e].push_back(a.label.msg);
          out.push_back({p + "!" + a.label.msg.label, r});
        }
      } else if (a.label.kind == LabelKind::Recv) {
        for (const auto& [e, q] : d.queues) {
          if (split_endpoint(e).second != p || q.empty() || !same_message(q.front(), a.label.msg)) continue;
          SessionEnv r = d;
          r.roles[p] = a.next;
          r.queues[e].erase(r.queues[e].begin());
          out.push_back({p + "?" + a.label.msg.label, r});
        }
      }
    }
  }
  return out;
}

std::vector<Rat> region_delays(const std::vector<Rat>& values, std::int64_t M)
{
  std::set<Rat> b{Rat(0)};
  for (const Rat& v : values)
    for (std::int64_t k = std::max<std::int64_t>(ceil_of(v), 0); k <= M + 1; ++k)
      if (Rat(k) - v >= 0) b.insert(Rat(k) - v);
  std::vector<Rat> pts(b.begin(), b.end());
  std::vector<Rat> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.push_back(pts[i]);
    if (i + 1 < pts.size()) out.push_back((pts[i] + pts[i + 1]) / 2);
  }
  out.push_back(pts.back() + Rat(1, 2));
  return out;
}

namespace {

std::string region_key(const std::vector<Rat>& vs, std::int64_t M)
{
  std::string s;
  std::vector<std::pair<Rat, std::size_t>> fracs;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const Rat& v = vs[i];
    if (v > Rat(M)) {
      s += "*,";
      continue;
    }
    Rat f = v - Rat(v.floor());
    s += std::to_string(v.floor()) + (f == 0 ? "," : "+,");
    if (f != 0) fracs.push_back({f, i});
  }
  std::sort(fracs.begin(), fracs.end());
  s += "|";
  for (std::size_t k = 0; k < fracs.size(); ++k) {
    if (k && fracs[k].first != fracs[k - 1].first) s += "<";
    s += std::to_string(fracs[k].second) + " ";
  }
  return s;
}

std::optional<Sort> sort_of(const Value& v, const std::map<std::string, Sort>& gamma)
{
  switch (v.kind) {
    case Value::Kind::Nat: return Sort::nat();
    case Value::Kind::Bool: return Sort::boolean();
    case Value::Kind::String: return Sort::string();
    case Value::Kind::Unit: return Sort::none();
    case Value::Kind::Name: {
      auto it = gamma.find(v.text);
      if (it == gamma.end()) return std::nullopt;
      return it->second;
    }
  }
  return std::nullopt;
}

std::set<std::string> free_roles(const Process& p)
{
  std::set<std::string> s;
  auto add = [&](const std::set<std::string>& o) { s.insert(o.begin(), o.end()); };
  switch (p->kind) {
    case PKind::Send:
      s.insert(p->role);
      if (p->value.kind == Value::Kind::Name) s.insert(p->value.text);
      add(free_roles(p->a));
      break;
    case PKind::Timeout: add(free_roles(p->b)); [[fallthrough]];
    case PKind::Branch:
      s.insert(p->role);
      for (const auto& a : p->arms) {
        auto r = free_roles(a.body);
        if (!a.binder.empty()) r.erase(a.binder);
        add(r);
      }
      break;
    case PKind::Set:
    case PKind::DelayC:
    case PKind::DelayT: add(free_roles(p->a)); break;
    case PKind::If:
    case PKind::Par:
      add(free_roles(p->a));
      add(free_roles(p->b));
      break;
    case PKind::Def: add(free_roles(p->b)); break;
    case PKind::Call: s.insert(p->rargs.begin(), p->rargs.end()); break;
    case PKind::Scope:
      add(free_roles(p->a));
      s.erase(p->role);
      s.erase(p->peer);
      break;
    case PKind::Queue:
      for (const auto& it : p->items)
        if (it.v.kind == Value::Kind::Name) s.insert(it.v.text);
      break;
    case PKind::Term: break;
  }
  return s;
}

// Queue processes directly inside a restriction body.
void queue_leaves(const Process& p, std::vector<Process>& out)
{
  if (p->kind == PKind::Par) {
    queue_leaves(p->a, out);
    queue_leaves(p->b, out);
  } else if (p->kind == PKind::Queue) {
    out.push_back(p);
  }
}

std::int64_t env_max_constant(const SessionEnv& d)
{
  std::int64_t m = 0;
  for (const auto& [_, c] : d.roles) m = std::max(m, max_constant(c.type));
  for (const auto& [_, q] : d.queues)
    for (const auto& msg : q)
      if (msg.payload.kind == SortKind::Delegate)
        m = std::max({m, max_constant(msg.payload.init), max_constant(msg.payload.proto)});
  return m;
}

struct ProcVar {
  std::vector<std::string> vparams, rparams;
  std::vector<std::optional<Sort>> sorts;
  std::set<std::string> keys;
  std::deque<std::pair<TimerEnv, std::vector<Configuration>>> pending;
};

struct Ctx {
  std::map<std::string, Sort> values;
  std::map<std::string, std::shared_ptr<ProcVar>> procs;
};

class Checker {
 public:
  Checker(const TypecheckOptions& opt, std::int64_t M) : opt_(opt), M_(M) {}

  Derivation check(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d);

 private:
  const TypecheckOptions& opt_;
  std::int64_t M_;

  Derivation node(const std::string& rule, const TimerEnv& th, const Process& p, const SessionEnv& d) const
  {
    Derivation n;
    n.rule = rule;
    if (opt_.judgments) n.judgment = "Γ, " + th.str() + " ⊢ " + pretty(p) + " ▷ " + str(d);
    return n;
  }
  static Derivation& fail(Derivation& n, const std::string& premise, const std::string& detail = "")
  {
    n.ok = false;
    if (n.premise.empty()) {
      n.premise = premise;
      n.detail = detail;
    }
    return n;
  }
  static void add(Derivation& n, Derivation c)
  {
    if (!c.ok) n.ok = false;
    n.children.push_back(std::move(c));
  }

  std::vector<Rat> values(const TimerEnv& th, const SessionEnv& d) const
  {
    std::vector<Rat> vs;
    for (const auto& [_, v] : th.values()) vs.push_back(v);
    for (const auto& [_, c] : d.roles)
      for (const auto& [x, v] : c.nu.values()) vs.push_back(v);
    return vs;
  }

  Derivation end(const TimerEnv& th, const Process& p, const SessionEnv& d);
  Derivation weaken(const std::string& rule, const TimerEnv& th, const Process& p, const SessionEnv& d,
                    const std::set<std::string>& keep, Derivation (Checker::*inner)(const TimerEnv&, const Process&,
                                                                                   const SessionEnv&));
  Derivation queue(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d);
  Derivation send(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d);
  Derivation timeout(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d);
  Derivation receive(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d);
  Derivation single(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d, const Option& o,
                    const Arm& arm);
  Derivation delay_c(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d);
  Derivation delay_t(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d, const Rat& t);
  Derivation def(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d);
  Derivation call(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d);
  Derivation scope(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d);
  Derivation par(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d);

  Rat after_shift(const Deadline& e, const TimerEnv& th, const SessionEnv& d) const;
};

Derivation Checker::end(const TimerEnv& th, const Process& p, const SessionEnv& d)
{
  Derivation n = node("End", th, p, d);
  for (const auto& [r, c] : d.roles)
    if (!is_end(c.type)) return fail(n, "End: Δ is end", "role " + r + " has " + pretty(c.type));
  if (!d.queues.empty()) return fail(n, "End: Δ is end", "queue " + d.queues.begin()->first + " is not held");
  return n;
}

Derivation Checker::check(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d)
{
  switch (p->kind) {
    case PKind::Term: {
      if (d.roles.empty()) return end(th, p, d);
      Derivation w = node("Weak", th, p, d);
      SessionEnv rest = d;
      for (const auto& [r, c] : d.roles)
        if (is_end(c.type)) rest.roles.erase(r);
      if (rest.roles.size() == d.roles.size()) return end(th, p, d);
      add(w, end(th, p, rest));
      return w;
    }
    case PKind::Queue: return queue(g, th, p, d);
    case PKind::Set: {
      Derivation n = node("Timer", th, p, d);
      if (!th.has(p->name)) return fail(n, "Timer: x ∈ dom(θ)", "timer " + p->name + " is not declared");
      TimerEnv t2 = th;
      t2.set(p->name, 0);
      add(n, check(g, t2, p->a, d));
      return n;
    }
    case PKind::If: {
      bool holds;
      try {
        holds = sat(th, p->cond);
      } catch (const std::exception&) {
        Derivation n = node("IfTrue", th, p, d);
        return fail(n, "IfTrue: θ ⊨ δ", "condition reads an undeclared timer");
      }
      Derivation n = node(holds ? "IfTrue" : "IfFalse", th, p, d);
      add(n, check(g, th, holds ? p->a : p->b, d));
      return n;
    }
    case PKind::DelayC: return delay_c(g, th, p, d);
    case PKind::DelayT: return delay_t(g, th, p->a, d, p->t);
    case PKind::Send: return send(g, th, p, d);
    case PKind::Branch: return receive(g, th, p, d);
    case PKind::Timeout: return timeout(g, th, p, d);
    case PKind::Def: return def(g, th, p, d);
    case PKind::Call: return call(g, th, p, d);
    case PKind::Scope: return scope(g, th, p, d);
    case PKind::Par: return par(g, th, p, d);
  }
  Derivation n = node("?", th, p, d);
  return fail(n, "unknown process form");
}

Derivation Checker::queue(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d)
{
  const std::string ep = endpoint(p->role, p->peer);
  auto it = d.queues.find(ep);
  if (it == d.queues.end()) {
    Derivation n = node(p->items.empty() ? "Empty" : "VQue", th, p, d);
    return fail(n, "Empty: " + ep + " ∈ dom(Δ)", "queue " + ep + " has no type");
  }
  SessionEnv rest = d;
  rest.queues.clear();
  rest.queues[ep] = it->second;
  for (const auto& [e, q] : d.queues)
    if (e != ep) {
      Derivation n = node("Empty", th, p, d);
      return fail(n, "Empty: Δ holds only " + ep, "queue " + e + " is not held here");
    }
  // roles consumed by delegated queue entries
  std::set<std::string> delegated;
  for (const auto& item : p->items)
    if (item.v.kind == Value::Kind::Name && d.roles.count(item.v.text)) delegated.insert(item.v.text);
  std::vector<std::string> dropped;
  for (const auto& [r, c] : d.roles) {
    if (delegated.count(r)) continue;
    if (!is_end(c.type)) {
      Derivation n = node("Weak", th, p, d);
      return fail(n, "Weak: dropped roles are end", "role " + r + " has " + pretty(c.type));
    }
    rest.roles.erase(r);
    dropped.push_back(r);
  }

  // peel one item at a time
  std::function<Derivation(std::size_t, const SessionEnv&)> go = [&](std::size_t k, const SessionEnv& e) {
    const MsgQueue& ty = e.queues.at(ep);
    auto here = pr::queue(p->role, p->peer, std::vector<QItem>(p->items.begin() + k, p->items.end()));
    if (k == p->items.size()) {
      Derivation n = node("Empty", th, here, e);
      if (!ty.empty()) return fail(n, "Empty: " + ep + ":∅", "type expects " + str(ty));
      for (const auto& [r, c] : e.roles)
        return fail(n, "Empty: Δ is " + ep + ":∅", "role " + r + " left over");
      return n;
    }
    const QItem& item = p->items[k];
    bool deleg = !ty.empty() && ty.front().payload.kind == SortKind::Delegate;
    Derivation n = node(deleg ? "DQue" : "VQue", th, here, e);
    if (ty.empty()) return fail(n, std::string(deleg ? "DQue" : "VQue") + ": queue type nonempty", "extra " + item.label);
    const Message& m = ty.front();
    if (m.label != item.label)
      return fail(n, std::string(deleg ? "DQue" : "VQue") + ": labels match", item.label + " vs " + m.label);
    SessionEnv next = e;
    next.queues[ep].erase(next.queues[ep].begin());
    if (deleg) {
      if (item.v.kind != Value::Kind::Name || !e.roles.count(item.v.text))
        return fail(n, "DQue: T = (δ, S)", "queued value is not a role in Δ");
      const auto& c = e.roles.at(item.v.text);
      if (!sat(c.nu.extended(clocks_of(m.payload.init)), m.payload.init)) return fail(n, "DQue: ν ⊨ δ");
      if (!unfold_equiv(c.type, m.payload.proto)) return fail(n, "DQue: T = (δ, S)", "delegated type differs");
      next.roles.erase(item.v.text);
    } else {
      if (!m.payload.is_base()) return fail(n, "VQue: T base");
      auto s = sort_of(item.v, g.values);
      if (!s || !equal(*s, m.payload)) return fail(n, "VQue: Γ ⊢ v : T", str(item.v) + " is not " + pretty(m.payload));
    }
    add(n, go(k + 1, next));
    return n;
  };
  Derivation body = go(0, rest);
  if (dropped.empty()) return body;
  Derivation w = node("Weak", th, p, d);
  add(w, std::move(body));
  return w;
}

Derivation Checker::send(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d)
{
  auto it = d.roles.find(p->role);
  if (it == d.roles.end()) {
    Derivation n = node("VSend", th, p, d);
    return fail(n, "VSend: p ∈ dom(Δ)", "role " + p->role + " has no type");
  }
  const Configuration& c = it->second;
  auto s = unfold_top(c.type);
  const Option* opt = nullptr;
  if (s->kind == TKind::Choice)
    for (const auto& o : s->options)
      if (o.dir == Dir::Send && o.label == p->label) opt = &o;
  bool deleg = opt && opt->payload.kind == SortKind::Delegate;
  Derivation n = node(deleg ? "DSend" : "VSend", th, p, d);
  const std::string R = deleg ? "DSend" : "VSend";
  if (!opt) return fail(n, R + ": ∃j: c_j = !l", "no send option " + p->label + " in " + pretty(c.type));
  if (!sat(c.nu, opt->guard)) return fail(n, R + ": ν ⊨ δ_j", p->label + " at " + c.nu.str());
  SessionEnv next = d;
  if (deleg) {
    if (p->value.kind != Value::Kind::Name || !d.roles.count(p->value.text) || p->value.text == p->role)
      return fail(n, "DSend: T = (δ', S')", "payload is not a delegable role");
    const auto& b = d.roles.at(p->value.text);
    if (!sat(b.nu.extended(clocks_of(opt->payload.init)), opt->payload.init)) return fail(n, "DSend: ν' ⊨ δ'");
    if (!unfold_equiv(b.type, opt->payload.proto)) return fail(n, "DSend: T = (δ', S')", "delegated type differs");
    next.roles.erase(p->value.text);
  } else {
    auto srt = sort_of(p->value, g.values);
    if (!opt->payload.is_base() || !srt || !equal(*srt, opt->payload))
      return fail(n, "VSend: Γ ⊢ v : T", str(p->value) + " is not " + pretty(opt->payload));
  }
  next.roles[p->role] = {c.nu.reset(opt->resets), opt->cont};
  add(n, check(g, th, p->a, next));
  return n;
}

Rat Checker::after_shift(const Deadline& e, const TimerEnv& th, const SessionEnv& d) const
{
  if (e.strict) return e.n;
  // the timeout of a non-strict deadline fires just after n; stay inside that region
  auto ts = region_delays(values(th, d), std::max(M_, ceil_of(e.n) + 1));
  Rat eps(1, 2);
  for (const Rat& t : ts)
    if (t > e.n) {
      eps = std::min(eps, (t - e.n) / 2);
      break;
    }
  return e.n + eps;
}

Derivation Checker::timeout(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d)
{
  Derivation n = node("Timeout", th, p, d);
  if (!d.roles.count(p->role)) return fail(n, "Timeout: p ∈ dom(Δ)", "role " + p->role + " has no type");
  add(n, receive(g, th, pr::branch(p->role, p->deadline, p->arms), d));
  Rat s = after_shift(p->deadline, th, d);
  add(n, check(g, th.advanced(s), p->b, delta_advance(d, s)));
  return n;
}

Derivation Checker::receive(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d)
{
  auto it = d.roles.find(p->role);
  if (it == d.roles.end()) {
    Derivation n = node("Branch", th, p, d);
    return fail(n, "Branch: p ∈ dom(Δ)", "role " + p->role + " has no type");
  }
  const Configuration& c = it->second;
  auto s = unfold_top(c.type);
  if (s->kind != TKind::Choice) {
    Derivation n = node("Branch", th, p, d);
    return fail(n, "Branch: type is a choice", pretty(c.type));
  }
  if (s->options.size() == 1 && p->arms.size() == 1) return single(g, th, p, d, s->options[0], p->arms[0]);
  Derivation n = node("Branch", th, p, d);
  for (const auto& o : s->options) {
    if (!sat(c.nu, o.guard)) continue;
    if (o.dir != Dir::Recv) return fail(n, "Branch: ν ⊨ δ_j ⟹ c_j = ?", "send " + o.label + " is enabled");
    auto arm = std::find_if(p->arms.begin(), p->arms.end(), [&](const Arm& a) { return a.label == o.label; });
    if (arm == p->arms.end()) return fail(n, "Branch: ∃i ∈ I: l_i = l_j", "no branch for " + o.label);
    SessionEnv one = d;
    one.roles[p->role] = {c.nu, ty::choice({o})};
    add(n, single(g, th, pr::branch(p->role, p->deadline, {*arm}), one, o, *arm));
  }
  return n;
}

Derivation Checker::single(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d, const Option& o,
                           const Arm& arm)
{
  bool deleg = o.payload.kind == SortKind::Delegate;
  const std::string R = deleg ? "DRecv" : "VRecv";
  Derivation n = node(R, th, p, d);
  if (o.dir != Dir::Recv || o.label != arm.label)
    return fail(n, R + ": c = ?l", "type offers " + std::string(o.dir == Dir::Send ? "!" : "?") + o.label);
  const Configuration c = d.roles.at(p->role);
  SessionEnv rest = d;
  rest.roles.erase(p->role);
  if (t_reading(rest, p->deadline)) return fail(n, R + ": Δ not e-reading", "another role may receive within " + str(p->deadline));
  if (!(delay_set(c.nu, o.guard) == deadline_set(p->deadline)))
    return fail(n, R + ": ∀t: ν+t ⊨ δ ⟺ t ∈ e",
                "guard allows " + delay_set(c.nu, o.guard).str() + ", deadline " + deadline_set(p->deadline).str());
  IntervalSet window = deadline_set(p->deadline);
  std::vector<Valuation> partners{Valuation{}};
  if (deleg) {
    if (arm.binder.empty() || d.roles.count(arm.binder)) return fail(n, "DRecv: fresh role binder");
    partners.clear();
    auto cl = clocks_of(o.payload.proto);
    for (const auto& x : clocks_of(o.payload.init)) cl.insert(x);
    std::int64_t m = std::max(max_constant(o.payload.init), max_constant(o.payload.proto));
    std::vector<Valuation> grid{Valuation{}};
    for (const auto& x : cl) {
      std::vector<Valuation> next;
      for (const auto& v : grid)
        for (std::int64_t k = 0; k <= 2 * (m + 1); ++k) {
          Valuation w = v;
          w.set(x, Rat(k, 2));
          next.push_back(w);
        }
      grid = std::move(next);
    }
    for (const auto& v : grid)
      if (sat(v, o.payload.init)) partners.push_back(v);
    if (partners.empty()) return fail(n, "DRecv: ν' ⊨ δ'", "no valuation satisfies " + pretty(o.payload.init));
  }
  for (const Rat& t : region_delays(values(th, d), M_)) {
    if (!window.contains(t)) continue;
    for (const auto& nu2 : partners) {
      Ctx g2 = g;
      SessionEnv next = delta_advance(rest, t);
      next.roles[p->role] = {c.nu.advanced(t).reset(o.resets), o.cont};
      if (deleg)
        next.roles[arm.binder] = {nu2, o.payload.proto};
      else if (!arm.binder.empty())
        g2.values[arm.binder] = o.payload;
      add(n, check(g2, th.advanced(t), arm.body, next));
      if (!n.ok) return n;
    }
  }
  return n;
}

Derivation Checker::delay_t(const Ctx& g, const TimerEnv& th, const Process& cont, const SessionEnv& d, const Rat& t)
{
  Derivation n = node("Del[t]", th, pr::delay(t, cont), d);
  n.detail = "t=" + to_string(t);
  if (t_reading(d, t)) return fail(n, "Del[t]: Δ not t-reading", "a role may receive before " + to_string(t));
  add(n, check(g, th.advanced(t), cont, delta_advance(d, t)));
  return n;
}

Derivation Checker::delay_c(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d)
{
  Derivation n = node("Del[δ]", th, p, d);
  auto cl = clocks_of(p->cond);
  auto vs = values(th, d);
  vs.push_back(0);
  std::set<Rat> ts;
  for (const Rat& t : region_delays(vs, M_)) ts.insert(t);
  for (const Rat& t : representative_delays(p->cond, M_)) ts.insert(t);
  bool any = false;
  for (const Rat& t : ts) {
    Valuation w;
    for (const auto& x : cl) w.set(x, t);
    if (!sat(w, p->cond)) continue;
    any = true;
    add(n, delay_t(g, th, p->a, d, t));
  }
  if (!any) return fail(n, "Del[δ]: ∃t ⊨ δ", pretty(p->cond) + " has no solution");
  return n;
}

Derivation Checker::def(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d)
{
  Derivation n = node("Rec", th, p, d);
  auto pv = std::make_shared<ProcVar>();
  pv->vparams = p->vparams;
  pv->rparams = p->rparams;
  pv->sorts.assign(p->vparams.size(), std::nullopt);
  Ctx g2 = g;
  g2.procs[p->name] = pv;
  add(n, check(g2, th, p->b, d));
  if (!n.ok) return n;
  std::size_t rounds = 0;
  while (!pv->pending.empty()) {
    auto [th2, cfgs] = pv->pending.front();
    pv->pending.pop_front();
    if (++rounds > static_cast<std::size_t>(opt_.rec_cap))
      return fail(n, "Rec: finitely many (θ, Δ) for " + p->name, "iteration cap reached");
    Ctx gb = g2;
    for (std::size_t k = 0; k < pv->vparams.size(); ++k)
      if (pv->sorts[k]) gb.values[pv->vparams[k]] = *pv->sorts[k];
    SessionEnv db;
    for (std::size_t k = 0; k < pv->rparams.size(); ++k) db.roles[pv->rparams[k]] = cfgs[k];
    add(n, check(gb, th2, p->a, db));
    if (!n.ok) return n;
  }
  return n;
}

Derivation Checker::call(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d)
{
  Derivation n = node("Var", th, p, d);
  auto it = g.procs.find(p->name);
  if (it == g.procs.end()) return fail(n, "Var: X ∈ dom(Γ)", "process " + p->name + " is not defined");
  ProcVar& pv = *it->second;
  if (pv.vparams.size() != p->vargs.size() || pv.rparams.size() != p->rargs.size())
    return fail(n, "Var: arity", "call to " + p->name + " has the wrong number of arguments");
  for (std::size_t k = 0; k < p->vargs.size(); ++k) {
    auto s = sort_of(p->vargs[k], g.values);
    if (!s || !s->is_base()) return fail(n, "Var: Γ ⊢ v_i : T_i", str(p->vargs[k]) + " has no base type");
    if (!pv.sorts[k])
      pv.sorts[k] = *s;
    else if (!equal(*pv.sorts[k], *s))
      return fail(n, "Var: Γ ⊢ v_i : T_i", str(p->vargs[k]) + " is not " + pretty(*pv.sorts[k]));
  }
  std::vector<Configuration> cfgs;
  std::set<std::string> used;
  for (const auto& r : p->rargs) {
    auto c = d.roles.find(r);
    if (c == d.roles.end() || !used.insert(r).second)
      return fail(n, "Var: (ν⃗, S⃗) ∈ Δ̂", "role " + r + " is not available");
    cfgs.push_back(c->second);
  }
  for (const auto& [r, c] : d.roles)
    if (!used.count(r) && !is_end(c.type)) return fail(n, "Weak: dropped roles are end", "role " + r + " is still open");
  if (!d.queues.empty()) return fail(n, "Var: Δ = r⃗:(ν⃗, S⃗)", "queue " + d.queues.begin()->first + " is not held");
  std::vector<Rat> vs;
  for (const auto& [_, v] : th.values()) vs.push_back(v);
  std::string key;
  for (const auto& c : cfgs) {
    for (const auto& [_, v] : c.nu.values()) vs.push_back(v);
    key += canonical_key(unfold_top(c.type)) + "#";
  }
  std::string tk;
  for (const auto& [x, _] : th.values()) tk += x + ",";
  key = tk + "|" + region_key(vs, M_) + "|" + key;
  if (!pv.keys.count(key)) {
    pv.keys.insert(key);
    pv.pending.push_back({th, cfgs});
  }
  return n;
}

Derivation Checker::scope(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d)
{
  Derivation n = node("Res", th, p, d);
  const std::string a = p->role, b = p->peer;
  if (d.roles.count(a) || d.roles.count(b)) return fail(n, "Res: p, q ∉ dom(Δ)", "restricted role already in Δ");
  SessionEnv inner;
  auto op = opt_.opened.find({a, b});
  if (op == opt_.opened.end()) op = opt_.opened.find({b, a});
  if (op != opt_.opened.end()) {
    inner = op->second;
  } else {
    const ScopeTypes* st = nullptr;
    for (const auto& s : opt_.scopes)
      if ((s.p == a && s.q == b) || (s.p == b && s.q == a)) st = &s;
    if (!st) return fail(n, "Res: session types for (p q)", "no session declared for (" + a + " " + b + ")");
    SessionType sa = st->p == a ? st->sp : st->sq, sb = st->p == a ? st->sq : st->sp;
    inner.roles[a] = make_config(sa);
    inner.roles[b] = make_config(sb);
    inner.queues[endpoint(a, b)] = {};
    inner.queues[endpoint(b, a)] = {};
    std::vector<Process> qs;
    queue_leaves(p->a, qs);
    for (const auto& q : qs) {
      auto e = endpoint(q->role, q->peer);
      if (!inner.queues.count(e)) continue;
      for (const auto& item : q->items) {
        auto s = sort_of(item.v, g.values);
        if (!s) return fail(n, "Res: queued values are typed", str(item.v));
        inner.queues[e].push_back({item.label, *s});
      }
    }
  }
  auto ca = inner.roles.find(a), cb = inner.roles.find(b);
  if (ca == inner.roles.end() || cb == inner.roles.end()) return fail(n, "Res: session types for (p q)");
  QueuedConfig qa{ca->second, inner.queues[endpoint(b, a)]};
  QueuedConfig qb{cb->second, inner.queues[endpoint(a, b)]};
  if (!compatible(qa, qb)) return fail(n, "Res: (ν1, S1; ω1) ⋈ (ν2, S2; ω2)", "configurations are not compatible");
  if (!wf_config(qa.cfg.nu, qa.cfg.type) || !wf_config(qb.cfg.nu, qb.cfg.type))
    return fail(n, "Res: S_i well-formed against ν_i");
  SessionEnv full = d;
  for (const auto& [r, c] : inner.roles) full.roles[r] = c;
  for (const auto& [e, q] : inner.queues) full.queues[e] = q;
  add(n, check(g, th, p->a, full));
  return n;
}

Derivation Checker::par(const Ctx& g, const TimerEnv& th, const Process& p, const SessionEnv& d)
{
  Derivation n = node("Par", th, p, d);
  auto ra = free_roles(p->a), rb = free_roles(p->b);
  auto qa = fq(p->a), qb = fq(p->b);
  SessionEnv da, db;
  for (const auto& [r, c] : d.roles) {
    bool in_a = ra.count(r), in_b = rb.count(r);
    if (in_a && in_b) return fail(n, "Par: Δ1, Δ2 disjoint", "role " + r + " is used on both sides");
    if (in_b)
      db.roles[r] = c;
    else if (in_a || is_end(c.type))
      da.roles[r] = c;
    else
      return fail(n, "Par: Δ = Δ1, Δ2", "role " + r + " is used by neither side");
  }
  for (const auto& [e, q] : d.queues) {
    if (qa.count(e))
      da.queues[e] = q;
    else if (qb.count(e))
      db.queues[e] = q;
    else
      return fail(n, "Par: Δ = Δ1, Δ2", "queue " + e + " is held by neither side");
  }
  add(n, check(g, th, p->a, da));
  if (!n.ok) return n;
  add(n, check(g, th, p->b, db));
  return n;
}

const Derivation* deepest_failure(const Derivation& d)
{
  if (d.ok) return nullptr;
  for (const auto& c : d.children)
    if (auto f = deepest_failure(c)) return f;
  return &d;
}

}  // namespace

TypeReport typecheck(const VarEnv& gamma, const TimerEnv& theta, const Process& p, const SessionEnv& delta,
                     const TypecheckOptions& opt)
{
  std::int64_t M = std::max(max_constant(p), env_max_constant(delta));
  for (const auto& s : opt.scopes) M = std::max({M, max_constant(s.sp), max_constant(s.sq)});
  for (const auto& [_, e] : opt.opened) M = std::max(M, env_max_constant(e));
  Checker c(opt, M);
  Ctx g;
  g.values = gamma.values;
  TypeReport r;
  r.tree = c.check(g, theta, p, delta);
  r.accepted = r.tree.ok;
  if (auto f = deepest_failure(r.tree)) {
    r.failed_rule = f->rule;
    r.failed_premise = f->premise;
    r.detail = f->detail;
  }
  return r;
}

std::vector<std::string> rules_preorder(const Derivation& d)
{
  std::vector<std::string> out{d.rule};
  for (const auto& c : d.children)
    for (auto& r : rules_preorder(c)) out.push_back(std::move(r));
  return out;
}

static nlohmann::ordered_json to_json(const Derivation& d)
{
  nlohmann::ordered_json j;
  j["rule"] = d.rule;
  j["judgment"] = d.judgment;
  j["status"] = d.ok ? "ok" : "failed";
  if (!d.premise.empty()) j["premise"] = d.premise;
  if (!d.detail.empty()) j["detail"] = d.detail;
  j["children"] = nlohmann::ordered_json::array();
  for (const auto& c : d.children) j["children"].push_back(to_json(c));
  return j;
}

std::string derivation_json(const Derivation& d, int indent) { return to_json(d).dump(indent); }

// --- subject reduction

namespace {

struct SrState {
  TimerEnv theta;
  Process proc;
  SessionEnv delta;
  int depth;
};

}  // namespace

SrReport subject_reduction(const TimerEnv& theta, const Process& p, const SessionEnv& delta, const SrOptions& opt)
{
  SrReport rep;
  // open top-level restrictions
  SessionEnv start = delta;
  std::vector<std::pair<std::string, std::string>> pairs;
  Process cur = p;
  while (cur->kind == PKind::Scope) {
    const ScopeTypes* st = nullptr;
    for (const auto& s : opt.tc.scopes)
      if ((s.p == cur->role && s.q == cur->peer) || (s.p == cur->peer && s.q == cur->role)) st = &s;
    if (!st) break;
    start.roles[st->p] = make_config(st->sp);
    start.roles[st->q] = make_config(st->sq);
    start.queues[endpoint(st->p, st->q)] = {};
    start.queues[endpoint(st->q, st->p)] = {};
    std::vector<Process> qs;
    queue_leaves(cur->a, qs);
    for (const auto& q : qs) {
      auto e = endpoint(q->role, q->peer);
      if (!start.queues.count(e)) continue;
      for (const auto& item : q->items) {
        auto s = sort_of(item.v, {});
        if (!s) {
          rep.refusal = "queued value " + str(item.v) + " has no type";
          return rep;
        }
        start.queues[e].push_back({item.label, *s});
      }
    }
    pairs.push_back({cur->role, cur->peer});
    cur = cur->a;
  }

  auto tc_with = [&](const TimerEnv& th, const Process& q, const SessionEnv& full) {
    TypecheckOptions o = opt.tc;
    o.judgments = false;
    SessionEnv outer = full;
    for (const auto& [a, b] : pairs) {
      SessionEnv e;
      for (const auto& r : {a, b})
        if (full.roles.count(r)) {
          e.roles[r] = full.roles.at(r);
          outer.roles.erase(r);
        }
      for (const auto& ep : {endpoint(a, b), endpoint(b, a)})
        if (full.queues.count(ep)) {
          e.queues[ep] = full.queues.at(ep);
          outer.queues.erase(ep);
        }
      o.opened[{a, b}] = e;
    }
    return typecheck({}, th, q, outer, o);
  };

  auto first = tc_with(theta, p, start);
  if (!first.accepted) {
    rep.refusal = "initial judgment rejected: " + first.failed_premise +
                  (first.detail.empty() ? "" : " (" + first.detail + ")");
    return rep;
  }
  rep.started = true;
  const std::int64_t M = std::max(max_constant(p), env_max_constant(start));

  std::deque<SrState> work{{theta, p, start, 0}};
  std::unordered_set<std::string> seen;
  auto key = [](const SrState& s) { return s.theta.str() + "#" + pretty(s.proc) + "#" + env_key(s.delta); };
  seen.insert(key(work.front()));
  std::mt19937_64 rng(opt.seed);
  auto violation = [&](const SrState& s, const std::string& what) {
    rep.violations.push_back(what + " at θ=" + s.theta.str() + " P=" + pretty(s.proc) + " Δ=" + str(s.delta));
  };

  while (!work.empty()) {
    SrState s = work.front();
    work.pop_front();
    ++rep.states;
    if (rep.states > opt.max_states) {
      rep.fuel_exhausted = true;
      break;
    }
    std::vector<SrState> next;
    for (const auto& st : reduce_step(s.theta, s.proc)) {
      ++rep.actions_checked;
      std::vector<SessionEnv> cands{s.delta};
      for (const auto& e1 : session_step(s.delta)) {
        cands.push_back(e1.next);
        for (const auto& e2 : session_step(e1.next)) cands.push_back(e2.next);
      }
      std::optional<SessionEnv> found;
      for (const auto& c : cands)
        if (balanced(c) && wf_session(c) && tc_with(st.theta, st.next, c).accepted) {
          found = c;
          break;
        }
      if (!found) {
        violation(s, "no Δ' re-typechecks after " + st.rule + " " + st.detail);
        continue;
      }
      next.push_back({st.theta, st.next, *found, s.depth + 1});
    }
    for (const Rat& t : positive_grid(M)) {
      auto dl = reduce_delay(s.theta, s.proc, t);
      if (!dl) continue;
      ++rep.delays_checked;
      if (!fully_balanced(s.delta) || !wf_session(s.delta)) violation(s, "time step from a Δ that is not fully balanced and wf");
      if (!delayable(s.delta)) violation(s, "time passes while Δ is not delayable");
      SessionEnv d2 = delta_advance(s.delta, t);
      if (!fully_balanced(d2) || !wf_session(d2))
        violation(s, "Δ+" + to_string(t) + " is not fully balanced and wf");
      auto r = tc_with(dl->theta, dl->next, d2);
      if (!r.accepted) {
        violation(s, "delay " + to_string(t) + " does not re-typecheck: " + r.failed_premise);
        continue;
      }
      next.push_back({dl->theta, dl->next, d2, s.depth + 1});
    }
    if (next.empty()) continue;
    if (s.depth >= opt.fuel) {
      rep.fuel_exhausted = true;
      continue;
    }
    if (opt.schedule == Schedule::Random) {
      const auto& pick = next[std::uniform_int_distribution<std::size_t>(0, next.size() - 1)(rng)];
      work.push_back(pick);
      continue;
    }
    for (auto& n : next)
      if (seen.insert(key(n)).second) work.push_back(std::move(n));
  }
  return rep;
}

}  // namespace toast
