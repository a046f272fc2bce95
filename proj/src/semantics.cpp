#include "toast/semantics.hpp"

#include "toast/print.hpp"
#include "toast/wellformed.hpp"
#include "toast/zone.hpp"

#include <deque>
#include <functional>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace toast {

bool same_message(const Message& a, const Message& b)
{
  return a.label == b.label && equal_up_to_unfold(a.payload, b.payload);
}

std::string str(const Message& m)
{
  if (m.payload.kind == SortKind::None) return m.label;
  return m.label + "<" + pretty(m.payload) + ">";
}

std::string str(const MsgQueue& q)
{
  std::string s = "[";
  for (std::size_t i = 0; i < q.size(); ++i) s += (i ? ", " : "") + str(q[i]);
  return s + "]";
}

Configuration make_config(const SessionType& s)
{
  return {Valuation::zero(clocks_of(s)), s};
}

Configuration make_config(const Valuation& nu, const SessionType& s)
{
  return {nu.extended(clocks_of(s)), s};
}

std::string str(const TransLabel& l)
{
  switch (l.kind) {
    case LabelKind::Send: return "!" + str(l.msg);
    case LabelKind::Recv: return "?" + str(l.msg);
    case LabelKind::Tau: return "tau";
    case LabelKind::Delay: return "delay " + to_string(l.t);
  }
  return "?";
}

std::vector<CfgAction> cfg_actions(const Configuration& c)
{
  std::vector<CfgAction> out;
  SessionType s = unfold_top(c.type);
  if (s->kind != TKind::Choice) return out;
  for (const auto& o : s->options) {
    if (!sat(c.nu, o.guard)) continue;
    Message m{o.label, o.payload};
    TransLabel l = o.dir == Dir::Send ? TransLabel::send(m) : TransLabel::recv(m);
    out.push_back({l, {c.nu.reset(o.resets), o.cont}});
  }
  return out;
}

Configuration cfg_delay(const Configuration& c, const Rat& t)
{
  return {c.nu.advanced(t), c.type};
}

std::string str(FutureDir d)
{
  switch (d) {
    case FutureDir::None: return "none";
    case FutureDir::Send: return "send";
    case FutureDir::Recv: return "recv";
    case FutureDir::Both: return "both";
  }
  return "?";
}

FutureDir future_enabled(const Configuration& c)
{
  SessionType s = unfold_top(c.type);
  if (s->kind != TKind::Choice) return FutureDir::None;
  bool snd = false, rcv = false;
  for (const auto& o : s->options) {
    if (delay_set(c.nu, o.guard).empty()) continue;
    (o.dir == Dir::Send ? snd : rcv) = true;
  }
  if (snd && rcv) return FutureDir::Both;
  if (snd) return FutureDir::Send;
  if (rcv) return FutureDir::Recv;
  return FutureDir::None;
}

IntervalSet head_receivable_delays(const QueuedConfig& q)
{
  IntervalSet r;
  if (q.queue.empty()) return r;
  SessionType s = unfold_top(q.cfg.type);
  if (s->kind != TKind::Choice) return r;
  const Message& head = q.queue.front();
  for (const auto& o : s->options)
    if (o.dir == Dir::Recv && same_message({o.label, o.payload}, head))
      r = r.unite(delay_set(q.cfg.nu, o.guard));
  return r;
}

static bool before(const IntervalSet& set, const Rat& t)
{
  // some point of set lies in [0, t)
  for (const auto& p : set.parts())
    if (p.lo < t) return true;
  return false;
}

std::optional<QueuedConfig> qc_step(const QueuedConfig& q, const TransLabel& l)
{
  switch (l.kind) {
    case LabelKind::Send:
      for (auto& a : cfg_actions(q.cfg))
        if (a.label.kind == LabelKind::Send && same_message(a.label.msg, l.msg))
          return QueuedConfig{a.next, q.queue};
      return std::nullopt;
    case LabelKind::Tau: {
      if (q.queue.empty()) return std::nullopt;
      for (auto& a : cfg_actions(q.cfg))
        if (a.label.kind == LabelKind::Recv && same_message(a.label.msg, q.queue.front())) {
          MsgQueue rest(q.queue.begin() + 1, q.queue.end());
          return QueuedConfig{a.next, rest};
        }
      return std::nullopt;
    }
    case LabelKind::Recv: {
      QueuedConfig r = q;
      r.queue.push_back(l.msg);
      return r;
    }
    case LabelKind::Delay: {
      if (l.t < 0) return std::nullopt;
      Configuration after = cfg_delay(q.cfg, l.t);
      // persistency
      if (future_enabled(q.cfg) != FutureDir::None && future_enabled(after) == FutureDir::None)
        return std::nullopt;
      // urgency: no receive of the head may become possible strictly before t
      if (before(head_receivable_delays(q), l.t)) return std::nullopt;
      return QueuedConfig{after, q.queue};
    }
  }
  return std::nullopt;
}

bool qc_final(const QueuedConfig& q)
{
  return q.queue.empty() && is_end(q.cfg.type);
}

std::vector<SysStep> sys_steps(const SystemState& s)
{
  std::vector<SysStep> out;
  for (auto& a : cfg_actions(s.left.cfg)) {
    if (a.label.kind != LabelKind::Send) continue;
    SystemState n = s;
    n.left.cfg = a.next;
    n.right.queue.push_back(a.label.msg);
    out.push_back({"left", "com-l", a.label, n});
  }
  for (auto& a : cfg_actions(s.right.cfg)) {
    if (a.label.kind != LabelKind::Send) continue;
    SystemState n = s;
    n.right.cfg = a.next;
    n.left.queue.push_back(a.label.msg);
    out.push_back({"right", "com-r", a.label, n});
  }
  if (auto l = qc_step(s.left, TransLabel::tau())) {
    SystemState n = s;
    n.left = *l;
    out.push_back({"left", "par-l", TransLabel::recv(s.left.queue.front()), n});
  }
  if (auto r = qc_step(s.right, TransLabel::tau())) {
    SystemState n = s;
    n.right = *r;
    out.push_back({"right", "par-r", TransLabel::recv(s.right.queue.front()), n});
  }
  return out;
}

std::optional<SystemState> sys_delay(const SystemState& s, const Rat& t)
{
  auto l = qc_step(s.left, TransLabel::delay(t));
  if (!l) return std::nullopt;
  auto r = qc_step(s.right, TransLabel::delay(t));
  if (!r) return std::nullopt;
  return SystemState{*l, *r};
}

bool sys_final(const SystemState& s)
{
  return qc_final(s.left) && qc_final(s.right);
}

bool compatible(const QueuedConfig& a, const QueuedConfig& b)
{
  if (!a.queue.empty() && !b.queue.empty()) return false;
  if (!a.queue.empty() || !b.queue.empty()) {
    const QueuedConfig& full = a.queue.empty() ? b : a;
    const QueuedConfig& other = a.queue.empty() ? a : b;
    auto next = qc_step(full, TransLabel::tau());
    if (!next) return false;
    return a.queue.empty() ? compatible(other, *next) : compatible(*next, other);
  }
  return a.cfg.nu == b.cfg.nu && unfold_equiv(a.cfg.type, dual(b.cfg.type));
}

std::string digest(const QueuedConfig& q)
{
  return "(" + q.cfg.nu.str() + ", " + pretty(q.cfg.type) + ", " + str(q.queue) + ")";
}

std::string digest(const SystemState& s)
{
  return digest(s.left) + " | " + digest(s.right);
}

static std::string qc_key(const QueuedConfig& q)
{
  std::string k = q.cfg.nu.str() + "#" + canonical_key(q.cfg.type) + "#";
  for (const auto& m : q.queue) k += m.label + ";";
  return k;
}

std::string state_key(const SystemState& s)
{
  return qc_key(s.left) + "||" + qc_key(s.right);
}

std::vector<Rat> positive_grid(std::int64_t M)
{
  std::vector<Rat> g;
  for (std::int64_t k = 1; k <= 2 * (M + 1); ++k) g.push_back(Rat(k, 2));
  return g;
}

namespace {

// Values above M+1 behave alike for non-diagonal guards; clamping keeps the
// explored space finite.
Valuation clamp(const Valuation& nu, std::int64_t M)
{
  Valuation r;
  for (const auto& [x, v] : nu.values()) r.set(x, v > Rat(M + 1) ? Rat(M + 1) : v);
  return r;
}

SystemState clamp(SystemState s, std::int64_t M)
{
  s.left.cfg.nu = clamp(s.left.cfg.nu, M);
  s.right.cfg.nu = clamp(s.right.cfg.nu, M);
  return s;
}

struct Edge {
  std::string side;
  std::string label;
  SystemState next;
};

std::vector<Edge> successors(const SystemState& s, std::int64_t M)
{
  std::vector<Edge> out;
  for (auto& st : sys_steps(s)) out.push_back({st.side, st.rule + " " + str(st.label), clamp(st.next, M)});
  for (const Rat& t : positive_grid(M))
    if (auto n = sys_delay(s, t)) out.push_back({"joint", "delay " + to_string(t), clamp(*n, M)});
  return out;
}

bool has_progress(const SystemState& s, std::int64_t M)
{
  if (sys_final(s)) return true;
  if (!sys_steps(s).empty()) return true;
  for (const Rat& t : positive_grid(M))
    if (auto n = sys_delay(s, t))
      if (!sys_steps(*n).empty()) return true;
  return false;
}

}  // namespace

ExploreReport progress_explore(const SessionType& s, const ExploreOptions& opt,
                               const std::optional<SessionType>& partner)
{
  ExploreReport rep;
  if (opt.horizon <= 0) throw std::invalid_argument("horizon must be positive");
  SessionType other = partner ? *partner : dual(s);
  if (!opt.override_wf) {
    for (const auto& t : {s, other}) {
      WfReport w = wf_report(t);
      if (!w.accepted) {
        rep.rejected_input = true;
        rep.reject_reason = pretty(t) + " is not well-formed";
        if (w.failing) rep.reject_reason += ": " + w.failing->rule + " (" + w.failing->detail + ")";
        return rep;
      }
    }
  }
  const std::int64_t M = std::max(max_constant(s), max_constant(other));
  ClockSet clocks = clocks_of(s);
  for (const auto& x : clocks_of(other)) clocks.insert(x);
  SystemState init{{{Valuation::zero(clocks), s}, {}}, {{Valuation::zero(clocks), other}, {}}};

  auto check_state = [&](const SystemState& st) {
    if (opt.override_wf) return;
    if (!compatible(st.left, st.right)) rep.violations.push_back("not compatible: " + digest(st));
    if (!wf_config(st.left.cfg.nu, st.left.cfg.type) || !wf_config(st.right.cfg.nu, st.right.cfg.type))
      rep.violations.push_back("configuration not well-formed: " + digest(st));
  };

  struct Node {
    SystemState st;
    long parent;
    std::string side, label;
    int depth;
  };
  std::vector<Node> nodes;
  auto trace_of = [&](long i) {
    std::vector<TraceLine> tr;
    for (; i >= 0; i = nodes[i].parent)
      tr.push_back({nodes[i].side, nodes[i].label, digest(nodes[i].st)});
    return std::vector<TraceLine>(tr.rbegin(), tr.rend());
  };
  auto visit = [&](long i) {
    ++rep.states;
    check_state(nodes[i].st);
    if (!rep.stuck_trace && !has_progress(nodes[i].st, M)) {
      rep.stuck_trace = trace_of(i);
      rep.stuck_state = digest(nodes[i].st);
    }
  };

  if (opt.mode == ExploreMode::Exhaustive) {
    std::unordered_map<std::string, int> seen;
    std::deque<long> work;
    nodes.push_back({init, -1, "init", "start", 0});
    seen[state_key(init)] = 0;
    work.push_back(0);
    visit(0);
    while (!work.empty() && !rep.stuck_trace) {
      long i = work.front();
      work.pop_front();
      if (nodes[i].depth >= opt.horizon) {
        rep.truncated = true;
        continue;
      }
      for (auto& e : successors(nodes[i].st, M)) {
        ++rep.transitions;
        auto key = state_key(e.next);
        if (seen.count(key)) continue;
        if (nodes.size() >= opt.max_states) {
          rep.truncated = true;
          break;
        }
        seen[key] = nodes[i].depth + 1;
        nodes.push_back({e.next, i, e.side, e.label, nodes[i].depth + 1});
        work.push_back(static_cast<long>(nodes.size()) - 1);
        visit(static_cast<long>(nodes.size()) - 1);
        if (rep.stuck_trace) break;
      }
    }
  } else {
    std::mt19937_64 rng(opt.seed);
    for (int w = 0; w < opt.walks && !rep.stuck_trace; ++w) {
      nodes.clear();
      nodes.push_back({init, -1, "init", "start", 0});
      visit(0);
      for (int d = 0; d < opt.horizon && !rep.stuck_trace; ++d) {
        auto succ = successors(nodes.back().st, M);
        rep.transitions += succ.size();
        if (succ.empty()) break;
        auto& e = succ[std::uniform_int_distribution<std::size_t>(0, succ.size() - 1)(rng)];
        nodes.push_back({e.next, static_cast<long>(nodes.size()) - 1, e.side, e.label, d + 1});
        visit(static_cast<long>(nodes.size()) - 1);
      }
    }
  }
  return rep;
}

}  // namespace toast
