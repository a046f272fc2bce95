#pragma once

#include "toast/constraint.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace toast {

// Literal payloads, or a name: a value variable or a session endpoint (delegation).
struct Value {
  enum class Kind { Nat, Bool, String, Unit, Name } kind = Kind::Unit;
  std::int64_t nat = 0;
  bool boolean = false;
  std::string text;  // String contents or the name

  static Value nat_v(std::int64_t n) { return {Kind::Nat, n, false, {}}; }
  static Value bool_v(bool b) { return {Kind::Bool, 0, b, {}}; }
  static Value string_v(std::string s) { return {Kind::String, 0, false, std::move(s)}; }
  static Value unit() { return {}; }
  static Value name(std::string n) { return {Kind::Name, 0, false, std::move(n)}; }
  bool operator==(const Value& o) const = default;
};
std::string str(const Value& v);

// <n, <=n, inf. "<=0" is the non-blocking receive.
struct Deadline {
  enum class Kind { Bounded, Infinite } kind = Kind::Infinite;
  bool strict = false;
  Rat n = 0;

  static Deadline lt(Rat n);
  static Deadline le(Rat n);
  static Deadline inf() { return {}; }
  bool infinite() const { return kind == Kind::Infinite; }
  bool nonpositive() const { return !infinite() && !strict && n == 0; }
  // t sits within the deadline (t <> n)
  bool admits(const Rat& t) const;
  bool operator==(const Deadline& o) const = default;
};
std::string str(const Deadline& e);

enum class PKind { Set, Send, Branch, Timeout, If, DelayC, DelayT, Def, Call, Scope, Par, Term, Queue };

struct PNode;
using Process = std::shared_ptr<const PNode>;

struct Arm {
  std::string label;
  std::string binder;  // empty when the label carries no payload
  Process body;
};

struct QItem {
  std::string label;
  Value v;
  bool operator==(const QItem& o) const = default;
};

struct PNode {
  PKind kind = PKind::Term;
  std::string role;   // Send, Branch, Timeout: p. Scope: p. Queue: sender
  std::string peer;   // Scope: q. Queue: receiver
  std::string name;   // Set: timer. Def, Call: process variable
  std::string label;  // Send
  Value value;        // Send
  std::vector<Arm> arms;
  Deadline deadline;
  Constraint cond;  // If, DelayC
  Rat t = 0;        // DelayT
  std::vector<std::string> vparams, rparams;
  std::vector<Value> vargs;
  std::vector<std::string> rargs;
  std::vector<QItem> items;  // Queue, head first
  Process a, b;  // continuation; Def body/in; Par left/right; If then/else; Timeout after-branch in b
};

namespace pr {
Process set(const std::string& x, Process p);
Process send(const std::string& role, const std::string& label, Value v, Process p);
Process branch(const std::string& role, Deadline e, std::vector<Arm> arms);
Process timeout(const std::string& role, Deadline e, std::vector<Arm> arms, Process q);
Process if_(Constraint d, Process p, Process q);
Process delay(Constraint d, Process p);
Process delay(Rat t, Process p);
Process def(const std::string& x, std::vector<std::string> vs, std::vector<std::string> rs, Process body, Process in);
Process call(const std::string& x, std::vector<Value> vs, std::vector<std::string> rs);
Process scope(const std::string& p, const std::string& q, Process body);
Process par(Process a, Process b);
Process par(const std::vector<Process>& ps);
Process term();
Process queue(const std::string& from, const std::string& to, std::vector<QItem> h = {});
}  // namespace pr

bool equal(const Process& a, const Process& b);

using TimerEnv = Valuation;

// Queue endpoints are written "pq" for the queue from p to q.
std::string endpoint(const std::string& from, const std::string& to);

std::set<std::string> fq(const Process& p);
bool wf_process(const Process& p);
std::set<std::string> wait_set(const Process& p);
std::set<std::string> neq_set(const Process& p);

// Phi_t; nullopt where undefined.
std::optional<Process> time_pass(const Process& p, const Rat& t);

// Simultaneous substitution of names (value variables and roles).
Process subst(const Process& p, const std::map<std::string, Value>& s);

// Process variables called but not bound by an enclosing def.
std::set<std::string> free_process_vars(const Process& p);
// def X = P in Q == Q when Q never calls X. Applied to every reduct so that
// unfolding mutually recursive definitions keeps terms bounded.
Process prune_defs(const Process& p);

// Largest constant in deadlines, delays and conditions.
std::int64_t max_constant(const Process& p);

struct PStep {
  std::string rule;  // Send, Recv, RecvT, Set, IfT, IfF, Det, Call, Delay
  std::string detail;
  TimerEnv theta;
  Process next;
};

std::vector<PStep> reduce_step(const TimerEnv& theta, const Process& p);
std::optional<PStep> reduce_delay(const TimerEnv& theta, const Process& p, const Rat& t);

// Every leaf is 0 or an empty queue.
bool terminated(const Process& p);

enum class Schedule { Random, Exhaustive };
// Divergent: the exhaustive search closed without a terminated or stuck state.
enum class RunOutcome { Terminated, Quiescent, FuelExhausted, Divergent };
std::string str(RunOutcome o);

struct RunStep {
  std::string rule;
  std::string detail;
  TimerEnv theta;
  Process proc;
};

struct RunReport {
  RunOutcome outcome = RunOutcome::FuelExhausted;
  std::vector<RunStep> trace;  // initial state first
  std::size_t states = 0;
};

// Random: one seeded walk. Exhaustive: breadth-first up to fuel steps, returning
// the first terminated run found, else a quiescent one, else fuel exhaustion.
RunReport run(const TimerEnv& theta, const Process& p, Schedule sched, int fuel, std::uint64_t seed = 0);

}  // namespace toast
