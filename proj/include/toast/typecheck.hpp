#pragma once
// Typing judgments Γ, θ ⊢ P ▷ Δ and the subject-reduction harness.

#include "toast/calculus.hpp"
#include "toast/semantics.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace toast {

// Roles map to configurations, endpoints "p->q" to queues of message types.
struct SessionEnv {
  std::map<std::string, Configuration> roles;
  std::map<std::string, MsgQueue> queues;

  bool empty() const { return roles.empty() && queues.empty(); }
};

std::string str(const SessionEnv& d);
// Exact key, types up to unfolding.
std::string env_key(const SessionEnv& d);

SessionEnv delta_advance(const SessionEnv& d, const Rat& t);
TimerEnv theta_advance(const TimerEnv& th, const Rat& t);

// Some role could receive after a delay t' < t.
bool t_reading(const SessionEnv& d, const Rat& t);
// Some role could receive after a delay t' within e.
bool t_reading(const SessionEnv& d, const Deadline& e);

bool wf_session(const SessionEnv& d);
bool balanced(const SessionEnv& d);
bool fully_balanced(const SessionEnv& d);
// No nonempty queue whose reader is present.
bool delayable(const SessionEnv& d);

struct EnvStep {
  std::string label;  // "p!l" or "p?l"
  SessionEnv next;
};
std::vector<EnvStep> session_step(const SessionEnv& d);

// Γ restricted to value variables; process variables are managed by the checker.
struct VarEnv {
  std::map<std::string, Sort> values;
};

// Types of the two endpoints of a restriction new (p q).
struct ScopeTypes {
  std::string p, q;
  SessionType sp, sq;
};

struct TypecheckOptions {
  std::vector<ScopeTypes> scopes;
  // Current state of restricted sessions, keyed by (p, q); takes precedence over scopes.
  std::map<std::pair<std::string, std::string>, SessionEnv> opened;
  int rec_cap = 256;      // environments per definition
  bool judgments = true;  // render judgment text into the tree
};

struct Derivation {
  std::string rule;
  std::string judgment;
  bool ok = true;
  std::string premise;  // failing premise, "Rule: text"
  std::string detail;
  std::vector<Derivation> children;
};

struct TypeReport {
  bool accepted = false;
  Derivation tree;
  std::string failed_rule;
  std::string failed_premise;  // deepest failing premise
  std::string detail;
};

TypeReport typecheck(const VarEnv& gamma, const TimerEnv& theta, const Process& p, const SessionEnv& delta,
                     const TypecheckOptions& opt = {});

// Preorder list of rule names.
std::vector<std::string> rules_preorder(const Derivation& d);
std::string derivation_json(const Derivation& d, int indent = 2);

// Delays that visit every region of the given values with constants up to M.
std::vector<Rat> region_delays(const std::vector<Rat>& values, std::int64_t M);

// --- subject reduction

struct SrOptions {
  int fuel = 50;
  Schedule schedule = Schedule::Exhaustive;
  std::uint64_t seed = 0;
  TypecheckOptions tc;
  std::size_t max_states = 100000;
};

struct SrReport {
  bool started = false;
  std::string refusal;  // why the harness did not start
  std::size_t states = 0;
  std::size_t actions_checked = 0;
  std::size_t delays_checked = 0;
  bool fuel_exhausted = false;
  std::vector<std::string> violations;
  bool ok() const { return started && violations.empty(); }
};

// Top-level restrictions with declared types are opened so the harness can
// track their session state across steps.
SrReport subject_reduction(const TimerEnv& theta, const Process& p, const SessionEnv& delta, const SrOptions& opt);

}  // namespace toast
