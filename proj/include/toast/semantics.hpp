#pragma once

#include "toast/intervals.hpp"
#include "toast/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace toast {

struct Message {
  std::string label;
  Sort payload;
};
bool same_message(const Message& a, const Message& b);
std::string str(const Message& m);

using MsgQueue = std::vector<Message>;  // front = head
std::string str(const MsgQueue& q);

struct Configuration {
  Valuation nu;
  SessionType type;
};
Configuration make_config(const SessionType& s);  // (nu0, S)
Configuration make_config(const Valuation& nu, const SessionType& s);

struct QueuedConfig {
  Configuration cfg;
  MsgQueue queue;  // inbound, received but not yet processed
};

struct SystemState {
  QueuedConfig left, right;
};

enum class LabelKind { Send, Recv, Tau, Delay };
struct TransLabel {
  LabelKind kind = LabelKind::Tau;
  Message msg;
  Rat t = 0;

  static TransLabel send(Message m) { return {LabelKind::Send, std::move(m), 0}; }
  static TransLabel recv(Message m) { return {LabelKind::Recv, std::move(m), 0}; }
  static TransLabel tau() { return {LabelKind::Tau, {}, 0}; }
  static TransLabel delay(Rat t) { return {LabelKind::Delay, {}, t}; }
};
std::string str(const TransLabel& l);

struct CfgAction {
  TransLabel label;
  Configuration next;
};

// act/unfold: communication transitions available right now
std::vector<CfgAction> cfg_actions(const Configuration& c);
Configuration cfg_delay(const Configuration& c, const Rat& t);

enum class FutureDir { None, Send, Recv, Both };
std::string str(FutureDir d);
// Exact: directions enabled after some delay t >= 0.
FutureDir future_enabled(const Configuration& c);
// Delays after which some receive of the head of q is possible; empty if q is empty.
IntervalSet head_receivable_delays(const QueuedConfig& q);

std::optional<QueuedConfig> qc_step(const QueuedConfig& q, const TransLabel& l);
bool qc_final(const QueuedConfig& q);

struct SysStep {
  std::string side;  // left | right | joint
  std::string rule;  // com-l, com-r, par-l, par-r, wait
  TransLabel label;
  SystemState next;
};
// tau steps only (com and par); delays via sys_delay
std::vector<SysStep> sys_steps(const SystemState& s);
std::optional<SystemState> sys_delay(const SystemState& s, const Rat& t);
bool sys_final(const SystemState& s);

bool compatible(const QueuedConfig& a, const QueuedConfig& b);

std::string digest(const QueuedConfig& q);
std::string digest(const SystemState& s);
std::string state_key(const SystemState& s);

enum class ExploreMode { Exhaustive, Random };

struct ExploreOptions {
  int horizon = 40;
  ExploreMode mode = ExploreMode::Exhaustive;
  std::uint64_t seed = 0;
  int walks = 200;  // random mode only
  bool override_wf = false;
  std::size_t max_states = 2000000;
};

struct TraceLine {
  std::string side;
  std::string label;
  std::string digest;
};

struct ExploreReport {
  bool rejected_input = false;  // not wf and no override
  std::string reject_reason;
  std::size_t states = 0;
  std::size_t transitions = 0;
  bool truncated = false;
  std::vector<std::string> violations;  // compat / wf assertion failures
  std::optional<std::vector<TraceLine>> stuck_trace;
  std::string stuck_state;
  bool progress_ok() const { return !rejected_input && violations.empty() && !stuck_trace; }
};

// Explores (nu0, S, []) | (nu0, partner, []) where partner defaults to dual(S).
ExploreReport progress_explore(const SessionType& s, const ExploreOptions& opt,
                               const std::optional<SessionType>& partner = std::nullopt);

// {1/2, 1, ..., M+1}
std::vector<Rat> positive_grid(std::int64_t M);

}  // namespace toast
