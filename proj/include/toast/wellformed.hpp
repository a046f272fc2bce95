#pragma once

#include "toast/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace toast {

// Theta: recursion variable -> invariant constraint
using RecEnv = std::map<std::string, Constraint>;

enum class WfPremise { Feasibility, MixedChoice, Delegation, VarUndefined, Context };
std::string premise_tag(WfPremise p);

struct WfStep {
  std::string rule;
  std::string judgment;
  bool ok = true;
  int depth = 0;
};

struct WfFailure {
  std::string rule;
  WfPremise premise;
  std::string detail;
};

struct WfReport {
  bool accepted = true;
  std::vector<WfStep> trace;
  std::optional<WfFailure> failing;
};

// The constraint the formation rules assign to S: true for end, the past of
// the disjunction of guards for a choice, the body's for a recursion.
Constraint canonical_constraint(const SessionType& s, const RecEnv& theta = {});

// Theta; delta |- S. Accepts when delta entails the canonical constraint and
// every premise of the matching rule holds.
WfReport wf_judgment(const RecEnv& theta, const Constraint& delta, const SessionType& s);

// wf against nu: the canonical judgment is derivable and nu satisfies it.
bool wf_config(const Valuation& nu, const SessionType& s);
WfReport wf_report(const SessionType& s);  // against nu0
bool wf_type(const SessionType& s);

Constraint future_env(const Option& o);

}  // namespace toast
