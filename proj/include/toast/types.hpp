#pragma once

#include "toast/constraint.hpp"

#include <memory>
#include <string>
#include <vector>

namespace toast {

struct TNode;
using SessionType = std::shared_ptr<const TNode>;

enum class SortKind { Nat, Bool, String, None, Delegate };

struct Sort {
  SortKind kind = SortKind::None;
  Constraint init;     // Delegate only
  SessionType proto;   // Delegate only

  static Sort nat() { return {SortKind::Nat, nullptr, nullptr}; }
  static Sort boolean() { return {SortKind::Bool, nullptr, nullptr}; }
  static Sort string() { return {SortKind::String, nullptr, nullptr}; }
  static Sort none() { return {SortKind::None, nullptr, nullptr}; }
  static Sort delegate(Constraint d, SessionType s) { return {SortKind::Delegate, std::move(d), std::move(s)}; }
  bool is_base() const { return kind != SortKind::Delegate; }
};

enum class Dir { Send, Recv };

struct Option {
  Dir dir = Dir::Send;
  std::string label;
  Sort payload;
  Constraint guard;
  ClockSet resets;
  SessionType cont;
};

enum class TKind { Choice, Rec, Var, End };

struct TNode {
  TKind kind = TKind::End;
  std::vector<Option> options;  // Choice
  std::string var;              // Rec binder or Var name
  SessionType body;             // Rec
};

namespace ty {
SessionType end();
SessionType var(const std::string& a);
SessionType rec(const std::string& a, SessionType body);
SessionType choice(std::vector<Option> opts);
Option opt(Dir d, std::string label, Sort payload, Constraint guard, ClockSet resets, SessionType cont);
Option send(std::string label, Constraint guard, ClockSet resets, SessionType cont, Sort payload = Sort::none());
Option recv(std::string label, Constraint guard, ClockSet resets, SessionType cont, Sort payload = Sort::none());
}  // namespace ty

inline Dir flip(Dir d) { return d == Dir::Send ? Dir::Recv : Dir::Send; }

// Structural equality, bound names included.
bool equal(const SessionType& a, const SessionType& b);
bool equal(const Sort& a, const Sort& b);

SessionType dual(const SessionType& s);
std::set<std::string> free_names(const SessionType& s);
SessionType substitute(const SessionType& s, const std::string& a, const SessionType& r);
SessionType unfold(const SessionType& s);
// Strips top-level recursion until a choice, end or free variable is reached.
SessionType unfold_top(const SessionType& s);
bool unfold_equiv(const SessionType& a, const SessionType& b);
bool is_end(const SessionType& s);
bool equal_up_to_unfold(const Sort& a, const Sort& b);

// Clocks mentioned by guards and resets, delegated protocols excluded.
ClockSet clocks_of(const SessionType& s);
std::int64_t max_constant(const SessionType& s);
bool contractive(const SessionType& s);
SessionType rename_clocks(const SessionType& s, const std::map<ClockId, ClockId>& m);
// alpha-invariant printing key
std::string canonical_key(const SessionType& s);

std::string fresh_name(const std::string& base);

}  // namespace toast
