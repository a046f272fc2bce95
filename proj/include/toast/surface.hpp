#pragma once
// Textual syntax for constraints, types, processes and systems (.toast files).
// The grammar is published in docs/grammar.ebnf.

#include "toast/calculus.hpp"
#include "toast/types.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace toast {

struct Span {
  std::size_t begin = 0, end = 0;  // byte offsets, end exclusive
};

struct Diagnostic {
  std::string severity = "error";
  Span span;
  std::string message;
  std::string tag;  // optional rule name
};

// "path:line:col: error: message"
std::string format(const Diagnostic& d, const std::string& text, const std::string& path = "<input>");

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<Diagnostic> ds);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

struct TypeDecl {
  std::string name;
  SessionType type;
  Span span;
};

struct ProcDecl {
  std::string name;
  Process proc;
  Span span;
};

// A free role of the system and its starting configuration.
struct RoleDecl {
  std::string role;
  SessionType type;
  Valuation nu;
  Span span;
};

// Types assigned to the two endpoints of a restriction new (p q).
struct SessionDecl {
  std::string p, q;
  SessionType sp, sq;
  Span span;
};

struct SystemDecl {
  std::string name;
  Process proc;
  TimerEnv timers;
  std::vector<RoleDecl> roles;
  std::vector<SessionDecl> sessions;
  Span span;
};

struct SourceFile {
  std::vector<TypeDecl> types;
  std::vector<ProcDecl> processes;
  std::vector<SystemDecl> systems;

  const TypeDecl* find_type(const std::string& n) const;
  const ProcDecl* find_process(const std::string& n) const;
  const SystemDecl* find_system(const std::string& n) const;
};

SourceFile parse_source(const std::string& text);
SourceFile load_source(const std::string& path);  // std::runtime_error when unreadable

// Standalone fragments. Unknown identifiers in types become free variables.
Constraint parse_constraint(const std::string& text);
SessionType parse_type(const std::string& text);
Process parse_process(const std::string& text);

}  // namespace toast
