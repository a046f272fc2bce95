#include "toast/surface.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace toast {

ParseError::ParseError(std::vector<Diagnostic> ds)
    : std::runtime_error(ds.empty() ? "parse error" : ds.front().message), diags_(std::move(ds))
{
}

std::string format(const Diagnostic& d, const std::string& text, const std::string& path)
{
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < d.span.begin && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  std::string s = path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + d.severity + ": " + d.message;
  if (!d.tag.empty()) s += " [" + d.tag + "]";
  return s;
}

const TypeDecl* SourceFile::find_type(const std::string& n) const
{
  for (const auto& t : types)
    if (t.name == n) return &t;
  return nullptr;
}

const ProcDecl* SourceFile::find_process(const std::string& n) const
{
  for (const auto& p : processes)
    if (p.name == n) return &p;
  return nullptr;
}

const SystemDecl* SourceFile::find_system(const std::string& n) const
{
  for (const auto& s : systems)
    if (s.name == n) return &s;
  return nullptr;
}

namespace {

enum class Tok { Ident, Int, String, Sym, Eof };

struct Token {
  Tok kind;
  std::string text;
  Span span;
};

const std::set<std::string> keywords{"end",   "rec",  "true",  "false",   "if",      "else", "def",
                                     "in",    "new",  "set",   "delay",   "after",   "inf",  "type",
                                     "process", "system", "role", "session", "timers", "at"};

struct Failure {
  Diagnostic d;
};

[[noreturn]] void fail(Span s, const std::string& msg)
{
  throw Failure{{"error", s, msg, ""}};
}

std::vector<Token> lex(const std::string& src)
{
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = src.size();
  static const std::vector<std::string> multi{"->", "<=", ">=", "==", "!=", "&&", "||"};
  while (i < n) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      std::size_t start = i;
      i += 2;
      while (i + 1 < n && !(src[i] == '*' && src[i + 1] == '/')) ++i;
      if (i + 1 >= n) fail({start, n}, "unterminated comment");
      i += 2;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < n && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
      out.push_back({Tok::Ident, src.substr(start, i - start), {start, i}});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      out.push_back({Tok::Int, src.substr(start, i - start), {start, i}});
      continue;
    }
    if (c == '"') {
      std::string s;
      ++i;
      while (i < n && src[i] != '"') {
        if (src[i] == '\\' && i + 1 < n) ++i;
        if (src[i] == '\n') fail({start, i}, "unterminated string");
        s += src[i++];
      }
      if (i >= n) fail({start, n}, "unterminated string");
      ++i;
      out.push_back({Tok::String, s, {start, i}});
      continue;
    }
    bool matched = false;
    for (const auto& m : multi)
      if (src.compare(i, m.size(), m) == 0) {
        out.push_back({Tok::Sym, m, {i, i + m.size()}});
        i += m.size();
        matched = true;
        break;
      }
    if (matched) continue;
    static const std::string single = "{}()[]<>=!?.,;:|-/";
    if (single.find(c) == std::string::npos) fail({i, i + 1}, std::string("unexpected character '") + c + "'");
    out.push_back({Tok::Sym, std::string(1, c), {i, i + 1}});
    ++i;
  }
  out.push_back({Tok::Eof, "", {n, n}});
  return out;
}

class Parser {
 public:
  Parser(const std::string& src, bool free_vars) : toks_(lex(src)), free_vars_(free_vars) {}

  SourceFile file();
  Constraint constraint_only()
  {
    auto c = disj();
    expect_eof();
    return c;
  }
  SessionType type_only()
  {
    auto t = type();
    expect_eof();
    return t;
  }
  Process process_only()
  {
    auto p = proc0();
    expect_eof();
    return p;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool free_vars_;
  std::vector<std::string> bound_;
  std::map<std::string, SessionType> named_types_;
  std::map<std::string, Process> named_procs_;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool is_sym(const std::string& s, std::size_t k = 0) const { return peek(k).kind == Tok::Sym && peek(k).text == s; }
  bool is_kw(const std::string& s, std::size_t k = 0) const { return peek(k).kind == Tok::Ident && peek(k).text == s; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  std::string describe(const Token& t) const
  {
    if (t.kind == Tok::Eof) return "end of input";
    return "'" + t.text + "'";
  }

  void expect(const std::string& s)
  {
    if (!is_sym(s)) fail(peek().span, "expected '" + s + "' but found " + describe(peek()));
    next();
  }
  void expect_kw(const std::string& s)
  {
    if (!is_kw(s)) fail(peek().span, "expected '" + s + "' but found " + describe(peek()));
    next();
  }
  void expect_eof()
  {
    if (peek().kind != Tok::Eof) fail(peek().span, "unexpected " + describe(peek()));
  }
  bool accept(const std::string& s)
  {
    if (!is_sym(s)) return false;
    next();
    return true;
  }

  std::string ident(const std::string& what)
  {
    const Token& t = peek();
    if (t.kind != Tok::Ident || keywords.count(t.text)) fail(t.span, "expected " + what + " but found " + describe(t));
    next();
    return t.text;
  }

  std::int64_t integer()
  {
    const Token& t = peek();
    if (t.kind != Tok::Int) fail(t.span, "expected a number but found " + describe(t));
    next();
    try {
      return std::stoll(t.text);
    } catch (const std::exception&) {
      fail(t.span, "number out of range");
    }
  }

  Rat rational()
  {
    Span s = peek().span;
    std::int64_t a = integer();
    if (!accept("/")) return Rat(a);
    std::int64_t b = integer();
    if (b == 0) fail(s, "zero denominator");
    return Rat(a, b);
  }

  // --- constraints
  Constraint disj()
  {
    auto c = conj();
    while (accept("||")) c = cc::disj(c, conj());
    return c;
  }
  Constraint conj()
  {
    auto c = unary();
    while (accept("&&")) c = cc::conj(c, unary());
    return c;
  }
  Constraint unary()
  {
    if (accept("!")) return cc::neg(unary());
    return atom();
  }

  static bool is_cmp(const Token& t)
  {
    return t.kind == Tok::Sym && (t.text == "<" || t.text == "<=" || t.text == ">" || t.text == ">=" ||
                                  t.text == "=" || t.text == "==");
  }

  // x op n, or x-y op n
  static Constraint compare(const ClockId& x, const ClockId* y, const std::string& op, std::int64_t n)
  {
    if (y) {
      if (op == ">") return cc::diff_gt(x, *y, n);
      if (op == ">=") return cc::diff_ge(x, *y, n);
      if (op == "<") return cc::diff_lt(x, *y, n);
      if (op == "<=") return cc::diff_le(x, *y, n);
      return cc::diff_eq(x, *y, n);
    }
    if (op == ">") return cc::gt(x, n);
    if (op == ">=") return cc::ge(x, n);
    if (op == "<") return cc::lt(x, n);
    if (op == "<=") return cc::le(x, n);
    return cc::eq(x, n);
  }

  static std::string mirror(const std::string& op)
  {
    if (op == "<") return ">";
    if (op == "<=") return ">=";
    if (op == ">") return "<";
    if (op == ">=") return "<=";
    return op;
  }

  Constraint atom()
  {
    if (is_kw("true")) {
      next();
      return cc::tru();
    }
    if (is_kw("false")) {
      next();
      return cc::fls();
    }
    if (accept("(")) {
      auto c = disj();
      expect(")");
      return c;
    }
    if (peek().kind == Tok::Int) {
      // n op x [op m]
      std::int64_t n = integer();
      if (!is_cmp(peek())) fail(peek().span, "expected a comparison after " + std::to_string(n));
      std::string op1 = next().text;
      ClockId x = ident("a clock");
      Constraint c = compare(x, nullptr, mirror(op1), n);
      if (is_cmp(peek())) {
        std::string op2 = next().text;
        c = cc::conj(c, compare(x, nullptr, op2, integer()));
      }
      return c;
    }
    ClockId x = ident("a clock or constraint");
    std::optional<ClockId> y;
    if (accept("-")) y = ident("a clock");
    if (!is_cmp(peek())) fail(peek().span, "expected a comparison but found " + describe(peek()));
    std::string op = next().text;
    return compare(x, y ? &*y : nullptr, op, integer());
  }

  // --- types
  SessionType type()
  {
    if (is_kw("end")) {
      next();
      return ty::end();
    }
    if (is_kw("rec")) {
      next();
      std::string a = ident("a recursion variable");
      expect(".");
      bound_.push_back(a);
      auto body = type();
      bound_.pop_back();
      return ty::rec(a, body);
    }
    if (accept("{")) {
      std::vector<Option> opts;
      std::set<std::string> labels;
      do {
        Span s = peek().span;
        opts.push_back(option());
        if (!labels.insert(opts.back().label).second) fail(s, "duplicate label " + opts.back().label + " in choice");
      } while (accept(","));
      expect("}");
      return ty::choice(std::move(opts));
    }
    if (is_sym("!") || is_sym("?")) return ty::choice({option()});
    const Token& t = peek();
    std::string a = ident("a type");
    if (std::find(bound_.begin(), bound_.end(), a) != bound_.end()) return ty::var(a);
    if (auto it = named_types_.find(a); it != named_types_.end()) return it->second;
    if (free_vars_) return ty::var(a);
    fail(t.span, "unknown type name " + a);
  }

  Sort sort()
  {
    if (accept("(")) {
      auto d = disj();
      expect(",");
      auto saved = bound_;
      bound_.clear();
      auto s = type();
      bound_ = saved;
      expect(")");
      return Sort::delegate(d, s);
    }
    const Token& t = peek();
    std::string n = ident("a sort");
    if (n == "nat") return Sort::nat();
    if (n == "bool") return Sort::boolean();
    if (n == "string") return Sort::string();
    if (n == "none") return Sort::none();
    fail(t.span, "unknown sort " + n);
  }

  Option option()
  {
    Dir d;
    if (accept("!"))
      d = Dir::Send;
    else if (accept("?"))
      d = Dir::Recv;
    else
      fail(peek().span, "expected '!' or '?' but found " + describe(peek()));
    std::string label = ident("a label");
    Sort pl = Sort::none();
    if (accept("<")) {
      pl = sort();
      expect(">");
    }
    Constraint g = cc::tru();
    ClockSet resets;
    if (accept("(")) {
      g = disj();
      if (accept(",")) {
        expect("{");
        if (!is_sym("}")) {
          do resets.insert(ident("a clock"));
          while (accept(","));
        }
        expect("}");
      }
      expect(")");
    }
    expect(".");
    return ty::opt(d, label, pl, g, resets, type());
  }

  // --- processes
  Value value()
  {
    const Token& t = peek();
    if (t.kind == Tok::Int) return Value::nat_v(integer());
    if (t.kind == Tok::String) {
      next();
      return Value::string_v(t.text);
    }
    if (is_kw("true") || is_kw("false")) {
      next();
      return Value::bool_v(t.text == "true");
    }
    if (is_sym("(") && is_sym(")", 1)) {
      next();
      next();
      return Value::unit();
    }
    return Value::name(ident("a value"));
  }

  Deadline deadline()
  {
    Span s = peek().span;
    try {
      if (is_kw("inf")) {
        next();
        return Deadline::inf();
      }
      if (accept("<")) return Deadline::lt(rational());
      if (accept("<=")) return Deadline::le(rational());
    } catch (const std::invalid_argument& e) {
      fail(s, e.what());
    }
    fail(s, "expected a deadline (<n, <=n or inf) but found " + describe(peek()));
  }

  std::vector<Arm> arms()
  {
    expect("{");
    std::vector<Arm> out;
    std::set<std::string> seen;
    do {
      Span s = peek().span;
      Arm a;
      a.label = ident("a label");
      if (!seen.insert(a.label).second) fail(s, "duplicate branch label " + a.label);
      if (accept("(")) {
        a.binder = ident("a binder");
        expect(")");
      }
      expect(":");
      a.body = proc0();
      out.push_back(std::move(a));
    } while (accept(","));
    expect("}");
    return out;
  }

  std::vector<std::string> names_until(const std::string& stop)
  {
    std::vector<std::string> out;
    if (is_sym(stop)) return out;
    do out.push_back(ident("a name"));
    while (accept(","));
    return out;
  }

  Process proc0()
  {
    if (is_kw("def")) {
      next();
      std::string x = ident("a process variable");
      expect("(");
      auto vs = names_until(";");
      std::vector<std::string> rs;
      if (accept(";")) rs = names_until(")");
      expect(")");
      expect("=");
      auto body = proc0();
      expect_kw("in");
      auto in = proc0();
      return pr::def(x, vs, rs, body, in);
    }
    return proc1();
  }

  Process proc1()
  {
    auto p = proc2();
    while (accept("|")) p = pr::par(p, proc2());
    return p;
  }

  bool rational_ahead() const
  {
    if (peek().kind != Tok::Int) return false;
    if (is_sym(")", 1)) return true;
    return is_sym("/", 1) && peek(2).kind == Tok::Int && is_sym(")", 3);
  }

  Process proc2()
  {
    const Token& t = peek();
    if (t.kind == Tok::Int) {
      if (t.text != "0") fail(t.span, "expected a process but found " + describe(t));
      next();
      return pr::term();
    }
    if (accept("(")) {
      auto p = proc0();
      expect(")");
      return p;
    }
    if (is_kw("set")) {
      next();
      expect("(");
      std::string x = ident("a timer");
      expect(")");
      expect(".");
      return pr::set(x, proc2());
    }
    if (is_kw("if")) {
      next();
      expect("(");
      auto c = disj();
      expect(")");
      auto a = proc2();
      expect_kw("else");
      return pr::if_(c, a, proc2());
    }
    if (is_kw("delay")) {
      next();
      expect("(");
      if (rational_ahead()) {
        Rat r = rational();
        expect(")");
        expect(".");
        return pr::delay(r, proc2());
      }
      auto c = disj();
      if (clocks_of(c).size() > 1) fail(t.span, "a delay constraint ranges over one variable");
      expect(")");
      expect(".");
      return pr::delay(c, proc2());
    }
    if (is_kw("new")) {
      next();
      expect("(");
      std::string p = ident("a role");
      std::string q = ident("a role");
      expect(")");
      return pr::scope(p, q, proc2());
    }
    std::string r = ident("a process");
    if (accept("!")) {
      std::string l = ident("a label");
      Value v = Value::unit();
      if (accept("(")) {
        v = value();
        expect(")");
      }
      expect(".");
      return pr::send(r, l, v, proc2());
    }
    if (accept("?")) {
      std::optional<Deadline> e;
      if (accept("[")) {
        e = deadline();
        expect("]");
      } else if (is_sym("<") && is_kw("inf", 1) && is_sym(">", 2)) {
        next(), next(), next();
        e = Deadline::inf();
      }
      auto as = arms();
      if (is_kw("after")) {
        Span s = peek().span;
        next();
        Deadline d = deadline();
        if (d.infinite()) fail(s, "a timeout needs a finite deadline");
        if (e && !(*e == d)) fail(s, "receive deadline and timeout deadline differ");
        return pr::timeout(r, d, as, proc2());
      }
      return pr::branch(r, e.value_or(Deadline::inf()), as);
    }
    if (accept("->")) {
      std::string q = ident("a role");
      expect(":");
      expect("[");
      std::vector<QItem> items;
      if (!is_sym("]")) {
        do {
          QItem it;
          it.label = ident("a label");
          if (!is_sym(",") && !is_sym("]")) it.v = value();
          items.push_back(it);
        } while (accept(","));
      }
      expect("]");
      return pr::queue(r, q, items);
    }
    if (accept("(")) {
      std::vector<Value> vs;
      std::vector<std::string> rs;
      if (!is_sym(";") && !is_sym(")")) {
        do vs.push_back(value());
        while (accept(","));
      }
      if (accept(";")) rs = names_until(")");
      expect(")");
      return pr::call(r, vs, rs);
    }
    if (auto it = named_procs_.find(r); it != named_procs_.end()) return it->second;
    fail(t.span, "unknown process " + r);
  }

  // --- declarations
  Valuation valuation()
  {
    Valuation nu;
    expect("{");
    if (!is_sym("}")) {
      do {
        std::string x = ident("a clock");
        expect("=");
        nu.set(x, rational());
      } while (accept(","));
    }
    expect("}");
    return nu;
  }

  SystemDecl system(Span start)
  {
    SystemDecl s;
    s.name = ident("a system name");
    expect("{");
    bool have_proc = false;
    while (!accept("}")) {
      Span is = peek().span;
      if (is_kw("process")) {
        next();
        if (have_proc) fail(is, "system " + s.name + " already has a process");
        s.proc = proc0();
        have_proc = true;
      } else if (is_kw("timers")) {
        next();
        do {
          std::string x = ident("a timer");
          expect("=");
          s.timers.set(x, rational());
        } while (accept(","));
      } else if (is_kw("role")) {
        next();
        RoleDecl r;
        r.span = is;
        r.role = ident("a role");
        expect(":");
        r.type = type();
        if (is_kw("at")) {
          next();
          r.nu = valuation();
        }
        r.nu = r.nu.extended(clocks_of(r.type));
        s.roles.push_back(r);
      } else if (is_kw("session")) {
        next();
        SessionDecl d;
        d.span = is;
        expect("(");
        d.p = ident("a role");
        d.q = ident("a role");
        expect(")");
        expect(":");
        d.sp = type();
        expect(",");
        d.sq = type();
        s.sessions.push_back(d);
      } else {
        fail(is, "expected process, timers, role or session but found " + describe(peek()));
      }
      expect(";");
    }
    accept(";");
    if (!have_proc) fail(start, "system " + s.name + " has no process");
    s.span = {start.begin, toks_[pos_ - 1].span.end};
    return s;
  }

  void skip_decl()
  {
    int depth = 0;
    while (peek().kind != Tok::Eof) {
      const Token& t = next();
      if (t.kind != Tok::Sym) continue;
      if (t.text == "{" || t.text == "(" || t.text == "[") ++depth;
      if (t.text == "}" || t.text == ")" || t.text == "]") --depth;
      if (depth <= 0 && (t.text == ";" || (t.text == "}" && depth == 0))) {
        if (t.text == "}") accept(";");
        return;
      }
    }
  }
};

SourceFile Parser::file()
{
  SourceFile f;
  std::vector<Diagnostic> diags;
  std::set<std::string> names;
  while (peek().kind != Tok::Eof) {
    Span start = peek().span;
    try {
      if (is_kw("type")) {
        next();
        Span ns = peek().span;
        std::string n = ident("a type name");
        expect("=");
        auto t = type();
        expect(";");
        if (!names.insert(n).second) fail(ns, "duplicate declaration " + n);
        named_types_[n] = t;
        f.types.push_back({n, t, {start.begin, toks_[pos_ - 1].span.end}});
      } else if (is_kw("process")) {
        next();
        Span ns = peek().span;
        std::string n = ident("a process name");
        expect("=");
        auto p = proc0();
        expect(";");
        if (!names.insert(n).second) fail(ns, "duplicate declaration " + n);
        named_procs_[n] = p;
        f.processes.push_back({n, p, {start.begin, toks_[pos_ - 1].span.end}});
      } else if (is_kw("system")) {
        next();
        Span ns = peek().span;
        auto s = system(start);
        if (!names.insert(s.name).second) fail(ns, "duplicate declaration " + s.name);
        f.systems.push_back(s);
      } else {
        fail(peek().span, "expected a declaration (type, process or system) but found " + describe(peek()));
      }
    } catch (const Failure& e) {
      diags.push_back(e.d);
      bound_.clear();
      if (peek().kind == Tok::Eof) break;
      skip_decl();
    }
  }
  if (!diags.empty()) throw ParseError(diags);
  return f;
}

template <class F>
auto guarded(const std::string& text, F f)
{
  try {
    Parser p(text, true);
    return f(p);
  } catch (const Failure& e) {
    throw ParseError({e.d});
  }
}

}  // namespace

SourceFile parse_source(const std::string& text)
{
  try {
    Parser p(text, false);
    return p.file();
  } catch (const Failure& e) {  // lexer errors
    throw ParseError({e.d});
  }
}

SourceFile load_source(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_source(ss.str());
}

Constraint parse_constraint(const std::string& text)
{
  return guarded(text, [](Parser& p) { return p.constraint_only(); });
}

SessionType parse_type(const std::string& text)
{
  return guarded(text, [](Parser& p) { return p.type_only(); });
}

Process parse_process(const std::string& text)
{
  return guarded(text, [](Parser& p) { return p.process_only(); });
}

}  // namespace toast
