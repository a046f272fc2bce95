// Command-line front end over .toast files.
// Exit codes: 0 pass, 1 rejection or violation, 2 input error, 3 inconclusive.

#include "toast/calculus.hpp"
#include "toast/print.hpp"
#include "toast/semantics.hpp"
#include "toast/surface.hpp"
#include "toast/typecheck.hpp"
#include "toast/wellformed.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace toast;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kPass = 0, kFail = 1, kInput = 2, kInconclusive = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
  std::vector<std::string> diagnostics;
};

struct Globals {
  bool json = false;
} G;

std::string resolve(const std::string& path)
{
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv("TOAST_CORPUS"); dir && fs::path(path).is_relative()) {
    for (const auto& cand : {fs::path(dir) / path, fs::path(dir) / (path + ".toast")})
      if (fs::exists(cand)) return cand.string();
  }
  throw InputError("cannot read " + path);
}

SourceFile load(const std::string& path)
{
  std::string real = resolve(path);
  std::ifstream in(real, std::ios::binary);
  if (!in) throw InputError("cannot read " + real);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  try {
    return parse_source(text);
  } catch (const ParseError& e) {
    InputError err("parse error in " + real);
    for (const auto& d : e.diagnostics()) err.diagnostics.push_back(format(d, text, real));
    throw err;
  }
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

int input_error(const std::string& cmd, const InputError& e)
{
  if (G.json) {
    Json j{{"command", cmd}, {"error", e.what()}, {"diagnostics", e.diagnostics}, {"exit", kInput}};
    emit(j);
  } else {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& d : e.diagnostics) std::cerr << d << "\n";
  }
  return kInput;
}

std::string trace_line(std::size_t k, const std::string& side, const std::string& label, const std::string& digest)
{
  return "STEP " + std::to_string(k) + ": " + side + " " + label + " :: " + digest;
}

SessionType find_type(const SourceFile& f, const std::string& name)
{
  if (auto* t = f.find_type(name)) return t->type;
  // otherwise an inline type, closed over the file's declarations
  SessionType s;
  try {
    s = parse_type(name);
  } catch (const ParseError&) {
    throw InputError("unknown type " + name);
  }
  if (!free_names(s).empty()) throw InputError("unknown type " + *free_names(s).begin());
  return s;
}

const SystemDecl& find_system(const SourceFile& f, const std::string& name)
{
  if (auto* s = f.find_system(name)) return *s;
  throw InputError("unknown system " + name);
}

SessionEnv roles_of(const SystemDecl& s)
{
  SessionEnv d;
  for (const auto& r : s.roles) d.roles[r.role] = {r.nu, r.type};
  return d;
}

TypecheckOptions scopes_of(const SystemDecl& s)
{
  TypecheckOptions o;
  for (const auto& x : s.sessions) o.scopes.push_back({x.p, x.q, x.sp, x.sq});
  return o;
}

// --- commands

int cmd_check(const std::vector<std::string>& paths)
{
  int code = kPass;
  Json files = Json::array();
  for (const auto& path : paths) {
    SourceFile f = load(path);
    Json types = Json::array();
    for (const auto& t : f.types) {
      WfReport r = wf_report(t.type);
      Json jt{{"name", t.name}, {"accepted", r.accepted}};
      if (r.accepted) {
        if (!G.json) std::cout << path << ": " << t.name << ": well-formed\n";
      } else {
        code = kFail;
        const auto& fail = *r.failing;
        jt["rule"] = fail.rule;
        jt["premise"] = premise_tag(fail.premise);
        jt["detail"] = fail.detail;
        if (!G.json)
          std::cout << path << ": " << t.name << ": rejected by " << fail.rule << " [" << premise_tag(fail.premise)
                    << "] " << fail.detail << "\n";
      }
      types.push_back(jt);
    }
    files.push_back({{"path", path}, {"types", types}});
  }
  if (G.json) emit({{"command", "check"}, {"files", files}, {"exit", code}});
  return code;
}

int cmd_dual(const std::string& path, const std::string& name)
{
  SourceFile f = load(path);
  auto* t = f.find_type(name);
  if (!t) throw InputError("unknown type " + name);
  std::string d = pretty(dual(t->type));
  if (G.json)
    emit({{"command", "dual"}, {"name", name}, {"dual", d}, {"exit", kPass}});
  else
    std::cout << d << "\n";
  return kPass;
}

struct ProgressArgs {
  int horizon = 40;
  std::string mode = "exhaustive";
  std::uint64_t seed = 0;
  bool override_wf = false;
  std::string partner;
};

int cmd_progress(const std::string& path, const std::string& name, const ProgressArgs& a)
{
  if (a.horizon < 1) throw InputError("horizon must be at least 1");
  SourceFile f = load(path);
  auto* t = f.find_type(name);
  if (!t) throw InputError("unknown type " + name);
  ExploreOptions o;
  o.horizon = a.horizon;
  o.mode = a.mode == "random" ? ExploreMode::Random : ExploreMode::Exhaustive;
  o.seed = a.seed;
  o.override_wf = a.override_wf;
  std::optional<SessionType> partner;
  if (!a.partner.empty()) partner = find_type(f, a.partner);
  ExploreReport r = progress_explore(t->type, o, partner);

  int code = kPass;
  if (r.rejected_input || !r.violations.empty() || r.stuck_trace)
    code = kFail;
  else if (r.truncated)
    code = kInconclusive;

  if (G.json) {
    Json j{{"command", "progress"}, {"name", name}, {"states", r.states}, {"transitions", r.transitions},
           {"truncated", r.truncated}, {"violations", r.violations}};
    if (r.rejected_input) j["rejected"] = r.reject_reason;
    if (r.stuck_trace) {
      Json tr = Json::array();
      for (std::size_t k = 0; k < r.stuck_trace->size(); ++k) {
        const auto& l = (*r.stuck_trace)[k];
        tr.push_back({{"step", k + 1}, {"side", l.side}, {"label", l.label}, {"digest", l.digest}});
      }
      j["stuck"] = {{"trace", tr}, {"state", r.stuck_state}};
    } else {
      j["stuck"] = nullptr;
    }
    j["exit"] = code;
    emit(j);
    return code;
  }
  if (r.rejected_input) {
    std::cout << name << ": not well-formed (" << r.reject_reason << "); use --override-wf to explore anyway\n";
    return code;
  }
  std::cout << name << ": " << r.states << " states, " << r.transitions << " transitions"
            << (r.truncated ? " (truncated)" : "") << "\n";
  for (const auto& v : r.violations) std::cout << "violation: " << v << "\n";
  if (r.stuck_trace) {
    std::cout << "stuck state reachable:\n";
    for (std::size_t k = 0; k < r.stuck_trace->size(); ++k) {
      const auto& l = (*r.stuck_trace)[k];
      std::cout << trace_line(k + 1, l.side, l.label, l.digest) << "\n";
    }
    std::cout << "state: " << r.stuck_state << "\n";
  }
  if (code == kPass) std::cout << "progress: no stuck state within horizon " << a.horizon << "\n";
  return code;
}

struct TypecheckArgs {
  std::vector<std::string> binds;   // role=Type
  std::vector<std::string> timers;  // z=0
};

int cmd_typecheck(const std::string& path, const std::string& target, const TypecheckArgs& a)
{
  SourceFile f = load(path);
  TimerEnv theta;
  Process proc;
  SessionEnv delta;
  TypecheckOptions opt;
  if (auto* s = f.find_system(target)) {
    theta = s->timers;
    proc = s->proc;
    delta = roles_of(*s);
    opt = scopes_of(*s);
  } else if (auto* p = f.find_process(target)) {
    if (a.binds.empty()) throw InputError("process " + target + " needs --bind role=Type for its roles");
    proc = p->proc;
  } else {
    throw InputError("unknown system or process " + target);
  }
  for (const auto& b : a.binds) {
    auto eq = b.find('=');
    if (eq == std::string::npos) throw InputError("binding " + b + " is not role=Type");
    SessionType s = find_type(f, b.substr(eq + 1));
    delta.roles[b.substr(0, eq)] = {Valuation::zero(clocks_of(s)), s};
  }
  for (const auto& t : a.timers) {
    auto eq = t.find('=');
    if (eq == std::string::npos) throw InputError("timer " + t + " is not name=value");
    try {
      theta.set(t.substr(0, eq), parse_rat(t.substr(eq + 1)));
    } catch (const std::exception&) {
      throw InputError("bad timer value in " + t);
    }
  }
  if (!wf_process(proc)) throw InputError("process " + target + " is not well-formed");
  TypeReport r = typecheck({}, theta, proc, delta, opt);
  int code = r.accepted ? kPass : kFail;
  if (G.json) {
    Json j{{"command", "typecheck"}, {"target", target}, {"accepted", r.accepted}};
    if (!r.accepted) {
      j["failed_rule"] = r.failed_rule;
      j["failed_premise"] = r.failed_premise;
      j["detail"] = r.detail;
    }
    j["derivation"] = Json::parse(derivation_json(r.tree));
    j["exit"] = code;
    emit(j);
    return code;
  }
  if (r.accepted) {
    std::cout << target << ": accepted (" << rules_preorder(r.tree).size() << " rule applications)\n";
  } else {
    std::cout << target << ": rejected by " << r.failed_rule << ", premise \"" << r.failed_premise << "\"";
    if (!r.detail.empty()) std::cout << ": " << r.detail;
    std::cout << "\n";
  }
  return code;
}

struct RunArgs {
  int fuel = 50;
  std::uint64_t seed = 0;
  std::string mode = "exhaustive";
};

Schedule schedule_of(const std::string& m) { return m == "random" ? Schedule::Random : Schedule::Exhaustive; }

int cmd_simulate(const std::string& path, const std::string& name, const RunArgs& a)
{
  if (a.fuel < 0) throw InputError("fuel must be non-negative");
  SourceFile f = load(path);
  const SystemDecl& s = find_system(f, name);
  if (!wf_process(s.proc)) {
    if (G.json)
      emit({{"command", "simulate"}, {"system", name}, {"error", "process is not well-formed"},
            {"diagnostics", Json::array()}, {"exit", kFail}});
    else
      std::cout << name << ": process is not well-formed\n";
    return kFail;
  }
  RunReport r = run(s.timers, s.proc, schedule_of(a.mode), a.fuel, a.seed);
  int code = r.outcome == RunOutcome::FuelExhausted ? kInconclusive : kPass;
  if (G.json) {
    Json tr = Json::array();
    for (std::size_t k = 1; k < r.trace.size(); ++k) {
      const auto& st = r.trace[k];
      tr.push_back({{"step", k}, {"side", "joint"}, {"rule", st.rule}, {"detail", st.detail},
                    {"theta", st.theta.str()}, {"process", pretty(st.proc)}});
    }
    emit({{"command", "simulate"}, {"system", name}, {"outcome", str(r.outcome)}, {"states", r.states},
          {"trace", tr}, {"exit", code}});
    return code;
  }
  if (!r.trace.empty()) std::cout << "START :: " << r.trace[0].theta.str() << " " << pretty(r.trace[0].proc) << "\n";
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    const auto& st = r.trace[k];
    std::string label = st.rule + (st.detail.empty() ? "" : " " + st.detail);
    std::cout << trace_line(k, "joint", label, st.theta.str() + " " + pretty(st.proc)) << "\n";
  }
  std::cout << "outcome: " << str(r.outcome) << " (" << r.states << " states)\n";
  return code;
}

int cmd_sr(const std::string& path, const std::string& name, const RunArgs& a)
{
  if (a.fuel < 0) throw InputError("fuel must be non-negative");
  SourceFile f = load(path);
  const SystemDecl& s = find_system(f, name);
  SrOptions o;
  o.fuel = a.fuel;
  o.seed = a.seed;
  o.schedule = schedule_of(a.mode);
  o.tc = scopes_of(s);
  SrReport r = subject_reduction(s.timers, s.proc, roles_of(s), o);
  int code = kPass;
  if (!r.started || !r.violations.empty())
    code = kFail;
  else if (r.fuel_exhausted)
    code = kInconclusive;
  if (G.json) {
    emit({{"command", "sr"}, {"system", name}, {"started", r.started}, {"refusal", r.refusal},
          {"states", r.states}, {"actions_checked", r.actions_checked}, {"delays_checked", r.delays_checked},
          {"fuel_exhausted", r.fuel_exhausted}, {"violations", r.violations}, {"exit", code}});
    return code;
  }
  if (!r.started) {
    std::cout << name << ": harness refused to start: " << r.refusal << "\n";
    return code;
  }
  std::cout << name << ": " << r.states << " states, " << r.actions_checked << " actions and " << r.delays_checked
            << " delays re-typechecked\n";
  for (const auto& v : r.violations) std::cout << "violation: " << v << "\n";
  if (r.fuel_exhausted) std::cout << "fuel exhausted before the state space closed\n";
  if (code == kPass) std::cout << "subject reduction: no violation\n";
  return code;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"toast: timed asynchronous session types"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", G.json, "machine-readable output");

  std::vector<std::string> paths;
  auto* check = app.add_subcommand("check", "well-formedness of every declared type");
  check->add_option("paths", paths, "input files")->required();

  std::string path, name;
  auto* dual = app.add_subcommand("dual", "print the dual of a type");
  dual->add_option("path", path)->required();
  dual->add_option("name", name)->required();

  ProgressArgs pa;
  auto* progress = app.add_subcommand("progress", "explore S | dual(S) for stuck states");
  progress->add_option("path", path)->required();
  progress->add_option("name", name)->required();
  progress->add_option("--horizon", pa.horizon, "step horizon")->capture_default_str();
  progress->add_option("--mode", pa.mode)->check(CLI::IsMember({"exhaustive", "random"}))->capture_default_str();
  progress->add_option("--seed", pa.seed)->capture_default_str();
  progress->add_flag("--override-wf", pa.override_wf, "explore types that are not well-formed");
  progress->add_option("--partner", pa.partner, "partner type instead of the dual");

  TypecheckArgs ta;
  auto* tc = app.add_subcommand("typecheck", "type-check a system, or a process under --bind");
  tc->add_option("path", path)->required();
  tc->add_option("target", name, "system or process name")->required();
  tc->add_option("--bind", ta.binds, "role=Type");
  tc->add_option("--timer", ta.timers, "name=value");

  RunArgs ra;
  auto* sim = app.add_subcommand("simulate", "run a system under the reduction semantics");
  auto* sr = app.add_subcommand("sr", "subject-reduction harness");
  for (auto* c : {sim, sr}) {
    c->add_option("path", path)->required();
    c->add_option("name", name)->required();
    c->add_option("--fuel", ra.fuel)->capture_default_str();
    c->add_option("--seed", ra.seed)->capture_default_str();
    c->add_option("--mode", ra.mode)->check(CLI::IsMember({"exhaustive", "random"}))->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kPass : kInput;
  }

  std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "check") return cmd_check(paths);
    if (cmd == "dual") return cmd_dual(path, name);
    if (cmd == "progress") return cmd_progress(path, name, pa);
    if (cmd == "typecheck") return cmd_typecheck(path, name, ta);
    if (cmd == "simulate") return cmd_simulate(path, name, ra);
    if (cmd == "sr") return cmd_sr(path, name, ra);
  } catch (const InputError& e) {
    return input_error(cmd, e);
  } catch (const std::exception& e) {
    InputError err(e.what());
    return input_error(cmd, err);
  }
  return kInput;
}
