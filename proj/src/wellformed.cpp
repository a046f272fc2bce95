#include "toast/wellformed.hpp"

#include "toast/print.hpp"
#include "toast/zone.hpp"

#include <stdexcept>

namespace toast {

std::string premise_tag(WfPremise p)
{
  switch (p) {
    case WfPremise::Feasibility: return "feasibility";
    case WfPremise::MixedChoice: return "mixed-choice";
    case WfPremise::Delegation: return "delegation";
    case WfPremise::VarUndefined: return "var-undefined";
    case WfPremise::Context: return "context";
  }
  return "?";
}

Constraint future_env(const Option& o) { return constraint_reset(o.guard, o.resets); }

Constraint canonical_constraint(const SessionType& s, const RecEnv& theta)
{
  switch (s->kind) {
    case TKind::End: return cc::tru();
    case TKind::Var: {
      auto it = theta.find(s->var);
      if (it == theta.end()) throw std::invalid_argument("unbound recursion variable " + s->var);
      return it->second;
    }
    case TKind::Rec: {
      // mu a1 ... mu an . B carries B's constraint; B is guarded when contractive
      std::set<std::string> binders;
      SessionType body = s;
      while (body->kind == TKind::Rec) {
        binders.insert(body->var);
        body = body->body;
      }
      if (body->kind == TKind::Var && binders.count(body->var))
        throw std::invalid_argument("recursion " + body->var + " is not contractive");
      return canonical_constraint(body, theta);
    }
    case TKind::Choice: {
      Constraint d = s->options[0].guard;
      for (std::size_t k = 1; k < s->options.size(); ++k) d = cc::disj(d, s->options[k].guard);
      return past(d);
    }
  }
  return cc::tru();
}

namespace {

struct Checker {
  WfReport rep;
  int depth = 0;

  bool fail(const std::string& rule, WfPremise p, const std::string& detail)
  {
    if (!rep.failing) rep.failing = WfFailure{rule, p, detail};
    rep.accepted = false;
    return false;
  }

  std::size_t open(const std::string& rule, const RecEnv& theta, const Constraint& d, const SessionType& s)
  {
    std::string th;
    for (const auto& [a, c] : theta) th += (th.empty() ? "" : ", ") + a + ":" + pretty(c);
    rep.trace.push_back({rule, "{" + th + "}; " + pretty(d) + " |- " + pretty(s), true, depth});
    return rep.trace.size() - 1;
  }

  bool check(const RecEnv& theta, const Constraint& d, const SessionType& s)
  {
    switch (s->kind) {
      case TKind::End: {
        open("end", theta, d, s);
        return true;
      }
      case TKind::Var: {
        auto idx = open("var", theta, d, s);
        auto it = theta.find(s->var);
        if (it == theta.end()) {
          rep.trace[idx].ok = false;
          return fail("var", WfPremise::VarUndefined, "recursion variable " + s->var + " is not bound");
        }
        if (!entails(d, it->second)) {
          rep.trace[idx].ok = false;
          return fail("var", WfPremise::Feasibility,
                      "constraint " + pretty(d) + " does not entail the invariant " + pretty(it->second) + " of " +
                          s->var);
        }
        return true;
      }
      case TKind::Rec: {
        auto idx = open("rec", theta, d, s);
        RecEnv inner = theta;
        Constraint inv;
        try {
          inv = canonical_constraint(s, theta);
        } catch (const std::invalid_argument& e) {
          rep.trace[idx].ok = false;
          return fail("rec", WfPremise::VarUndefined, e.what());
        }
        inner[s->var] = inv;
        ++depth;
        bool ok = check(inner, d, s->body);
        --depth;
        rep.trace[idx].ok = ok;
        return ok;
      }
      case TKind::Choice: return choice(theta, d, s);
    }
    return false;
  }

  bool choice(const RecEnv& theta, const Constraint& d, const SessionType& s)
  {
    auto idx = open("choice", theta, d, s);
    Constraint canon = canonical_constraint(s, theta);
    if (!entails(d, canon)) {
      rep.trace[idx].ok = false;
      return fail("choice", WfPremise::Feasibility,
                  "reaching constraint " + pretty(d) + " does not entail the choice constraint " + pretty(canon));
    }
    const auto& opts = s->options;
    for (std::size_t i = 0; i < opts.size(); ++i)
      for (std::size_t j = i + 1; j < opts.size(); ++j) {
        if (opts[i].dir == opts[j].dir) continue;
        auto both = cc::conj(opts[i].guard, opts[j].guard);
        auto z = normalize(both);
        if (!z.empty()) {
          rep.trace[idx].ok = false;
          return fail("choice", WfPremise::MixedChoice,
                      "options " + opts[i].label + " and " + opts[j].label +
                          " have opposite directions and overlapping guards, e.g. " +
                          pretty(z.zones[0].to_constraint()));
        }
      }
    for (const auto& o : opts) {
      if (o.payload.kind != SortKind::Delegate) continue;
      Checker sub;
      sub.depth = depth + 1;
      if (!sub.check({}, o.payload.init, o.payload.proto)) {
        rep.trace.insert(rep.trace.end(), sub.rep.trace.begin(), sub.rep.trace.end());
        rep.trace[idx].ok = false;
        return fail("choice", WfPremise::Delegation,
                    "delegated protocol of " + o.label + " is not well-formed: " +
                        (sub.rep.failing ? sub.rep.failing->detail : std::string("?")));
      }
    }
    ++depth;
    for (const auto& o : opts) {
      Constraint fut = future_env(o);
      if (!satisfiable(o.guard)) {
        --depth;
        rep.trace[idx].ok = false;
        return fail("choice", WfPremise::Feasibility, "guard of " + o.label + " is unsatisfiable");
      }
      Constraint next;
      try {
        next = canonical_constraint(o.cont, theta);
      } catch (const std::invalid_argument& e) {
        --depth;
        rep.trace[idx].ok = false;
        return fail("choice", WfPremise::VarUndefined, e.what());
      }
      if (!entails(fut, next)) {
        --depth;
        rep.trace[idx].ok = false;
        return fail("choice", WfPremise::Feasibility,
                    "after " + o.label + " the clocks satisfy " + pretty(fut) + ", which does not entail " +
                        pretty(next) + " required by the continuation");
      }
      if (!check(theta, fut, o.cont)) {
        --depth;
        rep.trace[idx].ok = false;
        return false;
      }
    }
    --depth;
    return true;
  }
};

}  // namespace

WfReport wf_judgment(const RecEnv& theta, const Constraint& delta, const SessionType& s)
{
  Checker c;
  c.check(theta, delta, s);
  return std::move(c.rep);
}

WfReport wf_report(const SessionType& s)
{
  WfReport r;
  Constraint canon;
  try {
    canon = canonical_constraint(s);
  } catch (const std::invalid_argument& e) {
    r.accepted = false;
    r.failing = WfFailure{"var", WfPremise::VarUndefined, e.what()};
    return r;
  }
  r = wf_judgment({}, canon, s);
  if (r.accepted && !sat(Valuation::zero(clocks_of(s)), canon)) {
    r.accepted = false;
    r.failing = WfFailure{"config", WfPremise::Context, "initial valuation does not satisfy " + pretty(canon)};
  }
  return r;
}

bool wf_config(const Valuation& nu, const SessionType& s)
{
  Constraint canon;
  try {
    canon = canonical_constraint(s);
  } catch (const std::invalid_argument&) {
    return false;
  }
  if (!sat(nu.extended(clocks_of(s)), canon)) return false;
  return wf_judgment({}, canon, s).accepted;
}

bool wf_type(const SessionType& s) { return wf_report(s).accepted; }

}  // namespace toast
