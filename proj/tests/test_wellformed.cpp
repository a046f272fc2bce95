#include "gen.hpp"
#include "toast/print.hpp"
#include "toast/wellformed.hpp"
#include "toast/zone.hpp"

#include <gtest/gtest.h>

using namespace toast;

namespace {

const std::vector<ClockId> XY{"x", "y"};

SessionType junk(bool amended)
{
  auto inner = ty::choice({ty::send("b", cc::eq("y", 2), {}, ty::end()),
                           ty::recv("c", cc::conj(cc::gt("x", 2), cc::lt("x", 5)), {}, ty::end())});
  return ty::choice({ty::send("a", cc::gt("x", 3), amended ? ClockSet{"x"} : ClockSet{}, inner)});
}

WfPremise premise_of(const SessionType& s)
{
  auto r = wf_report(s);
  EXPECT_FALSE(r.accepted);
  EXPECT_TRUE(r.failing.has_value());
  return r.failing ? r.failing->premise : WfPremise::Context;
}

}  // namespace

TEST(Wellformed, JunkTypeFailsFeasibility)
{
  EXPECT_EQ(premise_of(junk(false)), WfPremise::Feasibility);
}

// The amended type still offers !b (y=2) and ?c (2<x<5) together; their guards
// intersect, e.g. at x=3, y=2, so the literal mixed-choice premise rejects it.
TEST(Wellformed, AmendedJunkTypeHitsMixedChoice)
{
  auto r = wf_report(junk(true));
  ASSERT_FALSE(r.accepted);
  EXPECT_EQ(r.failing->premise, WfPremise::MixedChoice);
  EXPECT_NE(r.failing->detail.find("b and c"), std::string::npos) << r.failing->detail;
}

TEST(Wellformed, UnsafeMixedChoiceRejected)
{
  auto S1 = ty::choice({ty::recv("a", cc::lt("x", 5), {}, ty::end()), ty::send("b", cc::eq("x", 0), {}, ty::end())});
  auto S2 = ty::choice({ty::send("a", cc::lt("y", 5), {}, ty::end()), ty::recv("b", cc::eq("y", 0), {}, ty::end())});
  EXPECT_EQ(premise_of(S1), WfPremise::MixedChoice);
  EXPECT_EQ(premise_of(S2), WfPremise::MixedChoice);
}

TEST(Wellformed, WeakPersistencyTypesAccepted)
{
  auto S = ty::choice({ty::send("data", cc::lt("x", 3), {}, ty::end(), Sort::string()),
                       ty::recv("timeout", cc::gt("x", 4), {}, ty::end())});
  EXPECT_TRUE(wf_type(S));
  EXPECT_TRUE(wf_type(dual(S)));
}

TEST(Wellformed, EndUnderAnyContext)
{
  EXPECT_TRUE(wf_judgment({}, cc::tru(), ty::end()).accepted);
  EXPECT_TRUE(wf_judgment({}, cc::gt("x", 7), ty::end()).accepted);
  EXPECT_TRUE(wf_config(Valuation::zero({"x"}).advanced(9), ty::end()));
}

TEST(Wellformed, ConfigPastDeadline)
{
  auto S = ty::choice({ty::send("a", cc::lt("x", 5), {}, ty::end())});
  EXPECT_TRUE(wf_config(Valuation::zero({"x"}), S));
  EXPECT_FALSE(wf_config(Valuation::zero({"x"}).advanced(6), S));
}

TEST(Wellformed, UnboundVariable)
{
  auto S = ty::choice({ty::send("a", cc::tru(), {}, ty::var("t"))});
  EXPECT_EQ(premise_of(S), WfPremise::VarUndefined);
  EXPECT_EQ(wf_judgment({}, cc::tru(), ty::var("t")).failing->premise, WfPremise::VarUndefined);
}

TEST(Wellformed, RecursionNeedsResetToReenter)
{
  // mu t.!a(x>3).?b(x<2).t: b's window is already past when a is sent
  auto loop = [](ClockSet r) {
    return ty::rec("t", ty::choice({ty::send("a", cc::gt("x", 3), r,
                                             ty::choice({ty::recv("b", cc::lt("x", 2), {}, ty::var("t"))}))}));
  };
  EXPECT_FALSE(wf_type(loop({})));
  // resetting on a makes b reachable, and x<2 entails past(x>3) for the loop
  EXPECT_TRUE(wf_type(loop({"x"})));
}

TEST(Wellformed, DelegatedProtocolIsChecked)
{
  auto broken = ty::choice({ty::send("b", cc::gt("z", 1), {}, ty::choice({ty::send("c", cc::lt("z", 1), {}, ty::end())}))});
  auto S = ty::choice({ty::send("d", cc::tru(), {}, ty::end(), Sort::delegate(cc::eq("z", 0), broken))});
  EXPECT_EQ(premise_of(S), WfPremise::Delegation);
  auto fine = ty::choice({ty::send("b", cc::gt("z", 1), {"z"}, ty::end())});
  EXPECT_TRUE(wf_type(ty::choice({ty::send("d", cc::tru(), {}, ty::end(), Sort::delegate(cc::eq("z", 0), fine))})));
}

TEST(Wellformed, FutureEnv)
{
  auto o = ty::send("a", cc::gt("x", 3), {"x"}, ty::end());
  EXPECT_TRUE(equivalent(future_env(o), cc::eq("x", 0)));
  auto c = ty::recv("c", cc::conj(cc::gt("x", 2), cc::lt("x", 5)), {}, ty::end());
  EXPECT_TRUE(equivalent(future_env(c), c.guard));
  auto d = ty::send("d", cc::conj(cc::lt("x", 3), cc::eq("y", 1)), {"x"}, ty::end());
  EXPECT_TRUE(equivalent(future_env(d), cc::conj(cc::eq("x", 0), cc::eq("y", 1))));
}

TEST(Wellformed, TraceRecordsFailingRule)
{
  auto r = wf_report(junk(false));
  ASSERT_FALSE(r.trace.empty());
  bool any_bad = false;
  for (const auto& st : r.trace) any_bad |= !st.ok;
  EXPECT_TRUE(any_bad);
  EXPECT_EQ(r.failing->rule, "choice");
}

TEST(WellformedProperty, DualPreservesWellFormedness)
{
  std::mt19937_64 g(21);
  int accepted = 0;
  for (int i = 0; i < 1000; ++i) {
    auto S = gen::session(g, XY, 3);
    bool a = wf_type(S);
    accepted += a;
    ASSERT_EQ(a, wf_type(dual(S))) << pretty(S);
  }
  EXPECT_GT(accepted, 50);
}

TEST(WellformedProperty, StrongerContextStillAccepted)
{
  std::mt19937_64 g(22);
  int checked = 0;
  for (int i = 0; i < 4000 && checked < 1000; ++i) {
    auto S = gen::session(g, XY, 3);
    auto d = gen::constraint(g, XY, 1);
    if (!wf_judgment({}, d, S).accepted) continue;
    auto d2 = cc::conj(d, gen::constraint(g, XY, 1));
    if (!satisfiable(d2)) continue;
    ++checked;
    ASSERT_TRUE(wf_judgment({}, d2, S).accepted) << pretty(S) << " under " << pretty(d2);
  }
  EXPECT_GE(checked, 200);
}

// Accepted closed types: nu satisfies the canonical constraint iff wf_config.
TEST(WellformedProperty, ConfigAgreesWithCanonicalConstraint)
{
  std::mt19937_64 g(23);
  auto pts = gen::grid(XY, 2, 5);
  int checked = 0;
  for (int i = 0; i < 3000 && checked < 1000; ++i) {
    auto S = gen::session(g, XY, 3);
    if (!wf_type(S)) continue;
    ++checked;
    auto canon = canonical_constraint(S);
    const auto& nu = pts[std::uniform_int_distribution<std::size_t>(0, pts.size() - 1)(g)];
    ASSERT_EQ(wf_config(nu, S), sat(nu, canon));
  }
  EXPECT_GE(checked, 200);
}
