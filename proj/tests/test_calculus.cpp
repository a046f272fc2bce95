#include "gen.hpp"
#include "toast/calculus.hpp"
#include "toast/print.hpp"
#include "toast/surface.hpp"

#include <gtest/gtest.h>

using namespace toast;

namespace {

Process P(const std::string& s) { return parse_process(s); }

SourceFile corpus(const std::string& f) { return load_source(std::string(TOAST_CORPUS_DIR) + "/" + f + ".toast"); }

const PStep* find_rule(const std::vector<PStep>& ss, const std::string& rule)
{
  for (const auto& s : ss)
    if (s.rule == rule) return &s;
  return nullptr;
}

TimerEnv timers(std::initializer_list<std::pair<const char*, Rat>> xs)
{
  TimerEnv th;
  for (const auto& [x, v] : xs) th.set(x, v);
  return th;
}

// Removes every delay(0) prefix.
Process strip_zero(const Process& p)
{
  if (p->kind == PKind::DelayT && p->t == 0) return strip_zero(p->a);
  auto n = std::make_shared<PNode>(*p);
  if (p->a) n->a = strip_zero(p->a);
  if (p->b) n->b = strip_zero(p->b);
  for (auto& a : n->arms) a.body = strip_zero(a.body);
  return n;
}

}  // namespace

TEST(Calculus, FreeQueues)
{
  EXPECT_EQ(fq(P("q->p:[]")), std::set<std::string>{endpoint("q", "p")});
  EXPECT_TRUE(fq(P("new (p q) (p->q:[] | q->p:[])")).empty());
  EXPECT_TRUE(fq(P("0")).empty());
  EXPECT_EQ(fq(P("new (p q) (p->q:[] | q->p:[] | r->s:[])")), std::set<std::string>{endpoint("r", "s")});
}

TEST(Calculus, WellFormedProcesses)
{
  EXPECT_TRUE(wf_process(P("new (p q) ((p!a.0 | q?{a: 0}) | (q->p:[] | p->q:[]))")));
  EXPECT_FALSE(wf_process(P("p!l.q->p:[]")));
  EXPECT_TRUE(wf_process(P("0")));
  EXPECT_FALSE(wf_process(P("new (p q) (p!a.0 | p->q:[])")));  // one queue missing
  EXPECT_TRUE(wf_process(P("p?{a: 0} after<2 (p!b.0 | r->s:[])")));
  EXPECT_FALSE(wf_process(P("p?{a: r->s:[]}")));
}

TEST(Calculus, WaitAndNonEmptyQueues)
{
  EXPECT_EQ(wait_set(P("p?{a: 0}")), std::set<std::string>{"p"});
  EXPECT_TRUE(wait_set(P("p!a.0")).empty());
  EXPECT_TRUE(wait_set(P("new (p q) p?{a: 0}")).empty());
  EXPECT_EQ(neq_set(P("q->p:[l 1]")), std::set<std::string>{"p"});
  EXPECT_TRUE(neq_set(P("q->p:[]")).empty());
  EXPECT_EQ(neq_set(P("q->p:[l 1] | p->q:[]")), std::set<std::string>{"p"});
  EXPECT_EQ(wait_set(P("def X(;) = 0 in p?[<1]{a: 0} after<1 0")), std::set<std::string>{"p"});
}

TEST(Calculus, TimePassingCases)
{
  // deadline shrinking
  auto b = time_pass(P("p?[<3]{a: 0}"), 1);
  ASSERT_TRUE(b);
  EXPECT_EQ(pretty(*b), "p?[<2]{a: 0}");
  EXPECT_FALSE(time_pass(P("p?[<3]{a: 0}"), 3));
  EXPECT_TRUE(time_pass(P("p?[<=3]{a: 0}"), 3));
  EXPECT_TRUE(time_pass(P("p?{a: 0}"), 100));
  // the timeout collapses, then a send blocks any further time
  EXPECT_EQ(pretty(*time_pass(P("p?[<3]{a: 0} after<3 delay(2).0"), 4)), "delay(1).0");
  EXPECT_FALSE(time_pass(P("p?[<3]{a: 0} after<3 p!b.0"), 4));
  EXPECT_TRUE(time_pass(P("p?[<3]{a: 0} after<3 p!b.0"), 3));
  EXPECT_FALSE(time_pass(P("p!a.0"), Rat(1, 2)));
  EXPECT_EQ(pretty(*time_pass(P("delay(5).0"), 2)), "delay(3).0");
  EXPECT_EQ(pretty(*time_pass(P("delay(5).p?{a: 0}"), 7)), "p?{a: 0}");
  EXPECT_TRUE(equal(*time_pass(P("p!a.0"), 0), P("p!a.0")));
  // a waiting receiver beside its own nonempty queue cannot idle
  EXPECT_FALSE(time_pass(P("p?{a: 0} | q->p:[a]"), 1));
  EXPECT_TRUE(time_pass(P("p?{a: 0} | p->q:[a]"), 1));
  EXPECT_FALSE(time_pass(P("set(z).0"), 1));
}

TEST(Calculus, NonBlockingReceive)
{
  EXPECT_FALSE(time_pass(P("p?[<=0]{a: 0}"), Rat(1, 2)));
  EXPECT_EQ(pretty(*time_pass(P("p?[<=0]{a: 0} after<=0 delay(1).0"), Rat(1, 2))), "delay(1/2).0");
}

TEST(Calculus, LeNonStrictTimeoutBeforeSendTimelocks)
{
  // at t = n the receive is still admitted; beyond n the after-branch must absorb time
  auto p = P("p?[<=3]{a: 0} after<=3 p!b.0");
  auto at3 = time_pass(p, 3);
  ASSERT_TRUE(at3);
  EXPECT_EQ(pretty(*at3), "p?{a: 0} after<=0 p!b.0");
  EXPECT_FALSE(time_pass(*at3, Rat(1, 2)));
  EXPECT_TRUE(reduce_step({}, *at3).empty());
  // the strict form hands over to the after-branch at exactly n
  EXPECT_EQ(pretty(*time_pass(P("p?[<3]{a: 0} after<3 p!b.0"), 3)), "p!b.0");
}

TEST(Calculus, SendAppendsAtTail)
{
  auto s = reduce_step({}, P("p!b(2).0 | p->q:[a 1]"));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].rule, "Send");
  EXPECT_EQ(pretty(s[0].next), "0 | p->q:[a 1, b 2]");
}

TEST(Calculus, RecvDequeuesAndSubstitutes)
{
  auto s = reduce_step({}, P("p?{a(v): p!b(v).0, c: 0} | q->p:[a 7, c]"));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].rule, "Recv");
  EXPECT_EQ(pretty(s[0].next), "p!b(7).0 | q->p:[c]");
  auto t = reduce_step({}, P("p?{a: 0} after<1 0 | q->p:[a]"));
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].rule, "RecvT");
  EXPECT_TRUE(reduce_step({}, P("p?{a: 0} | q->p:[b]")).empty());
  EXPECT_TRUE(reduce_step({}, P("p?{a: 0} | p->q:[a]")).empty());
}

TEST(Calculus, SetResetsOrCreates)
{
  auto s = reduce_step(timers({{"x", 7}}), P("set(x).0"));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].theta.get("x"), Rat(0));
  auto c = reduce_step({}, P("set(y).0"));
  EXPECT_EQ(c[0].theta.get("y"), Rat(0));
}

TEST(Calculus, Conditionals)
{
  auto t = reduce_step(timers({{"z", 2}}), P("if (z<=3) p!a.0 else 0"));
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].rule, "IfT");
  auto f = reduce_step(timers({{"z", Rat(7, 2)}}), P("if (z<=3) p!a.0 else 0"));
  EXPECT_EQ(f[0].rule, "IfF");
  EXPECT_TRUE(reduce_step({}, P("if (z<=3) 0 else 0")).empty());
}

TEST(Calculus, DelayChoicesAreRepresentative)
{
  auto s = reduce_step({}, P("delay(w<=1).0"));
  std::vector<std::string> got;
  for (const auto& x : s) got.push_back(x.detail);
  EXPECT_EQ(got, (std::vector<std::string>{"0", "1/2", "1"}));
  EXPECT_EQ(pretty(s[0].next), "0");
  EXPECT_EQ(pretty(s[2].next), "delay(1).0");
}

TEST(Calculus, CallSubstitutesParameters)
{
  auto s = reduce_step({}, P("def X(v; r) = r!a(v).0 in X(5; p)"));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].rule, "Call");
  // the definition is no longer referenced and is dropped
  EXPECT_EQ(pretty(s[0].next), "p!a(5).0");
  auto r = reduce_step({}, P("def X(v; r) = r!a(v).X(v; r) in X(5; p)"));
  EXPECT_EQ(pretty(r[0].next), "def X(v; r) = r!a(v).X(v; r) in p!a(5).X(5; p)");
  EXPECT_THROW(reduce_step({}, P("def X(v; r) = 0 in X(; p)")), std::invalid_argument);
}

TEST(Calculus, SubstitutionAvoidsCapture)
{
  auto p = P("p?{a(u): q!b(v).q!c(u).0}");
  auto s = subst(p, {{"v", Value::name("u")}});
  const auto& arm = s->arms[0];
  EXPECT_NE(arm.binder, "u");
  EXPECT_EQ(arm.body->value, Value::name("u"));
  EXPECT_EQ(arm.body->a->value, Value::name(arm.binder));
}

TEST(Calculus, UnusedDefinitionsArePruned)
{
  EXPECT_EQ(pretty(prune_defs(P("def X(;) = 0 in p!a.0"))), "p!a.0");
  EXPECT_EQ(pretty(prune_defs(P("def X(;) = 0 in X(;)"))), "def X(; ) = 0 in X(; )");
  EXPECT_EQ(free_process_vars(P("def X(;) = Y(;) in X(;) | Z(;)")), (std::set<std::string>{"Y", "Z"}));
}

TEST(Calculus, ZeroDelayIsTransparent)
{
  auto a = reduce_step({}, P("delay(0).p!a.0 | p->q:[]"));
  auto b = reduce_step({}, P("p!a.0 | p->q:[]"));
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(pretty(strip_zero(a[0].next)), pretty(b[0].next));
}

TEST(Calculus, TrivialRun)
{
  auto r = run({}, pr::term(), Schedule::Exhaustive, 10);
  EXPECT_EQ(r.outcome, RunOutcome::Terminated);
  EXPECT_EQ(r.trace.size(), 1u);
  auto q = run({}, P("p?{a: 0} | q->p:[]"), Schedule::Random, 10, 1);
  EXPECT_EQ(q.outcome, RunOutcome::FuelExhausted);  // the receiver may idle forever
  auto s = run({}, P("p!a.0"), Schedule::Random, 10, 1);
  EXPECT_EQ(s.outcome, RunOutcome::Quiescent);
}

TEST(Calculus, ThrottlingTerminates)
{
  auto f = corpus("throttling");
  const auto& sys = *f.find_system("Closed");
  ASSERT_TRUE(wf_process(sys.proc));
  auto r = run(sys.timers, sys.proc, Schedule::Exhaustive, 60);
  EXPECT_EQ(r.outcome, RunOutcome::Terminated);
  EXPECT_TRUE(terminated(r.trace.back().proc));
}

TEST(Calculus, MixedPingPongNeverTerminates)
{
  // every timeout branch starts with a send behind a <= deadline and so can never fire
  auto f = corpus("mixed_ping_pong");
  const auto& sys = *f.find_system("Closed");
  ASSERT_TRUE(wf_process(sys.proc));
  auto r = run(sys.timers, sys.proc, Schedule::Exhaustive, 200);
  EXPECT_EQ(r.outcome, RunOutcome::Divergent);
}

// --- properties

TEST(CalculusProperty, TimePassingIsAdditive)
{
  std::mt19937_64 g(21);
  int compared = 0;
  for (int i = 0; i < 3000; ++i) {
    auto p = gen::process(g, 3);
    Rat s = gen::rat(g, 3), t = gen::rat(g, 3);
    auto a = time_pass(p, s);
    if (!a) continue;
    auto b = time_pass(*a, t);
    if (!b) continue;
    auto c = time_pass(p, s + t);
    ASSERT_TRUE(c) << pretty(p) << " s=" << to_string(s) << " t=" << to_string(t);
    ASSERT_EQ(pretty(*b), pretty(*c)) << pretty(p);
    ++compared;
  }
  EXPECT_GE(compared, 1000);
}

TEST(CalculusProperty, DelayRequiresNoPendingInput)
{
  std::mt19937_64 g(22);
  for (int i = 0; i < 2000; ++i) {
    auto p = gen::process(g, 3);
    if (p->kind != PKind::Par) continue;
    Rat t = gen::rat(g, 3) + Rat(1, 2);
    if (!time_pass(p, t)) continue;
    for (const auto& r : wait_set(p->a)) ASSERT_FALSE(neq_set(p->b).count(r)) << pretty(p);
    for (const auto& r : wait_set(p->b)) ASSERT_FALSE(neq_set(p->a).count(r)) << pretty(p);
  }
}

TEST(CalculusProperty, ReceiveIsDeterministic)
{
  std::mt19937_64 g(23);
  for (int i = 0; i < 1000; ++i) {
    auto r = gen::process(g, 2);
    while (r->kind != PKind::Branch && r->kind != PKind::Timeout) r = gen::process(g, 2);
    auto p = pr::par(r, pr::queue("q", r->role, {{"l" + std::to_string(g() % 2), Value::nat_v(1)}}));
    int receives = 0;
    for (const auto& s : reduce_step({}, p)) receives += s.rule == "Recv" || s.rule == "RecvT";
    ASSERT_LE(receives, 1) << pretty(p);
  }
}

TEST(CalculusProperty, WellFormednessIsPreserved)
{
  auto th = corpus("throttling");
  auto mp = corpus("mixed_ping_pong");
  std::vector<const SystemDecl*> systems{th.find_system("Closed"), mp.find_system("Closed")};
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto& sys = *systems[seed % 2];
    auto r = run(sys.timers, sys.proc, Schedule::Random, 30, seed);
    for (const auto& st : r.trace) ASSERT_TRUE(wf_process(st.proc)) << pretty(st.proc);
  }
}

TEST(CalculusProperty, ZeroDelayCongruence)
{
  std::mt19937_64 g(24);
  for (int i = 0; i < 1000; ++i) {
    auto p = gen::process(g, 2);
    auto q = pr::par(pr::delay(Rat(0), p), pr::queue("p", "q"));
    auto r = pr::par(p, pr::queue("p", "q"));
    auto a = reduce_step({}, q), b = reduce_step({}, r);
    ASSERT_EQ(a.size(), b.size()) << pretty(p);
    for (std::size_t k = 0; k < a.size(); ++k) {
      ASSERT_EQ(a[k].rule, b[k].rule);
      ASSERT_EQ(pretty(strip_zero(a[k].next)), pretty(strip_zero(b[k].next))) << pretty(p);
    }
    auto dq = time_pass(q, Rat(1, 2)), dr = time_pass(r, Rat(1, 2));
    ASSERT_EQ(bool(dq), bool(dr));
    if (dq) ASSERT_EQ(pretty(strip_zero(*dq)), pretty(strip_zero(*dr)));
  }
}
