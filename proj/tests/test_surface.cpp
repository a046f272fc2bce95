#include "gen.hpp"
#include "protocols.hpp"
#include "toast/print.hpp"
#include "toast/surface.hpp"

#include <gtest/gtest.h>

using namespace toast;

TEST(Surface, ConstraintSugar)
{
  EXPECT_TRUE(equal(parse_constraint("x<3"), cc::lt("x", 3)));
  EXPECT_TRUE(equal(parse_constraint("x >= 3 && y = 1"), cc::conj(cc::ge("x", 3), cc::eq("y", 1))));
  EXPECT_TRUE(equal(parse_constraint("x-y > 1"), cc::diff_gt("x", "y", 1)));
  EXPECT_THROW(parse_constraint("x-y > -1"), ParseError);
  EXPECT_TRUE(equal(parse_constraint("2 < x <= 5"), cc::conj(cc::gt("x", 2), cc::le("x", 5))));
  EXPECT_TRUE(equal(parse_constraint("false || !true"), cc::disj(cc::fls(), cc::neg(cc::tru()))));
}

TEST(Surface, TypeExamples)
{
  auto s = parse_type("{ !data<string>(x<3).end, ?timeout(x>4).end }");
  EXPECT_TRUE(equal(s, proto::data_timeout()));
  auto pp = parse_type(
      "rec a . { !ping(x<=3, {x}).{ ?ping(x<=3, {x}).a, ?pong(x>3, {x}).a },"
      "          !pong(x>3, {x}).{ ?ping(x<=3, {x}).a, ?pong(x>3, {x}).a } }");
  EXPECT_TRUE(equal(pp, proto::ping_pong()));
  auto d = parse_type("!deleg<(z=0, ?go(z<1).end)>.end");
  EXPECT_EQ(d->options[0].payload.kind, SortKind::Delegate);
}

TEST(Surface, ProcessExamples)
{
  auto p = parse_process("def X(;p) = p?[<=3]{ping: delay(1).p!pong.X(;p)} after<=3 p!pong.0 in X(;p)");
  ASSERT_EQ(p->kind, PKind::Def);
  EXPECT_EQ(p->a->kind, PKind::Timeout);
  EXPECT_EQ(p->a->b->kind, PKind::Send);
  auto q = parse_process("set(z).delay(w<=1).if (z<1) q!ack.0 else delay(2).q?{msg: 0}");
  EXPECT_EQ(q->kind, PKind::Set);
  EXPECT_EQ(q->a->kind, PKind::DelayC);
  auto r = parse_process("new (p q) (p!a(3).0 | q?{a(v): 0} | p->q:[] | q->p:[b \"hi\", c])");
  EXPECT_EQ(r->kind, PKind::Scope);
  EXPECT_EQ(pretty(r), "new (p q) (p!a(3).0 | q?{a(v): 0} | p->q:[] | q->p:[b \"hi\", c])");
}

TEST(Surface, TimeoutDeadlinesMustAgree)
{
  EXPECT_NO_THROW(parse_process("p?[<2]{a: 0} after<2 0"));
  EXPECT_THROW(parse_process("p?[<2]{a: 0} after<=2 0"), ParseError);
}

TEST(Surface, RoundTripConstraints)
{
  std::mt19937_64 g(11);
  for (int i = 0; i < 1500; ++i) {
    auto c = gen::constraint(g, {"x", "y", "z"}, 3);
    auto text = pretty(c);
    auto back = parse_constraint(text);
    ASSERT_TRUE(equal(back, c)) << text << " / " << pretty(back);
  }
}

TEST(Surface, RoundTripTypes)
{
  std::mt19937_64 g(12);
  for (int i = 0; i < 1500; ++i) {
    auto s = gen::session(g, {"x", "y"}, 4);
    auto text = pretty(s);
    auto back = parse_type(text);
    ASSERT_TRUE(equal(back, s)) << text << " / " << pretty(back);
  }
}

TEST(Surface, RoundTripProcesses)
{
  std::mt19937_64 g(13);
  for (int i = 0; i < 1500; ++i) {
    auto p = gen::process(g, 4);
    auto text = pretty(p);
    auto back = parse_process(text);
    ASSERT_TRUE(equal(back, p)) << text << " / " << pretty(back);
    ASSERT_EQ(pretty(back), text);
  }
}

TEST(Surface, FileDeclarations)
{
  auto f = parse_source(R"(
    // comment
    type D = { !data<string>(x<3).end, ?timeout(x>4).end };
    type E = D;   /* alias */
    process P = p!data("x").0;
    system S {
      process new (p q) (P | q?[<3]{data(v): 0} | p->q:[] | q->p:[]);
      timers z = 0;
      role r : E at {x=1};
      session (p q) : D, { ?data<string>(y<3).end, !timeout(y>4).end };
    }
  )");
  ASSERT_EQ(f.types.size(), 2u);
  EXPECT_TRUE(equal(f.find_type("E")->type, proto::data_timeout()));
  ASSERT_NE(f.find_system("S"), nullptr);
  const auto& s = *f.find_system("S");
  EXPECT_EQ(s.roles[0].nu.get("x"), Rat(1));
  EXPECT_EQ(s.sessions.size(), 1u);
  EXPECT_TRUE(s.timers.has("z"));
  EXPECT_EQ(s.proc->kind, PKind::Scope);
}

TEST(Surface, DiagnosticsCarrySpansInsideInput)
{
  std::string text = "type A = { !a.end, ?b.end ;\ntype B = !c(x<).end;\ntype C = end;\n";
  try {
    parse_source(text);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    ASSERT_EQ(e.diagnostics().size(), 2u);  // recovery reaches the second declaration
    for (const auto& d : e.diagnostics()) {
      EXPECT_LE(d.span.begin, d.span.end);
      EXPECT_LE(d.span.end, text.size());
    }
    EXPECT_NE(format(e.diagnostics()[0], text, "f.toast").find("f.toast:1:"), std::string::npos);
    EXPECT_NE(format(e.diagnostics()[1], text, "f.toast").find("f.toast:2:"), std::string::npos);
  }
}

TEST(Surface, UnclosedBraceReportsEndOfInput)
{
  std::string text = "type A = { !a.end";
  try {
    parse_source(text);
    FAIL();
  } catch (const ParseError& e) {
    ASSERT_EQ(e.diagnostics().size(), 1u);
    EXPECT_NE(e.diagnostics()[0].message.find("end of input"), std::string::npos);
    EXPECT_EQ(e.diagnostics()[0].span.begin, text.size());
  }
}

TEST(Surface, RejectsUnknownNamesAndDuplicates)
{
  EXPECT_THROW(parse_source("type A = B;"), ParseError);
  EXPECT_THROW(parse_source("type A = end; type A = end;"), ParseError);
  EXPECT_THROW(parse_type("{ !a.end, !a.end }"), ParseError);
  EXPECT_THROW(parse_process("p?{a: 0, a: 0}"), ParseError);
  EXPECT_THROW(parse_process("delay(x<1 && y<1).0"), ParseError);
  EXPECT_THROW(parse_constraint("x < 3 )"), ParseError);
  EXPECT_THROW(parse_source("system S { timers z = 0; }"), ParseError);
}

TEST(Surface, SpansOfRandomGarbageStayInBounds)
{
  std::mt19937_64 g(14);
  const std::string alphabet = "{}()[]<>=!?.,;:|-/ abx0123 type rec end def in";
  for (int i = 0; i < 1000; ++i) {
    std::string text;
    int n = std::uniform_int_distribution<int>(0, 40)(g);
    for (int k = 0; k < n; ++k) text += alphabet[g() % alphabet.size()];
    try {
      parse_source(text);
    } catch (const ParseError& e) {
      ASSERT_FALSE(e.diagnostics().empty());
      for (const auto& d : e.diagnostics()) ASSERT_LE(d.span.end, text.size()) << text;
    }
  }
}

TEST(Surface, CorpusFilesParse)
{
  for (const char* f : {"junk", "unsafe_mixed", "weak_persistency", "ping_pong", "mixed_ping_pong", "throttling",
                        "typecheck_example"}) {
    std::string path = std::string(TOAST_CORPUS_DIR) + "/" + f + ".toast";
    try {
      load_source(path);
    } catch (const ParseError& e) {
      FAIL() << path << ": " << e.diagnostics()[0].message << " at " << e.diagnostics()[0].span.begin;
    }
  }
}

TEST(Surface, CorpusTypesMatchHandBuiltOnes)
{
  auto f = load_source(std::string(TOAST_CORPUS_DIR) + "/throttling.toast");
  EXPECT_TRUE(equal(f.find_type("Throttle2")->type, proto::throttling(2)));
  EXPECT_TRUE(unfold_equiv(f.find_type("Throttle3")->type, proto::throttling(3)));
  EXPECT_TRUE(unfold_equiv(f.find_type("Throttle2Dual")->type, dual(proto::throttling(2))));
  auto j = load_source(std::string(TOAST_CORPUS_DIR) + "/junk.toast");
  EXPECT_TRUE(equal(j.find_type("Junk")->type, proto::junk(false)));
  EXPECT_TRUE(equal(j.find_type("Amended")->type, proto::junk(true)));
  auto m = load_source(std::string(TOAST_CORPUS_DIR) + "/mixed_ping_pong.toast");
  EXPECT_TRUE(equal(m.find_type("MixedPingPong")->type, proto::mixed_ping_pong()));
  EXPECT_TRUE(equal(m.find_type("MixedPingPongDual")->type, dual(proto::mixed_ping_pong())));
  auto p = load_source(std::string(TOAST_CORPUS_DIR) + "/ping_pong.toast");
  EXPECT_TRUE(equal(p.find_type("PingPong")->type, proto::ping_pong()));
}
