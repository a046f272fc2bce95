#include "gen.hpp"
#include "toast/print.hpp"

#include <gtest/gtest.h>

using namespace toast;

namespace {

const std::vector<ClockId> XY{"x", "y"};

// Ex. data/timeout pair
SessionType data_timeout(const ClockId& c, bool flipped)
{
  Dir s = flipped ? Dir::Recv : Dir::Send;
  return ty::choice({ty::opt(s, "data", Sort::string(), cc::lt(c, 3), {}, ty::end()),
                     ty::opt(flip(s), "timeout", Sort::none(), cc::gt(c, 4), {}, ty::end())});
}

std::set<std::string> minus(std::set<std::string> s, const std::string& a)
{
  s.erase(a);
  return s;
}

}  // namespace

TEST(Types, DualOfDataTimeoutIsItsPartnerUpToClockNames)
{
  auto S = data_timeout("x", false);
  auto D = data_timeout("y", true);
  EXPECT_FALSE(equal(dual(S), D));
  EXPECT_TRUE(equal(rename_clocks(dual(S), {{"x", "y"}}), D));
}

TEST(Types, UnfoldOnNonRecursiveThrows)
{
  EXPECT_THROW(unfold(ty::end()), std::invalid_argument);
  EXPECT_THROW(ty::choice({}), std::invalid_argument);
}

TEST(Types, UnfoldSubstitutesTheWholeRecursion)
{
  auto body = ty::choice({ty::recv("a", cc::lt("x", 1), {}, ty::var("t"))});
  auto S = ty::rec("t", body);
  auto U = unfold(S);
  ASSERT_EQ(U->kind, TKind::Choice);
  EXPECT_TRUE(equal(U->options[0].cont, S));
  EXPECT_TRUE(unfold_equiv(S, U));
}

TEST(Types, SubstitutionAvoidsCapture)
{
  // (mu b. !l.a)[b/a] must not capture the free b
  auto S = ty::rec("b", ty::choice({ty::send("l", cc::tru(), {}, ty::var("a"))}));
  auto R = substitute(S, "a", ty::var("b"));
  EXPECT_EQ(free_names(R), std::set<std::string>{"b"});
  ASSERT_EQ(R->kind, TKind::Rec);
  EXPECT_NE(R->var, "b");
}

TEST(Types, NonContractiveUnfoldingIsReported)
{
  auto S = ty::rec("a", ty::rec("b", ty::var("a")));
  EXPECT_FALSE(contractive(S));
  EXPECT_THROW(unfold_top(S), std::invalid_argument);
}

TEST(Types, EquivalenceDistinguishesLabelsGuardsAndResets)
{
  auto a = ty::choice({ty::send("a", cc::lt("x", 3), {"x"}, ty::end())});
  auto b = ty::choice({ty::send("a", cc::neg(cc::ge("x", 3)), {"x"}, ty::end())});
  EXPECT_TRUE(unfold_equiv(a, b));  // same guard semantically
  EXPECT_FALSE(unfold_equiv(a, ty::choice({ty::send("a", cc::lt("x", 3), {}, ty::end())})));
  EXPECT_FALSE(unfold_equiv(a, ty::choice({ty::send("b", cc::lt("x", 3), {"x"}, ty::end())})));
  EXPECT_FALSE(unfold_equiv(a, ty::choice({ty::recv("a", cc::lt("x", 3), {"x"}, ty::end())})));
  EXPECT_FALSE(unfold_equiv(a, ty::choice({ty::send("a", cc::lt("x", 4), {"x"}, ty::end())})));
}

TEST(Types, EquivalenceSeesThroughDifferentUnrollings)
{
  // mu t.!a.t  vs  !a.mu s.!a.!a.s
  auto g = cc::tru();
  auto S = ty::rec("t", ty::choice({ty::send("a", g, {}, ty::var("t"))}));
  auto T = ty::choice(
      {ty::send("a", g, {}, ty::rec("s", ty::choice({ty::send("a", g, {}, ty::choice({ty::send("a", g, {}, ty::var("s"))}))})))});
  EXPECT_TRUE(unfold_equiv(S, T));
  auto U = ty::rec("t", ty::choice({ty::send("a", g, {}, ty::choice({ty::send("b", g, {}, ty::var("t"))}))}));
  EXPECT_FALSE(unfold_equiv(S, U));
}

TEST(TypesProperty, DualIsAnInvolution)
{
  std::mt19937_64 g(11);
  for (int i = 0; i < 1000; ++i) {
    auto S = gen::session(g, XY, 4);
    ASSERT_TRUE(equal(dual(dual(S)), S)) << pretty(S);
  }
}

TEST(TypesProperty, DualCommutesWithUnfold)
{
  std::mt19937_64 g(12);
  int recs = 0;
  for (int i = 0; i < 3000 && recs < 1000; ++i) {
    auto S = gen::session(g, XY, 4);
    if (S->kind != TKind::Rec) continue;
    ++recs;
    ASSERT_TRUE(unfold_equiv(dual(unfold(S)), unfold(dual(S)))) << pretty(S);
  }
  EXPECT_GE(recs, 300);
}

TEST(TypesProperty, EquivalenceLaws)
{
  std::mt19937_64 g(13);
  for (int i = 0; i < 1000; ++i) {
    auto S = gen::session(g, XY, 4);
    auto T = gen::session(g, XY, 4);
    ASSERT_TRUE(unfold_equiv(S, S));
    ASSERT_TRUE(unfold_equiv(S, unfold_top(S)));
    if (S->kind == TKind::Rec) ASSERT_TRUE(unfold_equiv(unfold(S), S));
    ASSERT_EQ(unfold_equiv(S, T), unfold_equiv(T, S)) << pretty(S) << " / " << pretty(T);
    ASSERT_EQ(unfold_equiv(S, T), unfold_equiv(dual(S), dual(T)));
    if (equal(S, T)) ASSERT_TRUE(unfold_equiv(S, T));
    if (canonical_key(S) == canonical_key(T)) ASSERT_TRUE(unfold_equiv(S, T));
  }
}

TEST(TypesProperty, EquivalenceIgnoresBinderNames)
{
  std::mt19937_64 g(14);
  for (int i = 0; i < 1000; ++i) {
    auto S = gen::session(g, XY, 4);
    if (S->kind != TKind::Rec) continue;
    auto fresh = fresh_name("r");
    auto R = ty::rec(fresh, substitute(S->body, S->var, ty::var(fresh)));
    ASSERT_TRUE(unfold_equiv(S, R)) << pretty(S);
    ASSERT_EQ(canonical_key(S), canonical_key(R));
  }
}

TEST(TypesProperty, SubstitutionFreeNames)
{
  std::mt19937_64 g(15);
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> bound{"a", "b"};
    auto S = gen::session(g, XY, 4, bound);
    auto R = gen::session(g, XY, 2, {"c", "a0"});
    auto fs = free_names(S);
    auto expect = minus(fs, "a");
    if (fs.count("a"))
      for (const auto& n : free_names(R)) expect.insert(n);
    ASSERT_EQ(free_names(substitute(S, "a", R)), expect) << pretty(S) << " [" << pretty(R) << "/a]";
  }
}

TEST(TypesProperty, ClockRenamingRoundTrips)
{
  std::mt19937_64 g(16);
  for (int i = 0; i < 1000; ++i) {
    auto S = gen::session(g, XY, 3);
    auto R = rename_clocks(rename_clocks(S, {{"x", "u"}, {"y", "v"}}), {{"u", "x"}, {"v", "y"}});
    ASSERT_TRUE(equal(S, R));
    auto cl = clocks_of(rename_clocks(S, {{"x", "u"}}));
    ASSERT_FALSE(cl.count("x"));
  }
}
