#include "gen.hpp"
#include "toast/zone.hpp"

#include <gtest/gtest.h>

using namespace toast;

namespace {

const std::vector<ClockId> XY{"x", "y"};

// Brute-force oracle: some delay on the 1/8 grid up to M+2 reaches d.
bool past_oracle(const Valuation& nu, const Constraint& d, std::int64_t M)
{
  for (std::int64_t k = 0; k <= 8 * (M + 2); ++k)
    if (sat(nu.advanced(Rat(k, 8)), d)) return true;
  return false;
}

// Some pre-image under resetting lambda satisfies d.
bool reset_oracle(const Valuation& nu, const Constraint& d, const ClockSet& lambda, std::int64_t M)
{
  for (const auto& x : lambda)
    if (nu.get(x) != 0) return false;
  std::vector<ClockId> ls(lambda.begin(), lambda.end());
  for (auto pre : gen::grid(ls, 8, 8 + M + 1)) {
    Valuation w = nu;
    for (const auto& [c, v] : pre.values()) w.set(c, v);
    if (sat(w, d)) return true;
  }
  return false;
}

}  // namespace

TEST(Constraint, SugarExpandsToCore)
{
  auto v = Valuation::zero({"x"});
  v.set("x", 3);
  EXPECT_FALSE(sat(v, cc::lt("x", 3)));
  EXPECT_TRUE(sat(v, cc::le("x", 3)));
  EXPECT_TRUE(sat(v, cc::ge("x", 3)));
  EXPECT_FALSE(sat(v, cc::fls()));
  EXPECT_THROW(cc::gt("x", -1), std::invalid_argument);
}

TEST(Zone, SimpleEntailments)
{
  EXPECT_TRUE(entails(cc::eq("x", 2), cc::le("x", 3)));
  EXPECT_FALSE(entails(cc::le("x", 3), cc::eq("x", 2)));
  EXPECT_TRUE(entails(cc::fls(), cc::eq("x", 2)));
  EXPECT_TRUE(equivalent(past(cc::eq("x", 3)), cc::le("x", 3)));
  EXPECT_TRUE(equivalent(past(cc::gt("x", 3)), cc::tru()));
  EXPECT_TRUE(equivalent(constraint_reset(cc::gt("x", 3), {"x"}), cc::eq("x", 0)));
  EXPECT_FALSE(satisfiable(cc::conj(cc::lt("x", 2), cc::gt("x", 2))));
}

TEST(Zone, DelaySetIsExact)
{
  Valuation nu;
  nu.set("x", Rat(1, 2));
  nu.set("y", 2);
  auto s = delay_set(nu, cc::conj(cc::lt("x", 3), cc::gt("y", 3)));
  EXPECT_EQ(s.str(), "(1, 5/2)");
  EXPECT_TRUE(delay_set(nu, cc::eq("x", 0)).empty());
  EXPECT_EQ(delay_set(nu, cc::eq("x", 1)).str(), "[1/2, 1/2]");
}

TEST(Zone, ToConstraintIsMinimal)
{
  auto d = cc::conj(cc::conj(cc::le("x", 3), cc::le("x", 5)), cc::tru());
  auto z = normalize(d);
  ASSERT_EQ(z.zones.size(), 1u);
  EXPECT_TRUE(equal(z.zones[0].to_constraint(), cc::le("x", 3)));
}

TEST(ZoneProperty, NormalizeAgreesWithSemantics)
{
  std::mt19937_64 g(1);
  auto pts = gen::grid(XY, 4, 8);
  for (int i = 0; i < 1000; ++i) {
    auto d = gen::constraint(g, XY, 3);
    auto z = normalize(d, {"x", "y"});
    auto back = denormalize(z);
    for (const auto& v : pts) {
      ASSERT_EQ(sat(v, d), z.contains(v)) << i << " " << v.str();
      ASSERT_EQ(sat(v, d), sat(v, back)) << i << " " << v.str();
    }
  }
}

TEST(ZoneProperty, PastMatchesBruteForce)
{
  std::mt19937_64 g(2);
  auto pts = gen::grid(XY, 4, 8);
  for (int i = 0; i < 1000; ++i) {
    auto d = gen::constraint(g, XY, 2);
    auto p = past(d);
    for (const auto& v : pts) ASSERT_EQ(sat(v, p), past_oracle(v, d, 3)) << i << " " << v.str();
  }
}

TEST(ZoneProperty, ResetMatchesBruteForce)
{
  std::mt19937_64 g(3);
  auto pts = gen::grid(XY, 4, 8);
  for (int i = 0; i < 300; ++i) {
    auto d = gen::constraint(g, XY, 2);
    ClockSet lambda{i % 2 ? "x" : "y"};
    auto r = constraint_reset(d, lambda);
    for (const auto& v : pts) ASSERT_EQ(sat(v, r), reset_oracle(v, d, lambda, 3)) << i << " " << v.str() << " " << core_str(d) << " => " << core_str(r);
  }
}

TEST(ZoneProperty, EntailmentIsSoundAndComplete)
{
  std::mt19937_64 g(4);
  auto pts = gen::grid(XY, 4, 8);
  for (int i = 0; i < 1000; ++i) {
    auto a = gen::constraint(g, XY, 2);
    auto b = gen::constraint(g, XY, 2);
    bool oracle = true;
    for (const auto& v : pts)
      if (sat(v, a) && !sat(v, b)) oracle = false;
    ASSERT_EQ(entails(a, b), oracle) << i;
  }
}

TEST(ZoneProperty, DelaySetMatchesSampling)
{
  std::mt19937_64 g(5);
  auto pts = gen::grid(XY, 2, 4);
  for (int i = 0; i < 1000; ++i) {
    auto d = gen::constraint(g, XY, 2);
    const auto& nu = pts[i % pts.size()];
    auto s = delay_set(nu, d);
    for (std::int64_t k = 0; k <= 48; ++k) {
      Rat t(k, 8);
      ASSERT_EQ(s.contains(t), sat(nu.advanced(t), d)) << i << " t=" << to_string(t) << " " << s.str();
    }
  }
}

TEST(Intervals, UnionAndIntersection)
{
  Interval a{0, false, Rat(2), true};
  Interval b{2, false, Rat(3), false};
  auto u = IntervalSet(a).unite(IntervalSet(b));
  EXPECT_EQ(u.str(), "[0, 3]");
  auto i = IntervalSet(a).intersect(IntervalSet(b));
  EXPECT_TRUE(i.empty());
  EXPECT_EQ(IntervalSet(b).shifted_down(1).str(), "[1, 2]");
}

TEST(Valuation, ResetUnknownClockThrows)
{
  auto v = Valuation::zero({"x"});
  EXPECT_THROW(v.reset({"y"}), std::exception);
  EXPECT_EQ(v.advanced(Rat(3, 2)).str(), "{x=3/2}");
}
