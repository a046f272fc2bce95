#pragma once
// Seeded random generators shared by the property tests.
#include "toast/calculus.hpp"
#include "toast/types.hpp"

#include <random>

namespace gen {

using namespace toast;

inline ClockId pick_clock(std::mt19937_64& g, const std::vector<ClockId>& cl)
{
  return cl[std::uniform_int_distribution<std::size_t>(0, cl.size() - 1)(g)];
}

inline Constraint constraint(std::mt19937_64& g, const std::vector<ClockId>& cl, int depth, std::int64_t maxc = 3)
{
  std::uniform_int_distribution<int> k(0, depth > 0 ? 8 : 4);
  std::uniform_int_distribution<std::int64_t> n(0, maxc);
  switch (k(g)) {
    case 0: return cc::gt(pick_clock(g, cl), n(g));
    case 1: return cc::eq(pick_clock(g, cl), n(g));
    case 2: {
      auto x = pick_clock(g, cl), y = pick_clock(g, cl);
      return x == y ? cc::le(x, n(g)) : cc::diff_gt(x, y, n(g));
    }
    case 3: {
      auto x = pick_clock(g, cl), y = pick_clock(g, cl);
      return x == y ? cc::ge(x, n(g)) : cc::diff_eq(x, y, n(g));
    }
    case 4: return std::uniform_int_distribution<int>(0, 5)(g) == 0 ? cc::tru() : cc::lt(pick_clock(g, cl), n(g));
    case 5:
    case 6: return cc::conj(constraint(g, cl, depth - 1, maxc), constraint(g, cl, depth - 1, maxc));
    case 7: return cc::neg(constraint(g, cl, depth - 1, maxc));
    default: return cc::disj(constraint(g, cl, depth - 1, maxc), constraint(g, cl, depth - 1, maxc));
  }
}

// All valuations over cl with values in {0, 1/q, ..., hi}.
inline std::vector<Valuation> grid(const std::vector<ClockId>& cl, std::int64_t q, std::int64_t hi)
{
  std::vector<Valuation> out{Valuation{}};
  for (const auto& c : cl) {
    std::vector<Valuation> next;
    for (const auto& v : out)
      for (std::int64_t k = 0; k <= hi * q; ++k) {
        Valuation w = v;
        w.set(c, Rat(k, q));
        next.push_back(w);
      }
    out = std::move(next);
  }
  return out;
}

// Random session type over clocks cl. Labels within a choice are distinct;
// recursion variables only appear under a choice, so results are contractive.
inline SessionType session(std::mt19937_64& g, const std::vector<ClockId>& cl, int depth,
                           std::vector<std::string> bound = {}, int cdepth = 0)
{
  std::uniform_int_distribution<int> pick(0, 9);
  int k = depth <= 0 ? 0 : pick(g);
  if (k == 0 || (k == 1 && bound.empty())) return ty::end();
  if (k == 1) return ty::var(bound[std::uniform_int_distribution<std::size_t>(0, bound.size() - 1)(g)]);
  if (k == 2) {
    std::string a = "a" + std::to_string(bound.size());
    auto inner = bound;
    inner.push_back(a);
    // body must be a choice to stay contractive
    SessionType body = session(g, cl, depth, inner, cdepth);
    while (body->kind != TKind::Choice) body = session(g, cl, depth, inner, cdepth);
    return ty::rec(a, body);
  }
  int n = std::uniform_int_distribution<int>(1, 3)(g);
  std::vector<Option> opts;
  for (int i = 0; i < n; ++i) {
    Dir d = std::uniform_int_distribution<int>(0, 1)(g) ? Dir::Send : Dir::Recv;
    ClockSet r;
    for (const auto& c : cl)
      if (std::uniform_int_distribution<int>(0, 2)(g) == 0) r.insert(c);
    Sort pl = Sort::none();
    int ps = std::uniform_int_distribution<int>(0, 9)(g);
    if (ps < 2) pl = Sort::nat();
    else if (ps == 2) pl = Sort::string();
    else if (ps == 3 && cdepth < 1) pl = Sort::delegate(constraint(g, {"z"}, 0), session(g, {"z"}, 2, {}, cdepth + 1));
    opts.push_back(ty::opt(d, "l" + std::to_string(i), pl, constraint(g, cl, cdepth > 0 ? 0 : 1), r,
                           session(g, cl, depth - 1, bound, cdepth)));
  }
  return ty::choice(std::move(opts));
}

inline Rat rat(std::mt19937_64& g, std::int64_t hi = 4)
{
  return Rat(std::uniform_int_distribution<std::int64_t>(0, 2 * hi)(g), 2);
}

inline Value value(std::mt19937_64& g)
{
  switch (std::uniform_int_distribution<int>(0, 4)(g)) {
    case 0: return Value::nat_v(std::uniform_int_distribution<std::int64_t>(0, 9)(g));
    case 1: return Value::bool_v(std::uniform_int_distribution<int>(0, 1)(g));
    case 2: return Value::string_v("s\"" + std::to_string(g() % 10));
    case 3: return Value::name("v");
    default: return Value::unit();
  }
}

inline Deadline deadline(std::mt19937_64& g)
{
  switch (std::uniform_int_distribution<int>(0, 2)(g)) {
    case 0: return Deadline::inf();
    case 1: return Deadline::le(rat(g));
    default: return Deadline::lt(rat(g) + 1);
  }
}

// Random process syntax; not necessarily well-formed or typable.
inline Process process(std::mt19937_64& g, int depth)
{
  auto role = [&] { return std::uniform_int_distribution<int>(0, 1)(g) ? std::string("p") : std::string("q"); };
  auto sub = [&] { return process(g, depth - 1); };
  auto arms = [&] {
    std::vector<Arm> as;
    int n = std::uniform_int_distribution<int>(1, 2)(g);
    for (int i = 0; i < n; ++i)
      as.push_back({"l" + std::to_string(i), std::uniform_int_distribution<int>(0, 1)(g) ? "v" : "", sub()});
    return as;
  };
  int k = depth <= 0 ? std::uniform_int_distribution<int>(0, 2)(g) : std::uniform_int_distribution<int>(0, 13)(g);
  switch (k) {
    case 0: return pr::term();
    case 1: return pr::call("X", {value(g)}, {role()});
    case 2: {
      std::vector<QItem> items;
      int n = std::uniform_int_distribution<int>(0, 2)(g);
      for (int i = 0; i < n; ++i) items.push_back({"l" + std::to_string(i), value(g)});
      return pr::queue(role(), role() == "p" ? "q" : "p", items);
    }
    case 3: return pr::set("z", sub());
    case 4: return pr::send(role(), "l" + std::to_string(g() % 3), value(g), sub());
    case 5: return pr::branch(role(), deadline(g), arms());
    case 6: {
      Deadline d = deadline(g);
      if (d.infinite()) d = Deadline::le(2);
      return pr::timeout(role(), d, arms(), sub());
    }
    case 7: return pr::if_(constraint(g, {"z", "y"}, 1), sub(), sub());
    case 8: return pr::delay(constraint(g, {"w"}, 1), sub());
    case 9: return pr::delay(rat(g), sub());
    case 10: return pr::def("X", {"v"}, {"r"}, sub(), sub());
    case 11: return pr::scope("p", "q", sub());
    default: return pr::par(sub(), sub());
  }
}

}  // namespace gen
