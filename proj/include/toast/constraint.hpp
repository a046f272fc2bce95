#pragma once

#include "toast/time.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace toast {

enum class CKind { True, Gt, Eq, DiffGt, DiffEq, Not, And };

struct CNode;
using Constraint = std::shared_ptr<const CNode>;

// x>n | x=n | x-y>n | x-y=n | true | !d | d && d
struct CNode {
  CKind kind = CKind::True;
  ClockId x, y;
  std::int64_t n = 0;
  Constraint a, b;
};

namespace cc {
Constraint tru();
Constraint fls();
Constraint gt(const ClockId& x, std::int64_t n);
Constraint eq(const ClockId& x, std::int64_t n);
Constraint diff_gt(const ClockId& x, const ClockId& y, std::int64_t n);
Constraint diff_eq(const ClockId& x, const ClockId& y, std::int64_t n);
Constraint neg(Constraint a);
Constraint conj(Constraint a, Constraint b);

// sugar, expanded into the core grammar
Constraint disj(Constraint a, Constraint b);
Constraint lt(const ClockId& x, std::int64_t n);
Constraint le(const ClockId& x, std::int64_t n);
Constraint ge(const ClockId& x, std::int64_t n);
Constraint diff_lt(const ClockId& x, const ClockId& y, std::int64_t n);
Constraint diff_le(const ClockId& x, const ClockId& y, std::int64_t n);
Constraint diff_ge(const ClockId& x, const ClockId& y, std::int64_t n);
}  // namespace cc

bool equal(const Constraint& a, const Constraint& b);
ClockSet clocks_of(const Constraint& d);
std::int64_t max_constant(const Constraint& d);
bool sat(const Valuation& nu, const Constraint& d);
// Core-grammar rendering, no sugar. The surface printer re-sugars.
std::string core_str(const Constraint& d);
// Renames clocks; clocks absent from the map are kept.
Constraint rename_clocks(const Constraint& d, const std::map<ClockId, ClockId>& m);

}  // namespace toast
