#pragma once
// Canonical surface rendering. parse(pretty(x)) gives back x structurally.

#include "toast/calculus.hpp"
#include "toast/constraint.hpp"
#include "toast/intervals.hpp"
#include "toast/types.hpp"

#include <string>

namespace toast {

std::string pretty(const Constraint& d);
std::string pretty(const Sort& s);
std::string pretty(const SessionType& s);
std::string pretty(const Option& o);
std::string pretty(const Process& p);

}  // namespace toast
