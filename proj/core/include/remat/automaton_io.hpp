#pragma once

#include <iosfwd>
#include <string>

#include "remat/automaton.hpp"

namespace remat {

// Text automaton format. Matchings are declared first and referenced by name;
// transition rows take a lottery written as alternating "state weight" pairs,
// weights as decimals or rationals:
//
//   AUTOMATON mu0
//   DISCOUNT 0.8
//   MATCHING m0
//   f1: w1 w5
//   ...
//   STATE onpath OUTPUT m0
//   ONPATH -> onpath 1
//   DEV f1 -> punish 1
//   ON mW -> other 1/2 onpath 1/2
//   DEFAULT -> absorbing 1
//   INITIAL onpath 1
//
// Missing DEFAULT means stay put; DISCOUNT is optional (checkers may override).
ProcessAutomaton parse_automaton(const MarketSpec& spec, std::istream& in,
                                 const std::string& origin = "<stream>");
ProcessAutomaton load_automaton(const MarketSpec& spec, const std::string& path);
std::string serialize_automaton(const MarketSpec& spec, const ProcessAutomaton& a);
void save_automaton(const MarketSpec& spec, const ProcessAutomaton& a,
                    const std::string& path);

}  // namespace remat
