#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "remat/market.hpp"

namespace remat {

// Text market format, two sections. Utility rows are aligned with the STUDENTS
// section order, so parsing is two-pass:
//
//   # comment
//   HOSPITALS
//   f1 2  5 4 3 2 1      (id, quota, one utility per student)
//   STUDENTS
//   w1 f2 f1 fr          (id, acceptable hospitals best first; may be empty)
//
// Numbers accept decimals and rationals like 3/4. Errors carry line numbers.
MarketSpec parse_market(std::istream& in, const std::string& origin = "<stream>");
MarketSpec load_market(const std::string& path);
std::string serialize_market(const MarketSpec& spec);

// Named matchings over a given spec:
//
//   MATCHING m0
//   f1: w1 w5
//   fr:                  (empty roster; unlisted students are unmatched)
using NamedMatchings = std::vector<std::pair<std::string, Matching>>;
NamedMatchings parse_matchings(const MarketSpec& spec, std::istream& in,
                               const std::string& origin = "<stream>");
NamedMatchings load_matchings(const MarketSpec& spec, const std::string& path);
std::string serialize_matchings(const MarketSpec& spec, const NamedMatchings& ms);

const Matching& find_matching(const NamedMatchings& ms, const std::string& name);

// Shortest round-trip decimal; used by every serializer so files are stable.
std::string format_double(double v);

// Parses "0.75" or "3/4"; throws input_error with context on failure.
double parse_number(const std::string& tok, const std::string& context);

}  // namespace remat
