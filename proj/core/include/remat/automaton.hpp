#pragma once

#include <optional>
#include <string>
#include <vector>

#include "remat/market.hpp"
#include "remat/rng.hpp"

namespace remat {

// Lottery over automaton states, weights summing to one (1e-12 slack).
struct Lottery {
  std::vector<std::pair<int, double>> outcomes;  // (state index, weight)
};

// Transition row set for one state. Resolution order for a realized matching m:
//   1. an ON row whose matching equals m exactly,
//   2. the ONPATH row when m is the state's own output,
//   3. a DEV row for the hospital a single-coalition deviation resolves to,
//   4. the DEFAULT row,
//   5. stay put.
struct TransitionRule {
  std::vector<std::pair<int, Lottery>> on_matching;  // (matching index, lottery)
  std::optional<Lottery> on_path;
  std::vector<std::pair<int, Lottery>> on_deviator;  // (hospital, lottery)
  std::optional<Lottery> fallback;
};

struct AutomatonState {
  std::string name;
  int output = -1;  // index into ProcessAutomaton::matchings
  TransitionRule rule;
};

// Finite-state matching process: play output(state) each period, then move
// according to the realized matching. Public randomization is explicit in the
// lotteries.
struct ProcessAutomaton {
  std::string name;
  std::vector<std::string> matching_names;
  std::vector<Matching> matchings;
  std::vector<AutomatonState> states;
  Lottery initial;
  double discount = 0.0;

  int state_index(const std::string& n) const;
  int matching_index_of(const Matching& m) const;  // -1 if absent
  int add_matching(const std::string& n, Matching m);

  // Checks lottery weights, index ranges, quota validity of outputs.
  void validate(const MarketSpec& spec) const;

  Lottery transition(const MarketSpec& spec, int state, const Matching& realized) const;
};

// Draws one state index with the lottery's weights.
int sample_lottery(const Lottery& l, Rng& rng);

// Runs the automaton with everyone obeying: each period the state's own output
// realizes and the next state is drawn from the transition lottery. Returns the
// visited state sequence, starting from a draw of the initial lottery.
std::vector<int> simulate_on_path(const MarketSpec& spec, const ProcessAutomaton& a,
                                  long periods, Rng& rng);

ProcessAutomaton stationary_process(const MarketSpec& spec, const Matching& m, double discount);

// Play `target` until someone deviates, then `fallback` forever.
ProcessAutomaton build_trigger_process(const MarketSpec& spec, const Matching& target,
                                       const Matching& fallback, double discount);

// Order-sensitive structural comparison ignoring state and matching names.
bool structurally_equal(const ProcessAutomaton& a, const ProcessAutomaton& b);

}  // namespace remat
