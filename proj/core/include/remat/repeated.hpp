#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "remat/algorithms.hpp"
#include "remat/automaton.hpp"
#include "remat/market.hpp"

namespace remat {

inline constexpr double kGainTol = 1e-9;    // strict-profit slack
inline constexpr double kSolveTol = 1e-10;  // linear system residual bound

// values[h][s] = normalized discounted payoff of hospital h when play starts
// in state s and everyone follows the automaton.
std::vector<std::vector<double>> continuation_values(const MarketSpec& spec,
                                                     const ProcessAutomaton& a);

struct Witness {
  enum Kind { HospitalDeviation, StudentIr } kind = HospitalDeviation;
  int state = -1;
  int hospital = kUnmatched;
  std::vector<int> hired;  // deviation W (HospitalDeviation)
  int student = -1;        // StudentIr
  double gain = 0.0;
  std::string describe(const MarketSpec& spec, const ProcessAutomaton& a) const;
};

struct CheckResult {
  bool self_enforcing = false;
  std::vector<Witness> witnesses;  // empty on pass; first violation otherwise
  std::vector<std::vector<double>> values;
};

// One-shot deviation check at every state: students must weakly prefer their
// assignment to the outside option, and no hospital one-shot coalition
// deviation may beat the continuation value by more than kGainTol.
//
// Default scans utility-prefix coalitions of the available set plus, for rows
// keyed on explicit matchings, the unique coalition reaching each row; this is
// decision-equivalent to all subsets under additive positive utilities when
// transitions depend on the deviator only. all_subsets forces the exhaustive
// scan (small markets).
CheckResult check_self_enforcing(const MarketSpec& spec, const ProcessAutomaton& a,
                                 bool all_subsets = false);

// Stage minmax against a hospital when recommendations range over all
// student-rational matchings (cap-guarded enumeration).
struct MinmaxResult {
  std::vector<double> value;         // per hospital
  std::vector<Matching> witness;     // argmin recommendation per hospital
};
MinmaxResult naive_minmax(const MarketSpec& spec, int cap_students = 10);

// Same, but recommendations must keep every peeled mutual-favorite pair intact;
// locked hospitals get their locked-group utility and their witness is any
// compatible matching.
MinmaxResult reduced_minmax(const MarketSpec& spec, const TopCoalitionSequence& seq,
                            int cap_students = 10);

// Requires a to pass check_self_enforcing (else input_error). True when every
// state's output gives each peeled pair exactly its locked group.
bool verify_top_coalition_lock(const MarketSpec& spec, const ProcessAutomaton& a,
                               const TopCoalitionSequence& seq);

// Smallest discount at which `make(delta)` passes the checker, within tol.
struct BisectResult {
  enum Status { Found, AlwaysPasses, NeverPasses } status = NeverPasses;
  double delta = 0.0;
};
BisectResult min_delta_bisect(const std::function<bool(double)>& passes, double lo = 0.0,
                              double hi = 0.999, double tol = 1e-3);

}  // namespace remat
