#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "remat/automaton.hpp"
#include "remat/large_market.hpp"
#include "remat/repeated.hpp"

namespace remat {

struct MatchingLottery {
  std::vector<std::pair<Matching, double>> outcomes;  // weights sum to 1
};

double lottery_utility(const MarketSpec& spec, int h, const MatchingLottery& l);

// Player-specific punishment data around a base lottery: for every hospital
// not locked by mutual-favorite peeling, a re-entry lottery that hurts exactly
// that hospital, a stage-minmax recommendation to play while punishing it, and
// a punishment length.
struct PunishmentScheme {
  TopCoalitionSequence peel;
  std::vector<int> free_hospitals;            // ascending, not peeled
  MatchingLottery base;                       // long-run target
  std::vector<MatchingLottery> reentry;       // [h], empty for locked hospitals
  std::vector<Matching> minmax_matching;      // [h], meaningful for free hospitals
  std::vector<double> reduced_minmax;         // [h]
  int punishment_length = 1;
};

// Throws input_error when a strict-inequality requirement fails: each free
// hospital is above its minmax under every lottery, strictly worst off under
// its own re-entry lottery, and strictly below the base under it.
void validate_scheme(const MarketSpec& spec, const PunishmentScheme& s);

// Searches mixes of the base with per-hospital punishment recommendations
// (assigned-utility minimizers over the peel-respecting student-rational set)
// across a deterministic grid of mixing weights. Throws input_error when the
// base is not strictly above every free hospital's reduced minmax or when the
// budget runs out.
PunishmentScheme find_player_specific_punishments(const MarketSpec& spec,
                                                  const MatchingLottery& base,
                                                  int search_budget = 64,
                                                  int cap_students = 10);

// Smallest L with sum_{i=1..L} delta^i * margin > need; 0 when no finite L
// works at this discount.
int punishment_length_for(double delta, double margin, double need, int max_len = 4000);

// Rebuilds the undiscounted default length from the scheme's own margins.
int default_punishment_length(const MarketSpec& spec, const PunishmentScheme& s);

// Regime automaton: play the base lottery; a deviation by a free hospital
// starts its L-period punishment spell, after which that hospital's re-entry
// lottery runs forever (until the next deviation). Outputs are structurally
// validated against the peel before returning.
ProcessAutomaton build_folk_automaton(const MarketSpec& spec, const PunishmentScheme& s,
                                      double delta);

// Capacity-rotation process on a realized tiered market: on path, class-k
// hospitals alternate between everyone hiring one seat short (probability p0)
// and a seat-lottery reward round; deviators are held to their punitive
// matching for L periods and re-enter through a regime that shuts their own
// capacity out with probability 1-pr each period.
struct CapacityReport {
  struct PerHospital {
    int hospital = kUnmatched;
    std::string name;
    double base_value = 0.0;    // expected payoff under the on-path lottery
    double own_reentry = 0.0;   // expected payoff under own re-entry regime
    double punish_flow = 0.0;   // stage payoff while punished
    double best_stage = 0.0;    // unconstrained best stage payoff
  };
  int tier = 0;
  int quota = 0;
  std::vector<PerHospital> rows;
  double margin_reentry_vs_punish = 0.0;  // min over f,f' of reentry(f') minus punish(f)
  double margin_own_gap = 0.0;            // min over f!=f' of reentry_f(f') minus reentry_f(f)
  double margin_base_vs_reentry = 0.0;    // min over f of base(f) minus own reentry(f)
  double temptation = 0.0;  // largest one-shot upgrade available from any played matching
  int punishment_length = 0;
  bool certified = false;
  std::string note;
  std::string text() const;
};

struct CapacityProcess {
  ProcessAutomaton automaton;
  CapacityReport report;
};

CapacityProcess build_capacity_reduction_process(const RealizedMarket& mk, int k, double p0,
                                                 double pr, int punishment_length,  // 0 = auto
                                                 double delta, int reward_draws,
                                                 std::uint64_t seed);

// For every process state where a top-class hospital holds fewer students than
// its quota, value the grab-the-fans deviation plan: this period keep the
// recommended students plus the best top-class student matched outside the top
// class, from then on always hire the best eps-fans. Positive gain means the
// process cannot deter the deviation.
struct EliteAuditRow {
  int state = -1;
  int hospital = kUnmatched;
  int addon_student = -1;
  double plan_value = 0.0;
  double process_value = 0.0;
  double gain = 0.0;
};
struct EliteAuditReport {
  double eps = 0.0;
  std::vector<EliteAuditRow> rows;
  std::string text(const MarketSpec& spec, const ProcessAutomaton& a) const;
};
EliteAuditReport elite_deviation_audit(const RealizedMarket& mk, const ProcessAutomaton& a,
                                       double delta, double eps);

}  // namespace remat
