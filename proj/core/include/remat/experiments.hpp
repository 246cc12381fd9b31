#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "remat/large_market.hpp"

namespace remat {

// One CSV row: a named statistic with an optional standard error (0 when the
// statistic is exact or a count).
struct StatRow {
  std::string statistic;
  double value = 0.0;
  double stderr_value = 0.0;
};

struct ExperimentResult {
  std::string experiment;
  int n = 0;
  long trials = 0;
  std::vector<StatRow> rows;
};

// Columns: experiment,n,trials,statistic,value,stderr
std::string to_csv(const ExperimentResult& r);

// Fraction of fresh markets in which the first tier-1 hospital has strictly
// more than q near-ideal fans: tier-1 students who rank it first among tier-1
// hospitals and whose idiosyncratic fit clears 1 - eps.
ExperimentResult mc_top_fill_probability(const TierConfig& cfg, int n, double eps,
                                         long trials, std::uint64_t seed);

// Pooled histogram of the ranks (in the punished hospital's own preference
// order) of the students it receives under the punitive draft; single hospital
// tier only, ranks run 1..n*q.
ExperimentResult mc_rank_distribution(const TierConfig& cfg, int n, long trials,
                                      std::uint64_t seed);

// Paired per-trial payoff of the first hospital under the seat-lottery reward
// round versus under its own punitive round, plus the paired gap.
ExperimentResult mc_punishment_gap(const TierConfig& cfg, int n, long trials,
                                   std::uint64_t seed);

// Probability that the worst ceil(gamma * pool) students of the first
// hospital's achievable pool all have idiosyncratic fit below eps for it.
ExperimentResult mc_clustering(const TierConfig& cfg, int n, double eps, double gamma,
                               long trials, std::uint64_t seed);

// Drafting order knob for the deviation scan; Reversed deliberately breaks the
// draft so tests can confirm the scan actually catches violations.
enum class DraftOrder { ByTargetUtility, Reversed };

struct NoDevResult {
  ExperimentResult stats;  // rows: trials scanned, violations
  bool pass = true;
  std::string counterexample;  // first violation, empty on pass
};

// Per trial and per tier-1 hospital, scans every feasible stage coalition
// against that hospital's punitive matching and flags any strict profit or any
// mismatch between the drafted set and the hospital's best response.
NoDevResult no_deviation_from_punishment(const TierConfig& cfg, int n, long trials,
                                         std::uint64_t seed,
                                         DraftOrder order = DraftOrder::ByTargetUtility);

}  // namespace remat
