#pragma once

#include <cstdint>
#include <vector>

#include "remat/market.hpp"
#include "remat/rng.hpp"

namespace remat {

enum class ProposingSide { Students, Hospitals };

// Classic deferred acceptance. Student-proposing yields the student-optimal
// stable matching, hospital-proposing the hospital-optimal one. Optional
// overrides restrict quotas or participants without copying the spec.
struct DaOptions {
  std::vector<int> quota_override;      // empty = spec quotas
  std::vector<int> hospital_subset;     // empty = all hospitals
  std::vector<int> student_subset;      // empty = all students
};
Matching deferred_acceptance(const MarketSpec& spec, ProposingSide side,
                             const DaOptions& opt = {});

// One mutual-favorite pair: a hospital together with its utility-maximal
// feasible group such that every member ranks that hospital above every other
// remaining option.
struct TopPair {
  int hospital = kUnmatched;
  std::vector<int> students;  // ascending
};

struct TopCoalitionSequence {
  std::vector<TopPair> pairs;             // in peeling order
  std::vector<int> residual_hospitals;    // ascending
  std::vector<int> residual_students;     // ascending
};

// Iteratively peels mutual-favorite pairs; when several hospitals qualify in
// one phase the smallest index wins. Pairs with empty groups are not formed.
TopCoalitionSequence top_coalition_sequence(const MarketSpec& spec);

// Seats as unit-capacity hospital clones, identified by (hospital, slot).
struct Seat {
  int hospital = kUnmatched;
  int slot = 0;
};
std::vector<Seat> seats_of(const MarketSpec& spec, const std::vector<int>& hospitals);

// Matching that holds `target` down: walk target's preference order over the
// participating students; each student in turn takes her favorite hospital
// that still has an open acceptable seat. Students with no acceptable open
// hospital stay unmatched.
Matching punitive_matching(const MarketSpec& spec, const std::vector<int>& hospitals,
                           const std::vector<int>& students, int target);

// Seats pick in `order`; each takes its hospital's favorite remaining student
// among those who find the hospital acceptable.
Matching serial_dictatorship_seats(const MarketSpec& spec, const std::vector<int>& hospitals,
                                   const std::vector<int>& students,
                                   const std::vector<Seat>& order);
std::vector<Seat> random_seat_order(const MarketSpec& spec,
                                    const std::vector<int>& hospitals, Rng& rng);

// Three-step layered template around a distinguished hospital layer k
// (hospitals are grouped by caller-provided layer index, 1-based):
//   1. student-proposing DA between layers < k and all students,
//   2. an inner rule on layer k over the leftover students,
//   3. student-proposing DA between layers > k and what remains.
enum class InnerRule { ReducedDa, ZeroQuota, Punitive, Rsd };
struct LayeredOptions {
  InnerRule rule = InnerRule::ReducedDa;
  int focus_hospital = kUnmatched;        // target of ZeroQuota / Punitive
  const std::vector<Seat>* seat_order = nullptr;  // required for Rsd
};
Matching layered_matching(const MarketSpec& spec, const std::vector<int>& layer_of_hospital,
                          int k, const LayeredOptions& opt);

}  // namespace remat
