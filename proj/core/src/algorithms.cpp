#include "remat/algorithms.hpp"

#include <algorithm>
#include <numeric>

namespace remat {

namespace {

std::vector<char> member_mask(int n, const std::vector<int>& subset, bool default_all) {
  std::vector<char> mask(n, subset.empty() && default_all ? 1 : 0);
  for (int i : subset) mask[i] = 1;
  return mask;
}

}  // namespace

Matching deferred_acceptance(const MarketSpec& spec, ProposingSide side, const DaOptions& opt) {
  const int nh = spec.hospitals();
  const int nw = spec.students();
  std::vector<char> h_in = member_mask(nh, opt.hospital_subset, true);
  std::vector<char> w_in = member_mask(nw, opt.student_subset, true);
  std::vector<int> cap = opt.quota_override.empty() ? spec.quota : opt.quota_override;

  std::vector<int> assign(nw, kUnmatched);

  if (side == ProposingSide::Students) {
    // held[h] kept worst-first so eviction is O(size).
    std::vector<std::vector<int>> held(nh);
    std::vector<int> next(nw, 0);
    std::vector<int> queue;
    for (int w = 0; w < nw; ++w)
      if (w_in[w]) queue.push_back(w);
    while (!queue.empty()) {
      int w = queue.back();
      queue.pop_back();
      while (next[w] < static_cast<int>(spec.pref[w].size())) {
        int h = spec.pref[w][next[w]++];
        if (!h_in[h] || cap[h] == 0) continue;
        auto& hw = held[h];
        if (static_cast<int>(hw.size()) < cap[h]) {
          hw.push_back(w);
          std::sort(hw.begin(), hw.end(),
                    [&](int a, int b) { return spec.utility[h][a] < spec.utility[h][b]; });
          break;
        }
        if (spec.utility[h][w] > spec.utility[h][hw.front()]) {
          int evicted = hw.front();
          hw.front() = w;
          std::sort(hw.begin(), hw.end(),
                    [&](int a, int b) { return spec.utility[h][a] < spec.utility[h][b]; });
          queue.push_back(evicted);
          break;
        }
      }
    }
    for (int h = 0; h < nh; ++h)
      for (int w : held[h]) assign[w] = h;
    return make_matching(spec, assign);
  }

  // Hospital-proposing: each hospital works down its utility order, proposing
  // to fill its quota; students hold their best acceptable offer so far.
  std::vector<int> cursor(nh, 0);
  std::vector<int> held_count(nh, 0);
  std::vector<int> holds(nw, kUnmatched);
  bool moved = true;
  while (moved) {
    moved = false;
    for (int h = 0; h < nh; ++h) {
      if (!h_in[h]) continue;
      while (held_count[h] < cap[h] && cursor[h] < static_cast<int>(spec.by_utility[h].size())) {
        int w = spec.by_utility[h][cursor[h]++];
        if (!w_in[w] || !spec.acceptable(w, h)) continue;
        int cur = holds[w];
        if (cur == h) continue;
        if (cur == kUnmatched || spec.prefers(w, h, cur)) {
          if (cur != kUnmatched) --held_count[cur];
          holds[w] = h;
          ++held_count[h];
          moved = true;
        }
      }
    }
    // A hospital that lost a held student must resume proposing.
    for (int h = 0; h < nh; ++h)
      if (h_in[h] && held_count[h] < cap[h] && cursor[h] < static_cast<int>(spec.by_utility[h].size()))
        moved = true;
  }
  for (int w = 0; w < nw; ++w)
    if (holds[w] != kUnmatched) assign[w] = holds[w];
  return make_matching(spec, assign);
}

TopCoalitionSequence top_coalition_sequence(const MarketSpec& spec) {
  TopCoalitionSequence seq;
  std::vector<char> h_left(spec.hospitals(), 1);
  std::vector<char> w_left(spec.students(), 1);
  for (;;) {
    int found = -1;
    std::vector<int> group;
    for (int h = 0; h < spec.hospitals() && found < 0; ++h) {
      if (!h_left[h]) continue;
      // Favorite feasible group among remaining students.
      group.clear();
      for (int w : spec.by_utility[h]) {
        if (static_cast<int>(group.size()) == spec.quota[h]) break;
        if (w_left[w]) group.push_back(w);
      }
      if (group.empty()) continue;
      bool mutual = true;
      for (int w : group) {
        if (!spec.acceptable(w, h)) {
          mutual = false;
          break;
        }
        for (int h2 = 0; h2 < spec.hospitals() && mutual; ++h2)
          if (h2 != h && h_left[h2] && spec.prefers(w, h2, h)) mutual = false;
        if (!mutual) break;
      }
      if (mutual) found = h;
    }
    if (found < 0) break;
    std::sort(group.begin(), group.end());
    h_left[found] = 0;
    for (int w : group) w_left[w] = 0;
    seq.pairs.push_back(TopPair{found, group});
  }
  for (int h = 0; h < spec.hospitals(); ++h)
    if (h_left[h]) seq.residual_hospitals.push_back(h);
  for (int w = 0; w < spec.students(); ++w)
    if (w_left[w]) seq.residual_students.push_back(w);
  return seq;
}

std::vector<Seat> seats_of(const MarketSpec& spec, const std::vector<int>& hospitals) {
  std::vector<Seat> seats;
  for (int h : hospitals)
    for (int s = 0; s < spec.quota[h]; ++s) seats.push_back(Seat{h, s});
  return seats;
}

Matching punitive_matching(const MarketSpec& spec, const std::vector<int>& hospitals,
                           const std::vector<int>& students, int target) {
  std::vector<int> open(spec.hospitals(), 0);
  for (int h : hospitals) open[h] = spec.quota[h];
  std::vector<char> w_in = member_mask(spec.students(), students, false);
  std::vector<int> assign(spec.students(), kUnmatched);
  int seats_left = 0;
  for (int h : hospitals) seats_left += spec.quota[h];

  // Students are served in the target's utility order; each takes her favorite
  // open hospital, which drains exactly one seat per step.
  for (int w : spec.by_utility[target]) {
    if (seats_left == 0) break;
    if (!w_in[w]) continue;
    for (int h : spec.pref[w]) {
      if (open[h] > 0) {
        --open[h];
        --seats_left;
        assign[w] = h;
        break;
      }
    }
  }
  return make_matching(spec, assign);
}

Matching serial_dictatorship_seats(const MarketSpec& spec, const std::vector<int>& hospitals,
                                   const std::vector<int>& students,
                                   const std::vector<Seat>& order) {
  std::vector<char> w_free = member_mask(spec.students(), students, false);
  std::vector<char> h_in = member_mask(spec.hospitals(), hospitals, false);
  std::vector<int> assign(spec.students(), kUnmatched);
  for (const Seat& seat : order) {
    if (!h_in[seat.hospital]) throw input_error("serial_dictatorship_seats: seat outside market");
    for (int w : spec.by_utility[seat.hospital]) {
      if (w_free[w] && spec.acceptable(w, seat.hospital)) {
        w_free[w] = 0;
        assign[w] = seat.hospital;
        break;
      }
    }
  }
  return make_matching(spec, assign);
}

std::vector<Seat> random_seat_order(const MarketSpec& spec, const std::vector<int>& hospitals,
                                    Rng& rng) {
  std::vector<Seat> seats = seats_of(spec, hospitals);
  rng.shuffle(seats);
  return seats;
}

Matching layered_matching(const MarketSpec& spec, const std::vector<int>& layer_of_hospital,
                          int k, const LayeredOptions& opt) {
  if (static_cast<int>(layer_of_hospital.size()) != spec.hospitals())
    throw input_error("layered_matching: layer vector length mismatch");
  std::vector<int> upper, layer_k, lower;
  for (int h = 0; h < spec.hospitals(); ++h) {
    if (layer_of_hospital[h] < k) upper.push_back(h);
    else if (layer_of_hospital[h] == k) layer_k.push_back(h);
    else lower.push_back(h);
  }

  std::vector<int> assign(spec.students(), kUnmatched);
  std::vector<int> free_students;
  for (int w = 0; w < spec.students(); ++w) free_students.push_back(w);

  auto absorb = [&](const Matching& part) {
    std::vector<int> still_free;
    for (int w : free_students) {
      if (part.assign[w] != kUnmatched) assign[w] = part.assign[w];
      else still_free.push_back(w);
    }
    free_students = std::move(still_free);
  };

  if (!upper.empty()) {
    DaOptions da;
    da.hospital_subset = upper;
    da.student_subset = free_students;
    absorb(deferred_acceptance(spec, ProposingSide::Students, da));
  }

  switch (opt.rule) {
    case InnerRule::ReducedDa: {
      DaOptions da;
      da.hospital_subset = layer_k;
      da.student_subset = free_students;
      da.quota_override = spec.quota;
      for (int h : layer_k) da.quota_override[h] = std::max(0, spec.quota[h] - 1);
      absorb(deferred_acceptance(spec, ProposingSide::Students, da));
      break;
    }
    case InnerRule::ZeroQuota: {
      if (opt.focus_hospital == kUnmatched)
        throw input_error("layered_matching: ZeroQuota needs a focus hospital");
      DaOptions da;
      da.hospital_subset = layer_k;
      da.student_subset = free_students;
      da.quota_override = spec.quota;
      da.quota_override[opt.focus_hospital] = 0;
      absorb(deferred_acceptance(spec, ProposingSide::Students, da));
      break;
    }
    case InnerRule::Punitive: {
      if (opt.focus_hospital == kUnmatched)
        throw input_error("layered_matching: Punitive needs a focus hospital");
      absorb(punitive_matching(spec, layer_k, free_students, opt.focus_hospital));
      break;
    }
    case InnerRule::Rsd: {
      if (opt.seat_order == nullptr)
        throw input_error("layered_matching: Rsd needs a seat order");
      absorb(serial_dictatorship_seats(spec, layer_k, free_students, *opt.seat_order));
      break;
    }
  }

  if (!lower.empty()) {
    DaOptions da;
    da.hospital_subset = lower;
    da.student_subset = free_students;
    absorb(deferred_acceptance(spec, ProposingSide::Students, da));
  }
  return make_matching(spec, assign);
}

}  // namespace remat
