// Release gate for the toolkit. Each criterion below re-derives a frozen
// result from scratch, prints exactly one PASS/FAIL line, and must finish
// inside its own wall-clock budget. Run with no arguments for the full gate
// or pass criterion names to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "remat/algorithms.hpp"
#include "remat/automaton.hpp"
#include "remat/automaton_io.hpp"
#include "remat/experiments.hpp"
#include "remat/folk.hpp"
#include "remat/large_market.hpp"
#include "remat/market.hpp"
#include "remat/market_io.hpp"
#include "remat/repeated.hpp"
#include "remat/rng.hpp"

#include "support.hpp"

using namespace remat;

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

std::string fmt(double v) { return format_double(v); }

std::uint64_t subseed(std::uint64_t master, std::uint64_t idx) {
  return Rng::stream(master, idx).next_u64();
}

TierConfig flat_config(int quota) {
  TierConfig cfg;
  cfg.hospital_shares = {1.0};
  cfg.student_shares = {1.0};
  cfg.common_values = {0.0};
  cfg.quota = quota;
  return cfg;
}

MarketSpec benchmark(bool common_order) { return benchmark_market(common_order); }

// Greedy random student-rational matching: every student draws among staying
// home and the hospitals still open for them.
Matching random_ir_matching(const MarketSpec& spec, Rng& rng) {
  std::vector<int> assign(spec.students(), kUnmatched);
  std::vector<int> load(spec.hospitals(), 0);
  for (int w = 0; w < spec.students(); ++w) {
    std::vector<int> open{kUnmatched};
    for (int h : spec.pref[w])
      if (load[h] < spec.quota[h]) open.push_back(h);
    const int pick = open[(std::size_t)rng.next_below(open.size())];
    assign[w] = pick;
    if (pick != kUnmatched) ++load[pick];
  }
  return make_matching(spec, std::move(assign));
}

// ---------------------------------------------------------------------------

std::string crit_delta_star() {
  const MarketSpec spec = load_market(data_path("table1.market"));
  const NamedMatchings ms = load_matchings(spec, data_path("table1.matchings"));
  const ProcessAutomaton base = build_trigger_process(
      spec, find_matching(ms, "m0"), find_matching(ms, "mW"), 0.8);
  const auto passes = [&](double d) {
    ProcessAutomaton b = base;
    b.discount = d;
    return check_self_enforcing(spec, b).self_enforcing;
  };
  const BisectResult r = min_delta_bisect(passes);
  require(r.status == BisectResult::Found, "no passing threshold located");
  require(std::abs(r.delta - 0.75) <= 1e-3,
          "threshold " + fmt(r.delta) + " is not 0.75 within 1e-3");
  return "threshold " + fmt(r.delta);
}

std::string crit_stable_sets() {
  const MarketSpec t1 = load_market(data_path("table1.market"));
  const NamedMatchings m1 = load_matchings(t1, data_path("table1.matchings"));
  const Matching &mF = find_matching(m1, "mF"), &mW = find_matching(m1, "mW");
  std::set<std::vector<int>> got;
  for (const Matching& m : enumerate_stable_matchings(t1)) got.insert(m.assign);
  require(got == std::set<std::vector<int>>{mF.assign, mW.assign},
          "three-hospital market: stable set is not exactly {mF, mW}");
  require(deferred_acceptance(t1, ProposingSide::Students).assign == mW.assign,
          "student-proposing extreme is not mW");
  require(deferred_acceptance(t1, ProposingSide::Hospitals).assign == mF.assign,
          "hospital-proposing extreme is not mF");

  const MarketSpec t2 = load_market(data_path("table2.market"));
  const NamedMatchings m2 = load_matchings(t2, data_path("table2.matchings"));
  const Matching& mstar = find_matching(m2, "mstar");
  const std::vector<Matching> s2 = enumerate_stable_matchings(t2);
  require(s2.size() == 1 && s2[0].assign == mstar.assign,
          "common-ranking market: stable set is not exactly {mstar}");
  require(deferred_acceptance(t2, ProposingSide::Students).assign == mstar.assign &&
              deferred_acceptance(t2, ProposingSide::Hospitals).assign == mstar.assign,
          "both proposing sides should land on mstar");
  return "both markets enumerate to their frozen stable sets";
}

std::string crit_top_coalitions() {
  const TopCoalitionSequence t2 = top_coalition_sequence(benchmark(true));
  require(t2.pairs.size() == 3, "common-ranking market should peel three pairs");
  require(t2.pairs[0].hospital == 0 && t2.pairs[0].students == std::vector<int>{0, 1},
          "first peel should hand f1 its two favorites");
  require(t2.pairs[1].hospital == 1 && t2.pairs[1].students == std::vector<int>{2, 3},
          "second peel should hand f2 the next two");
  require(t2.pairs[2].hospital == 2 && t2.pairs[2].students == std::vector<int>{4},
          "third peel should leave fr the last student");
  require(top_coalition_sequence(benchmark(false)).pairs.empty(),
          "split-ranking market should not peel");
  require(top_coalition_sequence(load_market(data_path("example1.market"))).pairs.empty(),
          "two-hospital example should not peel");
  return "peeling order matches on all three fixtures";
}

std::string crit_rural_hospital() {
  Rng rng(20240804);
  int compared = 0;
  for (int i = 0; i < 500; ++i) {
    const MarketSpec spec = random_small_market(rng);
    const std::vector<Matching> stable = enumerate_stable_matchings(spec);
    require(!stable.empty(), "sampled market has no stable matching");
    for (int h = 0; h < spec.hospitals(); ++h) {
      bool underfilled = false;
      for (const Matching& m : stable)
        underfilled = underfilled || (int)m.roster[h].size() < spec.quota[h];
      if (!underfilled) continue;
      ++compared;
      for (const Matching& m : stable)
        require(m.roster[h] == stable[0].roster[h],
                "market " + std::to_string(i) + ": underfilled hospital " +
                    spec.hospital_names[h] + " changes students across stable matchings");
    }
  }
  require(compared > 0, "sample produced no underfilled hospitals to compare");
  return std::to_string(compared) + " underfilled rosters identical across stable sets";
}

std::string crit_lock_consistency() {
  Rng rng(20240805);
  const double deltas[3] = {0.85, 0.95, 0.99};
  int kept = 0;
  long attempts = 0;
  while (kept < 200) {
    require(++attempts <= 40000, "automaton sampling stalled");
    const MarketSpec spec = random_small_market(rng);
    const TopCoalitionSequence seq = top_coalition_sequence(spec);
    if (seq.pairs.empty()) continue;
    const std::vector<Matching> stable = enumerate_stable_matchings(spec);
    if (stable.empty()) continue;
    const double d = deltas[kept % 3];
    ProcessAutomaton a;
    switch (kept % 3) {
      case 0:
        a = stationary_process(spec, stable[(std::size_t)rng.next_below(stable.size())], d);
        break;
      case 1: {
        const Matching target = rng.next_below(2) == 0
                                    ? stable[(std::size_t)rng.next_below(stable.size())]
                                    : random_ir_matching(spec, rng);
        a = build_trigger_process(spec, target, stable[0], d);
        break;
      }
      default: {
        MatchingLottery l;
        for (const Matching& m : stable)
          l.outcomes.emplace_back(m, 1.0 / (double)stable.size());
        try {
          const PunishmentScheme s = find_player_specific_punishments(spec, l);
          a = build_folk_automaton(spec, s, d);
        } catch (const input_error&) {
          continue;  // no certificate for this market, draw another
        }
        break;
      }
    }
    if (!check_self_enforcing(spec, a).self_enforcing) continue;
    require(verify_top_coalition_lock(spec, a, seq),
            "a self-enforcing process broke a locked pair (attempt " +
                std::to_string(attempts) + ")");
    ++kept;
  }
  return "200 self-enforcing processes all honor the peel (" +
         std::to_string(attempts) + " sampled)";
}

std::string crit_folk_construction() {
  const MarketSpec spec = load_market(data_path("table1.market"));
  const NamedMatchings ms = load_matchings(spec, data_path("table1.matchings"));
  MatchingLottery base;
  base.outcomes.emplace_back(find_matching(ms, "m0"), 1.0);
  const PunishmentScheme s = find_player_specific_punishments(spec, base);
  const ProcessAutomaton a = build_folk_automaton(spec, s, 0.95);
  const auto passes = [&](double d) {
    ProcessAutomaton b = a;
    b.discount = d;
    return check_self_enforcing(spec, b).self_enforcing;
  };
  require(passes(0.95), "construction fails its own audit at discount 0.95");
  require(!passes(0.05), "construction should not survive at discount 0.05");
  const BisectResult r = min_delta_bisect(passes);
  require(r.status == BisectResult::Found, "no boundary discount located");
  require(r.delta > 0.05 && r.delta < 0.95, "boundary " + fmt(r.delta) + " out of range");
  require(passes(std::min(r.delta + 0.01, 0.999)), "not passing just above the boundary");
  require(!passes(std::max(r.delta - 0.01, 0.0)), "still passing just below the boundary");
  return "patience boundary " + fmt(r.delta) + ", spell length " +
         std::to_string(s.punishment_length);
}

std::string crit_rank_uniformity() {
  const ExperimentResult r = mc_rank_distribution(flat_config(1), 10, 100000, 20240807);
  require(r.rows.size() == 11, "expected ten rank rows plus the distance row");
  double worst = 0.0;
  for (int b = 0; b < 10; ++b) {
    const double dev = std::abs(r.rows[b].value - 0.1);
    worst = std::max(worst, dev);
    require(dev <= 0.01, r.rows[b].statistic + " frequency " + fmt(r.rows[b].value) +
                             " leaves 0.1 +- 0.01");
  }
  require(r.rows[10].statistic == "tv_uniform", "distance row missing");
  require(r.rows[10].value < 0.02,
          "total variation " + fmt(r.rows[10].value) + " reaches 0.02");
  return "max rank deviation " + fmt(worst) + ", tv " + fmt(r.rows[10].value);
}

std::string crit_nodev_exact() {
  struct Job {
    TierConfig cfg;
    int n;
  };
  std::vector<Job> jobs{{flat_config(1), 6}, {flat_config(2), 4}, {flat_config(3), 3}};
  TierConfig tiered;
  tiered.hospital_classes = 2;
  tiered.hospital_shares = {0.5, 0.5};
  tiered.student_classes = 2;
  tiered.student_shares = {0.5, 0.5};
  tiered.common_values = {1.5, 0.0};
  tiered.quota = 2;
  jobs.push_back({tiered, 4});

  long trials = 0;
  std::uint64_t seed = 20240808;
  for (const Job& job : jobs) {
    const NoDevResult r = no_deviation_from_punishment(job.cfg, job.n, 250, seed++);
    require(r.pass, r.counterexample);
    trials += 250;
  }
  // The scan must be able to fail: a deliberately reversed draft is caught.
  const NoDevResult rev =
      no_deviation_from_punishment(flat_config(2), 4, 20, 97, DraftOrder::Reversed);
  require(!rev.pass && !rev.counterexample.empty(),
          "reversed-draft oracle went undetected, the scan is vacuous");
  return std::to_string(trials) + " trials with zero profitable rehires";
}

std::string crit_reward_gap() {
  const TierConfig cfg = flat_config(1);
  std::vector<double> gaps;
  std::string detail;
  for (int n : {10, 40, 80}) {
    const ExperimentResult r = mc_punishment_gap(cfg, n, 10000, 20240809 + n);
    const StatRow& gap = r.rows[2];
    require(gap.statistic == "gap", "gap row missing");
    require(gap.value > 0.0, "gap at n=" + std::to_string(n) + " is not positive");
    require(gap.value >= 5.0 * gap.stderr_value,
            "gap at n=" + std::to_string(n) + " below five standard errors");
    gaps.push_back(gap.value);
    detail += (detail.empty() ? "" : ", ") + std::to_string(n) + ": " + fmt(gap.value);
  }
  const double lo = *std::min_element(gaps.begin(), gaps.end());
  const double hi = *std::max_element(gaps.begin(), gaps.end());
  require(hi <= 2.0 * lo, "gap drifts across sizes: " + fmt(lo) + " vs " + fmt(hi));
  return "gaps " + detail;
}

std::string crit_capacity_desk() {
  TierConfig cfg = flat_config(2);
  const std::uint64_t seed = 20240810;
  const RealizedMarket mk = generate_market(cfg, 50, subseed(seed, 0));
  const CapacityProcess cp =
      build_capacity_reduction_process(mk, 1, 0.5, 0.9, 6, 0.95, 4, subseed(seed, 1));
  require(cp.report.certified, "certificate failed: " + cp.report.note);
  require(check_self_enforcing(mk.spec, cp.automaton).self_enforcing,
          "deviation audit rejected the certified process");
  Rng rng(seed);
  const std::vector<int> visited = simulate_on_path(mk.spec, cp.automaton, 10000, rng);
  const std::vector<int> tier = mk.hospitals_of_class(1);
  // Fraction of (period, desk) pairs running below full capacity.
  long reduced = 0;
  for (int s : visited) {
    const Matching& out = cp.automaton.matchings[cp.automaton.states[s].output];
    for (int f : tier)
      reduced += (int)out.roster[f].size() < mk.spec.quota[f];
  }
  const double freq = (double)reduced / ((double)visited.size() * (double)tier.size());
  require(std::abs(freq - 0.5) <= 0.02,
          "reduced-capacity frequency " + fmt(freq) + " leaves 0.5 +- 0.02");
  return "certified, reduced-capacity frequency " + fmt(freq);
}

std::string crit_elite_audit() {
  const TierConfig cfg = load_tier_config(data_path("elite.tiers"));
  const std::uint64_t seed = 20240811;
  const RealizedMarket mk = generate_market(cfg, 200, subseed(seed, 0));
  require(mk.hospitals_of_class(1).size() == 2, "expected two top-class hospitals");
  require(mk.students_of_class(1).size() == 80, "expected eighty top-class students");
  const CapacityProcess cp =
      build_capacity_reduction_process(mk, 1, 0.5, 0.9, 0, 0.8, 4, subseed(seed, 1));
  const EliteAuditReport rep = elite_deviation_audit(mk, cp.automaton, 0.8, 0.125);
  require(!rep.rows.empty(), "no reduced-quota states to audit");
  double lo = rep.rows.front().gain;
  for (const EliteAuditRow& row : rep.rows) {
    require(mk.hospital_class_of[row.hospital] == 1,
            "audited hospital is not in the top class");
    require(row.gain > 0.0, "state " + cp.automaton.states[row.state].name + ": gain " +
                                fmt(row.gain) + " is not strictly positive");
    lo = std::min(lo, row.gain);
  }
  return std::to_string(rep.rows.size()) + " reduced states, min gain " + fmt(lo);
}

// ---------------------------------------------------------------------------

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<std::string()> body;
};

const std::vector<Criterion>& all_criteria() {
  static const std::vector<Criterion> table = {
      {"delta_star", 1.0, crit_delta_star},
      {"stable_sets", 1.0, crit_stable_sets},
      {"top_coalitions", 1.0, crit_top_coalitions},
      {"rural_hospital", 120.0, crit_rural_hospital},
      {"lock_consistency", 120.0, crit_lock_consistency},
      {"folk_construction", 30.0, crit_folk_construction},
      {"rank_uniformity", 120.0, crit_rank_uniformity},
      {"nodev_exact", 120.0, crit_nodev_exact},
      {"reward_gap", 300.0, crit_reward_gap},
      {"capacity_desk", 300.0, crit_capacity_desk},
      {"elite_audit", 60.0, crit_elite_audit},
  };
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> wanted(argv + 1, argv + argc);
  for (const std::string& w : wanted) {
    bool known = false;
    for (const Criterion& c : all_criteria()) known = known || w == c.name;
    if (!known) {
      std::cerr << "unknown criterion " << w << "\n";
      return 2;
    }
  }
  bool all_ok = true;
  for (const Criterion& c : all_criteria()) {
    if (!wanted.empty() && wanted.count(c.name) == 0) continue;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    try {
      detail = c.body();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    if (ok && dt.count() > c.budget_seconds) {
      ok = false;
      detail = "finished in " + std::to_string(dt.count()) + "s, budget " +
               std::to_string(c.budget_seconds) + "s";
    }
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2fs", dt.count());
    std::cout << (ok ? "PASS " : "FAIL ") << c.name << " (" << timing << "): " << detail
              << "\n";
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
