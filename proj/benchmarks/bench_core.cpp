#include <benchmark/benchmark.h>

#include <vector>

#include "remat/algorithms.hpp"
#include "remat/experiments.hpp"
#include "remat/folk.hpp"
#include "remat/large_market.hpp"
#include "remat/market_io.hpp"
#include "remat/repeated.hpp"

namespace {

remat::TierConfig flat(int quota) {
  remat::TierConfig cfg;
  cfg.hospital_shares = {1.0};
  cfg.student_shares = {1.0};
  cfg.common_values = {0.0};
  cfg.quota = quota;
  return cfg;
}

// Three hospitals, five students, the split-ranking benchmark market.
remat::MarketSpec small_market() {
  remat::MarketSpec spec;
  spec.hospital_names = {"f1", "f2", "fr"};
  spec.quota = {2, 2, 2};
  spec.utility = {{5, 4, 3, 2, 1}, {2, 4, 5, 3, 1}, {2, 5, 3, 4, 1}};
  spec.student_names = {"w1", "w2", "w3", "w4", "w5"};
  spec.pref = {{1, 0, 2}, {1, 0, 2}, {0, 1, 2}, {0, 1, 2}, {0, 1, 2}};
  spec.finalize();
  return spec;
}

void BM_DeferredAcceptance(benchmark::State& state) {
  const remat::RealizedMarket mk = remat::generate_market(flat(2), (int)state.range(0), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        remat::deferred_acceptance(mk.spec, remat::ProposingSide::Students));
  }
}
BENCHMARK(BM_DeferredAcceptance)->Arg(10)->Arg(40)->Arg(80);

void BM_PunitiveDraft(benchmark::State& state) {
  const remat::RealizedMarket mk = remat::generate_market(flat(2), (int)state.range(0), 7);
  std::vector<int> hospitals(mk.spec.hospitals()), students(mk.spec.students());
  for (int h = 0; h < mk.spec.hospitals(); ++h) hospitals[h] = h;
  for (int w = 0; w < mk.spec.students(); ++w) students[w] = w;
  for (auto _ : state) {
    benchmark::DoNotOptimize(remat::punitive_matching(mk.spec, hospitals, students, 0));
  }
}
BENCHMARK(BM_PunitiveDraft)->Arg(10)->Arg(40)->Arg(80);

void BM_StableEnumeration(benchmark::State& state) {
  const remat::MarketSpec spec = small_market();
  for (auto _ : state) {
    benchmark::DoNotOptimize(remat::enumerate_stable_matchings(spec));
  }
}
BENCHMARK(BM_StableEnumeration);

void BM_SelfEnforcingCheck(benchmark::State& state) {
  const remat::MarketSpec spec = small_market();
  remat::MatchingLottery base;
  base.outcomes.emplace_back(
      remat::make_matching(spec, {0, 2, 1, 1, 0}), 1.0);
  const remat::PunishmentScheme s = remat::find_player_specific_punishments(spec, base);
  const remat::ProcessAutomaton a = remat::build_folk_automaton(spec, s, 0.95);
  for (auto _ : state) {
    benchmark::DoNotOptimize(remat::check_self_enforcing(spec, a));
  }
}
BENCHMARK(BM_SelfEnforcingCheck);

}  // namespace

BENCHMARK_MAIN();
