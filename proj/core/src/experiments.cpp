#include "remat/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "remat/algorithms.hpp"
#include "remat/market_io.hpp"
#include "remat/repeated.hpp"

namespace remat {

namespace {

// One independent stream per trial so results do not depend on scan order.
std::uint64_t subseed(std::uint64_t master, std::uint64_t idx) {
  return Rng::stream(master, idx).next_u64();
}

double binom_se(double p, long trials) {
  if (trials <= 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / (double)trials);
}

int first_tier_hospital(const RealizedMarket& mk) {
  const std::vector<int> tier = mk.hospitals_of_class(1);
  if (tier.empty()) throw input_error("tier 1 has no hospitals at this size");
  return tier.front();
}

// Deliberately wrong draft: worst students for the target pick first. Kept
// here as an oracle so the deviation scan can be shown to catch a bad draft.
Matching reversed_draft(const MarketSpec& spec, int target) {
  std::vector<int> seats_left = spec.quota;
  std::vector<int> assign(spec.students(), kUnmatched);
  const std::vector<int>& order = spec.by_utility[target];
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int w = *it;
    for (int h : spec.pref[w]) {
      if (seats_left[h] > 0) {
        assign[w] = h;
        --seats_left[h];
        break;
      }
    }
  }
  return make_matching(spec, assign);
}

}  // namespace

std::string to_csv(const ExperimentResult& r) {
  std::ostringstream out;
  out << "experiment,n,trials,statistic,value,stderr\n";
  for (const StatRow& row : r.rows)
    out << r.experiment << ',' << r.n << ',' << r.trials << ',' << row.statistic << ','
        << format_double(row.value) << ',' << format_double(row.stderr_value) << '\n';
  return out.str();
}

ExperimentResult mc_top_fill_probability(const TierConfig& cfg, int n, double eps,
                                         long trials, std::uint64_t seed) {
  cfg.validate();
  if (!(eps > 0.0)) throw input_error("eps must be positive");
  if (trials < 1) throw input_error("need at least one trial");
  long hits = 0;
  for (long t = 0; t < trials; ++t) {
    const RealizedMarket mk = generate_market(cfg, n, subseed(seed, t));
    const MarketSpec& spec = mk.spec;
    const int f = first_tier_hospital(mk);
    const std::vector<int> elite = mk.hospitals_of_class(1);
    const double cutoff = cfg.common_values.front() + 1.0 - eps;
    int fans = 0;
    for (int w : mk.students_of_class(1)) {
      if (!(spec.utility[f][w] > cutoff)) continue;
      bool first = true;
      for (int g : elite)
        if (g != f && spec.prefers(w, g, f)) {
          first = false;
          break;
        }
      if (first) ++fans;
    }
    if (fans > spec.quota[f]) ++hits;
  }
  const double est = (double)hits / (double)trials;
  ExperimentResult r{"fill", n, trials, {}};
  r.rows.push_back({"fill_probability", est, binom_se(est, trials)});
  return r;
}

ExperimentResult mc_rank_distribution(const TierConfig& cfg, int n, long trials,
                                      std::uint64_t seed) {
  cfg.validate();
  if (cfg.hospital_classes != 1)
    throw input_error("rank experiment needs a single hospital tier");
  if (trials < 1) throw input_error("need at least one trial");
  const int bins = n * cfg.quota;
  std::vector<long> count(bins, 0);
  long total = 0;
  for (long t = 0; t < trials; ++t) {
    const RealizedMarket mk = generate_market(cfg, n, subseed(seed, t));
    const MarketSpec& spec = mk.spec;
    const int f = first_tier_hospital(mk);
    std::vector<int> rank_of(spec.students(), 0);
    for (int i = 0; i < spec.students(); ++i) rank_of[spec.by_utility[f][i]] = i + 1;
    std::vector<int> everyone(spec.students());
    for (int w = 0; w < spec.students(); ++w) everyone[w] = w;
    std::vector<int> all(spec.hospitals());
    for (int h = 0; h < spec.hospitals(); ++h) all[h] = h;
    const Matching m = punitive_matching(spec, all, everyone, f);
    for (int w : m.roster[f]) {
      const int r = rank_of[w];
      if (r < 1 || r > bins)
        throw input_error("punitive draft handed out a rank past the seat count");
      ++count[r - 1];
      ++total;
    }
  }
  ExperimentResult r{"rank", n, trials, {}};
  const double uniform = 1.0 / (double)bins;
  double tv = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double freq = total > 0 ? (double)count[b] / (double)total : 0.0;
    tv += 0.5 * std::abs(freq - uniform);
    r.rows.push_back({"rank_" + std::to_string(b + 1), freq, binom_se(freq, total)});
  }
  r.rows.push_back({"tv_uniform", tv, 0.0});
  return r;
}

ExperimentResult mc_punishment_gap(const TierConfig& cfg, int n, long trials,
                                   std::uint64_t seed) {
  cfg.validate();
  if (trials < 1) throw input_error("need at least one trial");
  double sum_r = 0.0, sum_p = 0.0, sum_g = 0.0, sum_r2 = 0.0, sum_p2 = 0.0, sum_g2 = 0.0;
  for (long t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(seed, t);
    const RealizedMarket mk = generate_market(cfg, n, rng.next_u64());
    const MarketSpec& spec = mk.spec;
    const int f = first_tier_hospital(mk);
    const std::vector<int> tier = mk.hospitals_of_class(1);
    std::vector<Seat> order = random_seat_order(spec, tier, rng);
    LayeredOptions reward{InnerRule::Rsd};
    reward.seat_order = &order;
    const Matching m_hat = layered_matching(spec, mk.hospital_class_of, 1, reward);
    const Matching m_pun =
        layered_matching(spec, mk.hospital_class_of, 1, {InnerRule::Punitive, f});
    const double rv = set_utility(spec, f, m_hat.roster[f]);
    const double pv = set_utility(spec, f, m_pun.roster[f]);
    sum_r += rv;
    sum_p += pv;
    sum_g += rv - pv;
    sum_r2 += rv * rv;
    sum_p2 += pv * pv;
    sum_g2 += (rv - pv) * (rv - pv);
  }
  const double tn = (double)trials;
  auto mean_se = [&](double s, double s2) {
    const double mean = s / tn;
    const double var = std::max(0.0, s2 / tn - mean * mean);
    return std::pair<double, double>(mean, std::sqrt(var / tn));
  };
  const auto [rm, rse] = mean_se(sum_r, sum_r2);
  const auto [pm, pse] = mean_se(sum_p, sum_p2);
  const auto [gm, gse] = mean_se(sum_g, sum_g2);
  ExperimentResult r{"gap", n, trials, {}};
  r.rows.push_back({"reward_mean", rm, rse});
  r.rows.push_back({"punish_mean", pm, pse});
  r.rows.push_back({"gap", gm, gse});
  return r;
}

ExperimentResult mc_clustering(const TierConfig& cfg, int n, double eps, double gamma,
                               long trials, std::uint64_t seed) {
  cfg.validate();
  if (!(gamma > 0.0) || !(gamma < eps) || !(eps < 1.0))
    throw input_error("need 0 < gamma < eps < 1");
  if (trials < 1) throw input_error("need at least one trial");
  long hits = 0;
  for (long t = 0; t < trials; ++t) {
    const RealizedMarket mk = generate_market(cfg, n, subseed(seed, t));
    const MarketSpec& spec = mk.spec;
    const int f = first_tier_hospital(mk);
    std::vector<int> pool;
    for (int l : achievable_classes(cfg, 1, n))
      for (int w : mk.students_of_class(l)) pool.push_back(w);
    if (pool.empty()) continue;
    std::sort(pool.begin(), pool.end(),
              [&](int a, int b) { return spec.utility[f][a] < spec.utility[f][b]; });
    const int worst = (int)std::ceil(gamma * (double)pool.size());
    bool all_poor = true;
    for (int i = 0; i < worst && i < (int)pool.size(); ++i)
      if (!(mk.zeta[f][pool[i]] < eps)) {
        all_poor = false;
        break;
      }
    if (all_poor) ++hits;
  }
  const double est = (double)hits / (double)trials;
  ExperimentResult r{"clustering", n, trials, {}};
  r.rows.push_back({"clustering_probability", est, binom_se(est, trials)});
  return r;
}

NoDevResult no_deviation_from_punishment(const TierConfig& cfg, int n, long trials,
                                         std::uint64_t seed, DraftOrder order) {
  cfg.validate();
  if (trials < 1) throw input_error("need at least one trial");
  if (order == DraftOrder::Reversed && cfg.hospital_classes != 1)
    throw input_error("the reversed-draft oracle only runs on single-tier markets");
  NoDevResult result;
  long violations = 0;
  for (long t = 0; t < trials; ++t) {
    const RealizedMarket mk = generate_market(cfg, n, subseed(seed, t));
    const MarketSpec& spec = mk.spec;
    for (int f : mk.hospitals_of_class(1)) {
      const Matching m =
          order == DraftOrder::Reversed
              ? reversed_draft(spec, f)
              : layered_matching(spec, mk.hospital_class_of, 1, {InnerRule::Punitive, f});
      const BestResponse br = best_response(spec, f, m);
      const double held = set_utility(spec, f, m.roster[f]);
      if (br.value > held + kGainTol || br.students != m.roster[f]) {
        ++violations;
        if (result.counterexample.empty()) {
          std::ostringstream why;
          why << "trial " << t << ": " << spec.hospital_names[f] << " holds {";
          for (size_t i = 0; i < m.roster[f].size(); ++i)
            why << (i ? " " : "") << spec.student_names[m.roster[f][i]];
          why << "} worth " << format_double(held) << " but would rather hire {";
          for (size_t i = 0; i < br.students.size(); ++i)
            why << (i ? " " : "") << spec.student_names[br.students[i]];
          why << "} worth " << format_double(br.value);
          result.counterexample = why.str();
        }
      }
    }
  }
  result.pass = violations == 0;
  result.stats = ExperimentResult{"nodev", n, trials, {}};
  result.stats.rows.push_back({"violations", (double)violations, 0.0});
  return result;
}

}  // namespace remat
