#include "remat/folk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "remat/algorithms.hpp"
#include "remat/market_io.hpp"

namespace remat {

namespace {

constexpr double kWeightTol = 1e-12;

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double frac53(std::uint64_t h) { return double(h >> 11) * 0x1.0p-53; }

bool respects_peel(const TopCoalitionSequence& seq, const Matching& m) {
  for (const TopPair& p : seq.pairs)
    if (m.roster[p.hospital] != p.students) return false;
  return true;
}

void check_lottery(const MarketSpec& spec, const TopCoalitionSequence& seq,
                   const MatchingLottery& l, const std::string& what) {
  if (l.outcomes.empty()) throw input_error(what + " has no outcomes");
  double total = 0.0;
  for (const auto& [m, w] : l.outcomes) {
    if (!(w > 0.0)) throw input_error(what + " has a non-positive weight");
    total += w;
    if (!individually_rational(spec, m))
      throw input_error(what + " puts weight on a matching someone would walk out of");
    if (!respects_peel(seq, m))
      throw input_error(what + " breaks up a mutual-favorite pair");
  }
  if (std::abs(total - 1.0) > kWeightTol)
    throw input_error(what + " weights do not sum to one");
}

Lottery point(int state) { return Lottery{{{state, 1.0}}}; }

double max_stage_payoff(const MarketSpec& spec) {
  const Matching none = empty_matching(spec);
  double top = 0.0;
  for (int f = 0; f < spec.hospitals(); ++f)
    top = std::max(top, best_response(spec, f, none).value);
  return top;
}

// Total punishment bite of an L-period spell at this discount.
double absorbed_margin(double delta, double margin, int len) {
  if (!(margin > 0.0) || len <= 0) return 0.0;
  if (delta <= 0.0) return 0.0;
  return margin * delta * (1.0 - std::pow(delta, len)) / (1.0 - delta);
}

}  // namespace

double lottery_utility(const MarketSpec& spec, int h, const MatchingLottery& l) {
  double v = 0.0;
  for (const auto& [m, w] : l.outcomes) v += w * set_utility(spec, h, m.roster[h]);
  return v;
}

void validate_scheme(const MarketSpec& spec, const PunishmentScheme& s) {
  check_lottery(spec, s.peel, s.base, "base lottery");
  if (s.punishment_length < 1) throw input_error("punishment length must be positive");
  const int n = spec.hospitals();
  if ((int)s.reentry.size() != n || (int)s.minmax_matching.size() != n ||
      (int)s.reduced_minmax.size() != n)
    throw input_error("scheme arrays must cover every hospital");
  for (int f : s.free_hospitals) {
    const std::string& name = spec.hospital_names[f];
    check_lottery(spec, s.peel, s.reentry[f], "re-entry lottery for " + name);
    if (!individually_rational(spec, s.minmax_matching[f]) ||
        !respects_peel(s.peel, s.minmax_matching[f]))
      throw input_error("hold-down matching for " + name + " is not playable");
    const double own = lottery_utility(spec, f, s.reentry[f]);
    if (!(own > s.reduced_minmax[f] + kGainTol))
      throw input_error("re-entry lottery for " + name + " does not clear its security level");
    if (!(own < lottery_utility(spec, f, s.base) - kGainTol))
      throw input_error("re-entry lottery for " + name + " is not strictly below the base");
    for (int g : s.free_hospitals) {
      if (g == f) continue;
      if (!(own < lottery_utility(spec, f, s.reentry[g]) - kGainTol))
        throw input_error("re-entry lottery for " + name + " must be its own worst option");
    }
  }
}

PunishmentScheme find_player_specific_punishments(const MarketSpec& spec,
                                                  const MatchingLottery& base,
                                                  int search_budget, int cap_students) {
  PunishmentScheme s;
  s.peel = top_coalition_sequence(spec);
  s.base = base;
  check_lottery(spec, s.peel, base, "target lottery");

  std::vector<char> locked(spec.hospitals(), 0);
  std::vector<std::optional<int>> forced(spec.students());
  std::vector<int> closed;
  for (const TopPair& p : s.peel.pairs) {
    locked[p.hospital] = 1;
    closed.push_back(p.hospital);
    for (int w : p.students) forced[w] = p.hospital;
  }
  for (int f = 0; f < spec.hospitals(); ++f)
    if (!locked[f]) s.free_hospitals.push_back(f);

  MinmaxResult mm = reduced_minmax(spec, s.peel, cap_students);
  s.reduced_minmax = mm.value;
  s.minmax_matching = mm.witness;
  s.reentry.assign(spec.hospitals(), {});

  std::vector<double> base_u(spec.hospitals(), 0.0);
  for (int f : s.free_hospitals) {
    base_u[f] = lottery_utility(spec, f, base);
    if (!(base_u[f] > mm.value[f] + kGainTol))
      throw input_error("target lottery pays " + spec.hospital_names[f] +
                        " no more than its security level");
  }
  if (s.free_hospitals.empty()) {
    s.punishment_length = 1;
    return s;
  }

  int loose = 0;
  for (int w = 0; w < spec.students(); ++w)
    if (!forced[w]) ++loose;
  if (loose > cap_students)
    throw input_error("punishment search refuses markets with more than " +
                      std::to_string(cap_students) + " unlocked students");

  // Per free hospital, the recommendation that starves it while keeping the
  // other free hospitals as well fed as possible. The second criterion keeps
  // the cross inequalities (everyone else likes f's spell better than their
  // own) easy to satisfy at small mixing weights.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Matching> rho(spec.hospitals());
  std::vector<double> rho_val(spec.hospitals(), inf);
  std::vector<double> rho_aid(spec.hospitals(), -inf);
  for_each_ir_matching(spec, forced, closed, [&](const Matching& m) {
    for (int f : s.free_hospitals) {
      const double v = set_utility(spec, f, m.roster[f]);
      double aid = 0.0;
      for (int g : s.free_hospitals)
        if (g != f) aid += set_utility(spec, g, m.roster[g]);
      if (v < rho_val[f] - kWeightTol ||
          (v < rho_val[f] + kWeightTol && aid > rho_aid[f] + kWeightTol)) {
        rho_val[f] = v;
        rho_aid[f] = aid;
        rho[f] = m;
      }
    }
    return true;
  });

  // Mixing weights walk a doubling ladder from 2^-6 up, with a per-hospital
  // jitter to break accidental payoff ties between candidates.
  for (int attempt = 0; attempt < search_budget; ++attempt) {
    const double x0 = std::ldexp(1.0, -6 + attempt % 6);
    for (int f : s.free_hospitals) {
      const double jitter =
          frac53(mix64((std::uint64_t)attempt * 131ULL + (std::uint64_t)f));
      const double x = std::min(0.9, x0 * (1.0 + 0.75 * jitter));
      MatchingLottery l;
      l.outcomes.emplace_back(rho[f], x);
      for (const auto& [m, w] : base.outcomes) {
        if (m == rho[f])
          l.outcomes.front().second += (1.0 - x) * w;
        else
          l.outcomes.emplace_back(m, (1.0 - x) * w);
      }
      s.reentry[f] = std::move(l);
    }
    bool ok = true;
    for (int f : s.free_hospitals) {
      const double own = lottery_utility(spec, f, s.reentry[f]);
      ok = ok && own > mm.value[f] + kGainTol && own < base_u[f] - kGainTol;
      for (int g : s.free_hospitals)
        if (ok && g != f) ok = own < lottery_utility(spec, f, s.reentry[g]) - kGainTol;
      if (!ok) break;
    }
    if (ok) {
      s.punishment_length = default_punishment_length(spec, s);
      return s;
    }
  }
  throw input_error("punishment lottery search exhausted its budget (" +
                    std::to_string(search_budget) +
                    " attempts); no certificate found, existence undecided");
}

int punishment_length_for(double delta, double margin, double need, int max_len) {
  if (!(margin > 0.0) || !(delta > 0.0) || delta >= 1.0) return 0;
  if (need <= 0.0) return 1;
  double disc = delta;
  double total = 0.0;
  for (int len = 1; len <= max_len; ++len) {
    total += disc * margin;
    if (total > need) return len;
    disc *= delta;
  }
  return 0;
}

int default_punishment_length(const MarketSpec& spec, const PunishmentScheme& s) {
  if (s.free_hospitals.empty()) return 1;
  double margin = std::numeric_limits<double>::infinity();
  for (int f : s.free_hospitals)
    margin = std::min(margin, lottery_utility(spec, f, s.reentry[f]) - s.reduced_minmax[f]);
  if (!(margin > kGainTol))
    throw input_error("scheme margins too thin to size a punishment length");
  // Undiscounted sizing: enough spell periods to outweigh any one-period
  // swing, with a unit to spare.
  const double need = 1.0 + max_stage_payoff(spec);
  return std::max(1, (int)std::floor(need / margin) + 1);
}

ProcessAutomaton build_folk_automaton(const MarketSpec& spec, const PunishmentScheme& s,
                                      double delta) {
  validate_scheme(spec, s);
  ProcessAutomaton a;
  a.name = "folk";
  a.discount = delta;

  // Regime 0 replays the base lottery forever; regime 1+i replays free
  // hospital i's re-entry lottery forever. One play state per lottery outcome.
  const int free_n = (int)s.free_hospitals.size();
  std::vector<const MatchingLottery*> plan(1 + free_n);
  std::vector<std::string> tag(1 + free_n);
  plan[0] = &s.base;
  tag[0] = "base";
  for (int i = 0; i < free_n; ++i) {
    plan[1 + i] = &s.reentry[s.free_hospitals[i]];
    tag[1 + i] = spec.hospital_names[s.free_hospitals[i]];
  }

  std::vector<std::vector<int>> play(1 + free_n);
  for (int r = 0; r <= free_n; ++r) {
    for (int i = 0; i < (int)plan[r]->outcomes.size(); ++i) {
      const int mi =
          a.add_matching(tag[r] + "_m" + std::to_string(i), plan[r]->outcomes[i].first);
      AutomatonState st;
      st.name = "play_" + tag[r] + "_" + std::to_string(i);
      st.output = mi;
      play[r].push_back((int)a.states.size());
      a.states.push_back(std::move(st));
    }
  }
  std::vector<std::vector<int>> hold(spec.hospitals());
  for (int f : s.free_hospitals) {
    const int mi = a.add_matching("hold_" + spec.hospital_names[f], s.minmax_matching[f]);
    for (int t = 0; t < s.punishment_length; ++t) {
      AutomatonState st;
      st.name = "hold_" + spec.hospital_names[f] + "_" + std::to_string(t);
      st.output = mi;
      hold[f].push_back((int)a.states.size());
      a.states.push_back(std::move(st));
    }
  }

  std::vector<Lottery> gamma(1 + free_n);
  for (int r = 0; r <= free_n; ++r)
    for (int i = 0; i < (int)plan[r]->outcomes.size(); ++i)
      gamma[r].outcomes.emplace_back(play[r][i], plan[r]->outcomes[i].second);

  auto dev_rows = [&] {
    std::vector<std::pair<int, Lottery>> rows;
    for (int f : s.free_hospitals) rows.emplace_back(f, point(hold[f].front()));
    return rows;
  };

  for (int r = 0; r <= free_n; ++r) {
    for (int sid : play[r]) {
      a.states[sid].rule.on_path = gamma[r];
      a.states[sid].rule.fallback = gamma[r];
      a.states[sid].rule.on_deviator = dev_rows();
    }
  }
  for (int i = 0; i < free_n; ++i) {
    const int f = s.free_hospitals[i];
    for (int t = 0; t < s.punishment_length; ++t) {
      const Lottery next =
          (t + 1 < s.punishment_length) ? point(hold[f][t + 1]) : gamma[1 + i];
      AutomatonState& st = a.states[hold[f][t]];
      st.rule.on_path = next;
      st.rule.fallback = next;
      st.rule.on_deviator = dev_rows();
    }
  }
  a.initial = gamma[0];
  a.validate(spec);
  return a;
}

std::string CapacityReport::text() const {
  std::ostringstream out;
  out << "{\n";
  out << "  \"tier\": " << tier << ",\n";
  out << "  \"tier_hospitals\": " << rows.size() << ",\n";
  out << "  \"quota\": " << quota << ",\n";
  out << "  \"punishment_length\": " << punishment_length << ",\n";
  out << "  \"margin_base_vs_reentry\": " << format_double(margin_base_vs_reentry) << ",\n";
  out << "  \"margin_reentry_vs_punish\": " << format_double(margin_reentry_vs_punish)
      << ",\n";
  out << "  \"margin_own_gap\": " << format_double(margin_own_gap) << ",\n";
  out << "  \"temptation\": " << format_double(temptation) << ",\n";
  out << "  \"certified\": " << (certified ? "true" : "false") << ",\n";
  out << "  \"note\": \"" << note << "\"\n";
  out << "}\n";
  return out.str();
}

CapacityProcess build_capacity_reduction_process(const RealizedMarket& mk, int k, double p0,
                                                 double pr, int punishment_length,
                                                 double delta, int reward_draws,
                                                 std::uint64_t seed) {
  const MarketSpec& spec = mk.spec;
  if (k < 1 || k > mk.config.hospital_classes) throw input_error("no such hospital tier");
  if (!(p0 > 0.0 && p0 < 1.0) || !(pr > 0.0 && pr < 1.0))
    throw input_error("p0 and pr must lie strictly between 0 and 1");
  if (reward_draws < 1) throw input_error("need at least one reward draw");
  if (punishment_length < 0) throw input_error("punishment length must be nonnegative");
  const std::vector<int> tier = mk.hospitals_of_class(k);
  if (tier.empty())
    throw input_error("tier " + std::to_string(k) + " has no hospitals at this size");

  const std::vector<int>& layer = mk.hospital_class_of;
  const Matching m_star = layered_matching(spec, layer, k, {InnerRule::ReducedDa});
  std::vector<Matching> m_hat;
  for (int j = 0; j < reward_draws; ++j) {
    Rng rng = Rng::stream(seed, (std::uint64_t)j);
    std::vector<Seat> order = random_seat_order(spec, tier, rng);
    LayeredOptions opt{InnerRule::Rsd};
    opt.seat_order = &order;
    m_hat.push_back(layered_matching(spec, layer, k, opt));
  }
  std::map<int, Matching> m_zero, m_pun;
  for (int f : tier) {
    m_zero.emplace(f, layered_matching(spec, layer, k, {InnerRule::ZeroQuota, f}));
    m_pun.emplace(f, layered_matching(spec, layer, k, {InnerRule::Punitive, f}));
  }

  CapacityProcess result;
  CapacityReport& rep = result.report;
  rep.tier = k;
  rep.quota = spec.quota[tier.front()];

  const double inf = std::numeric_limits<double>::infinity();
  std::map<int, double> base_v, pun_v;
  for (int f : tier) {
    double b = p0 * set_utility(spec, f, m_star.roster[f]);
    for (const Matching& mh : m_hat)
      b += (1.0 - p0) / reward_draws * set_utility(spec, f, mh.roster[f]);
    base_v[f] = b;
    pun_v[f] = set_utility(spec, f, m_pun.at(f).roster[f]);
  }
  auto reentry_v = [&](int f, int regime) {
    return pr * base_v.at(f) + (1.0 - pr) * set_utility(spec, f, m_zero.at(regime).roster[f]);
  };

  const Matching none = empty_matching(spec);
  rep.margin_base_vs_reentry = inf;
  rep.margin_reentry_vs_punish = inf;
  rep.margin_own_gap = inf;
  double deter = inf;   // own re-entry versus own punishment flow
  double top = 0.0;     // best one-period payoff any hospital could grab
  for (int f = 0; f < spec.hospitals(); ++f)
    top = std::max(top, best_response(spec, f, none).value);
  // Largest one-shot gain any hospital can realize against a matching the
  // process actually plays. This, not the free-for-all bound above, is what
  // the punishment phase has to outweigh.
  rep.temptation = 0.0;
  auto scan_temptation = [&](const Matching& m) {
    for (int f = 0; f < spec.hospitals(); ++f) {
      const double gain =
          best_response(spec, f, m).value - set_utility(spec, f, m.roster[f]);
      rep.temptation = std::max(rep.temptation, gain);
    }
  };
  scan_temptation(m_star);
  for (const Matching& mh : m_hat) scan_temptation(mh);
  for (int f : tier) {
    scan_temptation(m_zero.at(f));
    scan_temptation(m_pun.at(f));
  }
  for (int f : tier) {
    CapacityReport::PerHospital row;
    row.hospital = f;
    row.name = spec.hospital_names[f];
    row.base_value = base_v[f];
    row.own_reentry = reentry_v(f, f);
    row.punish_flow = pun_v[f];
    row.best_stage = best_response(spec, f, none).value;
    rep.margin_base_vs_reentry =
        std::min(rep.margin_base_vs_reentry, row.base_value - row.own_reentry);
    deter = std::min(deter, row.own_reentry - row.punish_flow);
    for (int g : tier) {
      const double rv = reentry_v(f, g);
      rep.margin_reentry_vs_punish =
          std::min(rep.margin_reentry_vs_punish, rv - row.punish_flow);
      if (g != f) rep.margin_own_gap = std::min(rep.margin_own_gap, rv - row.own_reentry);
    }
    rep.rows.push_back(std::move(row));
  }
  if (tier.size() < 2) rep.margin_own_gap = 0.0;

  const bool margins_ok = rep.margin_base_vs_reentry > 0.0 &&
                          rep.margin_reentry_vs_punish > 0.0 &&
                          (tier.size() < 2 || rep.margin_own_gap > 0.0);
  // Length sizing keeps the crude bound (one unit above the best grab from an
  // empty market) so the chosen horizon does not depend on which matchings the
  // draws happened to produce. Certification below uses the realized
  // temptation instead.
  const double need = 1.0 + top;
  int len = punishment_length;
  if (len == 0) {
    const int fit = margins_ok ? punishment_length_for(delta, deter, need) : 0;
    if (fit > 0)
      len = fit;
    else if (deter > 0.0)
      len = std::min(50, (int)std::floor(need / deter) + 1);
    else
      len = 1;
  }
  rep.punishment_length = len;
  rep.certified = margins_ok && absorbed_margin(delta, deter, len) > rep.temptation;
  if (!rep.certified) {
    std::ostringstream why;
    if (!margins_ok)
      why << "stage margins not positive at this size (base_vs_reentry "
          << format_double(rep.margin_base_vs_reentry) << ", reentry_vs_punish "
          << format_double(rep.margin_reentry_vs_punish) << ", own_gap "
          << format_double(rep.margin_own_gap) << ")";
    else
      why << "reward insufficient: " << len << " punishment periods at discount "
          << format_double(delta) << " absorb "
          << format_double(absorbed_margin(delta, deter, len)) << " against a temptation of "
          << format_double(rep.temptation);
    rep.note = why.str();
  }

  ProcessAutomaton& a = result.automaton;
  a.name = "capacity";
  a.discount = delta;
  const int mi_star = a.add_matching("mstar", m_star);
  std::vector<int> mi_hat;
  for (int j = 0; j < reward_draws; ++j)
    mi_hat.push_back(a.add_matching("mhat" + std::to_string(j), m_hat[j]));
  std::map<int, int> mi_zero, mi_pun;
  for (int f : tier) {
    mi_zero[f] = a.add_matching("mzero_" + spec.hospital_names[f], m_zero.at(f));
    mi_pun[f] = a.add_matching("mpun_" + spec.hospital_names[f], m_pun.at(f));
  }

  auto new_state = [&](std::string name, int output) {
    AutomatonState st;
    st.name = std::move(name);
    st.output = output;
    a.states.push_back(std::move(st));
    return (int)a.states.size() - 1;
  };
  const int on_star = new_state("on_star", mi_star);
  std::vector<int> on_hat;
  for (int j = 0; j < reward_draws; ++j)
    on_hat.push_back(new_state("on_hat" + std::to_string(j), mi_hat[j]));
  std::map<int, int> re_star, re_zero;
  std::map<int, std::vector<int>> re_hat, holds;
  for (int f : tier) {
    const std::string& name = spec.hospital_names[f];
    re_star[f] = new_state("re_star_" + name, mi_star);
    for (int j = 0; j < reward_draws; ++j)
      re_hat[f].push_back(new_state("re_hat" + std::to_string(j) + "_" + name, mi_hat[j]));
    re_zero[f] = new_state("re_zero_" + name, mi_zero[f]);
  }
  for (int f : tier) {
    const std::string& name = spec.hospital_names[f];
    for (int t = 0; t < len; ++t)
      holds[f].push_back(new_state("hold_" + name + "_" + std::to_string(t), mi_pun[f]));
  }

  Lottery g0;
  g0.outcomes.emplace_back(on_star, p0);
  for (int j = 0; j < reward_draws; ++j)
    g0.outcomes.emplace_back(on_hat[j], (1.0 - p0) / reward_draws);
  std::map<int, Lottery> gf;
  for (int f : tier) {
    Lottery l;
    l.outcomes.emplace_back(re_star[f], pr * p0);
    for (int j = 0; j < reward_draws; ++j)
      l.outcomes.emplace_back(re_hat[f][j], pr * (1.0 - p0) / reward_draws);
    l.outcomes.emplace_back(re_zero[f], 1.0 - pr);
    gf[f] = std::move(l);
  }

  auto dev_rows = [&] {
    std::vector<std::pair<int, Lottery>> rows;
    for (int f : tier) rows.emplace_back(f, point(holds[f].front()));
    return rows;
  };
  auto wire = [&](int sid, const Lottery& next) {
    a.states[sid].rule.on_path = next;
    a.states[sid].rule.fallback = next;
    a.states[sid].rule.on_deviator = dev_rows();
  };
  wire(on_star, g0);
  for (int j = 0; j < reward_draws; ++j) wire(on_hat[j], g0);
  for (int f : tier) {
    wire(re_star[f], gf[f]);
    for (int j = 0; j < reward_draws; ++j) wire(re_hat[f][j], gf[f]);
    wire(re_zero[f], gf[f]);
    for (int t = 0; t < len; ++t)
      wire(holds[f][t], t + 1 < len ? point(holds[f][t + 1]) : gf[f]);
  }
  a.initial = g0;
  a.validate(spec);
  for (const Matching& m : a.matchings)
    if (!individually_rational(spec, m))
      throw input_error("capacity construction produced a matching someone walks out of");
  return result;
}

std::string EliteAuditReport::text(const MarketSpec& spec, const ProcessAutomaton& a) const {
  std::ostringstream out;
  out << "{\n  \"eps\": " << format_double(eps) << ",\n  \"targets\": " << rows.size()
      << ",\n  \"rows\": [\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    const EliteAuditRow& r = rows[i];
    out << "    {\"state\": \"" << a.states[r.state].name << "\", \"hospital\": \""
        << spec.hospital_names[r.hospital] << "\", \"addon\": \""
        << spec.student_names[r.addon_student] << "\", \"plan\": "
        << format_double(r.plan_value) << ", \"process\": "
        << format_double(r.process_value) << ", \"gain\": " << format_double(r.gain)
        << "}" << (i + 1 < rows.size() ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
  return out.str();
}

EliteAuditReport elite_deviation_audit(const RealizedMarket& mk, const ProcessAutomaton& a,
                                       double delta, double eps) {
  const MarketSpec& spec = mk.spec;
  if (mk.config.hospital_classes < 2) throw input_error("no elite tier configured");
  if (!(eps > 0.0)) throw input_error("eps must be positive");
  const std::vector<int> elite = mk.hospitals_of_class(1);
  const std::vector<int> w1 = mk.students_of_class(1);
  int elite_seats = 0;
  for (int f : elite) elite_seats += spec.quota[f];
  if (elite_seats >= (int)w1.size())
    throw input_error("top hospital tier is not small next to the top student tier");

  ProcessAutomaton at = a;
  at.discount = delta;
  const std::vector<std::vector<double>> vals = continuation_values(spec, at);

  EliteAuditReport rep;
  rep.eps = eps;
  const double cutoff = mk.config.common_values.front() + 1.0 - eps;
  for (int f : elite) {
    // eps-fans: top-tier students who rank f first among the elite and are
    // nearly ideal hires for it; they stay reachable no matter what the
    // process recommends, which is what makes the grab plan repeatable.
    std::vector<int> fans;
    for (int w : w1) {
      if (!(spec.utility[f][w] > cutoff)) continue;
      bool first = true;
      for (int g : elite)
        if (g != f && spec.prefers(w, g, f)) {
          first = false;
          break;
        }
      if (first) fans.push_back(w);
    }
    std::sort(fans.begin(), fans.end(),
              [&](int x, int y) { return spec.utility[f][x] > spec.utility[f][y]; });
    double greedy = 0.0;
    for (int i = 0; i < std::min((int)fans.size(), spec.quota[f]); ++i)
      greedy += spec.utility[f][fans[i]];

    for (int sid = 0; sid < (int)at.states.size(); ++sid) {
      const Matching& out = at.matchings[at.states[sid].output];
      const std::vector<int>& roster = out.roster[f];
      if ((int)roster.size() >= spec.quota[f]) continue;
      int addon = -1;
      for (int w : w1) {
        const int h = out.assign[w];
        bool at_elite = false;
        for (int g : elite)
          if (h == g) at_elite = true;
        if (at_elite) continue;
        if (addon == -1 || spec.utility[f][w] > spec.utility[f][addon]) addon = w;
      }
      if (addon == -1) continue;  // ruled out by the tier-size guard
      std::vector<int> hire = roster;
      hire.push_back(addon);
      EliteAuditRow row;
      row.state = sid;
      row.hospital = f;
      row.addon_student = addon;
      row.plan_value = (1.0 - delta) * set_utility(spec, f, hire) + delta * greedy;
      row.process_value = vals[f][sid];
      row.gain = row.plan_value - row.process_value;
      rep.rows.push_back(row);
    }
  }
  return rep;
}

}  // namespace remat
