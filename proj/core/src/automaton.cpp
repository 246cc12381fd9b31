#include "remat/automaton.hpp"

#include <cmath>

namespace remat {

namespace {
constexpr double kWeightTol = 1e-12;

void check_lottery(const Lottery& l, int n_states, const std::string& where) {
  double sum = 0.0;
  for (const auto& [s, w] : l.outcomes) {
    if (s < 0 || s >= n_states) throw input_error(where + ": lottery targets unknown state");
    if (w < 0.0) throw input_error(where + ": negative lottery weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightTol)
    throw input_error(where + ": lottery weights sum to " + std::to_string(sum));
}
}  // namespace

int ProcessAutomaton::state_index(const std::string& n) const {
  for (int i = 0; i < static_cast<int>(states.size()); ++i)
    if (states[i].name == n) return i;
  throw input_error("automaton: unknown state '" + n + "'");
}

int ProcessAutomaton::matching_index_of(const Matching& m) const {
  for (int i = 0; i < static_cast<int>(matchings.size()); ++i)
    if (matchings[i] == m) return i;
  return -1;
}

int ProcessAutomaton::add_matching(const std::string& n, Matching m) {
  int existing = matching_index_of(m);
  if (existing >= 0) return existing;
  matching_names.push_back(n);
  matchings.push_back(std::move(m));
  return static_cast<int>(matchings.size()) - 1;
}

void ProcessAutomaton::validate(const MarketSpec& spec) const {
  if (states.empty()) throw input_error("automaton: no states");
  if (!(discount >= 0.0 && discount < 1.0))
    throw input_error("automaton: discount must lie in [0,1)");
  for (const Matching& m : matchings)
    make_matching(spec, m.assign);  // re-runs quota and index validation
  const int ns = static_cast<int>(states.size());
  for (const AutomatonState& st : states) {
    if (st.output < 0 || st.output >= static_cast<int>(matchings.size()))
      throw input_error("automaton: state '" + st.name + "' has no output matching");
    const std::string where = "state '" + st.name + "'";
    for (const auto& [mi, l] : st.rule.on_matching) {
      if (mi < 0 || mi >= static_cast<int>(matchings.size()))
        throw input_error(where + ": ON row references unknown matching");
      check_lottery(l, ns, where);
    }
    if (st.rule.on_path) check_lottery(*st.rule.on_path, ns, where);
    for (const auto& [h, l] : st.rule.on_deviator) {
      if (h < 0 || h >= spec.hospitals())
        throw input_error(where + ": DEV row references unknown hospital");
      check_lottery(l, ns, where);
    }
    if (st.rule.fallback) check_lottery(*st.rule.fallback, ns, where);
  }
  check_lottery(initial, ns, "initial lottery");
}

Lottery ProcessAutomaton::transition(const MarketSpec& spec, int state,
                                     const Matching& realized) const {
  const AutomatonState& st = states[state];
  for (const auto& [mi, l] : st.rule.on_matching)
    if (matchings[mi] == realized) return l;
  if (realized == matchings[st.output]) {
    if (st.rule.on_path) return *st.rule.on_path;
  } else {
    DeviatorResult dev = identify_deviator(spec, matchings[st.output], realized);
    if (dev.kind == DeviatorKind::Hospital) {
      for (const auto& [h, l] : st.rule.on_deviator)
        if (h == dev.hospital) return l;
    }
  }
  if (st.rule.fallback) return *st.rule.fallback;
  return Lottery{{{state, 1.0}}};
}

int sample_lottery(const Lottery& l, Rng& rng) {
  const double u = rng.next_double();
  double acc = 0.0;
  for (const auto& [state, weight] : l.outcomes) {
    acc += weight;
    if (u < acc) return state;
  }
  return l.outcomes.back().first;  // rounding slack lands on the last outcome
}

std::vector<int> simulate_on_path(const MarketSpec& spec, const ProcessAutomaton& a,
                                  long periods, Rng& rng) {
  std::vector<int> visited;
  visited.reserve(periods);
  int state = sample_lottery(a.initial, rng);
  for (long t = 0; t < periods; ++t) {
    visited.push_back(state);
    const Lottery next = a.transition(spec, state, a.matchings[a.states[state].output]);
    state = sample_lottery(next, rng);
  }
  return visited;
}

ProcessAutomaton stationary_process(const MarketSpec& spec, const Matching& m, double discount) {
  ProcessAutomaton a;
  a.name = "stationary";
  make_matching(spec, m.assign);  // validate against this spec
  a.add_matching("m", m);
  AutomatonState st;
  st.name = "rest";
  st.output = 0;
  st.rule.on_path = Lottery{{{0, 1.0}}};
  st.rule.fallback = Lottery{{{0, 1.0}}};
  a.states.push_back(st);
  a.initial = Lottery{{{0, 1.0}}};
  a.discount = discount;
  return a;
}

ProcessAutomaton build_trigger_process(const MarketSpec& spec, const Matching& target,
                                       const Matching& fallback, double discount) {
  ProcessAutomaton a;
  a.name = "trigger";
  make_matching(spec, target.assign);
  make_matching(spec, fallback.assign);
  int mt = a.add_matching("target", target);
  int mf = a.add_matching("fallback", fallback);

  AutomatonState onpath;
  onpath.name = "onpath";
  onpath.output = mt;
  onpath.rule.on_path = Lottery{{{0, 1.0}}};
  onpath.rule.fallback = Lottery{{{1, 1.0}}};
  a.states.push_back(onpath);

  AutomatonState absorbing;
  absorbing.name = "absorbing";
  absorbing.output = mf;
  absorbing.rule.on_path = Lottery{{{1, 1.0}}};
  absorbing.rule.fallback = Lottery{{{1, 1.0}}};
  a.states.push_back(absorbing);

  a.initial = Lottery{{{0, 1.0}}};
  a.discount = discount;
  return a;
}

namespace {

bool lotteries_equal(const Lottery& a, const Lottery& b) {
  if (a.outcomes.size() != b.outcomes.size()) return false;
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
    if (a.outcomes[i].first != b.outcomes[i].first) return false;
    if (std::abs(a.outcomes[i].second - b.outcomes[i].second) > kWeightTol) return false;
  }
  return true;
}

bool opt_equal(const std::optional<Lottery>& a, const std::optional<Lottery>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || lotteries_equal(*a, *b);
}

}  // namespace

bool structurally_equal(const ProcessAutomaton& a, const ProcessAutomaton& b) {
  if (a.states.size() != b.states.size()) return false;
  if (a.matchings.size() != b.matchings.size()) return false;
  for (std::size_t i = 0; i < a.matchings.size(); ++i)
    if (!(a.matchings[i] == b.matchings[i])) return false;
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    const AutomatonState& x = a.states[i];
    const AutomatonState& y = b.states[i];
    if (x.output != y.output) return false;
    if (x.rule.on_matching.size() != y.rule.on_matching.size()) return false;
    for (std::size_t j = 0; j < x.rule.on_matching.size(); ++j) {
      if (x.rule.on_matching[j].first != y.rule.on_matching[j].first) return false;
      if (!lotteries_equal(x.rule.on_matching[j].second, y.rule.on_matching[j].second))
        return false;
    }
    if (!opt_equal(x.rule.on_path, y.rule.on_path)) return false;
    if (x.rule.on_deviator.size() != y.rule.on_deviator.size()) return false;
    for (std::size_t j = 0; j < x.rule.on_deviator.size(); ++j) {
      if (x.rule.on_deviator[j].first != y.rule.on_deviator[j].first) return false;
      if (!lotteries_equal(x.rule.on_deviator[j].second, y.rule.on_deviator[j].second))
        return false;
    }
    if (!opt_equal(x.rule.fallback, y.rule.fallback)) return false;
  }
  if (!lotteries_equal(a.initial, b.initial)) return false;
  return true;
}

}  // namespace remat
