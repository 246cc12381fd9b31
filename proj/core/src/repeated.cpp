#include "remat/repeated.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace remat {

std::vector<std::vector<double>> continuation_values(const MarketSpec& spec,
                                                     const ProcessAutomaton& a) {
  const int ns = static_cast<int>(a.states.size());
  const int nh = spec.hospitals();
  const double d = a.discount;

  // V = (1-d) u + d P V with P the on-path transition matrix.
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(ns, ns);
  for (int s = 0; s < ns; ++s) {
    Lottery next = a.transition(spec, s, a.matchings[a.states[s].output]);
    for (const auto& [t, w] : next.outcomes) lhs(s, t) -= d * w;
  }
  Eigen::MatrixXd rhs(ns, nh);
  for (int s = 0; s < ns; ++s) {
    const Matching& out = a.matchings[a.states[s].output];
    for (int h = 0; h < nh; ++h) rhs(s, h) = (1.0 - d) * set_utility(spec, h, out.roster[h]);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
  Eigen::MatrixXd sol = lu.solve(rhs);
  double residual = (lhs * sol - rhs).cwiseAbs().maxCoeff();
  if (residual > kSolveTol * std::max(1.0, rhs.cwiseAbs().maxCoeff()))
    throw std::runtime_error("continuation_values: solver residual " + std::to_string(residual));

  std::vector<std::vector<double>> values(nh, std::vector<double>(ns));
  for (int h = 0; h < nh; ++h)
    for (int s = 0; s < ns; ++s) values[h][s] = sol(s, h);
  return values;
}

std::string Witness::describe(const MarketSpec& spec, const ProcessAutomaton& a) const {
  std::ostringstream os;
  if (kind == StudentIr) {
    os << "state " << a.states[state].name << ": student " << spec.student_names[student]
       << " is matched below her outside option";
    return os.str();
  }
  os << "state " << a.states[state].name << ": hospital " << spec.hospital_names[hospital]
     << " gains " << gain << " by hiring {";
  for (std::size_t i = 0; i < hired.size(); ++i)
    os << (i ? " " : "") << spec.student_names[hired[i]];
  os << "}";
  return os.str();
}

namespace {

double lottery_value(const Lottery& l, const std::vector<double>& v) {
  double x = 0.0;
  for (const auto& [s, w] : l.outcomes) x += w * v[s];
  return x;
}

}  // namespace

CheckResult check_self_enforcing(const MarketSpec& spec, const ProcessAutomaton& a,
                                 bool all_subsets) {
  a.validate(spec);
  CheckResult res;
  res.values = continuation_values(spec, a);
  const double d = a.discount;
  const int ns = static_cast<int>(a.states.size());

  for (int s = 0; s < ns; ++s) {
    const Matching& out = a.matchings[a.states[s].output];
    for (int w = 0; w < spec.students(); ++w) {
      int h = out.assign[w];
      if (h != kUnmatched && !spec.acceptable(w, h)) {
        Witness wit;
        wit.kind = Witness::StudentIr;
        wit.state = s;
        wit.student = w;
        res.witnesses.push_back(wit);
        res.self_enforcing = false;
        return res;
      }
    }
  }

  auto deviation_value = [&](int s, int h, const std::vector<int>& ws, double stage) {
    Matching deviated = apply_deviation(spec, a.matchings[a.states[s].output], h, ws);
    Lottery next = a.transition(spec, s, deviated);
    return (1.0 - d) * stage + d * lottery_value(next, res.values[h]);
  };

  for (int s = 0; s < ns; ++s) {
    const Matching& out = a.matchings[a.states[s].output];
    for (int h = 0; h < spec.hospitals(); ++h) {
      std::vector<int> avail;  // in h's utility order
      for (int w : spec.by_utility[h])
        if (out.assign[w] == h || spec.prefers(w, h, out.assign[w])) avail.push_back(w);

      auto try_candidate = [&](const std::vector<int>& sorted_ws, double stage) {
        if (sorted_ws == out.roster[h]) return true;  // not a deviation
        double value = deviation_value(s, h, sorted_ws, stage);
        if (value > res.values[h][s] + kGainTol) {
          Witness wit;
          wit.state = s;
          wit.hospital = h;
          wit.hired = sorted_ws;
          wit.gain = value - res.values[h][s];
          res.witnesses.push_back(wit);
          return false;
        }
        return true;
      };

      bool ok = true;
      if (!all_subsets) {
        // Empty coalition (fire everyone) first, then growing prefixes.
        ok = try_candidate({}, 0.0);
        std::vector<int> prefix;
        double stage = 0.0;
        for (int w : avail) {
          if (!ok || static_cast<int>(prefix.size()) == spec.quota[h]) break;
          prefix.push_back(w);
          stage += spec.utility[h][w];
          std::vector<int> sorted = prefix;
          std::sort(sorted.begin(), sorted.end());
          ok = try_candidate(sorted, stage);
        }
        // Rows keyed on explicit matchings can reroute specific deviations, so
        // each such row contributes its one reachable coalition.
        if (ok) {
          for (const auto& [mi, l] : a.states[s].rule.on_matching) {
            (void)l;
            const std::vector<int>& ws = a.matchings[mi].roster[h];
            if (static_cast<int>(ws.size()) > spec.quota[h]) continue;
            bool feasible = true;
            for (int w : ws)
              if (out.assign[w] != h && !spec.prefers(w, h, out.assign[w])) feasible = false;
            if (!feasible) continue;
            if (!(apply_deviation(spec, out, h, ws) == a.matchings[mi])) continue;
            ok = try_candidate(ws, set_utility(spec, h, ws));
            if (!ok) break;
          }
        }
      } else {
        int n = static_cast<int>(avail.size());
        if (n > 20) throw input_error("check_self_enforcing: subset mode limited to 20 students");
        for (std::uint64_t mask = 0; ok && mask < (1ULL << n); ++mask) {
          if (std::popcount(mask) > spec.quota[h]) continue;
          std::vector<int> ws;
          double stage = 0.0;
          for (int i = 0; i < n; ++i)
            if (mask & (1ULL << i)) {
              ws.push_back(avail[i]);
              stage += spec.utility[h][avail[i]];
            }
          std::sort(ws.begin(), ws.end());
          ok = try_candidate(ws, stage);
        }
      }
      if (!ok) {
        res.self_enforcing = false;
        return res;
      }
    }
  }
  res.self_enforcing = true;
  return res;
}

namespace {

MinmaxResult minmax_over(const MarketSpec& spec,
                         const std::vector<std::optional<int>>& forced,
                         const std::vector<int>& closed, const std::vector<char>& want,
                         int cap_students) {
  if (spec.students() > cap_students)
    throw input_error("minmax: market exceeds cap of " + std::to_string(cap_students) +
                      " students");
  const int nh = spec.hospitals();
  MinmaxResult r;
  r.value.assign(nh, 0.0);
  r.witness.assign(nh, empty_matching(spec));
  std::vector<bool> seen(nh, false);
  // Among argmins, prefer first the one whose recommendation already hands h
  // its best response (so obeying the recommendation costs h nothing), then
  // the one kindest to the other hospitals. Punishment schemes replay the
  // witness for a stretch of periods, and a witness that starves bystanders
  // gives them a reason to trigger their own punishment instead.
  std::vector<double> best_assigned(nh, 0.0);
  std::vector<double> best_others(nh, 0.0);
  for_each_ir_matching(spec, forced, closed, [&](const Matching& m) {
    double total = 0.0;
    for (int h = 0; h < nh; ++h) total += set_utility(spec, h, m.roster[h]);
    for (int h = 0; h < nh; ++h) {
      if (!want[h]) continue;
      double br = best_response(spec, h, m).value;
      double assigned = set_utility(spec, h, m.roster[h]);
      double others = total - assigned;
      bool better = false;
      if (!seen[h] || br < r.value[h] - 1e-12) {
        better = true;
      } else if (br <= r.value[h] + 1e-12) {
        if (assigned > best_assigned[h] + 1e-12)
          better = true;
        else if (assigned >= best_assigned[h] - 1e-12 && others > best_others[h] + 1e-12)
          better = true;
      }
      if (better) {
        seen[h] = true;
        r.value[h] = br;
        best_assigned[h] = assigned;
        best_others[h] = others;
        r.witness[h] = m;
      }
    }
    return true;
  });
  return r;
}

}  // namespace

MinmaxResult naive_minmax(const MarketSpec& spec, int cap_students) {
  std::vector<char> want(spec.hospitals(), 1);
  return minmax_over(spec, {}, {}, want, cap_students);
}

MinmaxResult reduced_minmax(const MarketSpec& spec, const TopCoalitionSequence& seq,
                            int cap_students) {
  std::vector<std::optional<int>> forced(spec.students());
  std::vector<int> closed;
  std::vector<char> locked(spec.hospitals(), 0);
  for (const TopPair& p : seq.pairs) {
    locked[p.hospital] = 1;
    closed.push_back(p.hospital);
    for (int w : p.students) forced[w] = p.hospital;
  }
  std::vector<char> want(spec.hospitals(), 1);
  for (int h = 0; h < spec.hospitals(); ++h) want[h] = !locked[h];
  MinmaxResult r = minmax_over(spec, forced, closed, want, cap_students);
  for (const TopPair& p : seq.pairs)
    r.value[p.hospital] = set_utility(spec, p.hospital, p.students);
  // Locked hospitals keep their group in any compatible matching; hand them
  // the bare locked-pairs matching as witness.
  std::vector<int> assign(spec.students(), kUnmatched);
  for (const TopPair& p : seq.pairs)
    for (int w : p.students) assign[w] = p.hospital;
  Matching base = make_matching(spec, assign);
  for (const TopPair& p : seq.pairs) r.witness[p.hospital] = base;
  return r;
}

bool verify_top_coalition_lock(const MarketSpec& spec, const ProcessAutomaton& a,
                               const TopCoalitionSequence& seq) {
  CheckResult chk = check_self_enforcing(spec, a);
  if (!chk.self_enforcing)
    throw input_error("verify_top_coalition_lock: automaton is not self-enforcing");
  for (const AutomatonState& st : a.states) {
    const Matching& m = a.matchings[st.output];
    for (const TopPair& p : seq.pairs)
      if (m.roster[p.hospital] != p.students) return false;
  }
  return true;
}

BisectResult min_delta_bisect(const std::function<bool(double)>& passes, double lo, double hi,
                              double tol) {
  BisectResult r;
  if (passes(lo)) {
    r.status = BisectResult::AlwaysPasses;
    r.delta = lo;
    return r;
  }
  if (!passes(hi)) {
    r.status = BisectResult::NeverPasses;
    r.delta = hi;
    return r;
  }
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (passes(mid)) hi = mid;
    else lo = mid;
  }
  r.status = BisectResult::Found;
  r.delta = 0.5 * (lo + hi);
  return r;
}

}  // namespace remat
