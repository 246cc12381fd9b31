#include "remat/market.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <set>

namespace remat {

void MarketSpec::finalize() {
  const int nh = hospitals();
  const int nw = students();
  if (static_cast<int>(hospital_names.size()) != nh ||
      static_cast<int>(utility.size()) != nh ||
      static_cast<int>(student_names.size()) != nw) {
    throw input_error("market: section sizes disagree");
  }
  for (int h = 0; h < nh; ++h) {
    if (quota[h] < 0) throw input_error("market: negative quota for " + hospital_names[h]);
    if (static_cast<int>(utility[h].size()) != nw)
      throw input_error("market: utility row length mismatch for " + hospital_names[h]);
    std::set<double> seen;
    for (double u : utility[h]) {
      if (!(u > 0.0) || !std::isfinite(u))
        throw input_error("market: utilities must be positive finite (" + hospital_names[h] + ")");
      if (!seen.insert(u).second)
        throw input_error("market: duplicate utility value in row " + hospital_names[h]);
    }
  }

  rank.assign(nw, std::vector<int>(nh, -1));
  for (int w = 0; w < nw; ++w) {
    std::set<int> listed;
    for (int i = 0; i < static_cast<int>(pref[w].size()); ++i) {
      int h = pref[w][i];
      if (h < 0 || h >= nh) throw input_error("market: bad hospital in list of " + student_names[w]);
      if (!listed.insert(h).second)
        throw input_error("market: hospital repeated in list of " + student_names[w]);
      rank[w][h] = i;
    }
  }

  by_utility.assign(nh, {});
  for (int h = 0; h < nh; ++h) {
    by_utility[h].resize(nw);
    for (int w = 0; w < nw; ++w) by_utility[h][w] = w;
    std::sort(by_utility[h].begin(), by_utility[h].end(),
              [&](int a, int b) { return utility[h][a] > utility[h][b]; });
  }
}

int MarketSpec::hospital_index(const std::string& name) const {
  for (int h = 0; h < hospitals(); ++h)
    if (hospital_names[h] == name) return h;
  throw input_error("unknown hospital id: " + name);
}

int MarketSpec::student_index(const std::string& name) const {
  for (int w = 0; w < students(); ++w)
    if (student_names[w] == name) return w;
  throw input_error("unknown student id: " + name);
}

Matching make_matching(const MarketSpec& spec, std::vector<int> assign) {
  if (static_cast<int>(assign.size()) != spec.students())
    throw input_error("matching: assignment vector has wrong length");
  Matching m;
  m.assign = std::move(assign);
  m.roster.assign(spec.hospitals(), {});
  for (int w = 0; w < spec.students(); ++w) {
    int h = m.assign[w];
    if (h == kUnmatched) continue;
    if (h < 0 || h >= spec.hospitals()) throw input_error("matching: bad hospital index");
    m.roster[h].push_back(w);
  }
  for (int h = 0; h < spec.hospitals(); ++h) {
    if (static_cast<int>(m.roster[h].size()) > spec.quota[h])
      throw input_error("matching: quota exceeded at " + spec.hospital_names[h]);
  }
  return m;
}

Matching empty_matching(const MarketSpec& spec) {
  return make_matching(spec, std::vector<int>(spec.students(), kUnmatched));
}

double set_utility(const MarketSpec& spec, int h, const std::vector<int>& ws) {
  double s = 0.0;
  for (int w : ws) s += spec.utility[h][w];
  return s;
}

bool individually_rational(const MarketSpec& spec, const Matching& m) {
  for (int w = 0; w < spec.students(); ++w) {
    int h = m.assign[w];
    if (h != kUnmatched && !spec.acceptable(w, h)) return false;
  }
  // Hospital side: firing a subset profits exactly when some member contributes
  // nonpositive utility. finalize() already rejects such utilities, but the
  // check stays in place so hand-built states cannot smuggle one through.
  for (int h = 0; h < spec.hospitals(); ++h)
    for (int w : m.roster[h])
      if (!(spec.utility[h][w] > 0.0)) return false;
  return true;
}

Matching apply_deviation(const MarketSpec& spec, const Matching& m, int h,
                         const std::vector<int>& ws) {
  if (h < 0 || h >= spec.hospitals()) throw input_error("apply_deviation: bad hospital");
  if (static_cast<int>(ws.size()) > spec.quota[h])
    throw input_error("apply_deviation: coalition exceeds quota of " + spec.hospital_names[h]);
  std::vector<int> assign = m.assign;
  for (int w : m.roster[h]) assign[w] = kUnmatched;  // abandoned members
  for (int w : ws) {
    if (w < 0 || w >= spec.students()) throw input_error("apply_deviation: bad student");
    assign[w] = h;
  }
  return make_matching(spec, assign);
}

DeviatorResult identify_deviator(const MarketSpec& spec, const Matching& from,
                                 const Matching& to) {
  DeviatorResult r;
  if (from == to) {
    r.kind = DeviatorKind::None;
    return r;
  }
  for (int h = 0; h < spec.hospitals(); ++h) {
    const std::vector<int>& ws = to.roster[h];
    if (static_cast<int>(ws.size()) > spec.quota[h]) continue;
    if (apply_deviation(spec, from, h, ws) == to) {
      // Unique when it exists: a second match would contradict that distinct
      // single-hospital deviations produce distinct matchings.
      r.kind = DeviatorKind::Hospital;
      r.hospital = h;
      r.hired = ws;
      return r;
    }
  }
  r.kind = DeviatorKind::Unattributable;
  return r;
}

std::vector<int> available_set(const MarketSpec& spec, int h, const Matching& m) {
  std::vector<int> out;
  for (int w = 0; w < spec.students(); ++w) {
    if (m.assign[w] == h || spec.prefers(w, h, m.assign[w])) out.push_back(w);
  }
  return out;
}

BestResponse best_response(const MarketSpec& spec, int h, const Matching& m) {
  BestResponse br;
  int budget = spec.quota[h];
  // Walk students in h's utility order, keep the available ones.
  for (int w : spec.by_utility[h]) {
    if (budget == 0) break;
    if (m.assign[w] == h || spec.prefers(w, h, m.assign[w])) {
      br.students.push_back(w);
      br.value += spec.utility[h][w];
      --budget;
    }
  }
  std::sort(br.students.begin(), br.students.end());
  return br;
}

namespace {

void push_coalition(std::vector<Coalition>& out, int h, std::vector<int> ws) {
  std::sort(ws.begin(), ws.end());
  out.push_back(Coalition{h, std::move(ws)});
}

}  // namespace

std::vector<Coalition> blocking_coalitions(const MarketSpec& spec, const Matching& m,
                                           bool all_subsets) {
  std::vector<Coalition> out;
  for (int h = 0; h < spec.hospitals(); ++h) {
    double current = set_utility(spec, h, m.roster[h]);
    std::vector<int> avail;  // in h's utility order
    for (int w : spec.by_utility[h]) {
      if (m.assign[w] == h || spec.prefers(w, h, m.assign[w])) avail.push_back(w);
    }
    if (!all_subsets) {
      std::vector<int> prefix;
      double value = 0.0;
      for (int w : avail) {
        if (static_cast<int>(prefix.size()) == spec.quota[h]) break;
        prefix.push_back(w);
        value += spec.utility[h][w];
        std::vector<int> sorted = prefix;
        std::sort(sorted.begin(), sorted.end());
        if (value > current && sorted != m.roster[h]) push_coalition(out, h, sorted);
      }
    } else {
      int n = static_cast<int>(avail.size());
      if (n > 20) throw input_error("blocking_coalitions: subset mode limited to 20 available students");
      for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
        if (std::popcount(mask) > spec.quota[h]) continue;
        std::vector<int> ws;
        double value = 0.0;
        for (int i = 0; i < n; ++i)
          if (mask & (1ULL << i)) {
            ws.push_back(avail[i]);
            value += spec.utility[h][avail[i]];
          }
        std::sort(ws.begin(), ws.end());
        if (value > current && ws != m.roster[h]) out.push_back(Coalition{h, ws});
      }
    }
  }
  // Students stuck below their outside option leave on their own.
  for (int w = 0; w < spec.students(); ++w) {
    int h = m.assign[w];
    if (h != kUnmatched && !spec.acceptable(w, h))
      out.push_back(Coalition{kUnmatched, {w}});
  }
  std::sort(out.begin(), out.end(), [](const Coalition& a, const Coalition& b) {
    if (a.hospital != b.hospital) return a.hospital < b.hospital;
    return a.students < b.students;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool is_stable(const MarketSpec& spec, const Matching& m) {
  if (!individually_rational(spec, m)) return false;
  for (int h = 0; h < spec.hospitals(); ++h) {
    BestResponse br = best_response(spec, h, m);
    // Same set means no improvement; comparing the sums instead would trip
    // over addition-order rounding.
    if (br.students == m.roster[h]) continue;
    if (br.value > set_utility(spec, h, m.roster[h])) return false;
  }
  return true;
}

void for_each_ir_matching(const MarketSpec& spec,
                          const std::vector<std::optional<int>>& forced,
                          const std::vector<int>& closed_hospitals,
                          const std::function<bool(const Matching&)>& visit) {
  const int nw = spec.students();
  const int nh = spec.hospitals();
  std::vector<char> closed(nh, 0);
  for (int h : closed_hospitals) closed[h] = 1;
  std::vector<int> room = spec.quota;
  std::vector<int> assign(nw, kUnmatched);

  // Apply forced assignments up front.
  for (int w = 0; w < nw; ++w) {
    if (w < static_cast<int>(forced.size()) && forced[w].has_value()) {
      int h = *forced[w];
      if (h != kUnmatched) {
        if (room[h] == 0) throw input_error("for_each_ir_matching: forced assignment over quota");
        --room[h];
      }
      assign[w] = h;
    }
  }

  bool stop = false;
  std::function<void(int)> rec = [&](int w) {
    if (stop) return;
    if (w == nw) {
      if (!visit(make_matching(spec, assign))) stop = true;
      return;
    }
    if (w < static_cast<int>(forced.size()) && forced[w].has_value()) {
      rec(w + 1);
      return;
    }
    rec(w + 1);  // unmatched branch first
    for (int h : spec.pref[w]) {
      if (stop) return;
      if (closed[h] || room[h] == 0) continue;
      --room[h];
      assign[w] = h;
      rec(w + 1);
      assign[w] = kUnmatched;
      ++room[h];
    }
  };
  rec(0);
}

std::vector<Matching> enumerate_stable_matchings(const MarketSpec& spec, int cap_students) {
  if (spec.students() > cap_students)
    throw input_error("enumerate_stable_matchings: market exceeds cap of " +
                      std::to_string(cap_students) + " students");
  std::vector<Matching> out;
  for_each_ir_matching(spec, {}, {}, [&](const Matching& m) {
    if (is_stable(spec, m)) out.push_back(m);
    return true;
  });
  return out;
}

}  // namespace remat
