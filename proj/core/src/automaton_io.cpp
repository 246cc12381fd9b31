#include "remat/automaton_io.hpp"

#include <fstream>
#include <sstream>

#include "remat/market_io.hpp"

namespace remat {

namespace {

struct RawLottery {
  std::vector<std::pair<std::string, double>> outcomes;
  int line = 0;
};

struct RawRow {
  enum Kind { OnPath, Default, Dev, On } kind;
  std::string key;  // hospital (Dev) or matching name (On)
  RawLottery lottery;
};

struct RawState {
  std::string name;
  std::string output;
  int line = 0;
  std::vector<RawRow> rows;
};

}  // namespace

ProcessAutomaton parse_automaton(const MarketSpec& spec, std::istream& in,
                                 const std::string& origin) {
  ProcessAutomaton a;
  std::vector<RawState> raw_states;
  RawLottery raw_initial;
  bool have_initial = false;

  std::string pending_matching;  // name of matching block being read
  std::vector<int> pending_assign;
  int pending_line = 0;
  auto flush_matching = [&]() {
    if (pending_matching.empty()) return;
    for (const std::string& n : a.matching_names)
      if (n == pending_matching)
        throw input_error(origin + ":" + std::to_string(pending_line) +
                          ": duplicate matching name '" + pending_matching + "'");
    a.matching_names.push_back(pending_matching);
    a.matchings.push_back(make_matching(spec, pending_assign));
    pending_matching.clear();
  };

  auto where = [&](int line) { return origin + ":" + std::to_string(line); };

  auto parse_lottery_tail = [&](const std::vector<std::string>& toks, std::size_t from,
                                int line) {
    RawLottery l;
    l.line = line;
    if ((toks.size() - from) % 2 != 0 || toks.size() == from)
      throw input_error(where(line) + ": lottery must be 'state weight' pairs");
    for (std::size_t i = from; i < toks.size(); i += 2)
      l.outcomes.emplace_back(toks[i], parse_number(toks[i + 1], where(line)));
    return l;
  };

  std::string rawline;
  int lineno = 0;
  while (std::getline(in, rawline)) {
    ++lineno;
    if (auto hash = rawline.find('#'); hash != std::string::npos) rawline.erase(hash);
    std::istringstream ls(rawline);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) toks.push_back(t);
    if (toks.empty()) continue;
    const std::string& head = toks[0];

    if (head == "AUTOMATON") {
      if (toks.size() != 2) throw input_error(where(lineno) + ": AUTOMATON needs a name");
      a.name = toks[1];
    } else if (head == "DISCOUNT") {
      if (toks.size() != 2) throw input_error(where(lineno) + ": DISCOUNT needs a value");
      a.discount = parse_number(toks[1], where(lineno));
    } else if (head == "MATCHING") {
      if (toks.size() != 2) throw input_error(where(lineno) + ": MATCHING needs a name");
      flush_matching();
      pending_matching = toks[1];
      pending_line = lineno;
      pending_assign.assign(spec.students(), kUnmatched);
    } else if (head == "STATE") {
      flush_matching();
      if (toks.size() != 4 || toks[2] != "OUTPUT")
        throw input_error(where(lineno) + ": expected STATE <name> OUTPUT <matching>");
      RawState st;
      st.name = toks[1];
      st.output = toks[3];
      st.line = lineno;
      raw_states.push_back(std::move(st));
    } else if (head == "ONPATH" || head == "DEFAULT" || head == "DEV" || head == "ON") {
      if (raw_states.empty())
        throw input_error(where(lineno) + ": transition row outside STATE block");
      RawRow row;
      std::size_t arrow;
      if (head == "ONPATH" || head == "DEFAULT") {
        row.kind = head == "ONPATH" ? RawRow::OnPath : RawRow::Default;
        arrow = 1;
      } else {
        row.kind = head == "DEV" ? RawRow::Dev : RawRow::On;
        if (toks.size() < 2) throw input_error(where(lineno) + ": " + head + " needs a key");
        row.key = toks[1];
        arrow = 2;
      }
      if (toks.size() <= arrow || toks[arrow] != "->")
        throw input_error(where(lineno) + ": expected '->' in transition row");
      row.lottery = parse_lottery_tail(toks, arrow + 1, lineno);
      raw_states.back().rows.push_back(std::move(row));
    } else if (head == "INITIAL") {
      flush_matching();
      raw_initial = parse_lottery_tail(toks, 1, lineno);
      have_initial = true;
    } else if (!pending_matching.empty()) {
      // Roster line of the open MATCHING block.
      std::string hname = head;
      if (hname.empty() || hname.back() != ':')
        throw input_error(where(lineno) + ": expected 'hospital:' roster line");
      hname.pop_back();
      int h = spec.hospital_index(hname);
      for (std::size_t i = 1; i < toks.size(); ++i) {
        int w = spec.student_index(toks[i]);
        if (pending_assign[w] != kUnmatched)
          throw input_error(where(lineno) + ": student assigned twice");
        pending_assign[w] = h;
      }
    } else {
      throw input_error(where(lineno) + ": unrecognized line '" + head + "'");
    }
  }
  flush_matching();

  if (raw_states.empty()) throw input_error(origin + ": automaton has no states");
  if (!have_initial) throw input_error(origin + ": automaton has no INITIAL lottery");

  // Second pass: resolve names.
  auto matching_id = [&](const std::string& n, int line) {
    for (int i = 0; i < static_cast<int>(a.matching_names.size()); ++i)
      if (a.matching_names[i] == n) return i;
    throw input_error(where(line) + ": unknown matching '" + n + "'");
  };
  for (const RawState& rs : raw_states) {
    AutomatonState st;
    st.name = rs.name;
    st.output = matching_id(rs.output, rs.line);
    a.states.push_back(std::move(st));
  }
  auto state_id = [&](const std::string& n, int line) {
    for (int i = 0; i < static_cast<int>(a.states.size()); ++i)
      if (a.states[i].name == n) return i;
    throw input_error(where(line) + ": unknown state '" + n + "'");
  };
  auto resolve = [&](const RawLottery& rl) {
    Lottery l;
    for (const auto& [sname, wgt] : rl.outcomes)
      l.outcomes.emplace_back(state_id(sname, rl.line), wgt);
    return l;
  };
  for (std::size_t i = 0; i < raw_states.size(); ++i) {
    for (const RawRow& row : raw_states[i].rows) {
      switch (row.kind) {
        case RawRow::OnPath:
          a.states[i].rule.on_path = resolve(row.lottery);
          break;
        case RawRow::Default:
          a.states[i].rule.fallback = resolve(row.lottery);
          break;
        case RawRow::Dev:
          a.states[i].rule.on_deviator.emplace_back(spec.hospital_index(row.key),
                                                    resolve(row.lottery));
          break;
        case RawRow::On:
          a.states[i].rule.on_matching.emplace_back(matching_id(row.key, row.lottery.line),
                                                    resolve(row.lottery));
          break;
      }
    }
  }
  a.initial = resolve(raw_initial);
  a.validate(spec);
  return a;
}

ProcessAutomaton load_automaton(const MarketSpec& spec, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open automaton file: " + path);
  return parse_automaton(spec, in, path);
}

std::string serialize_automaton(const MarketSpec& spec, const ProcessAutomaton& a) {
  std::string out = "AUTOMATON " + (a.name.empty() ? std::string("a") : a.name) + "\n";
  out += "DISCOUNT " + format_double(a.discount) + "\n";
  for (std::size_t i = 0; i < a.matchings.size(); ++i) {
    out += "MATCHING " + a.matching_names[i] + "\n";
    for (int h = 0; h < spec.hospitals(); ++h) {
      out += spec.hospital_names[h] + ":";
      for (int w : a.matchings[i].roster[h]) out += " " + spec.student_names[w];
      out += "\n";
    }
  }
  auto lot = [&](const Lottery& l) {
    std::string s;
    for (const auto& [st, wgt] : l.outcomes)
      s += " " + a.states[st].name + " " + format_double(wgt);
    return s;
  };
  for (const AutomatonState& st : a.states) {
    out += "STATE " + st.name + " OUTPUT " + a.matching_names[st.output] + "\n";
    for (const auto& [mi, l] : st.rule.on_matching)
      out += "ON " + a.matching_names[mi] + " ->" + lot(l) + "\n";
    if (st.rule.on_path) out += "ONPATH ->" + lot(*st.rule.on_path) + "\n";
    for (const auto& [h, l] : st.rule.on_deviator)
      out += "DEV " + spec.hospital_names[h] + " ->" + lot(l) + "\n";
    if (st.rule.fallback) out += "DEFAULT ->" + lot(*st.rule.fallback) + "\n";
  }
  out += "INITIAL" + lot(a.initial) + "\n";
  return out;
}

void save_automaton(const MarketSpec& spec, const ProcessAutomaton& a,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write automaton file: " + path);
  out << serialize_automaton(spec, a);
}

}  // namespace remat
