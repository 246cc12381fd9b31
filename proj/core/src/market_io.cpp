#include "remat/market_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace remat {

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

double parse_number(const std::string& tok, const std::string& context) {
  auto parse_part = [&](const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw input_error(context + ": bad number '" + tok + "'");
    return v;
  };
  auto slash = tok.find('/');
  if (slash == std::string::npos) return parse_part(tok);
  double num = parse_part(tok.substr(0, slash));
  double den = parse_part(tok.substr(slash + 1));
  if (den == 0.0) throw input_error(context + ": zero denominator in '" + tok + "'");
  return num / den;
}

namespace {

struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> lines;
  std::string raw;
  int n = 0;
  while (std::getline(in, raw)) {
    ++n;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    Line line;
    line.number = n;
    std::string tok;
    while (ls >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

std::string at(const std::string& origin, int line) {
  return origin + ":" + std::to_string(line);
}

}  // namespace

MarketSpec parse_market(std::istream& in, const std::string& origin) {
  MarketSpec spec;
  std::vector<std::pair<int, std::vector<std::string>>> hospital_rows;  // line, tokens
  std::vector<std::pair<int, std::vector<std::string>>> student_rows;

  enum { None, Hospitals, Students } section = None;
  for (const Line& line : tokenize(in)) {
    const std::string& head = line.tokens[0];
    if (head == "HOSPITALS") {
      section = Hospitals;
    } else if (head == "STUDENTS") {
      section = Students;
    } else if (section == Hospitals) {
      hospital_rows.emplace_back(line.number, line.tokens);
    } else if (section == Students) {
      student_rows.emplace_back(line.number, line.tokens);
    } else {
      throw input_error(at(origin, line.number) + ": expected HOSPITALS or STUDENTS header");
    }
  }

  for (const auto& [ln, toks] : student_rows) {
    (void)ln;
    spec.student_names.push_back(toks[0]);
  }
  for (const auto& [ln, toks] : hospital_rows) {
    if (toks.size() < 2) throw input_error(at(origin, ln) + ": hospital row needs id and quota");
    spec.hospital_names.push_back(toks[0]);
    double q = parse_number(toks[1], at(origin, ln));
    if (q < 0 || q != static_cast<int>(q))
      throw input_error(at(origin, ln) + ": quota must be a nonnegative integer");
    spec.quota.push_back(static_cast<int>(q));
    if (toks.size() - 2 != spec.student_names.size())
      throw input_error(at(origin, ln) + ": expected " +
                        std::to_string(spec.student_names.size()) + " utilities, got " +
                        std::to_string(toks.size() - 2));
    std::vector<double> row;
    for (std::size_t i = 2; i < toks.size(); ++i)
      row.push_back(parse_number(toks[i], at(origin, ln)));
    spec.utility.push_back(std::move(row));
  }
  // Resolve student preference lists now that hospital ids are known.
  for (const auto& [ln, toks] : student_rows) {
    std::vector<int> prefs;
    for (std::size_t i = 1; i < toks.size(); ++i) {
      bool found = false;
      for (int h = 0; h < static_cast<int>(spec.hospital_names.size()); ++h) {
        if (spec.hospital_names[h] == toks[i]) {
          prefs.push_back(h);
          found = true;
          break;
        }
      }
      if (!found) throw input_error(at(origin, ln) + ": unknown hospital '" + toks[i] + "'");
    }
    spec.pref.push_back(std::move(prefs));
  }

  try {
    spec.finalize();
  } catch (const input_error& e) {
    throw input_error(origin + ": " + e.what());
  }
  return spec;
}

MarketSpec load_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open market file: " + path);
  return parse_market(in, path);
}

std::string serialize_market(const MarketSpec& spec) {
  std::string out = "HOSPITALS\n";
  for (int h = 0; h < spec.hospitals(); ++h) {
    out += spec.hospital_names[h] + " " + std::to_string(spec.quota[h]);
    for (int w = 0; w < spec.students(); ++w) out += " " + format_double(spec.utility[h][w]);
    out += "\n";
  }
  out += "STUDENTS\n";
  for (int w = 0; w < spec.students(); ++w) {
    out += spec.student_names[w];
    for (int h : spec.pref[w]) out += " " + spec.hospital_names[h];
    out += "\n";
  }
  return out;
}

NamedMatchings parse_matchings(const MarketSpec& spec, std::istream& in,
                               const std::string& origin) {
  NamedMatchings out;
  std::vector<int> assign;
  std::string name;
  int start_line = 0;
  auto flush = [&]() {
    if (name.empty()) return;
    try {
      out.emplace_back(name, make_matching(spec, assign));
    } catch (const input_error& e) {
      throw input_error(at(origin, start_line) + ": " + e.what());
    }
    name.clear();
  };
  for (const Line& line : tokenize(in)) {
    if (line.tokens[0] == "MATCHING") {
      if (line.tokens.size() != 2)
        throw input_error(at(origin, line.number) + ": MATCHING needs a name");
      flush();
      name = line.tokens[1];
      start_line = line.number;
      assign.assign(spec.students(), kUnmatched);
      continue;
    }
    if (name.empty())
      throw input_error(at(origin, line.number) + ": roster line outside MATCHING block");
    std::string hname = line.tokens[0];
    if (hname.empty() || hname.back() != ':')
      throw input_error(at(origin, line.number) + ": expected 'hospital:' roster line");
    hname.pop_back();
    int h;
    try {
      h = spec.hospital_index(hname);
    } catch (const input_error& e) {
      throw input_error(at(origin, line.number) + ": " + e.what());
    }
    for (std::size_t i = 1; i < line.tokens.size(); ++i) {
      int w;
      try {
        w = spec.student_index(line.tokens[i]);
      } catch (const input_error& e) {
        throw input_error(at(origin, line.number) + ": " + e.what());
      }
      if (assign[w] != kUnmatched)
        throw input_error(at(origin, line.number) + ": student '" + line.tokens[i] +
                          "' assigned twice");
      assign[w] = h;
    }
  }
  flush();
  return out;
}

NamedMatchings load_matchings(const MarketSpec& spec, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open matchings file: " + path);
  return parse_matchings(spec, in, path);
}

std::string serialize_matchings(const MarketSpec& spec, const NamedMatchings& ms) {
  std::string out;
  for (const auto& [name, m] : ms) {
    out += "MATCHING " + name + "\n";
    for (int h = 0; h < spec.hospitals(); ++h) {
      out += spec.hospital_names[h] + ":";
      for (int w : m.roster[h]) out += " " + spec.student_names[w];
      out += "\n";
    }
  }
  return out;
}

const Matching& find_matching(const NamedMatchings& ms, const std::string& name) {
  for (const auto& [n, m] : ms)
    if (n == name) return m;
  throw input_error("no matching named '" + name + "'");
}

}  // namespace remat
