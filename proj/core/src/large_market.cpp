#include "remat/large_market.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "remat/market_io.hpp"

namespace remat {

void TierConfig::validate() const {
  auto check_shares = [](const std::vector<double>& s, int k, const char* what) {
    if (static_cast<int>(s.size()) != k)
      throw input_error(std::string("tier config: ") + what + " count mismatch");
    double sum = 0.0;
    for (double x : s) {
      if (!(x >= 0.0))
        throw input_error(std::string("tier config: ") + what + " must be nonnegative");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw input_error(std::string("tier config: ") + what + " must sum to 1");
  };
  if (hospital_classes < 1 || student_classes < 1)
    throw input_error("tier config: class counts must be at least 1");
  check_shares(hospital_shares, hospital_classes, "hospital shares");
  check_shares(student_shares, student_classes, "student shares");
  if (!(beta > 0.0)) throw input_error("tier config: beta must be positive");
  if (quota < 1) throw input_error("tier config: quota must be at least 1");
  if (static_cast<int>(common_values.size()) != student_classes)
    throw input_error("tier config: need one common value per student class");
  for (int l = 0; l < student_classes; ++l) {
    if (common_values[l] < 0.0) throw input_error("tier config: common values must be >= 0");
    if (l + 1 < student_classes && common_values[l] - common_values[l + 1] < 1.0)
      throw input_error("tier config: common value gaps must be at least 1");
  }
}

TierConfig parse_tier_config(std::istream& in, const std::string& origin) {
  TierConfig cfg;
  cfg.hospital_shares.clear();
  cfg.student_shares.clear();
  cfg.common_values.clear();
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string key;
    if (!(ls >> key)) continue;
    std::string where = origin + ":" + std::to_string(lineno);
    std::vector<double> vals;
    std::string tok;
    while (ls >> tok) vals.push_back(parse_number(tok, where));
    auto one = [&]() {
      if (vals.size() != 1) throw input_error(where + ": " + key + " takes one value");
      return vals[0];
    };
    if (key == "TIERS") continue;  // optional header
    else if (key == "K") cfg.hospital_classes = static_cast<int>(one());
    else if (key == "L") cfg.student_classes = static_cast<int>(one());
    else if (key == "HOSPITAL_SHARES") cfg.hospital_shares = vals;
    else if (key == "STUDENT_SHARES") cfg.student_shares = vals;
    else if (key == "BETA") cfg.beta = one();
    else if (key == "Q") cfg.quota = static_cast<int>(one());
    else if (key == "COMMON_VALUES") cfg.common_values = vals;
    else throw input_error(where + ": unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

TierConfig load_tier_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open tier config: " + path);
  return parse_tier_config(in, path);
}

std::string serialize_tier_config(const TierConfig& cfg) {
  std::string out = "TIERS\n";
  out += "K " + std::to_string(cfg.hospital_classes) + "\n";
  out += "HOSPITAL_SHARES";
  for (double x : cfg.hospital_shares) out += " " + format_double(x);
  out += "\nL " + std::to_string(cfg.student_classes) + "\n";
  out += "STUDENT_SHARES";
  for (double x : cfg.student_shares) out += " " + format_double(x);
  out += "\nBETA " + format_double(cfg.beta) + "\n";
  out += "Q " + std::to_string(cfg.quota) + "\n";
  out += "COMMON_VALUES";
  for (double x : cfg.common_values) out += " " + format_double(x);
  out += "\n";
  return out;
}

std::vector<int> share_counts(const std::vector<double>& shares, int total) {
  const int k = static_cast<int>(shares.size());
  std::vector<int> counts(k);
  std::vector<std::pair<double, int>> frac(k);
  int assigned = 0;
  for (int i = 0; i < k; ++i) {
    double exact = shares[i] * total;
    counts[i] = static_cast<int>(std::floor(exact + 1e-12));
    assigned += counts[i];
    frac[i] = {exact - counts[i], i};
  }
  std::stable_sort(frac.begin(), frac.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int r = 0; r < total - assigned; ++r) ++counts[frac[r].second];
  return counts;
}

std::vector<int> RealizedMarket::hospitals_of_class(int k) const {
  std::vector<int> out;
  for (int h = 0; h < spec.hospitals(); ++h)
    if (hospital_class_of[h] == k) out.push_back(h);
  return out;
}

std::vector<int> RealizedMarket::students_of_class(int l) const {
  std::vector<int> out;
  for (int w = 0; w < spec.students(); ++w)
    if (student_class_of[w] == l) out.push_back(w);
  return out;
}

RealizedMarket generate_market(const TierConfig& cfg, int n, std::uint64_t seed) {
  cfg.validate();
  if (n < 1) throw input_error("generate_market: n must be positive");
  RealizedMarket mk;
  mk.config = cfg;
  mk.n = n;
  Rng rng(seed);

  std::vector<int> h_counts = share_counts(cfg.hospital_shares, n);
  const int nw = static_cast<int>(std::ceil(cfg.beta * n * cfg.quota - 1e-12));
  std::vector<int> w_counts = share_counts(cfg.student_shares, nw);

  for (int k = 0; k < cfg.hospital_classes; ++k)
    for (int i = 0; i < h_counts[k]; ++i) mk.hospital_class_of.push_back(k + 1);
  for (int l = 0; l < cfg.student_classes; ++l)
    for (int i = 0; i < w_counts[l]; ++i) mk.student_class_of.push_back(l + 1);

  MarketSpec& spec = mk.spec;
  for (int h = 0; h < n; ++h) {
    spec.hospital_names.push_back("f" + std::to_string(h + 1));
    spec.quota.push_back(cfg.quota);
  }
  for (int w = 0; w < nw; ++w) spec.student_names.push_back("w" + std::to_string(w + 1));

  mk.zeta.assign(n, std::vector<double>(nw));
  spec.utility.assign(n, std::vector<double>(nw));
  for (int h = 0; h < n; ++h) {
    for (int w = 0; w < nw; ++w) {
      mk.zeta[h][w] = rng.next_double();
      spec.utility[h][w] = cfg.common_values[mk.student_class_of[w] - 1] + mk.zeta[h][w];
    }
    // Exact double ties are astronomically unlikely but would break the strict
    // ranking invariant, so nudge them apart deterministically.
    for (;;) {
      std::vector<double> sorted = spec.utility[h];
      std::sort(sorted.begin(), sorted.end());
      bool dup = false;
      for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] == sorted[i - 1]) dup = true;
      if (!dup) break;
      for (int w = 1; w < nw; ++w)
        for (int v = 0; v < w; ++v)
          if (spec.utility[h][w] == spec.utility[h][v])
            spec.utility[h][w] = std::nextafter(spec.utility[h][w], 2.0 * spec.utility[h][w] + 1.0);
    }
  }

  // Class-ordered preferences, uniform within a class, everyone acceptable.
  for (int w = 0; w < nw; ++w) {
    std::vector<int> order;
    for (int k = 1; k <= cfg.hospital_classes; ++k) {
      std::vector<int> block;
      for (int h = 0; h < n; ++h)
        if (mk.hospital_class_of[h] == k) block.push_back(h);
      rng.shuffle(block);
      order.insert(order.end(), block.begin(), block.end());
    }
    spec.pref.push_back(std::move(order));
  }
  spec.finalize();
  return mk;
}

std::vector<int> achievable_classes(const TierConfig& cfg, int k, int n) {
  cfg.validate();
  if (k < 1 || k > cfg.hospital_classes) throw input_error("achievable_classes: bad class index");
  std::vector<int> h_counts = share_counts(cfg.hospital_shares, n);
  const int nw = static_cast<int>(std::ceil(cfg.beta * n * cfg.quota - 1e-12));
  std::vector<int> w_counts = share_counts(cfg.student_shares, nw);

  auto seats_through = [&](int kk) {  // cumulative seats of classes 1..kk
    long long s = 0;
    for (int i = 0; i < kk; ++i) s += static_cast<long long>(h_counts[i]) * cfg.quota;
    return s;
  };
  auto students_through = [&](int ll) {
    long long s = 0;
    for (int i = 0; i < ll; ++i) s += w_counts[i];
    return s;
  };

  std::vector<int> out;
  if (seats_through(k) == seats_through(k - 1)) return out;  // empty tier
  for (int l = 1; l <= cfg.student_classes; ++l) {
    // Strict interval overlap: the class must actually contribute students to
    // this tier's seat range, boundary touching does not count.
    if (w_counts[l - 1] > 0 && students_through(l) > seats_through(k - 1) &&
        students_through(l - 1) < seats_through(k))
      out.push_back(l);
  }
  return out;
}

}  // namespace remat
