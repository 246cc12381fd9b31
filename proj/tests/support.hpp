#pragma once

#include <string>
#include <vector>

#include "remat/market.hpp"
#include "remat/rng.hpp"

// Fixture path helper; REMAT_DATA_DIR is injected by the build.
inline std::string data_path(const std::string& name) {
  return std::string(REMAT_DATA_DIR) + "/" + name;
}

// Hand-built copy of the three-hospital benchmark market so unit tests do not
// all depend on file loading working. common_order=true gives every student
// the same f1 > f2 > fr ranking; false uses the split ranking variant.
inline remat::MarketSpec benchmark_market(bool common_order) {
  remat::MarketSpec spec;
  spec.hospital_names = {"f1", "f2", "fr"};
  spec.quota = {2, 2, 2};
  spec.utility = {{5, 4, 3, 2, 1}, {2, 4, 5, 3, 1}, {2, 5, 3, 4, 1}};
  spec.student_names = {"w1", "w2", "w3", "w4", "w5"};
  if (common_order) {
    spec.pref = {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}, {0, 1, 2}, {0, 1, 2}};
  } else {
    spec.pref = {{1, 0, 2}, {1, 0, 2}, {0, 1, 2}, {0, 1, 2}, {0, 1, 2}};
  }
  spec.finalize();
  return spec;
}

inline remat::Matching matching_of(const remat::MarketSpec& spec, std::vector<int> assign) {
  return remat::make_matching(spec, std::move(assign));
}

// Small random market: up to 4 hospitals, up to 8 students, quotas up to 3.
// Utilities are a shuffled ladder with jitter (positive, distinct within each
// row); students list a random subset of hospitals in random order, so some
// find nobody acceptable.
inline remat::MarketSpec random_small_market(remat::Rng& rng) {
  remat::MarketSpec spec;
  const int nh = 1 + static_cast<int>(rng.next_below(4));
  const int nw = 1 + static_cast<int>(rng.next_below(8));
  for (int h = 0; h < nh; ++h) {
    spec.hospital_names.push_back("f" + std::to_string(h + 1));
    spec.quota.push_back(1 + static_cast<int>(rng.next_below(3)));
    std::vector<int> ladder(nw);
    for (int w = 0; w < nw; ++w) ladder[w] = w + 1;
    rng.shuffle(ladder);
    std::vector<double> row(nw);
    for (int w = 0; w < nw; ++w) row[w] = ladder[w] + 0.5 * rng.next_double();
    spec.utility.push_back(row);
  }
  for (int w = 0; w < nw; ++w) {
    spec.student_names.push_back("w" + std::to_string(w + 1));
    std::vector<int> list;
    for (int h = 0; h < nh; ++h)
      if (rng.next_double() < 0.8) list.push_back(h);
    rng.shuffle(list);
    spec.pref.push_back(list);
  }
  spec.finalize();
  return spec;
}
