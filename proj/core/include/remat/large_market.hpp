#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "remat/market.hpp"
#include "remat/rng.hpp"

namespace remat {

// Random market family: K hospital quality classes with population shares,
// L student quality classes with shares, common quota q, student/seat ratio
// beta. Hospital cardinal utility for a student is common_values[class] plus an
// idiosyncratic uniform draw; class constants are spaced so any student of a
// better class beats any student of a worse one. Students rank all hospitals,
// better classes strictly first, uniformly at random within a class.
struct TierConfig {
  int hospital_classes = 1;
  std::vector<double> hospital_shares;  // sums to 1
  int student_classes = 1;
  std::vector<double> student_shares;  // sums to 1
  double beta = 1.0;
  int quota = 1;
  std::vector<double> common_values;  // one per student class, descending

  void validate() const;
};

TierConfig parse_tier_config(std::istream& in, const std::string& origin = "<stream>");
TierConfig load_tier_config(const std::string& path);
std::string serialize_tier_config(const TierConfig& cfg);

// Largest-remainder split of `total` into shares (ties to lower index).
std::vector<int> share_counts(const std::vector<double>& shares, int total);

struct RealizedMarket {
  MarketSpec spec;
  TierConfig config;
  int n = 0;                            // hospital count
  std::vector<int> hospital_class_of;   // 1-based class index per hospital
  std::vector<int> student_class_of;    // 1-based class index per student
  std::vector<std::vector<double>> zeta;  // idiosyncratic part of utility

  std::vector<int> hospitals_of_class(int k) const;
  std::vector<int> students_of_class(int l) const;
};

RealizedMarket generate_market(const TierConfig& cfg, int n, std::uint64_t seed);

// Student classes a class-k hospital can be matched with when population
// counts are balanced tier against tier (cumulative seat counts vs cumulative
// student counts at size n). 1-based class labels.
std::vector<int> achievable_classes(const TierConfig& cfg, int k, int n);

}  // namespace remat
