#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace remat {

// Thrown on malformed inputs (files, ids, capacities). The CLI maps this to
// exit code 2; everything else is a plain logic_error and means a bug.
class input_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr int kUnmatched = -1;

// One side long-lived (hospitals, quotas, additive cardinal utility over
// students), one side short-lived (students, strict ordinal preference over
// acceptable hospitals; absence from the list means the outside option is
// preferred). Hospitals and students are dense indices; names are only for io.
struct MarketSpec {
  std::vector<std::string> hospital_names;
  std::vector<int> quota;
  std::vector<std::vector<double>> utility;  // [h][w], > 0, distinct within a row

  std::vector<std::string> student_names;
  std::vector<std::vector<int>> pref;  // [w] = acceptable hospitals, best first

  // Derived by finalize():
  std::vector<std::vector<int>> rank;        // [w][h] = position in pref[w] or -1
  std::vector<std::vector<int>> by_utility;  // [h] = students, descending utility

  int hospitals() const { return static_cast<int>(quota.size()); }
  int students() const { return static_cast<int>(pref.size()); }

  bool acceptable(int w, int h) const { return rank[w][h] >= 0; }

  // Strict "w prefers a to b" where either side may be kUnmatched.
  bool prefers(int w, int a, int b) const {
    int ra = (a == kUnmatched) ? static_cast<int>(pref[w].size()) : rank[w][a];
    int rb = (b == kUnmatched) ? static_cast<int>(pref[w].size()) : rank[w][b];
    if (ra < 0) ra = static_cast<int>(pref[w].size()) + 1;  // unacceptable: below outside
    if (rb < 0) rb = static_cast<int>(pref[w].size()) + 1;
    return ra < rb;
  }

  // Validates invariants and fills the derived tables. Must be called after
  // the raw fields are populated and before any operation uses the spec.
  void finalize();

  int hospital_index(const std::string& name) const;
  int student_index(const std::string& name) const;
};

// A matching is the student->hospital assignment; rosters are kept in sync and
// sorted ascending so set comparisons are plain vector comparisons.
struct Matching {
  std::vector<int> assign;               // [w] -> h or kUnmatched
  std::vector<std::vector<int>> roster;  // [h] -> students, ascending

  bool operator==(const Matching&) const = default;
};

Matching make_matching(const MarketSpec& spec, std::vector<int> assign);
Matching empty_matching(const MarketSpec& spec);

// A coalition deviation: a hospital together with the set it will hire, or a
// lone student leaving (hospital == kUnmatched, students = {w}).
struct Coalition {
  int hospital = kUnmatched;
  std::vector<int> students;  // ascending

  bool operator==(const Coalition&) const = default;
};

double set_utility(const MarketSpec& spec, int h, const std::vector<int>& ws);

// No singleton (hospital or student) strictly gains by walking away.
bool individually_rational(const MarketSpec& spec, const Matching& m);

// Post-deviation matching [m, (h, ws)]: h hires exactly ws, poached students
// leave their hospitals, abandoned students end up unmatched.
Matching apply_deviation(const MarketSpec& spec, const Matching& m, int h,
                         const std::vector<int>& ws);

enum class DeviatorKind { None, Hospital, Unattributable };
struct DeviatorResult {
  DeviatorKind kind = DeviatorKind::Unattributable;
  int hospital = kUnmatched;
  std::vector<int> hired;  // ws such that to == [from, (hospital, ws)]
};

// Given an observed transition from -> to, recovers the unique deviating
// coalition if one exists.
DeviatorResult identify_deviator(const MarketSpec& spec, const Matching& from,
                                 const Matching& to);

// D_h(m): h's current students plus everyone who strictly prefers h to her
// present assignment. Ascending student ids.
std::vector<int> available_set(const MarketSpec& spec, int h, const Matching& m);

struct BestResponse {
  std::vector<int> students;  // ascending
  double value = 0.0;
};

// Utility-maximal feasible hire from D_h(m). With positive additive utilities
// this is the top-quota prefix of the available set.
BestResponse best_response(const MarketSpec& spec, int h, const Matching& m);

// Coalitions that strictly profit against m. Default scans, per hospital, the
// by-utility prefixes of the available set, which is exhaustive for the
// existence question under additive positive utilities; all_subsets additionally
// enumerates every subset (cross-check mode, small markets only). Student
// singleton blocks are reported with hospital == kUnmatched.
std::vector<Coalition> blocking_coalitions(const MarketSpec& spec, const Matching& m,
                                           bool all_subsets = false);

bool is_stable(const MarketSpec& spec, const Matching& m);

// All quota-respecting matchings where matched students are at acceptable
// hospitals; visits in a canonical order (students choose in index order:
// unmatched first, then hospitals ascending). Visitor returns false to stop.
void for_each_ir_matching(const MarketSpec& spec,
                          const std::vector<std::optional<int>>& forced,
                          const std::vector<int>& closed_hospitals,
                          const std::function<bool(const Matching&)>& visit);

// Exhaustive stable set. Refuses markets with more than cap_students students.
std::vector<Matching> enumerate_stable_matchings(const MarketSpec& spec,
                                                 int cap_students = 10);

}  // namespace remat
