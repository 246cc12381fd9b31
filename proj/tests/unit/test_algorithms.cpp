#include <doctest.h>

#include <algorithm>
#include <vector>

#include "remat/algorithms.hpp"
#include "remat/market.hpp"

#include "support.hpp"

using namespace remat;

namespace {

// Two unit-quota hospitals where both students rank f2 first; the draft against
// f1 hands it its lesser student.
MarketSpec two_by_two() {
  MarketSpec spec;
  spec.hospital_names = {"f1", "f2"};
  spec.quota = {1, 1};
  spec.utility = {{2, 1}, {3, 1}};
  spec.student_names = {"wa", "wb"};
  spec.pref = {{1, 0}, {1, 0}};
  spec.finalize();
  return spec;
}

}  // namespace

TEST_CASE("deferred acceptance hits both extreme matchings") {
  const MarketSpec t1 = benchmark_market(false);
  CHECK(deferred_acceptance(t1, ProposingSide::Students) ==
        matching_of(t1, {1, 1, 0, 0, 2}));
  CHECK(deferred_acceptance(t1, ProposingSide::Hospitals) ==
        matching_of(t1, {0, 1, 0, 1, 2}));

  const MarketSpec t2 = benchmark_market(true);
  const Matching mstar = matching_of(t2, {0, 0, 1, 1, 2});
  CHECK(deferred_acceptance(t2, ProposingSide::Students) == mstar);
  CHECK(deferred_acceptance(t2, ProposingSide::Hospitals) == mstar);
}

TEST_CASE("deferred acceptance with a closed hospital") {
  const MarketSpec t2 = benchmark_market(true);
  DaOptions opt;
  opt.quota_override = {0, 2, 2};
  CHECK(deferred_acceptance(t2, ProposingSide::Students, opt) ==
        matching_of(t2, {2, 1, 1, 2, kUnmatched}));
}

TEST_CASE("deferred acceptance output is stable on random markets") {
  Rng rng(101);
  for (int t = 0; t < 50; ++t) {
    const MarketSpec spec = random_small_market(rng);
    const Matching ms = deferred_acceptance(spec, ProposingSide::Students);
    const Matching mh = deferred_acceptance(spec, ProposingSide::Hospitals);
    CHECK(is_stable(spec, ms));
    CHECK(is_stable(spec, mh));
    if (spec.students() <= 8) {
      const std::vector<Matching> all = enumerate_stable_matchings(spec);
      CHECK(std::count(all.begin(), all.end(), ms) == 1);
      CHECK(std::count(all.begin(), all.end(), mh) == 1);
      // Student-optimality of the student-proposing run.
      for (const Matching& other : all)
        for (int w = 0; w < spec.students(); ++w)
          CHECK(!spec.prefers(w, other.assign[w], ms.assign[w]));
    }
  }
}

TEST_CASE("mutual-favorite peeling orders and skips correctly") {
  const MarketSpec t2 = benchmark_market(true);
  const TopCoalitionSequence seq = top_coalition_sequence(t2);
  REQUIRE(seq.pairs.size() == 3);
  CHECK(seq.pairs[0].hospital == 0);
  CHECK(seq.pairs[0].students == std::vector<int>{0, 1});
  CHECK(seq.pairs[1].hospital == 1);
  CHECK(seq.pairs[1].students == std::vector<int>{2, 3});
  CHECK(seq.pairs[2].hospital == 2);
  CHECK(seq.pairs[2].students == std::vector<int>{4});
  CHECK(seq.residual_hospitals.empty());
  CHECK(seq.residual_students.empty());

  const MarketSpec t1 = benchmark_market(false);
  CHECK(top_coalition_sequence(t1).pairs.empty());
  CHECK(top_coalition_sequence(t1).residual_hospitals == std::vector<int>{0, 1, 2});
}

TEST_CASE("peeling on the common-value example finds nothing") {
  MarketSpec spec;
  spec.hospital_names = {"f1", "f2"};
  spec.quota = {2, 2};
  spec.utility = {{1, 2, 3, 4}, {1, 2, 3, 4}};
  spec.student_names = {"w1", "w2", "w3", "w4"};
  spec.pref = {{0, 1}, {1, 0}, {0, 1}, {1, 0}};
  spec.finalize();
  CHECK(top_coalition_sequence(spec).pairs.empty());
}

TEST_CASE("simultaneous qualifiers peel lowest index first") {
  MarketSpec spec;
  spec.hospital_names = {"f1", "f2"};
  spec.quota = {1, 1};
  spec.utility = {{2, 1}, {1, 2}};
  spec.student_names = {"w1", "w2"};
  spec.pref = {{0, 1}, {1, 0}};
  spec.finalize();
  const TopCoalitionSequence seq = top_coalition_sequence(spec);
  REQUIRE(seq.pairs.size() == 2);
  CHECK(seq.pairs[0].hospital == 0);
  CHECK(seq.pairs[0].students == std::vector<int>{0});
  CHECK(seq.pairs[1].hospital == 1);
  CHECK(seq.pairs[1].students == std::vector<int>{1});
}

TEST_CASE("a hospital nobody lists is never peeled") {
  MarketSpec spec;
  spec.hospital_names = {"f1", "f2"};
  spec.quota = {1, 1};
  spec.utility = {{2, 1}, {1, 2}};
  spec.student_names = {"w1", "w2"};
  spec.pref = {{1}, {1, 0}};  // nobody puts f1 on top; w1 skips it entirely
  spec.finalize();
  const TopCoalitionSequence seq = top_coalition_sequence(spec);
  REQUIRE(seq.pairs.size() == 1);
  CHECK(seq.pairs[0].hospital == 1);
  CHECK(seq.pairs[0].students == std::vector<int>{1});
  CHECK(seq.residual_hospitals == std::vector<int>{0});
  CHECK(seq.residual_students == std::vector<int>{0});
}

TEST_CASE("punitive draft on the two-by-two market") {
  const MarketSpec spec = two_by_two();
  const Matching m = punitive_matching(spec, {0, 1}, {0, 1}, 0);
  CHECK(m.roster[0] == std::vector<int>{1});  // f1 is left its lesser student
  CHECK(m.roster[1] == std::vector<int>{0});
}

TEST_CASE("punitive draft reproduces the fallback matching everywhere") {
  const MarketSpec t1 = benchmark_market(false);
  const Matching mW = matching_of(t1, {1, 1, 0, 0, 2});
  for (int target = 0; target < 3; ++target) {
    const Matching m = punitive_matching(t1, {0, 1, 2}, {0, 1, 2, 3, 4}, target);
    CHECK(m == mW);
  }
}

TEST_CASE("punitive draft strands students with no open option") {
  MarketSpec spec;
  spec.hospital_names = {"f1"};
  spec.quota = {1};
  spec.utility = {{2, 1}};
  spec.student_names = {"w1", "w2"};
  spec.pref = {{0}, {0}};
  spec.finalize();
  const Matching m = punitive_matching(spec, {0}, {0, 1}, 0);
  CHECK(m.roster[0] == std::vector<int>{0});
  CHECK(m.assign[1] == kUnmatched);
}

TEST_CASE("seat expansion and deterministic dictatorship") {
  const MarketSpec spec = two_by_two();
  const std::vector<Seat> seats = seats_of(spec, {0, 1});
  REQUIRE(seats.size() == 2);
  CHECK(seats[0].hospital == 0);
  CHECK(seats[1].hospital == 1);

  const Matching f1_first =
      serial_dictatorship_seats(spec, {0, 1}, {0, 1}, {{0, 0}, {1, 0}});
  CHECK(f1_first.roster[0] == std::vector<int>{0});
  CHECK(f1_first.roster[1] == std::vector<int>{1});

  const Matching f2_first =
      serial_dictatorship_seats(spec, {0, 1}, {0, 1}, {{1, 0}, {0, 0}});
  CHECK(f2_first.roster[0] == std::vector<int>{1});
  CHECK(f2_first.roster[1] == std::vector<int>{0});
}

TEST_CASE("random seat order is a deterministic permutation") {
  const MarketSpec t1 = benchmark_market(false);
  Rng a(5), b(5);
  const std::vector<Seat> oa = random_seat_order(t1, {0, 1, 2}, a);
  const std::vector<Seat> ob = random_seat_order(t1, {0, 1, 2}, b);
  REQUIRE(oa.size() == 6);
  std::vector<int> seen(3, 0);
  for (std::size_t i = 0; i < oa.size(); ++i) {
    CHECK(oa[i].hospital == ob[i].hospital);
    CHECK(oa[i].slot == ob[i].slot);
    ++seen[oa[i].hospital];
  }
  CHECK(seen == std::vector<int>{2, 2, 2});
}

TEST_CASE("layered template inner rules on a single layer") {
  const MarketSpec t2 = benchmark_market(true);
  const std::vector<int> one_layer = {1, 1, 1};

  CHECK(layered_matching(t2, one_layer, 1, {InnerRule::ReducedDa}) ==
        matching_of(t2, {0, 2, 1, kUnmatched, kUnmatched}));

  CHECK(layered_matching(t2, one_layer, 1, {InnerRule::ZeroQuota, 0}) ==
        matching_of(t2, {2, 1, 1, 2, kUnmatched}));

  CHECK(layered_matching(t2, one_layer, 1, {InnerRule::Punitive, 0}) ==
        matching_of(t2, {0, 0, 1, 1, 2}));

  const MarketSpec t1 = benchmark_market(false);
  const std::vector<Seat> order = {{2, 0}, {0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 1}};
  LayeredOptions rsd{InnerRule::Rsd};
  rsd.seat_order = &order;
  CHECK(layered_matching(t1, one_layer, 1, rsd) == matching_of(t1, {0, 2, 1, 0, 1}));
}

TEST_CASE("layered template respects the layer boundaries") {
  MarketSpec spec;
  spec.hospital_names = {"f1", "f2"};
  spec.quota = {1, 1};
  spec.utility = {{2, 1}, {2, 1}};
  spec.student_names = {"w1", "w2"};
  spec.pref = {{0, 1}, {0, 1}};
  spec.finalize();
  const std::vector<int> layers = {1, 2};

  const Matching top_zeroed = layered_matching(spec, layers, 1, {InnerRule::ZeroQuota, 0});
  CHECK(top_zeroed.roster[0].empty());
  CHECK(top_zeroed.roster[1] == std::vector<int>{0});
  CHECK(top_zeroed.assign[1] == kUnmatched);

  const Matching bottom_reduced = layered_matching(spec, layers, 2, {InnerRule::ReducedDa});
  CHECK(bottom_reduced.roster[0] == std::vector<int>{0});
  CHECK(bottom_reduced.roster[1].empty());
}
