#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "remat/automaton.hpp"
#include "remat/automaton_io.hpp"

#include "support.hpp"

using namespace remat;

namespace {

struct TriggerFixture {
  MarketSpec spec = benchmark_market(false);
  Matching m0 = matching_of(spec, {0, 2, 1, 1, 0});
  Matching mW = matching_of(spec, {1, 1, 0, 0, 2});
  ProcessAutomaton a = build_trigger_process(spec, m0, mW, 0.8);
};

}  // namespace

TEST_CASE("trigger process has the expected shape") {
  TriggerFixture t;
  REQUIRE(t.a.states.size() == 2);
  CHECK(t.a.states[0].name == "onpath");
  CHECK(t.a.states[1].name == "absorbing");
  CHECK(t.a.matchings[t.a.states[0].output] == t.m0);
  CHECK(t.a.matchings[t.a.states[1].output] == t.mW);
  CHECK(t.a.discount == doctest::Approx(0.8));
  CHECK_NOTHROW(t.a.validate(t.spec));
}

TEST_CASE("transition resolution walks the rule ladder") {
  TriggerFixture t;
  // Obedience keeps the play state.
  Lottery stay = t.a.transition(t.spec, 0, t.m0);
  REQUIRE(stay.outcomes.size() == 1);
  CHECK(stay.outcomes[0].first == 0);

  // Any deviation falls to the default row.
  const Matching dev = apply_deviation(t.spec, t.m0, 0, {0, 1});
  Lottery fall = t.a.transition(t.spec, 0, dev);
  REQUIRE(fall.outcomes.size() == 1);
  CHECK(fall.outcomes[0].first == 1);

  // So does an unattributable rewrite.
  Lottery swap = t.a.transition(t.spec, 0, t.mW);
  CHECK(swap.outcomes[0].first == 1);

  // The absorbing state never leaves.
  CHECK(t.a.transition(t.spec, 1, t.mW).outcomes[0].first == 1);
  CHECK(t.a.transition(t.spec, 1, t.m0).outcomes[0].first == 1);
}

TEST_CASE("explicit matching rows outrank the on-path row") {
  TriggerFixture t;
  ProcessAutomaton a = t.a;
  a.states[0].rule.on_matching.push_back(
      {a.states[0].output, Lottery{{{1, 1.0}}}});
  const Lottery l = a.transition(t.spec, 0, t.m0);
  CHECK(l.outcomes[0].first == 1);
}

TEST_CASE("deviator rows catch the responsible hospital") {
  TriggerFixture t;
  ProcessAutomaton a = t.a;
  a.states[0].rule.on_deviator.push_back({0, Lottery{{{0, 1.0}}}});
  const Matching by_f1 = apply_deviation(t.spec, t.m0, 0, {0, 1});
  const Matching by_f2 = apply_deviation(t.spec, t.m0, 1, {1, 2});
  CHECK(a.transition(t.spec, 0, by_f1).outcomes[0].first == 0);  // forgiven
  CHECK(a.transition(t.spec, 0, by_f2).outcomes[0].first == 1);  // default row
}

TEST_CASE("missing default means stay put") {
  TriggerFixture t;
  ProcessAutomaton a = t.a;
  a.states[0].rule.fallback.reset();
  const Matching dev = apply_deviation(t.spec, t.m0, 0, {0, 1});
  CHECK(a.transition(t.spec, 0, dev).outcomes[0].first == 0);
}

TEST_CASE("validate rejects broken automata") {
  TriggerFixture t;
  ProcessAutomaton bad = t.a;
  bad.initial.outcomes[0].second = 0.5;  // weights no longer sum to one
  CHECK_THROWS_AS(bad.validate(t.spec), input_error);

  bad = t.a;
  bad.states[0].rule.on_path = Lottery{{{7, 1.0}}};  // dangling state index
  CHECK_THROWS_AS(bad.validate(t.spec), input_error);

  bad = t.a;
  bad.states[0].output = 5;  // dangling matching index
  CHECK_THROWS_AS(bad.validate(t.spec), input_error);
}

TEST_CASE("stationary process stays in its single state") {
  TriggerFixture t;
  const ProcessAutomaton a = stationary_process(t.spec, t.mW, 0.5);
  REQUIRE(a.states.size() == 1);
  CHECK(a.matchings[a.states[0].output] == t.mW);
  const Matching dev = apply_deviation(t.spec, t.mW, 0, {0, 1});
  CHECK(a.transition(t.spec, 0, dev).outcomes[0].first == 0);
  CHECK_NOTHROW(a.validate(t.spec));
}

TEST_CASE("lottery sampling is frozen") {
  Lottery l{{{0, 0.25}, {1, 0.75}}};
  Rng rng(17);
  CHECK(sample_lottery(l, rng) == 0);  // draw 0.2442...
  CHECK(sample_lottery(l, rng) == 1);  // draw 0.7619...
  CHECK(sample_lottery(l, rng) == 0);  // draw 0.2230...
}

TEST_CASE("obedient simulation of a trigger never leaves the path") {
  TriggerFixture t;
  Rng rng(9);
  const std::vector<int> visited = simulate_on_path(t.spec, t.a, 50, rng);
  REQUIRE(visited.size() == 50);
  for (int s : visited) CHECK(s == 0);
}

TEST_CASE("structural equality ignores names but not wiring") {
  TriggerFixture t;
  ProcessAutomaton b = t.a;
  b.name = "other";
  b.states[0].name = "x";
  b.states[1].name = "y";
  b.matching_names = {"alpha", "beta"};
  CHECK(structurally_equal(t.a, b));

  b.states[0].rule.fallback = Lottery{{{0, 1.0}}};  // forgiving trigger
  CHECK(!structurally_equal(t.a, b));

  const ProcessAutomaton c = stationary_process(t.spec, t.mW, 0.8);
  CHECK(!structurally_equal(t.a, c));
}

TEST_CASE("golden automaton round-trips and matches the builder") {
  TriggerFixture t;
  const ProcessAutomaton loaded = load_automaton(t.spec, data_path("mu0.automaton"));
  CHECK(structurally_equal(loaded, t.a));
  CHECK(serialize_automaton(t.spec, loaded) == serialize_automaton(t.spec, t.a));
}

TEST_CASE("automaton parser reports useful failures") {
  const MarketSpec spec = benchmark_market(false);
  auto parse = [&](const std::string& text) {
    std::istringstream in(text);
    return parse_automaton(spec, in, "t");
  };
  CHECK_THROWS_AS(parse("AUTOMATON a\nSTATE s OUTPUT nope\nINITIAL s 1\n"), input_error);
  CHECK_THROWS_AS(parse("AUTOMATON a\nMATCHING m\nf1: w1\nSTATE s OUTPUT m\n"
                        "ONPATH -> other 1\nINITIAL s 1\n"),
                  input_error);
  CHECK_THROWS_AS(parse("AUTOMATON a\nMATCHING m\nf1: w1\nSTATE s OUTPUT m\n"
                        "INITIAL s 1/2\n"),
                  input_error);
}
