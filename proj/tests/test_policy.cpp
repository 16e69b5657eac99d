#include <doctest.h>

#include "dynpol/policy.hpp"
#include "test_helpers.hpp"

using namespace dynpol;
using dynpol::testing::Rng;

TEST_CASE("may_flow is reflexive and otherwise exactly the declared pairs") {
  FlowRelation rel{{"L", "H"}};
  CHECK(may_flow(rel, "L", "H"));
  CHECK(may_flow(rel, "H", "H"));
  CHECK(!may_flow(rel, "H", "L"));
  // no transitive closure
  FlowRelation chain{{"A", "B"}, {"B", "C"}};
  CHECK(!may_flow(chain, "A", "C"));
}

TEST_CASE("may_flow is monotone in the relation") {
  const std::vector<std::string> labels{"A", "B", "C"};
  for (unsigned seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    FlowRelation small, big;
    for (const auto& x : labels)
      for (const auto& y : labels) {
        if (x == y) continue;
        if (rng.next(2)) small.insert({x, y});
        if (rng.next(2)) big.insert({x, y});
      }
    big.insert(small.begin(), small.end());
    for (const auto& x : labels)
      for (const auto& y : labels)
        if (may_flow(small, x, y)) CHECK(may_flow(big, x, y));
  }
}

TEST_CASE("paralocks observability checks clause containment") {
  ParalocksLabel guarded{{{"a", {"L1"}}}};
  Attacker bare = Attacker::at_level("a");
  Attacker capable = Attacker::at_level("a");
  capable.caps = {"L1"};

  CHECK(paralocks_observable(guarded, bare, {"L1"}));     // lock open
  CHECK(paralocks_observable(guarded, capable, {}));      // capability covers
  CHECK(!paralocks_observable(guarded, bare, {}));
  CHECK(!paralocks_observable(guarded, bare, {"L2"}));
  ParalocksLabel empty;  // most restrictive label
  CHECK(!paralocks_observable(empty, capable, {"L1", "L2"}));
  ParalocksLabel other_actor{{{"b", {}}}};
  CHECK(!paralocks_observable(other_actor, capable, {"L1"}));
}

TEST_CASE("paralocks observability is monotone in capabilities and open locks") {
  const std::vector<std::string> locks{"L1", "L2", "L3"};
  for (unsigned seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    ParalocksLabel label;
    for (int c = 0; c < 2; ++c) {
      std::set<std::string> guards;
      for (const auto& l : locks)
        if (rng.next(2)) guards.insert(l);
      label.clauses.push_back({"a", guards});
    }
    std::set<std::string> caps, open;
    for (const auto& l : locks) {
      if (rng.next(2)) caps.insert(l);
      if (rng.next(2)) open.insert(l);
    }
    Attacker attacker = Attacker::at_level("a");
    attacker.caps = caps;
    bool before = paralocks_observable(label, attacker, open);
    Attacker bigger = attacker;
    bigger.caps.insert("L3");
    std::set<std::string> more_open = open;
    more_open.insert("L1");
    if (before) {
      CHECK(paralocks_observable(label, bigger, open));
      CHECK(paralocks_observable(label, attacker, more_open));
    }
  }
}

TEST_CASE("the shipped automaton remembers only the second value") {
  ForgetfulAutomaton a = parse_automaton_file(
      dynpol::testing::corpus_dir() + "/automata/second_value_only.aut");
  CHECK(automaton_state(a, {1, 2}) == "q2");
  CHECK(automaton_state(a, {2, 2}) == "q2");
  CHECK(automaton_state(a, {1, 1}) == "q1");
  CHECK(automaton_state(a, {2, 1}) == "q1");
  CHECK(automaton_state(a, {}) == "q0");
  CHECK(automaton_state(a, {1}) == "qf");
  CHECK(automaton_state(a, {2}) == "qf");
}

TEST_CASE("automaton folding is one transition per observed value") {
  ForgetfulAutomaton a = parse_automaton_file(
      dynpol::testing::corpus_dir() + "/automata/second_value_only.aut");
  for (unsigned seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    std::vector<Value> values;
    for (unsigned i = 0; i < rng.next(6); ++i)
      values.push_back(1 + static_cast<Value>(rng.next(2)));
    if (values.empty()) continue;
    std::vector<Value> prefix(values.begin(), values.end() - 1);
    CHECK(automaton_state(a, values) ==
          a.step_state(automaton_state(a, prefix), values.back()));
  }
}

TEST_CASE("automaton rejects values outside its alphabet") {
  ForgetfulAutomaton a = parse_automaton_file(
      dynpol::testing::corpus_dir() + "/automata/second_value_only.aut");
  CHECK_THROWS(automaton_state(a, {7}));
}
