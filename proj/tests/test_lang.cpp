#include <doctest.h>

#include "dynpol/interp.hpp"
#include "test_helpers.hpp"

using namespace dynpol;
using dynpol::testing::Rng;

namespace {

Program two_level(const std::string& body) {
  return parse_program("labels B, A; vars b:B, a:A; domain 0..1;\n" + body);
}

std::vector<std::pair<int, Value>> event_pairs(const Trace& t) {
  std::vector<std::pair<int, Value>> out;
  for (const Event& e : t.events) out.push_back({e.target, e.value});
  return out;
}

}  // namespace

TEST_CASE("parse maps the concrete syntax onto the expected tree") {
  Program p = two_level("allow B -> A; a := b");
  CHECK(p.body->kind == Command::Kind::Seq);
  CHECK(p.body->first->kind == Command::Kind::AllowFlow);
  CHECK(p.body->first->from == "B");
  CHECK(p.body->first->to == "A");
  CHECK(p.body->second->kind == Command::Kind::Assign);
  CHECK(p.body->second->target == "a");
  CHECK(p.body->second->expr->kind == Expr::Kind::Var);
  CHECK(p.body->second->expr->name == "b");
}

TEST_CASE("parse recognises declassify marks") {
  Program p = two_level("a := declassify(b)");
  CHECK(p.body->kind == Command::Kind::Assign);
  CHECK(p.body->expr->kind == Expr::Kind::Declassify);
  CHECK(p.body->expr->inner->name == "b");
  CHECK(contains_declassify(*p.body->expr));
}

TEST_CASE("parse rejects undeclared identifiers, duplicates and nesting") {
  CHECK_THROWS_AS(parse_program("labels A; vars a:A; domain 0..1; x := y"),
                  ParseError);
  CHECK_THROWS_AS(parse_program("labels A, A; vars a:A; a := 0"), ParseError);
  CHECK_THROWS_AS(parse_program("labels A; vars a:A, a:A; a := 0"), ParseError);
  CHECK_THROWS_AS(two_level("a := declassify(declassify(b))"), ParseError);
  CHECK_THROWS_AS(two_level("allow B -> X"), ParseError);
  CHECK_THROWS_AS(two_level("open L"), ParseError);
  CHECK_THROWS_AS(two_level("a := "), ParseError);
}

TEST_CASE("parse errors carry a position") {
  try {
    parse_program("labels A;\nvars a:A;\na := zz");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
    CHECK(e.column > 1);
  }
}

TEST_CASE("print and parse round-trip the facet corpus") {
  for (const auto& [path, prog] : dynpol::testing::all_facet_programs()) {
    CAPTURE(path);
    Program again = parse_program(print_program(prog));
    CHECK(same_program(prog, again));
  }
}

TEST_CASE("print and parse round-trip generated trees") {
  // hand-rolled generator over the full command grammar
  auto gen_expr = [](Rng& rng, auto&& self, int depth) -> ExprPtr {
    switch (depth <= 0 ? rng.next(2) : rng.next(5)) {
      case 0: return Expr::constant(static_cast<Value>(rng.next(2)));
      case 1: return Expr::var(rng.next(2) ? "a" : "b");
      case 2: {
        static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul,
                                    BinOp::Eq, BinOp::Lt, BinOp::Xor};
        return Expr::binary(ops[rng.next(6)], self(rng, self, depth - 1),
                            self(rng, self, depth - 1));
      }
      case 3: return Expr::flows_query("B", "A");
      default: return Expr::declassify(Expr::var("b"));
    }
  };
  auto gen_cmd = [&](Rng& rng, auto&& self, int depth) -> CommandPtr {
    switch (depth <= 0 ? rng.next(2) : rng.next(7)) {
      case 0: return Command::skip();
      case 1:
        return Command::assign(rng.next(2) ? "a" : "b",
                               gen_expr(rng, gen_expr, 2));
      case 2:
        return Command::seq(self(rng, self, depth - 1), self(rng, self, depth - 1));
      case 3:
        return Command::if_then_else(
            gen_expr(rng, gen_expr, 1), self(rng, self, depth - 1),
            rng.next(2) ? self(rng, self, depth - 1) : nullptr);
      case 4:
        return Command::while_loop(gen_expr(rng, gen_expr, 1),
                                   self(rng, self, depth - 1));
      case 5:
        return rng.next(2) ? Command::allow_flow("B", "A")
                           : Command::revoke_flow("B", "A");
      default:
        return rng.next(2) ? Command::open_lock("L") : Command::close_lock("L");
    }
  };
  for (unsigned seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    Program p = parse_program("labels B, A; locks L; vars b:B, a:A; domain 0..1; skip");
    p.body = gen_cmd(rng, gen_cmd, 3);
    CAPTURE(seed);
    Program again = parse_program(print_program(p));
    CHECK(same_program(p, again));
  }
}

TEST_CASE("constant assignment emits one event with the old policy snapshot") {
  Program p = two_level("a := 1");
  Store s = initial_store(p, {0, 0});
  StepResult r = step(p, *p.body, s);
  CHECK(!r.next);
  CHECK(r.store.values[p.var_index("a")] == 1);
  REQUIRE(r.event.has_value());
  CHECK(r.event->target == p.var_index("a"));
  CHECK(r.event->value == 1);
  CHECK(r.event->policy == p.initial_policy);
  CHECK(!r.event->release);
}

TEST_CASE("policy commands mutate only the policy and emit no event") {
  Program p = two_level("allow B -> A");
  Store s = initial_store(p, {1, 0});
  StepResult r = step(p, *p.body, s);
  CHECK(!r.event.has_value());
  CHECK(r.store.values == s.values);
  CHECK(r.store.policy.flows.count({"B", "A"}) == 1);
}

TEST_CASE("declassified assignment flags the event as a release") {
  Program p = two_level("a := declassify(b)");
  Store s = initial_store(p, {1, 0});
  StepResult r = step(p, *p.body, s);
  REQUIRE(r.event.has_value());
  CHECK(r.event->release);
  CHECK(r.event->value == 1);
}

TEST_CASE("run of skip terminates with an empty trace") {
  Program p = two_level("skip");
  Trace t = run(p, initial_store(p, {0, 0}), 100);
  CHECK(t.events.empty());
  CHECK(!t.truncated);
}

TEST_CASE("run records events with their policy snapshots") {
  // derived by stepping the semantics by hand
  Program p = two_level("allow B -> A; a := b; a := 0; revoke B -> A; a := b");
  Trace t = run(p, initial_store(p, {1, 0}), 100);
  CHECK(!t.truncated);
  REQUIRE(t.events.size() == 3);
  int a = p.var_index("a");
  PolicyComponent open = p.initial_policy;
  open.flows.insert({"B", "A"});
  CHECK(t.events[0].target == a);
  CHECK(t.events[0].value == 1);
  CHECK(t.events[0].policy == open);
  CHECK(t.events[1].value == 0);
  CHECK(t.events[1].policy == open);
  CHECK(t.events[2].value == 1);
  CHECK(t.events[2].policy == p.initial_policy);
}

TEST_CASE("diverging programs hit the budget and get flagged") {
  Program p = two_level("while 0 = 0 { skip }");
  Trace t = run(p, initial_store(p, {0, 0}), 50);
  CHECK(t.events.empty());
  CHECK(t.truncated);
}

TEST_CASE("arithmetic wraps modulo the domain size and xor is bitwise") {
  Program p = parse_program("labels A; vars a:A; domain 0..3; a := 3 + 2");
  Trace t = run(p, initial_store(p, {0}), 10);
  CHECK(t.events[0].value == 1);
  p = parse_program("labels A; vars a:A; domain 0..3; a := 2 xor 3");
  t = run(p, initial_store(p, {0}), 10);
  CHECK(t.events[0].value == 1);
  p = parse_program("labels A; vars a:A; domain 0..3; a := 1 - 2");
  t = run(p, initial_store(p, {0}), 10);
  CHECK(t.events[0].value == 3);
  p = parse_program("labels A; vars a:A; domain 0..3; a := (1 < 2) + (2 = 2)");
  t = run(p, initial_store(p, {0}), 10);
  CHECK(t.events[0].value == 2);
}

TEST_CASE("guards branch on nonzero and flows queries read the current relation") {
  Program p = two_level("if flows(B, A) { a := 1 } else { a := 0 }");
  Trace t = run(p, initial_store(p, {0, 0}), 10);
  CHECK(t.events[0].value == 0);
  p = two_level("allow B -> A; if flows(B, A) { a := 1 } else { a := 0 }");
  t = run(p, initial_store(p, {0, 0}), 10);
  CHECK(t.events[0].value == 1);
}

TEST_CASE("runs are deterministic and prefix coherent in the budget") {
  for (const auto& [path, prog] : dynpol::testing::all_facet_programs()) {
    CAPTURE(path);
    Limits limits;
    auto universe = enumerate_universe(prog, limits);
    for (const auto& values : universe) {
      Store s = initial_store(prog, values);
      Trace full = run(prog, s, 100);
      Trace again = run(prog, s, 100);
      CHECK(event_pairs(full) == event_pairs(again));
      CHECK(full.truncated == again.truncated);
      for (int budget : {1, 2, 3, 5}) {
        Trace prefix = run(prog, s, budget);
        REQUIRE(prefix.events.size() <= full.events.size());
        CHECK(std::equal(prefix.states.begin(), prefix.states.end(),
                         full.states.begin(),
                         [](const StepRecord& x, const StepRecord& y) {
                           return x.values == y.values && x.policy == y.policy;
                         }));
      }
    }
  }
}

TEST_CASE("assignments never alter the policy, policy commands never alter values") {
  for (const auto& [path, prog] : dynpol::testing::all_facet_programs()) {
    CAPTURE(path);
    Limits limits;
    for (const auto& values : enumerate_universe(prog, limits)) {
      Trace t = run(prog, initial_store(prog, values), 100);
      for (std::size_t k = 1; k < t.states.size(); ++k) {
        bool policy_changed = !(t.states[k].policy == t.states[k - 1].policy);
        bool values_changed = t.states[k].values != t.states[k - 1].values;
        CHECK(!(policy_changed && values_changed));
      }
    }
  }
}
