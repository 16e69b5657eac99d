#pragma once

#include <optional>
#include <vector>

#include "dynpol/ast.hpp"

namespace dynpol {

struct Store {
  std::vector<Value> values;  // indexed by declaration order
  PolicyComponent policy;

  bool operator==(const Store&) const = default;
};

struct Event {
  int target;               // variable index
  Value value;
  PolicyComponent policy;   // snapshot at the instant of the event
  bool release;             // rhs contained a declassify mark
};

// Store contents after a step; states[0] in a trace is the initial store.
struct StepRecord {
  std::vector<Value> values;
  PolicyComponent policy;
};

struct Trace {
  std::vector<Event> events;
  std::vector<StepRecord> states;      // states[k] = store after k steps
  std::vector<int> event_state;       // event i happened entering states[event_state[i]]
  bool truncated = false;
};

struct StepResult {
  CommandPtr next;  // null when the command is done
  Store store;
  std::optional<Event> event;
};

// Total expression evaluation over the program's finite domain.
Value eval_expr(const Program& p, const Expr& e, const Store& s);

// One small step. Deterministic; assignments emit exactly one event, policy
// commands mutate only the policy component and emit none.
StepResult step(const Program& p, const Command& c, const Store& s);

Store initial_store(const Program& p, const std::vector<Value>& values);

// Runs to termination or until the step budget is exhausted (trace is then
// flagged truncated).
Trace run(const Program& p, const Store& initial, int budget);

}  // namespace dynpol
