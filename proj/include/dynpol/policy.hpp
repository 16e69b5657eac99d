#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dynpol/ast.hpp"

namespace dynpol {

using FlowRelation = std::set<std::pair<std::string, std::string>>;

// Reflexive query on a flow relation. No transitive closure: a chain
// A -> B -> C does not make A -> C flow.
bool may_flow(const FlowRelation& rel, const std::string& from,
              const std::string& to);
bool may_flow(const PolicyComponent& policy, const std::string& from,
              const std::string& to);

// Deterministic automaton over observed values, used to model observers
// that forget parts of what they saw.
struct ForgetfulAutomaton {
  std::vector<std::string> states;
  std::string initial;
  // (state, observed value) -> state; must be total over the value domain.
  std::map<std::pair<std::string, Value>, std::string> transition;

  std::string step_state(const std::string& state, Value v) const;
};

ForgetfulAutomaton parse_automaton_file(const std::string& path);

// Folds the transition function over a value sequence from the initial state.
std::string automaton_state(const ForgetfulAutomaton& a,
                            const std::vector<Value>& observed);

enum class AttackerMemory { PerfectRecall, Automaton };

struct Attacker {
  std::string level;
  std::set<std::string> caps;  // Paralocks capabilities
  AttackerMemory memory = AttackerMemory::PerfectRecall;
  std::shared_ptr<const ForgetfulAutomaton> automaton;

  static Attacker at_level(std::string level) {
    Attacker a;
    a.level = std::move(level);
    return a;
  }
};

// Paralocks observability: some clause names the attacker's actor and all its
// guard locks are covered by capabilities plus the open locks.
bool paralocks_observable(const ParalocksLabel& label, const Attacker& attacker,
                          const std::set<std::string>& open_locks);

}  // namespace dynpol
