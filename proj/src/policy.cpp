#include "dynpol/policy.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dynpol {

bool may_flow(const FlowRelation& rel, const std::string& from,
              const std::string& to) {
  if (from == to) return true;
  return rel.count({from, to}) > 0;
}

bool may_flow(const PolicyComponent& policy, const std::string& from,
              const std::string& to) {
  return may_flow(policy.flows, from, to);
}

std::string ForgetfulAutomaton::step_state(const std::string& state,
                                           Value v) const {
  auto it = transition.find({state, v});
  if (it == transition.end())
    throw std::runtime_error("automaton: no transition from '" + state +
                             "' on value " + std::to_string(v));
  return it->second;
}

std::string automaton_state(const ForgetfulAutomaton& a,
                            const std::vector<Value>& observed) {
  std::string state = a.initial;
  for (Value v : observed) state = a.step_state(state, v);
  return state;
}

// Format: "states q0 q1 ...", "initial q0", then "FROM VALUE TO" triples.
// '#' starts a comment.
ForgetfulAutomaton parse_automaton_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  ForgetfulAutomaton a;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "states") {
      std::string s;
      while (ls >> s) a.states.push_back(s);
    } else if (word == "initial") {
      if (!(ls >> a.initial))
        throw std::runtime_error(path + ": missing initial state");
    } else {
      std::string from = word, to;
      Value v;
      if (!(ls >> v >> to))
        throw std::runtime_error(path + ": bad transition line '" + line + "'");
      a.transition[{from, v}] = to;
    }
  }
  if (a.initial.empty()) throw std::runtime_error(path + ": no initial state");
  return a;
}

bool paralocks_observable(const ParalocksLabel& label, const Attacker& attacker,
                          const std::set<std::string>& open_locks) {
  for (const auto& [actor, guards] : label.clauses) {
    if (actor != attacker.level) continue;
    bool covered = true;
    for (const auto& l : guards) {
      if (!attacker.caps.count(l) && !open_locks.count(l)) {
        covered = false;
        break;
      }
    }
    if (covered) return true;
  }
  return false;
}

}  // namespace dynpol
