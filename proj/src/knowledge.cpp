#include "dynpol/knowledge.hpp"

#include <algorithm>
#include <cmath>

namespace dynpol {

bool KnowledgeSet::contains(const std::vector<Value>& v) const {
  return std::binary_search(stores.begin(), stores.end(), v);
}

std::vector<std::vector<Value>> enumerate_universe(const Program& p,
                                                   const Limits& limits) {
  std::size_t n = p.vars.size();
  double est = std::pow(static_cast<double>(p.domain.size()),
                        static_cast<double>(n));
  if (est > static_cast<double>(limits.universe_cap))
    throw CapExceeded("store universe of " + std::to_string(est) +
                      " exceeds cap " + std::to_string(limits.universe_cap));
  std::vector<std::vector<Value>> out;
  std::vector<Value> current(n, p.domain.lo);
  for (;;) {
    out.push_back(current);
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (current[i] < p.domain.hi) {
        ++current[i];
        std::fill(current.begin() + i + 1, current.end(), p.domain.lo);
        break;
      }
      if (i == 0) return out;
    }
    if (n == 0) return out;
  }
}

KnowledgeSet set_difference(const KnowledgeSet& a, const KnowledgeSet& b) {
  KnowledgeSet out;
  out.tainted = a.tainted || b.tainted;
  std::set_difference(a.stores.begin(), a.stores.end(), b.stores.begin(),
                      b.stores.end(), std::back_inserter(out.stores));
  return out;
}

KnowledgeSet set_union(const KnowledgeSet& a, const KnowledgeSet& b) {
  KnowledgeSet out;
  out.tainted = a.tainted || b.tainted;
  std::set_union(a.stores.begin(), a.stores.end(), b.stores.begin(),
                 b.stores.end(), std::back_inserter(out.stores));
  return out;
}

KnowledgeSet set_complement(const Program& p, const KnowledgeSet& a,
                            const Limits& limits) {
  KnowledgeSet out;
  out.tainted = a.tainted;
  auto universe = enumerate_universe(p, limits);
  std::set_difference(universe.begin(), universe.end(), a.stores.begin(),
                      a.stores.end(), std::back_inserter(out.stores));
  return out;
}

bool subset_of(const KnowledgeSet& a, const KnowledgeSet& b) {
  return std::includes(b.stores.begin(), b.stores.end(), a.stores.begin(),
                       a.stores.end());
}

RunTable RunTable::build(const Program& p, const Limits& limits) {
  RunTable table;
  table.universe = enumerate_universe(p, limits);
  table.traces.reserve(table.universe.size());
  for (const auto& values : table.universe) {
    Trace t = run(p, initial_store(p, values), limits.budget);
    table.any_truncated = table.any_truncated || t.truncated;
    table.traces.push_back(std::move(t));
  }
  return table;
}

namespace {

// Membership under prefix semantics. A truncated run whose produced
// observation is still a prefix of the query also counts as consistent: the
// continuation might have matched, so knowledge is over-approximated.
bool consistent_with(const Observation& query, const Observation& full,
                     bool truncated) {
  if (observation_is_prefix(query, full)) return true;
  if (truncated && observation_is_prefix(full, query)) return true;
  return false;
}

}  // namespace

KnowledgeSet knowledge(const Program& p, const Attacker& attacker,
                       ObservationModel model, const Observation& obs,
                       const Limits& limits) {
  RunTable table = RunTable::build(p, limits);
  KnowledgeSet out;
  out.tainted = table.any_truncated;
  for (std::size_t i = 0; i < table.universe.size(); ++i) {
    Observation full = observe(p, table.traces[i], attacker, model);
    if (consistent_with(obs, full, table.traces[i].truncated))
      out.stores.push_back(table.universe[i]);
  }
  return out;
}

KnowledgeSet exclusion_knowledge(const Program& p, const Attacker& attacker,
                                 ObservationModel model, const Observation& obs,
                                 const Limits& limits) {
  return set_complement(p, knowledge(p, attacker, model, obs, limits), limits);
}

KnowledgeSet knowledge_increase(const Program& p, const Attacker& attacker,
                                ObservationModel model,
                                const Observation& prefix_obs,
                                const Observation& extended_obs,
                                const Limits& limits) {
  KnowledgeSet before = exclusion_knowledge(p, attacker, model, prefix_obs, limits);
  KnowledgeSet after = exclusion_knowledge(p, attacker, model, extended_obs, limits);
  return set_difference(after, before);
}

KnowledgeSet forgetful_exclusion_knowledge(const Program& p,
                                           const Attacker& attacker,
                                           const std::vector<Value>& observed,
                                           const Limits& limits) {
  if (attacker.memory != AttackerMemory::Automaton || !attacker.automaton)
    throw std::invalid_argument("attacker has no automaton");
  const ForgetfulAutomaton& automaton = *attacker.automaton;
  std::string target_state = automaton_state(automaton, observed);

  RunTable table = RunTable::build(p, limits);
  KnowledgeSet out;
  out.tainted = table.any_truncated;
  for (std::size_t i = 0; i < table.universe.size(); ++i) {
    std::vector<Value> values = observed_values(p, table.traces[i], attacker);
    bool reaches = false;
    std::string state = automaton.initial;
    if (state == target_state) reaches = true;
    for (Value v : values) {
      state = automaton.step_state(state, v);
      if (state == target_state) {
        reaches = true;
        break;
      }
    }
    // A truncated run might still reach the state later.
    if (!reaches && !table.traces[i].truncated)
      out.stores.push_back(table.universe[i]);
  }
  return out;
}

}  // namespace dynpol
