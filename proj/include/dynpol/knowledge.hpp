#pragma once

#include <stdexcept>
#include <vector>

#include "dynpol/observe.hpp"

namespace dynpol {

struct Limits {
  int budget = 10000;
  std::size_t universe_cap = 256;  // |domain|^|vars| guard
  int lock_cap = 6;                // Paralocks capability powerset guard
  std::size_t sequence_cap = 1u << 20;  // scheme sequence enumeration guard
};

struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A set of initial store value assignments, kept sorted in enumeration
// order. `tainted` records that some contributing run hit the step budget.
struct KnowledgeSet {
  std::vector<std::vector<Value>> stores;
  bool tainted = false;

  bool contains(const std::vector<Value>& v) const;
  std::size_t size() const { return stores.size(); }
};

// Every assignment of domain values to the declared variables, in
// lexicographic order. Throws CapExceeded above the universe cap.
std::vector<std::vector<Value>> enumerate_universe(const Program& p,
                                                   const Limits& limits);

KnowledgeSet set_difference(const KnowledgeSet& a, const KnowledgeSet& b);
KnowledgeSet set_union(const KnowledgeSet& a, const KnowledgeSet& b);
KnowledgeSet set_complement(const Program& p, const KnowledgeSet& a,
                            const Limits& limits);
bool subset_of(const KnowledgeSet& a, const KnowledgeSet& b);

// Precomputed runs and observations for every initial store in the universe;
// the workhorse behind the knowledge queries and the checkers.
struct RunTable {
  std::vector<std::vector<Value>> universe;
  std::vector<Trace> traces;
  bool any_truncated = false;

  static RunTable build(const Program& p, const Limits& limits);
};

// Initial stores consistent with the observation: those whose own observation
// sequence extends the given one. Truncated runs that still match count as
// consistent, which over-approximates knowledge; the result is tainted.
KnowledgeSet knowledge(const Program& p, const Attacker& attacker,
                       ObservationModel model, const Observation& obs,
                       const Limits& limits);

// Complement of knowledge within the universe: the stores the attacker has
// ruled out.
KnowledgeSet exclusion_knowledge(const Program& p, const Attacker& attacker,
                                 ObservationModel model, const Observation& obs,
                                 const Limits& limits);

// What the extended observation excludes beyond the prefix.
KnowledgeSet knowledge_increase(const Program& p, const Attacker& attacker,
                                ObservationModel model,
                                const Observation& prefix_obs,
                                const Observation& extended_obs,
                                const Limits& limits);

// Exclusion knowledge of an automaton attacker: stores none of whose
// realisable observed-value prefixes drive the automaton to the same state as
// the actual observation did.
KnowledgeSet forgetful_exclusion_knowledge(const Program& p,
                                           const Attacker& attacker,
                                           const std::vector<Value>& observed,
                                           const Limits& limits);

}  // namespace dynpol
