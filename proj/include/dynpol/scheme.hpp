#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dynpol/knowledge.hpp"
#include "dynpol/report.hpp"

namespace dynpol {

// A policy scheme viewed in isolation from any program: discriminator states,
// named flow relations, the determining function and the transition relation
// constraining how states may change.
struct PolicyScheme {
  std::vector<std::string> labels;
  std::map<std::string, FlowRelation> relations;
  std::vector<std::string> states;
  std::string initial;
  std::map<std::string, std::string> delta;  // state -> relation name
  std::set<std::pair<std::string, std::string>> mu;

  const FlowRelation& relation_of(const std::string& state) const;
  bool has_state(const std::string& s) const;

  static PolicyScheme from_json(const Json& j);
  static PolicyScheme load_file(const std::string& path);
};

// Invariant predicates: boolean formulas over flow-presence atoms, state
// atoms, and (for sequence invariants) ever-before / ever-after temporal
// atoms. Written in a small infix syntax, e.g.
//   not flows(TopSecret, Public) and not flows(TopSecret, Secret)
//   forall X: everbefore(flows(CompanyOne, X)) implies not everafter(flows(X, CompanyTwo))
struct Pred;
using PredPtr = std::shared_ptr<const Pred>;

struct Pred {
  enum class Kind {
    True,
    False,
    Flows,
    State,
    Not,
    And,
    Or,
    Implies,
    EverBefore,
    EverAfter,
    Monotone,
    Forall
  };
  Kind kind;
  std::string a, b;           // flows operands / state name / forall binder
  std::vector<PredPtr> args;
};

PredPtr parse_predicate(const std::string& text);
std::string print_predicate(const Pred& p);

// True when the predicate uses no state or temporal atoms (valid over a bare
// flow relation).
bool relation_only(const Pred& p);
bool state_only(const Pred& p);

struct SchemeCheck {
  bool holds = true;
  std::vector<std::string> counterexample;  // discriminator path
  std::optional<int> position;              // violating position in the path
  bool saturated = false;   // exploration closed before the depth bound
  std::string failure_reason;
};

// All transition paths from the initial state with up to `depth` states;
// includes the singleton path.
std::vector<std::vector<std::string>> reachable_sequences(
    const PolicyScheme& scheme, int depth, const Limits& limits);

// Phi must hold of delta(S) for every state on every reachable sequence.
SchemeCheck check_global_invariant(const PolicyScheme& scheme, const PredPtr& phi,
                                   int depth);

// As the global check, with the state filter Psi applied per position.
SchemeCheck check_conditional_invariant(const PolicyScheme& scheme,
                                        const PredPtr& psi, const PredPtr& phi,
                                        int depth);

// Phi evaluated positionally over every reachable sequence, with ever-before
// and ever-after ranging inside the sequence.
SchemeCheck check_sequence_invariant(const PolicyScheme& scheme,
                                     const PredPtr& phi, int depth,
                                     const Limits& limits);

struct Embedding {
  std::map<std::string, std::string> label_map;  // embedded -> host, injective
  std::map<std::string, std::string> state_map;  // embedded -> host
};

// Checks that the host scheme simulates the embedded scheme's transitions,
// agrees with its relations on the image labels, and never reaches a relation
// whose restriction to the image exceeds some embedded relation.
SchemeCheck check_embedding(const PolicyScheme& embedded,
                            const PolicyScheme& host, const Embedding& emb,
                            int depth);

}  // namespace dynpol
