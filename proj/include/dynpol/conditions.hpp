#pragma once

#include <optional>
#include <string>

#include "dynpol/knowledge.hpp"

namespace dynpol {

enum class Status { Secure, Insecure, Unknown };

const char* status_name(Status s);

struct Witness {
  std::vector<Value> store;                      // offending initial store
  std::optional<std::vector<Value>> other_store; // distinguishing partner
  std::optional<int> event_index;
  std::vector<std::vector<Value>> increase;      // offending knowledge gain
  std::string note;
  // For checkers that quantify over mid-run configurations: the command and
  // policy from which the distinguishing stores are driven.
  std::optional<std::string> context_command;
  std::optional<std::string> context_command2;
  std::optional<PolicyComponent> context_policy;
};

struct Verdict {
  Status status = Status::Secure;
  std::optional<Witness> witness;
  bool budget_tainted = false;
};

// Release policies bounding the permitted knowledge increase at an event.
enum class ReleasePolicy {
  EquivalenceNow,          // stores distinguishable under the event's relation
  TimeTransitiveAllowing,  // stores ruled out by the whole trace replayed
                           // under the event's relation as a fixed filter
  DirectReleaseAllowing    // stores distinguishable under any relation that
                           // was active up to the event
};

const char* release_policy_name(ReleasePolicy rp);

// The permitted-increase bound for event `event_index` of the given run.
KnowledgeSet release_set(ReleasePolicy variant, const Program& p,
                         const Attacker& attacker, const Store& actual_initial,
                         const Trace& trace, int event_index,
                         const Limits& limits);

// Knowledge-bounded condition: at every event of every run, the attacker's
// knowledge increase stays within the release set.
Verdict check_epistemic(const Program& p, const Attacker& attacker,
                        ObservationModel model, ReleasePolicy variant,
                        const Limits& limits);

// Two-level condition with explicit release events: observations that are not
// marked as releases must not increase the observer's knowledge.
Verdict check_gradual_release(const Program& p, const Limits& limits);

// Lock-guarded condition quantifying over every (actor, capability) attacker:
// when the open locks at an event are covered by the attacker's capabilities,
// that attacker's knowledge must not grow.
Verdict check_paralocks(const Program& p, const Limits& limits);

// Piecewise non-interference between declassifying policy changes, over
// per-step store projections compared up to stuttering. A change counts as
// declassifying for the attacker when it makes strictly more variables
// visible; each such change restarts the pairing under the new relation.
Verdict check_rx(const Program& p, const Attacker& attacker,
                 const Limits& limits);

// Non-interference for an unknown but fixed policy: policy updates become
// no-ops, flows() guards evaluate under the candidate relation, and two-run
// equality must hold for every relation in the universe.
Verdict check_fixed_policy_ni(const Program& p, const Attacker& attacker,
                              bool all_relations, const Limits& limits);

// Per-step self-similarity: command pairs survive iff every observable step
// from one side is matched (silent padding allowed) from every store the
// attacker cannot distinguish under the current relation, and symmetrically.
Verdict check_strong_bisimulation(const Program& p, const Attacker& attacker,
                                  const Limits& limits);

// Knowledge-bounded condition over a supplied set of (possibly forgetful)
// attackers; the release bound is the event relation's distinguishability.
Verdict check_forgetful(const Program& p, const std::vector<Attacker>& attackers,
                        const Limits& limits);

// Classical two-run non-interference for a fixed relation; the independent
// oracle for static programs. Rejects programs with policy commands.
Verdict check_two_run_ni(const Program& p, const Attacker& attacker,
                         const FlowRelation& fixed, const Limits& limits);

// Relations (whole policy components) reachable by the program's policy
// commands from the initial policy, by abstract execution of the command
// structure; includes the initial policy.
std::vector<PolicyComponent> reachable_policies(const Program& p);

bool program_has_policy_commands(const Program& p);

}  // namespace dynpol
