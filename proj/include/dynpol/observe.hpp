#pragma once

#include <map>
#include <vector>

#include "dynpol/interp.hpp"
#include "dynpol/policy.hpp"

namespace dynpol {

enum class ObservationModel { AssignEvents, StoreProjection };

// Attacker-visible part of a store under a given policy: variable index to
// value, keyed only by visible variables.
using Projection = std::map<int, Value>;

struct Observation {
  ObservationModel model;
  std::vector<std::pair<int, Value>> items;  // AssignEvents
  std::vector<Projection> projections;       // StoreProjection, stutter-free

  bool operator==(const Observation&) const = default;
};

bool event_visible(const Program& p, const Event& e, const Attacker& attacker);

Projection project_state(const Program& p, const StepRecord& s,
                         const Attacker& attacker);

// Full observation of a trace under the given model. AssignEvents keeps the
// (target, value) of visible events; StoreProjection walks the per-step
// stores, projects each under its own relation and collapses stutter.
Observation observe(const Program& p, const Trace& t, const Attacker& attacker,
                    ObservationModel model);

// Observation of the trace up to, but not including, event `event_index`,
// and up to and including it. For StoreProjection the "before" prefix covers
// every step before the event's own step, so silent policy changes between
// events belong to the earlier prefix.
Observation observe_before_event(const Program& p, const Trace& t,
                                 const Attacker& attacker,
                                 ObservationModel model, int event_index);
Observation observe_through_event(const Program& p, const Trace& t,
                                  const Attacker& attacker,
                                  ObservationModel model, int event_index);

bool observation_is_prefix(const Observation& prefix, const Observation& full);

// Values of the attacker-visible events, in order (the alphabet a forgetful
// automaton consumes).
std::vector<Value> observed_values(const Program& p, const Trace& t,
                                   const Attacker& attacker);

}  // namespace dynpol
