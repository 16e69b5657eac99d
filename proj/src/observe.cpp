#include "dynpol/observe.hpp"

namespace dynpol {

bool event_visible(const Program& p, const Event& e, const Attacker& attacker) {
  return may_flow(e.policy, p.label_of(e.target), attacker.level);
}

Projection project_state(const Program& p, const StepRecord& s,
                         const Attacker& attacker) {
  Projection proj;
  for (std::size_t i = 0; i < p.vars.size(); ++i)
    if (may_flow(s.policy, p.vars[i].label, attacker.level))
      proj[static_cast<int>(i)] = s.values[i];
  return proj;
}

namespace {

// Projection sequence over states[0..last_state], stutter-collapsed.
std::vector<Projection> projection_prefix(const Program& p, const Trace& t,
                                          const Attacker& attacker,
                                          int last_state) {
  std::vector<Projection> out;
  for (int k = 0; k <= last_state && k < static_cast<int>(t.states.size());
       ++k) {
    Projection proj = project_state(p, t.states[k], attacker);
    if (out.empty() || out.back() != proj) out.push_back(std::move(proj));
  }
  return out;
}

Observation make_observation(const Program& p, const Trace& t,
                             const Attacker& attacker, ObservationModel model,
                             int last_event_exclusive, int last_state) {
  Observation obs;
  obs.model = model;
  if (model == ObservationModel::AssignEvents) {
    for (int i = 0; i < last_event_exclusive &&
                    i < static_cast<int>(t.events.size());
         ++i) {
      const Event& e = t.events[i];
      if (event_visible(p, e, attacker)) obs.items.push_back({e.target, e.value});
    }
  } else {
    obs.projections = projection_prefix(p, t, attacker, last_state);
  }
  return obs;
}

}  // namespace

Observation observe(const Program& p, const Trace& t, const Attacker& attacker,
                    ObservationModel model) {
  return make_observation(p, t, attacker, model,
                          static_cast<int>(t.events.size()),
                          static_cast<int>(t.states.size()) - 1);
}

Observation observe_before_event(const Program& p, const Trace& t,
                                 const Attacker& attacker,
                                 ObservationModel model, int event_index) {
  int last_state = t.event_state[event_index] - 1;
  return make_observation(p, t, attacker, model, event_index, last_state);
}

Observation observe_through_event(const Program& p, const Trace& t,
                                  const Attacker& attacker,
                                  ObservationModel model, int event_index) {
  int last_state = t.event_state[event_index];
  return make_observation(p, t, attacker, model, event_index + 1, last_state);
}

bool observation_is_prefix(const Observation& prefix, const Observation& full) {
  if (prefix.model != full.model) return false;
  if (prefix.model == ObservationModel::AssignEvents) {
    if (prefix.items.size() > full.items.size()) return false;
    return std::equal(prefix.items.begin(), prefix.items.end(),
                      full.items.begin());
  }
  if (prefix.projections.size() > full.projections.size()) return false;
  return std::equal(prefix.projections.begin(), prefix.projections.end(),
                    full.projections.begin());
}

std::vector<Value> observed_values(const Program& p, const Trace& t,
                                   const Attacker& attacker) {
  std::vector<Value> out;
  for (const Event& e : t.events)
    if (event_visible(p, e, attacker)) out.push_back(e.value);
  return out;
}

}  // namespace dynpol
