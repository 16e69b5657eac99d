#include "dynpol/conditions.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <tuple>

#include "dynpol/printer.hpp"

namespace dynpol {

const char* status_name(Status s) {
  switch (s) {
    case Status::Secure: return "Secure";
    case Status::Insecure: return "Insecure";
    case Status::Unknown: return "Unknown";
  }
  return "?";
}

const char* release_policy_name(ReleasePolicy rp) {
  switch (rp) {
    case ReleasePolicy::EquivalenceNow: return "equiv";
    case ReleasePolicy::TimeTransitiveAllowing: return "timetrans";
    case ReleasePolicy::DirectReleaseAllowing: return "direct";
  }
  return "?";
}

namespace {

// Shared run table plus memoised full observations, so knowledge queries
// do not re-run the universe per event.
struct ObsContext {
  const Program& p;
  Attacker attacker;
  ObservationModel model;
  RunTable table;
  std::vector<Observation> fulls;

  ObsContext(const Program& p, const Attacker& attacker, ObservationModel model,
             const Limits& limits)
      : p(p), attacker(attacker), model(model), table(RunTable::build(p, limits)) {
    fulls.reserve(table.universe.size());
    for (const Trace& t : table.traces)
      fulls.push_back(observe(p, t, attacker, model));
  }

  bool consistent(const Observation& query, std::size_t i) const {
    if (observation_is_prefix(query, fulls[i])) return true;
    if (table.traces[i].truncated && observation_is_prefix(fulls[i], query))
      return true;
    return false;
  }

  KnowledgeSet exclusion(const Observation& obs) const {
    KnowledgeSet out;
    out.tainted = table.any_truncated;
    for (std::size_t i = 0; i < table.universe.size(); ++i)
      if (!consistent(obs, i)) out.stores.push_back(table.universe[i]);
    return out;
  }
};

std::vector<int> visible_vars(const Program& p, const FlowRelation& rel,
                              const std::string& level) {
  std::vector<int> out;
  for (std::size_t i = 0; i < p.vars.size(); ++i)
    if (may_flow(rel, p.vars[i].label, level)) out.push_back(static_cast<int>(i));
  return out;
}

bool agree_on(const std::vector<Value>& a, const std::vector<Value>& b,
              const std::vector<int>& vars) {
  for (int v : vars)
    if (a[v] != b[v]) return false;
  return true;
}

// Stores disagreeing with `actual` on some variable in `vars`.
KnowledgeSet distinguishable_set(const std::vector<std::vector<Value>>& universe,
                                 const std::vector<Value>& actual,
                                 const std::vector<int>& vars) {
  KnowledgeSet out;
  for (const auto& s : universe)
    if (!agree_on(s, actual, vars)) out.stores.push_back(s);
  return out;
}

Witness make_increase_witness(const std::vector<Value>& store, int event_index,
                              const KnowledgeSet& offending,
                              const KnowledgeSet& bound, std::string note) {
  Witness w;
  w.store = store;
  w.event_index = event_index;
  w.increase = offending.stores;
  for (const auto& s : offending.stores) {
    if (!bound.contains(s)) {
      w.other_store = s;
      break;
    }
  }
  w.note = std::move(note);
  return w;
}

Verdict finish(bool violation_found, bool tainted, std::optional<Witness> w) {
  Verdict v;
  if (violation_found) {
    v.status = Status::Insecure;
    v.witness = std::move(w);
  } else if (tainted) {
    v.status = Status::Unknown;
  } else {
    v.status = Status::Secure;
  }
  v.budget_tainted = tainted;
  return v;
}

}  // namespace

KnowledgeSet release_set(ReleasePolicy variant, const Program& p,
                         const Attacker& attacker, const Store& actual_initial,
                         const Trace& trace, int event_index,
                         const Limits& limits) {
  const Event& e = trace.events[event_index];
  auto universe = enumerate_universe(p, limits);
  switch (variant) {
    case ReleasePolicy::EquivalenceNow: {
      auto vars = visible_vars(p, e.policy.flows, attacker.level);
      return distinguishable_set(universe, actual_initial.values, vars);
    }
    case ReleasePolicy::DirectReleaseAllowing: {
      // Any relation active at some step up to and including the event.
      std::set<FlowRelation> relations;
      for (int k = 0; k <= trace.event_state[event_index]; ++k)
        relations.insert(trace.states[k].policy.flows);
      KnowledgeSet out;
      for (const auto& s : universe) {
        for (const auto& rel : relations) {
          if (!agree_on(s, actual_initial.values,
                        visible_vars(p, rel, attacker.level))) {
            out.stores.push_back(s);
            break;
          }
        }
      }
      return out;
    }
    case ReleasePolicy::TimeTransitiveAllowing: {
      // Exclusions justified by the whole trace so far, filtered through the
      // event's relation as if it had been in force throughout.
      const FlowRelation& f = e.policy.flows;
      auto filtered = [&](const Trace& t, int through_event) {
        std::vector<std::pair<int, Value>> items;
        int last = through_event < 0 ? static_cast<int>(t.events.size()) - 1
                                     : through_event;
        for (int i = 0; i <= last && i < static_cast<int>(t.events.size()); ++i)
          if (may_flow(f, p.label_of(t.events[i].target), attacker.level))
            items.push_back({t.events[i].target, t.events[i].value});
        return items;
      };
      auto actual_obs = filtered(trace, event_index);
      KnowledgeSet out;
      RunTable table = RunTable::build(p, limits);
      out.tainted = table.any_truncated;
      for (std::size_t i = 0; i < table.universe.size(); ++i) {
        auto full = filtered(table.traces[i], -1);
        bool is_prefix = actual_obs.size() <= full.size() &&
                         std::equal(actual_obs.begin(), actual_obs.end(),
                                    full.begin());
        bool could_extend = table.traces[i].truncated &&
                            full.size() <= actual_obs.size() &&
                            std::equal(full.begin(), full.end(),
                                       actual_obs.begin());
        if (!is_prefix && !could_extend) out.stores.push_back(table.universe[i]);
      }
      return out;
    }
  }
  throw std::logic_error("bad release policy");
}

Verdict check_epistemic(const Program& p, const Attacker& attacker,
                        ObservationModel model, ReleasePolicy variant,
                        const Limits& limits) {
  ObsContext ctx(p, attacker, model, limits);
  bool tainted = ctx.table.any_truncated;
  for (std::size_t ai = 0; ai < ctx.table.universe.size(); ++ai) {
    const Trace& trace = ctx.table.traces[ai];
    Store actual = initial_store(p, ctx.table.universe[ai]);
    for (int i = 0; i < static_cast<int>(trace.events.size()); ++i) {
      Observation before = observe_before_event(p, trace, attacker, model, i);
      Observation after = observe_through_event(p, trace, attacker, model, i);
      KnowledgeSet ekb = ctx.exclusion(before);
      KnowledgeSet eka = ctx.exclusion(after);
      KnowledgeSet inc = set_difference(eka, ekb);
      if (inc.stores.empty()) continue;
      KnowledgeSet bound = release_set(variant, p, attacker, actual, trace, i, limits);
      tainted = tainted || bound.tainted;
      if (!subset_of(inc, bound)) {
        KnowledgeSet offending = set_difference(inc, bound);
        if (!inc.tainted && !bound.tainted)
          return finish(true, tainted,
                        make_increase_witness(ctx.table.universe[ai], i, offending,
                                              bound, "knowledge increase exceeds release set"));
        tainted = true;  // possible violation, but budget-tainted
      }
    }
  }
  return finish(false, tainted, std::nullopt);
}

Verdict check_gradual_release(const Program& p, const Limits& limits) {
  if (p.labels.size() != 2)
    throw std::invalid_argument("gradual release needs exactly two labels");
  std::string low;
  if (p.attacker) {
    low = p.attacker->level;
  } else {
    for (const auto& l : p.labels)
      if (l == "Low") low = l;
    if (low.empty())
      throw std::invalid_argument(
          "gradual release: no attacker declared and no label named Low");
  }
  Attacker attacker = Attacker::at_level(low);
  ObsContext ctx(p, attacker, ObservationModel::AssignEvents, limits);
  bool tainted = ctx.table.any_truncated;
  auto low_vars = visible_vars(p, p.initial_policy.flows, low);
  for (std::size_t ai = 0; ai < ctx.table.universe.size(); ++ai) {
    const Trace& trace = ctx.table.traces[ai];
    KnowledgeSet low_diff =
        distinguishable_set(ctx.table.universe, ctx.table.universe[ai], low_vars);
    for (int i = 0; i < static_cast<int>(trace.events.size()); ++i) {
      if (trace.events[i].release) continue;
      Observation before =
          observe_before_event(p, trace, attacker, ctx.model, i);
      Observation after =
          observe_through_event(p, trace, attacker, ctx.model, i);
      KnowledgeSet ekb = ctx.exclusion(before);
      KnowledgeSet eka = ctx.exclusion(after);
      KnowledgeSet inc =
          set_difference(set_difference(eka, ekb), low_diff);
      if (!inc.stores.empty()) {
        if (!inc.tainted)
          return finish(true, tainted,
                        make_increase_witness(ctx.table.universe[ai], i, inc,
                                              low_diff,
                                              "non-release event taught the observer something new"));
        tainted = true;
      }
    }
  }
  return finish(false, tainted, std::nullopt);
}

Verdict check_paralocks(const Program& p, const Limits& limits) {
  if (static_cast<int>(p.locks.size()) > limits.lock_cap)
    throw CapExceeded("lock powerset exceeds cap");
  RunTable table = RunTable::build(p, limits);
  bool tainted = table.any_truncated;

  // Per-variable paralocks labels, resolved once.
  std::vector<ParalocksLabel> plabel(p.vars.size());
  for (std::size_t i = 0; i < p.vars.size(); ++i)
    plabel[i] = p.plabel_of(p.vars[i].name);

  std::vector<std::set<std::string>> cap_sets;
  std::size_t n = p.locks.size();
  for (std::size_t mask = 0; mask < (1u << n); ++mask) {
    std::set<std::string> caps;
    for (std::size_t b = 0; b < n; ++b)
      if (mask & (1u << b)) caps.insert(p.locks[b]);
    cap_sets.push_back(std::move(caps));
  }

  for (const auto& actor : p.labels) {
    for (const auto& caps : cap_sets) {
      Attacker attacker;
      attacker.level = actor;
      attacker.caps = caps;

      auto observable_at = [&](int var, const std::set<std::string>& open) {
        return paralocks_observable(plabel[var], attacker, open);
      };
      // Full per-store observations under per-event lock snapshots.
      std::vector<std::vector<std::pair<int, Value>>> fulls(table.universe.size());
      for (std::size_t i = 0; i < table.universe.size(); ++i)
        for (const Event& e : table.traces[i].events)
          if (observable_at(e.target, e.policy.open_locks))
            fulls[i].push_back({e.target, e.value});

      auto exclusion = [&](const std::vector<std::pair<int, Value>>& obs) {
        KnowledgeSet out;
        out.tainted = table.any_truncated;
        for (std::size_t i = 0; i < table.universe.size(); ++i) {
          bool is_prefix = obs.size() <= fulls[i].size() &&
                           std::equal(obs.begin(), obs.end(), fulls[i].begin());
          bool could_extend = table.traces[i].truncated &&
                              fulls[i].size() <= obs.size() &&
                              std::equal(fulls[i].begin(), fulls[i].end(),
                                         obs.begin());
          if (!is_prefix && !could_extend)
            out.stores.push_back(table.universe[i]);
        }
        return out;
      };

      std::vector<int> base_vars;  // observable with no locks open
      for (std::size_t v = 0; v < p.vars.size(); ++v)
        if (observable_at(static_cast<int>(v), {}))
          base_vars.push_back(static_cast<int>(v));

      for (std::size_t ai = 0; ai < table.universe.size(); ++ai) {
        const Trace& trace = table.traces[ai];
        KnowledgeSet base =
            distinguishable_set(table.universe, table.universe[ai], base_vars);
        std::vector<std::pair<int, Value>> seen;
        for (int i = 0; i < static_cast<int>(trace.events.size()); ++i) {
          const Event& e = trace.events[i];
          std::vector<std::pair<int, Value>> before = seen;
          if (observable_at(e.target, e.policy.open_locks))
            seen.push_back({e.target, e.value});
          bool guarded = std::includes(attacker.caps.begin(), attacker.caps.end(),
                                       e.policy.open_locks.begin(),
                                       e.policy.open_locks.end());
          if (!guarded) continue;
          KnowledgeSet ekb = set_union(exclusion(before), base);
          KnowledgeSet eka = set_union(exclusion(seen), base);
          KnowledgeSet inc = set_difference(eka, ekb);
          if (!inc.stores.empty()) {
            if (!inc.tainted) {
              Witness w = make_increase_witness(
                  table.universe[ai], i, inc, ekb,
                  "attacker " + actor + " with capabilities gained knowledge at a guarded event");
              return finish(true, tainted, std::move(w));
            }
            tainted = true;
          }
        }
      }
    }
  }
  return finish(false, tainted, std::nullopt);
}

Verdict check_forgetful(const Program& p, const std::vector<Attacker>& attackers,
                        const Limits& limits) {
  bool tainted = false;
  for (const Attacker& attacker : attackers) {
    if (attacker.memory == AttackerMemory::PerfectRecall) {
      Verdict v = check_epistemic(p, attacker, ObservationModel::AssignEvents,
                                  ReleasePolicy::EquivalenceNow, limits);
      if (v.status == Status::Insecure) return v;
      tainted = tainted || v.budget_tainted;
      continue;
    }
    const ForgetfulAutomaton& automaton = *attacker.automaton;
    RunTable table = RunTable::build(p, limits);
    tainted = tainted || table.any_truncated;
    std::vector<std::vector<Value>> all_values(table.universe.size());
    for (std::size_t i = 0; i < table.universe.size(); ++i)
      all_values[i] = observed_values(p, table.traces[i], attacker);

    // ek after k observed values = stores that cannot drive the automaton to
    // the state the actual prefix reached.
    auto exclusion_at_state = [&](const std::string& target) {
      KnowledgeSet out;
      out.tainted = table.any_truncated;
      for (std::size_t i = 0; i < table.universe.size(); ++i) {
        bool reaches = automaton.initial == target;
        std::string st = automaton.initial;
        for (Value v : all_values[i]) {
          if (reaches) break;
          st = automaton.step_state(st, v);
          reaches = st == target;
        }
        if (!reaches && !table.traces[i].truncated)
          out.stores.push_back(table.universe[i]);
      }
      return out;
    };

    for (std::size_t ai = 0; ai < table.universe.size(); ++ai) {
      const Trace& trace = table.traces[ai];
      Store actual = initial_store(p, table.universe[ai]);
      std::string state = automaton.initial;
      for (int i = 0; i < static_cast<int>(trace.events.size()); ++i) {
        const Event& e = trace.events[i];
        if (!event_visible(p, e, attacker)) continue;
        std::string before_state = state;
        state = automaton.step_state(state, e.value);
        KnowledgeSet ekb = exclusion_at_state(before_state);
        KnowledgeSet eka = exclusion_at_state(state);
        KnowledgeSet inc = set_difference(eka, ekb);
        if (inc.stores.empty()) continue;
        KnowledgeSet bound = release_set(ReleasePolicy::EquivalenceNow, p,
                                         attacker, actual, trace, i, limits);
        if (!subset_of(inc, bound)) {
          if (!inc.tainted) {
            KnowledgeSet offending = set_difference(inc, bound);
            return finish(true, tainted,
                          make_increase_witness(table.universe[ai], i, offending,
                                                bound,
                                                "forgetful attacker learned more than the current relation allows"));
          }
          tainted = true;
        }
      }
    }
  }
  return finish(false, tainted, std::nullopt);
}

// ---------------------------------------------------------------------------
// Piecewise non-interference over store projections (transaction-style).

namespace {

struct RxSegment {
  std::vector<Projection> projections;  // stutter-collapsed
  CommandPtr next_command;              // set when the run hit a cut
  PolicyComponent next_policy;
  bool truncated = false;
};

// Runs until termination, budget, or a policy step that strictly enlarges the
// attacker-visible variable set (the declassifying cut, consumed here).
RxSegment run_rx_segment(const Program& p, CommandPtr cmd, Store store,
                         const Attacker& attacker, int budget) {
  RxSegment seg;
  auto push = [&](const Store& s) {
    Projection proj =
        project_state(p, {s.values, s.policy}, attacker);
    if (seg.projections.empty() || seg.projections.back() != proj)
      seg.projections.push_back(std::move(proj));
  };
  push(store);
  int steps = 0;
  while (cmd) {
    if (steps >= budget) {
      seg.truncated = true;
      return seg;
    }
    StepResult r = step(p, *cmd, store);
    ++steps;
    std::size_t before =
        visible_vars(p, store.policy.flows, attacker.level).size();
    std::size_t after =
        visible_vars(p, r.store.policy.flows, attacker.level).size();
    if (after > before) {
      seg.next_command = r.next ? r.next : Command::skip();
      seg.next_policy = r.store.policy;
      return seg;
    }
    store = r.store;
    cmd = r.next;
    push(store);
  }
  return seg;
}

}  // namespace

Verdict check_rx(const Program& p, const Attacker& attacker,
                 const Limits& limits) {
  auto universe = enumerate_universe(p, limits);
  bool tainted = false;

  std::deque<std::pair<CommandPtr, PolicyComponent>> phases;
  std::set<std::pair<std::string, PolicyComponent>> seen;
  auto enqueue = [&](CommandPtr cmd, const PolicyComponent& policy) {
    auto key = std::make_pair(print_command(*cmd), policy);
    if (seen.insert(key).second) phases.push_back({cmd, policy});
  };
  enqueue(p.body, p.initial_policy);

  while (!phases.empty()) {
    auto [cmd, policy] = phases.front();
    phases.pop_front();
    auto vars = visible_vars(p, policy.flows, attacker.level);

    std::vector<RxSegment> segments;
    segments.reserve(universe.size());
    for (const auto& values : universe) {
      RxSegment seg =
          run_rx_segment(p, cmd, Store{values, policy}, attacker, limits.budget);
      tainted = tainted || seg.truncated;
      if (seg.next_command) enqueue(seg.next_command, seg.next_policy);
      segments.push_back(std::move(seg));
    }

    for (std::size_t i = 0; i < universe.size(); ++i) {
      for (std::size_t j = i + 1; j < universe.size(); ++j) {
        if (!agree_on(universe[i], universe[j], vars)) continue;
        const auto& a = segments[i].projections;
        const auto& b = segments[j].projections;
        std::size_t common = std::min(a.size(), b.size());
        bool diverged = !std::equal(a.begin(), a.begin() + common, b.begin());
        bool length_mismatch = a.size() != b.size();
        if (diverged || (length_mismatch && !segments[i].truncated &&
                         !segments[j].truncated)) {
          Witness w;
          w.store = universe[i];
          w.other_store = universe[j];
          w.note = "projection sequences diverge within a segment";
          w.context_command = print_command(*cmd);
          w.context_policy = policy;
          return finish(true, tainted, std::move(w));
        }
        if (length_mismatch) tainted = true;
      }
    }
  }
  return finish(false, tainted, std::nullopt);
}

// ---------------------------------------------------------------------------
// Non-interference for an unknown, but fixed, relation.

namespace {

void apply_policy_command(PolicyComponent& policy, const Command& c) {
  switch (c.kind) {
    case Command::Kind::AllowFlow:
      policy.flows.insert({c.from, c.to});
      break;
    case Command::Kind::RevokeFlow:
      policy.flows.erase({c.from, c.to});
      break;
    case Command::Kind::OpenLock:
      policy.open_locks.insert(c.lock);
      break;
    case Command::Kind::CloseLock:
      policy.open_locks.erase(c.lock);
      break;
    default:
      break;
  }
}

using PolicySet = std::set<PolicyComponent>;

PolicySet abstract_policies(const Command& c, const PolicySet& in,
                            PolicySet& universe) {
  switch (c.kind) {
    case Command::Kind::Skip:
    case Command::Kind::Assign:
      return in;
    case Command::Kind::AllowFlow:
    case Command::Kind::RevokeFlow:
    case Command::Kind::OpenLock:
    case Command::Kind::CloseLock: {
      PolicySet out;
      for (PolicyComponent pc : in) {
        apply_policy_command(pc, c);
        universe.insert(pc);
        out.insert(std::move(pc));
      }
      return out;
    }
    case Command::Kind::Seq:
      return abstract_policies(*c.second,
                               abstract_policies(*c.first, in, universe),
                               universe);
    case Command::Kind::If: {
      PolicySet out = abstract_policies(*c.then_branch, in, universe);
      PolicySet other = c.else_branch
                            ? abstract_policies(*c.else_branch, in, universe)
                            : in;
      out.insert(other.begin(), other.end());
      return out;
    }
    case Command::Kind::While: {
      PolicySet acc = in;
      for (;;) {
        PolicySet out = abstract_policies(*c.body, acc, universe);
        std::size_t before = acc.size();
        acc.insert(out.begin(), out.end());
        if (acc.size() == before) break;
      }
      return acc;
    }
  }
  return in;
}

CommandPtr strip_policy_commands(const Command& c) {
  switch (c.kind) {
    case Command::Kind::AllowFlow:
    case Command::Kind::RevokeFlow:
    case Command::Kind::OpenLock:
    case Command::Kind::CloseLock:
      return Command::skip();
    case Command::Kind::Seq:
      return Command::seq(strip_policy_commands(*c.first),
                          strip_policy_commands(*c.second));
    case Command::Kind::If:
      return Command::if_then_else(
          c.expr, strip_policy_commands(*c.then_branch),
          c.else_branch ? strip_policy_commands(*c.else_branch) : nullptr);
    case Command::Kind::While:
      return Command::while_loop(c.expr, strip_policy_commands(*c.body));
    default:
      return std::make_shared<Command>(c);
  }
}

bool has_policy_commands(const Command& c) {
  switch (c.kind) {
    case Command::Kind::AllowFlow:
    case Command::Kind::RevokeFlow:
    case Command::Kind::OpenLock:
    case Command::Kind::CloseLock:
      return true;
    case Command::Kind::Seq:
      return has_policy_commands(*c.first) || has_policy_commands(*c.second);
    case Command::Kind::If:
      return has_policy_commands(*c.then_branch) ||
             (c.else_branch && has_policy_commands(*c.else_branch));
    case Command::Kind::While:
      return has_policy_commands(*c.body);
    default:
      return false;
  }
}

// Two-run equality of visible assignment events under a frozen relation.
// Returns nullopt when secure, a witness otherwise.
std::optional<Witness> two_run_violation(const Program& frozen,
                                         const Attacker& attacker,
                                         const Limits& limits, bool& tainted,
                                         const std::string& note) {
  RunTable table = RunTable::build(frozen, limits);
  tainted = tainted || table.any_truncated;
  auto vars = visible_vars(frozen, frozen.initial_policy.flows, attacker.level);
  std::vector<Observation> obs(table.universe.size());
  for (std::size_t i = 0; i < table.universe.size(); ++i)
    obs[i] = observe(frozen, table.traces[i], attacker,
                     ObservationModel::AssignEvents);
  for (std::size_t i = 0; i < table.universe.size(); ++i) {
    for (std::size_t j = i + 1; j < table.universe.size(); ++j) {
      if (!agree_on(table.universe[i], table.universe[j], vars)) continue;
      const auto& a = obs[i].items;
      const auto& b = obs[j].items;
      std::size_t common = std::min(a.size(), b.size());
      bool diverged = !std::equal(a.begin(), a.begin() + common, b.begin());
      bool both_complete =
          !table.traces[i].truncated && !table.traces[j].truncated;
      if (diverged || (a.size() != b.size() && both_complete)) {
        Witness w;
        w.store = table.universe[i];
        w.other_store = table.universe[j];
        w.note = note;
        return w;
      }
      if (a.size() != b.size()) tainted = true;
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<PolicyComponent> reachable_policies(const Program& p) {
  PolicySet universe;
  universe.insert(p.initial_policy);
  abstract_policies(*p.body, {p.initial_policy}, universe);
  return {universe.begin(), universe.end()};
}

bool program_has_policy_commands(const Program& p) {
  return has_policy_commands(*p.body);
}

Verdict check_fixed_policy_ni(const Program& p, const Attacker& attacker,
                              bool all_relations, const Limits& limits) {
  std::vector<PolicyComponent> candidates;
  if (all_relations) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& from : p.labels)
      for (const auto& to : p.labels)
        if (from != to) pairs.push_back({from, to});
    if (pairs.size() > 12) throw CapExceeded("relation space too large");
    for (std::size_t mask = 0; mask < (1u << pairs.size()); ++mask) {
      PolicyComponent pc;
      for (std::size_t b = 0; b < pairs.size(); ++b)
        if (mask & (1u << b)) pc.flows.insert(pairs[b]);
      candidates.push_back(std::move(pc));
    }
  } else {
    candidates = reachable_policies(p);
  }

  bool tainted = false;
  for (const PolicyComponent& f : candidates) {
    Program frozen = p;
    frozen.body = strip_policy_commands(*p.body);
    frozen.initial_policy = f;
    auto w = two_run_violation(frozen, attacker, limits, tainted,
                               "runs diverge under a fixed relation");
    if (w) return finish(true, tainted, std::move(w));
  }
  return finish(false, tainted, std::nullopt);
}

Verdict check_two_run_ni(const Program& p, const Attacker& attacker,
                         const FlowRelation& fixed, const Limits& limits) {
  if (program_has_policy_commands(p))
    throw std::invalid_argument("two-run oracle requires a policy-change-free program");
  Program frozen = p;
  frozen.initial_policy.flows = fixed;
  bool tainted = false;
  auto w = two_run_violation(frozen, attacker, limits, tainted,
                             "visible observations differ between runs");
  if (w) return finish(true, tainted, std::move(w));
  return finish(false, tainted, std::nullopt);
}

// ---------------------------------------------------------------------------
// Strong bisimulation: greatest self-similarity over continuation pairs.

namespace {

struct BisimSpace {
  std::vector<CommandPtr> continuations;  // index 0 reserved for "done"
  std::map<std::string, int> index;
  std::vector<PolicyComponent> policies;

  int id_of(const CommandPtr& c) const {
    if (!c) return 0;
    auto it = index.find(print_command(*c));
    return it == index.end() ? -1 : it->second;
  }
};

BisimSpace build_space(const Program& p,
                       const std::vector<std::vector<Value>>& universe) {
  BisimSpace space;
  space.continuations.push_back(nullptr);
  space.index[""] = 0;
  space.policies = reachable_policies(p);

  std::deque<CommandPtr> work;
  auto add = [&](const CommandPtr& c) {
    if (!c) return;
    std::string key = print_command(*c);
    if (space.index.count(key)) return;
    space.index[key] = static_cast<int>(space.continuations.size());
    space.continuations.push_back(c);
    work.push_back(c);
  };
  add(p.body);
  while (!work.empty()) {
    CommandPtr c = work.front();
    work.pop_front();
    for (const auto& policy : space.policies) {
      for (const auto& values : universe) {
        StepResult r = step(p, *c, Store{values, policy});
        add(r.next);
      }
    }
  }
  return space;
}

}  // namespace

Verdict check_strong_bisimulation(const Program& p, const Attacker& attacker,
                                  const Limits& limits) {
  auto universe = enumerate_universe(p, limits);
  BisimSpace space = build_space(p, universe);
  int nc = static_cast<int>(space.continuations.size());
  int np = static_cast<int>(space.policies.size());

  // related[c1][c2][f]; start from the full relation and refine.
  std::vector<std::vector<std::vector<char>>> related(
      nc, std::vector<std::vector<char>>(nc, std::vector<char>(np, 1)));
  bool tainted = false;
  std::optional<Witness> first_cause;

  auto policy_index = [&](const PolicyComponent& pc) -> int {
    for (int pi = 0; pi < np; ++pi)
      if (space.policies[pi] == pc) return pi;
    return -1;
  };

  // One step of (c1, S1): matched from (c2, S2) by a silent-padded step chain
  // with the same observation and a related continuation pair. The chain is
  // deterministic, so the search walks a single path.
  auto matched = [&](int c1_next, const PolicyComponent& f1_next,
                     std::optional<std::pair<int, Value>> obs, int c2,
                     const std::vector<Value>& v2,
                     const PolicyComponent& f) -> std::optional<bool> {
    CommandPtr cmd = space.continuations[c2];
    Store store{v2, f};
    int id = c2;
    for (int steps = 0;; ++steps) {
      if (!obs && store.policy == f1_next) {
        int pi = policy_index(store.policy);
        if (pi >= 0 && related[c1_next][id][pi]) return true;
      }
      if (!cmd) return false;  // terminated without a match
      if (steps >= limits.budget) return std::nullopt;  // search truncated
      StepResult r = step(p, *cmd, store);
      bool visible = r.event && event_visible(p, *r.event, attacker);
      if (visible) {
        if (!obs) return false;  // cannot match a silent move with output
        if (r.event->target != obs->first || r.event->value != obs->second)
          return false;
        if (r.store.policy != f1_next) return false;
        int pi = policy_index(r.store.policy);
        int next_id = space.id_of(r.next);
        return pi >= 0 && related[c1_next][next_id][pi];
      }
      cmd = r.next;
      store = r.store;
      id = space.id_of(cmd);
    }
  };

  auto direction_violated = [&](int c1, int c2, int pi) -> std::optional<bool> {
    if (c1 == 0) return false;  // finished program makes no steps
    const PolicyComponent& f = space.policies[pi];
    auto vars = visible_vars(p, f.flows, attacker.level);
    bool inconclusive = false;
    for (const auto& v1 : universe) {
      StepResult r1 = step(p, *space.continuations[c1], Store{v1, f});
      bool visible = r1.event && event_visible(p, *r1.event, attacker);
      std::optional<std::pair<int, Value>> obs;
      if (visible) obs = {r1.event->target, r1.event->value};
      int c1_next = space.id_of(r1.next);
      for (const auto& v2 : universe) {
        if (!agree_on(v1, v2, vars)) continue;
        auto m = matched(c1_next, r1.store.policy, obs, c2, v2, f);
        if (!m) {
          inconclusive = true;
          continue;
        }
        if (!*m) {
          if (!first_cause) {
            Witness w;
            w.store = v1;
            w.other_store = v2;
            w.note = "observable step cannot be matched from the paired store";
            w.context_command = print_command(*space.continuations[c1]);
            w.context_command2 =
                c2 == 0 ? "" : print_command(*space.continuations[c2]);
            w.context_policy = f;
            first_cause = std::move(w);
          }
          return true;
        }
      }
    }
    if (inconclusive) return std::nullopt;
    return false;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (int c1 = 0; c1 < nc; ++c1) {
      for (int c2 = 0; c2 < nc; ++c2) {
        for (int pi = 0; pi < np; ++pi) {
          if (!related[c1][c2][pi]) continue;
          auto v1 = direction_violated(c1, c2, pi);
          auto v2 = direction_violated(c2, c1, pi);
          if (!v1 || !v2) tainted = true;
          if ((v1 && *v1) || (v2 && *v2)) {
            related[c1][c2][pi] = 0;
            changed = true;
          }
        }
      }
    }
  }

  int root = space.id_of(p.body);
  int init_pi = -1;
  for (int pi = 0; pi < np; ++pi)
    if (space.policies[pi] == p.initial_policy) init_pi = pi;
  bool secure = related[root][root][init_pi];
  if (!secure) return finish(true, tainted, std::move(first_cause));
  return finish(false, tainted, std::nullopt);
}

}  // namespace dynpol
