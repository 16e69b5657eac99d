#include "dynpol/report.hpp"

namespace dynpol {

Json value_map_json(const Program& p, const std::vector<Value>& values) {
  Json j = Json::object();
  for (std::size_t i = 0; i < p.vars.size(); ++i) j[p.vars[i].name] = values[i];
  return j;
}

Json policy_json(const PolicyComponent& policy) {
  Json flows = Json::array();
  for (const auto& [from, to] : policy.flows)
    flows.push_back(Json::array({from, to}));
  Json locks = Json::array();
  for (const auto& l : policy.open_locks) locks.push_back(l);
  return Json{{"flows", flows}, {"openLocks", locks}};
}

Json witness_json(const Program& p, const Witness& w) {
  Json j = Json::object();
  j["store"] = value_map_json(p, w.store);
  if (w.other_store) j["otherStore"] = value_map_json(p, *w.other_store);
  if (w.event_index) j["eventIndex"] = *w.event_index;
  if (!w.increase.empty()) {
    Json inc = Json::array();
    for (const auto& s : w.increase) inc.push_back(value_map_json(p, s));
    j["increase"] = inc;
  }
  if (w.context_command) j["contextCommand"] = *w.context_command;
  if (w.context_command2) j["contextCommand2"] = *w.context_command2;
  if (w.context_policy) j["contextPolicy"] = policy_json(*w.context_policy);
  j["note"] = w.note;
  return j;
}

Json verdict_json(const std::string& condition, const std::string& program,
                  const Program& parsed, const Verdict& v) {
  Json j = Json::object();
  j["condition"] = condition;
  j["program"] = program;
  j["status"] = status_name(v.status);
  j["witness"] = v.witness ? witness_json(parsed, *v.witness) : Json(nullptr);
  j["budgetTainted"] = v.budget_tainted;
  return j;
}

int exit_code_for(Status s) {
  switch (s) {
    case Status::Secure: return 0;
    case Status::Insecure: return 1;
    case Status::Unknown: return 2;
  }
  return 64;
}

}  // namespace dynpol
