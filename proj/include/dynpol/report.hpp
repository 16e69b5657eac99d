#pragma once

#include <json.hpp>

#include "dynpol/conditions.hpp"

namespace dynpol {

using Json = nlohmann::ordered_json;

Json value_map_json(const Program& p, const std::vector<Value>& values);
Json policy_json(const PolicyComponent& policy);
Json witness_json(const Program& p, const Witness& w);

// {condition, program, status, witness, budgetTainted}
Json verdict_json(const std::string& condition, const std::string& program,
                  const Program& parsed, const Verdict& v);

int exit_code_for(Status s);

}  // namespace dynpol
