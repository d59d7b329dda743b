#pragma once

#include <string>

#include "json.hpp"
#include "semfuzz/scenario.h"

namespace semfuzz {

using Json = nlohmann::json;

// Parsing rejects unknown fields; errors name the offending field.
PlanningScenario parse_scenario(const Json& j);
PlanningScenario load_scenario(const std::string& path);

Json to_json(const PlanningScenario& sc);
Json to_json(const PhysicalObject& obj);
PhysicalObject parse_object(const Json& j, const std::string& where = "object");

// Splits a scenario into its fixed part (map, ego, context objects) and the mutable object list.
Seed make_seed(PlanningScenario sc);
Seed load_seed(const std::string& path);

void save_scenario(const PlanningScenario& sc, const std::string& path);

Json read_json_file(const std::string& path);
// Writes to a temporary file next to path and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace semfuzz
