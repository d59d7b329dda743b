#pragma once

#include <string>

#include "semfuzz/fuzzer.h"
#include "semfuzz/scenario_io.h"

namespace semfuzz {

// {"subject", "pi", "decision": {"verdict", "target", "reason"}, "scenario"}
Json violation_to_json(const CampaignResult& result);

struct ReplayResult {
  bool pass = false;
  std::string message;
  PlanningDecision decision;
};

// Re-runs the subject on the stored scenario. Passes when every object satisfies the invariant and the
// stored undesired verdict is reproduced. Throws ConfigError or ScenarioError on schema mismatch.
ReplayResult replay(const Json& violation);
ReplayResult replay_file(const std::string& path);

}  // namespace semfuzz
