#include "semfuzz/replay.h"

namespace semfuzz {

Json violation_to_json(const CampaignResult& result) {
  if (!result.found || !result.violation || !result.scenario) throw ConfigError("campaign found no violation");
  const Violation& v = *result.violation;
  return Json{{"subject", v.subject},
              {"pi", v.pi},
              {"decision", {{"verdict", to_string(v.decision)}, {"target", v.target}, {"reason", ""}}},
              {"scenario", to_json(*result.scenario)}};
}

ReplayResult replay(const Json& j) {
  if (!j.is_object()) throw ConfigError("violation: expected an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "subject" && key != "pi" && key != "decision" && key != "scenario") {
      throw ConfigError("violation: unknown field '" + key + "'");
    }
  }
  for (const char* key : {"subject", "pi", "decision", "scenario"}) {
    if (!j.contains(key)) throw ConfigError(std::string("violation: missing field '") + key + "'");
  }
  const auto& d = j.at("decision");
  if (!d.is_object() || !d.contains("verdict") || !d.at("verdict").is_string()) {
    throw ConfigError("violation.decision: missing string field 'verdict'");
  }
  const auto stored = verdict_from_string(d.at("verdict").get<std::string>());
  if (!stored) throw ConfigError("violation.decision.verdict: unknown verdict");

  const std::string subject_id = j.at("subject").get<std::string>();
  const Subject& subj = subject(subject_id);
  const PlanningInvariant& pi = planning_invariant(j.at("pi").get<std::string>());
  const PlanningScenario sc = parse_scenario(j.at("scenario"));

  ReplayResult r;
  r.decision = subj.decide(sc);
  if (!check_pi(pi, sc)) {
    r.message = "FAIL: scenario does not satisfy " + pi.id;
    return r;
  }
  if (r.decision.verdict != *stored) {
    r.message = std::string("FAIL: decision is ") + to_string(r.decision.verdict) + ", expected " + to_string(*stored);
    return r;
  }
  if (!sound_violation(pi, sc, r.decision)) {
    r.message = std::string("FAIL: ") + to_string(r.decision.verdict) + " does not violate " + pi.id;
    return r;
  }
  r.pass = true;
  r.message = "PASS: " + subject_id + " decides " + to_string(r.decision.verdict) + " under " + pi.id;
  return r;
}

ReplayResult replay_file(const std::string& path) {
  try {
    return replay(read_json_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const ScenarioError& e) {
    throw ScenarioError(path + ": " + e.what());
  } catch (const Json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace semfuzz
