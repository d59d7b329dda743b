#pragma once

#include <memory>
#include <string>
#include <vector>

#include "semfuzz/decision.h"
#include "semfuzz/distance.h"
#include "semfuzz/scenario.h"

namespace semfuzz {

// Tunables the reference procedures leave unvalued.
struct SubjectConfig {
  double v3_threshold = 8.0;          // m, queueing gap ahead of the blocker
  double v7_max_stop_distance = 3.0;  // m, distance to the stop line for the watch list
  int v7_timeout_cycles = 80;         // decision cycles before a single-entry watch list expires
  int v8_rollouts = 7;
  double v8_rollout_spacing = 0.5;  // m
  int v9_rollouts = 7;
  double v9_rollout_spacing = 0.5;  // m
};

struct SubjectInfo {
  std::string id;  // "v1" .. "v9"
  std::string description;
  std::vector<ScenarioKind> kinds;
  std::string pi;    // bundled planning invariant
  std::string seed;  // bundled seed file name under data/seeds
  Verdict undesired = Verdict::Blocked;
};

class Subject {
 public:
  Subject(SubjectInfo info, const std::vector<std::string>& predicate_ids);
  virtual ~Subject() = default;

  const SubjectInfo& info() const { return info_; }
  const std::string& id() const { return info_.id; }
  const DistanceProfile& profile() const { return profile_; }
  const std::vector<std::string>& targets() const { return targets_; }
  bool accepts(ScenarioKind kind) const;

  // Throws ConfigError when the scenario kind is not handled by this subject.
  PlanningDecision decide(const PlanningScenario& sc, TraceSink& sink) const;
  PlanningDecision decide(const PlanningScenario& sc) const;

 protected:
  virtual PlanningDecision run(const PlanningScenario& sc, TraceSink& sink) const = 0;

  PlanningDecision verdict(Verdict v, std::string reason) const;
  // Undesired verdict reached through the named attack target.
  PlanningDecision fire(const std::string& target, std::string reason) const;

 private:
  SubjectInfo info_;
  DistanceProfile profile_;
  std::vector<std::string> targets_;
};

std::vector<std::string> subject_ids();
// Throws ConfigError for unknown ids.
std::unique_ptr<Subject> make_subject(const std::string& id, const SubjectConfig& config = {});
// Shared default-configured instances.
const Subject& subject(const std::string& id);

// Dependence graph shipped with the library for a subject id.
DependenceGraph embedded_graph(const std::string& id);

}  // namespace semfuzz
