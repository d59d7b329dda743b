#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semfuzz/decision.h"
#include "semfuzz/scenario.h"

namespace semfuzz {

enum class ConstraintKind {
  PI_C1_StaticOffRoad,
  PI_C2_FollowingVehicle,
  PI_C3_IrrelevantVehicle,
  PI_C4_StaticOffRoadPedestrian,
  PI_C5_DynamicOffRoad,
  SP_PI_C1_StaticAheadOfBlocker,
  SP_PI_C2_VehicleParkedAheadOfBlocker,
};

const char* to_string(ConstraintKind k);

enum class DesiredBehavior { KeepCruising, FinishLaneChange, FinishLaneBorrow, PassIntersection };

const char* to_string(DesiredBehavior b);

struct PlanningInvariant {
  std::string id;  // "PI1" .. "PI7"
  ScenarioKind kind;
  std::map<ObjectType, std::vector<ConstraintKind>> admissible;
  DesiredBehavior desired;
  std::string description;
};

const std::vector<PlanningInvariant>& planning_invariants();
// Throws ConfigError for unknown ids.
const PlanningInvariant& planning_invariant(const std::string& id);
const PlanningInvariant& planning_invariant_for(ScenarioKind kind);

// Tolerance on the heading/direction inner product; parallel walking counts as not approaching.
inline constexpr double kApproachTolerance = 1e-9;

bool polygon_off_road(const Polygon& poly, const LaneMap& map, const std::vector<int>& route);
bool static_off_road(const PhysicalObject& x, const LaneMap& map, const std::vector<int>& route);
bool dynamic_off_road(const PhysicalObject& x, const LaneMap& map, const std::vector<int>& route);
bool follow_vehicle(const PhysicalObject& x, const EgoState& ego, const LaneMap& map,
                    double following_distance = defaults::kSafetyFollowingDistance);
bool irrelevant_vehicle(const PhysicalObject& x, const EgoState& ego, const LaneMap& map,
                        const std::vector<int>& excluded_lanes);
// Every pose of x (current and predicted) stays inside lane_id or its successors, never in forbidden.
bool drive_in_lane(const PhysicalObject& x, const LaneMap& map, int lane_id, const std::vector<int>& forbidden);
// True when x's lane leads into one of the scenario's intersection lanes.
bool heads_into_intersection(const PhysicalObject& x, const PlanningScenario& sc);
bool static_ahead_of_blocker(const PhysicalObject& x, const PlanningScenario& sc);
bool vehicle_parked_ahead_of_blocker(const PhysicalObject& x, const PlanningScenario& sc);

// Unit vector from pos toward the nearest point of the nearest planned lane centerline.
Point2 direction_towards_lanes(const Point2& pos, const LaneMap& map, const std::vector<int>& lanes);

bool satisfies(ConstraintKind k, const PhysicalObject& x, const PlanningScenario& sc);
// True iff x satisfies at least one admissible constraint of pi (plus scenario-context checks).
bool object_satisfies(const PlanningInvariant& pi, const PhysicalObject& x, const PlanningScenario& sc);
// Objects named by the scenario context (the lane-borrow blocker) are not attacker objects.
bool is_context_object(const PhysicalObject& x, const PlanningScenario& sc);

// Throws ConfigError when pi.kind differs from sc.kind.
bool check_pi(const PlanningInvariant& pi, const PlanningScenario& sc);

bool conflicts(DesiredBehavior desired, Verdict verdict);

struct Violation {
  std::string pi;
  std::string subject;
  std::string target;
  std::vector<PhysicalObject> objects;
  Verdict decision = Verdict::Clear;
};

std::optional<Violation> check_violation(const PlanningInvariant& pi, const PlanningScenario& sc,
                                         const PlanningDecision& decision);

}  // namespace semfuzz
