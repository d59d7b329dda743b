#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semfuzz/geom.h"

namespace semfuzz {

namespace defaults {
inline constexpr double kPredictionHorizon = 8.0;  // s
inline constexpr double kPredictionStep = 0.5;     // s
inline constexpr double kSafetyFollowingDistance = 5.0;
inline constexpr double kEgoWidth = 2.11;
inline constexpr double kEgoLength = 4.93;
inline constexpr double kPositionRange = 80.0;
}  // namespace defaults

namespace dims {
inline constexpr double kStaticMin = 0.5;
inline constexpr double kStaticMax = 2.0;
inline constexpr double kPedestrianLength = 0.50, kPedestrianWidth = 0.50, kPedestrianHeight = 1.80;
inline constexpr double kPedestrianMaxSpeed = 1.4;
inline constexpr double kVehicleLength = 4.70, kVehicleWidth = 2.06, kVehicleHeight = 2.05;
inline constexpr double kBicycleLength = 1.80, kBicycleWidth = 0.50, kBicycleHeight = 1.00;
}  // namespace dims

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SynthesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ObjectType { Pedestrian, Vehicle, Bicycle, StaticObject };

const char* to_string(ObjectType t);
std::optional<ObjectType> object_type_from_string(const std::string& s);

struct Waypoint {
  double t = 0.0;
  Point2 pos;
  bool operator==(const Waypoint&) const = default;
};

struct PhysicalObject {
  std::string id;
  ObjectType type = ObjectType::StaticObject;
  Point2 center;
  double length = 1.0;
  double width = 1.0;
  double height = 1.0;
  double heading = 0.0;  // radians in [0, 2pi)
  double speed = 0.0;
  std::vector<Waypoint> trajectory;

  Polygon polygon() const { return object_polygon(center, length, width, heading); }
  // Parked bicycles and static obstacles never move; pedestrians and vehicles may stand still.
  bool is_static() const { return speed == 0.0 || trajectory.empty(); }
  bool operator==(const PhysicalObject&) const = default;
};

// Heading used for the footprint at waypoint i (direction of travel).
double waypoint_heading(const PhysicalObject& obj, size_t i);
Polygon waypoint_polygon(const PhysicalObject& obj, size_t i);

struct EgoState {
  Point2 position;
  double heading = 0.0;
  double speed = 0.0;
  double width = defaults::kEgoWidth;
  double length = defaults::kEgoLength;
  std::vector<int> route;  // planned lanes, route[0] is the current lane
  FrenetPose pose;         // on route[0]

  int lane_id() const { return route.empty() ? -1 : route.front(); }
};

enum class ScenarioKind {
  LaneFollowSingle,
  LaneFollowMulti,
  LaneChange,
  LaneBorrow,
  StopSignIntersection,
  SignalIntersection,
  BareIntersection,
};

const char* to_string(ScenarioKind k);
std::optional<ScenarioKind> scenario_kind_from_string(const std::string& s);

struct ScenarioContext {
  std::optional<std::string> blocker_id;  // LaneBorrow
  std::optional<int> target_lane;         // LaneChange target, LaneBorrow borrowed lane
  std::optional<double> stop_line_s;      // intersections, on the ego lane
  std::optional<Polygon> crosswalk;       // SignalIntersection
  std::vector<int> associated_lanes;      // lanes guarded by the stop sign
  std::vector<int> intersection_lanes;    // connector lanes inside the intersection
};

struct PlanningScenario {
  LaneMap map;
  EgoState ego;
  std::vector<PhysicalObject> objects;
  ScenarioKind kind = ScenarioKind::LaneFollowSingle;
  ScenarioContext context;

  // Lanes the ego plans to drive on: the route plus the lane-change or borrow target.
  std::vector<int> planned_lanes() const;
  // Lanes attacker objects must keep clear of: the planned lanes plus the intersection connectors.
  std::vector<int> protected_lanes() const;
  const PhysicalObject* find_object(const std::string& id) const;
  const PhysicalObject* blocker() const;
};

struct Seed {
  PlanningScenario base;
  std::vector<PhysicalObject> genome;
};

struct RangeViolation {
  std::string field;
  std::string message;
};

std::vector<RangeViolation> validate_ranges(const PhysicalObject& obj, const EgoState& ego);

std::vector<Waypoint> synthesize_trajectory(const PhysicalObject& obj, const LaneMap& map,
                                            double horizon = defaults::kPredictionHorizon,
                                            double dt = defaults::kPredictionStep);

// Lane id and its successors, transitively, in breadth-first order.
std::vector<int> lane_chain(const LaneMap& map, int lane_id, size_t max_depth = 8);

// Recomputes ego.pose and checks cross references; throws ScenarioError.
void finalize_scenario(PlanningScenario& sc);

}  // namespace semfuzz
