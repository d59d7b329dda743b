#include "semfuzz/invariants.h"

#include <algorithm>
#include <limits>

namespace semfuzz {

namespace {

constexpr std::pair<Verdict, const char*> kVerdictNames[] = {
    {Verdict::Clear, "Clear"},
    {Verdict::Blocked, "Blocked"},
    {Verdict::ClearToChange, "ClearToChange"},
    {Verdict::NotClear, "NotClear"},
    {Verdict::BorrowLane, "BorrowLane"},
    {Verdict::WaitBehind, "WaitBehind"},
    {Verdict::PerceptionOk, "PerceptionOk"},
    {Verdict::PerceptionBlocked, "PerceptionBlocked"},
    {Verdict::Proceed, "Proceed"},
    {Verdict::Stop, "Stop"},
    {Verdict::FullyBlocked, "FullyBlocked"},
};

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

std::vector<PlanningInvariant> build_registry() {
  using C = ConstraintKind;
  using T = ObjectType;
  const std::map<ObjectType, std::vector<ConstraintKind>> general = {
      {T::StaticObject, {C::PI_C1_StaticOffRoad}},
      {T::Bicycle, {C::PI_C1_StaticOffRoad}},
      {T::Vehicle, {C::PI_C2_FollowingVehicle, C::PI_C3_IrrelevantVehicle}},
      {T::Pedestrian, {C::PI_C4_StaticOffRoadPedestrian, C::PI_C5_DynamicOffRoad}},
  };
  auto borrow = general;
  borrow[T::StaticObject].push_back(C::SP_PI_C1_StaticAheadOfBlocker);
  borrow[T::Bicycle].push_back(C::SP_PI_C1_StaticAheadOfBlocker);
  borrow[T::Vehicle].push_back(C::SP_PI_C2_VehicleParkedAheadOfBlocker);

  return {
      {"PI1", ScenarioKind::LaneFollowSingle, general, DesiredBehavior::KeepCruising,
       "single-lane road; vehicles follow the ego or drive on the reverse lane"},
      {"PI2", ScenarioKind::LaneFollowMulti, general, DesiredBehavior::KeepCruising,
       "multi-lane road; vehicles follow the ego or drive on other lanes"},
      {"PI3", ScenarioKind::LaneChange, general, DesiredBehavior::FinishLaneChange,
       "lane change; other-lane vehicles exclude the current and target lanes"},
      {"PI4", ScenarioKind::LaneBorrow, borrow, DesiredBehavior::FinishLaneBorrow,
       "lane borrow; obstacles may also sit on-lane ahead of the blocker"},
      {"PI5", ScenarioKind::StopSignIntersection, general, DesiredBehavior::PassIntersection,
       "stop-sign intersection"},
      {"PI6", ScenarioKind::SignalIntersection, general, DesiredBehavior::PassIntersection,
       "signalized intersection; pedestrians stay out of the crosswalk"},
      {"PI7", ScenarioKind::BareIntersection, general, DesiredBehavior::PassIntersection,
       "bare intersection"},
  };
}

struct SBox {
  double min_s, max_s;
};

SBox s_extent(const Polygon& poly, const Lane& lane) {
  SBox b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : poly) {
    const double s = project(p, lane).s;
    b.min_s = std::min(b.min_s, s);
    b.max_s = std::max(b.max_s, s);
  }
  return b;
}

bool on_lane_ahead_of_blocker(const PhysicalObject& x, const PlanningScenario& sc) {
  const PhysicalObject* blocker = sc.blocker();
  if (!blocker || blocker->id == x.id || sc.map.empty()) return false;
  const int lane_id = transform(blocker->center, sc.map).lane_id;
  if (transform(x.center, sc.map).lane_id != lane_id) return false;
  const Lane& lane = sc.map.lane(lane_id);
  const Polygon poly = x.polygon();
  for (const auto& p : poly) {
    if (project(p, lane).dist > lane.half_width()) return false;
  }
  return s_extent(poly, lane).min_s > s_extent(blocker->polygon(), lane).max_s;
}

bool outside_crosswalk(const PhysicalObject& x, const Polygon& crosswalk) {
  if (polygons_overlap(x.polygon(), crosswalk)) return false;
  for (size_t i = 0; i < x.trajectory.size(); ++i) {
    if (polygons_overlap(waypoint_polygon(x, i), crosswalk)) return false;
  }
  return true;
}

}  // namespace

const char* to_string(Verdict v) {
  for (const auto& [k, n] : kVerdictNames) {
    if (k == v) return n;
  }
  return "?";
}

std::optional<Verdict> verdict_from_string(const std::string& s) {
  for (const auto& [k, n] : kVerdictNames) {
    if (s == n) return k;
  }
  return std::nullopt;
}

const char* to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::PI_C1_StaticOffRoad: return "PI-C1 StaticOffRoad";
    case ConstraintKind::PI_C2_FollowingVehicle: return "PI-C2 FollowingVehicle";
    case ConstraintKind::PI_C3_IrrelevantVehicle: return "PI-C3 IrrelevantVehicle";
    case ConstraintKind::PI_C4_StaticOffRoadPedestrian: return "PI-C4 StaticOffRoadPedestrian";
    case ConstraintKind::PI_C5_DynamicOffRoad: return "PI-C5 DynamicOffRoad";
    case ConstraintKind::SP_PI_C1_StaticAheadOfBlocker: return "SP-PI-C1 StaticAheadOfBlocker";
    case ConstraintKind::SP_PI_C2_VehicleParkedAheadOfBlocker: return "SP-PI-C2 VehicleParkedAheadOfBlocker";
  }
  return "?";
}

const char* to_string(DesiredBehavior b) {
  switch (b) {
    case DesiredBehavior::KeepCruising: return "KeepCruising";
    case DesiredBehavior::FinishLaneChange: return "FinishLaneChange";
    case DesiredBehavior::FinishLaneBorrow: return "FinishLaneBorrow";
    case DesiredBehavior::PassIntersection: return "PassIntersection";
  }
  return "?";
}

const std::vector<PlanningInvariant>& planning_invariants() {
  static const std::vector<PlanningInvariant> registry = build_registry();
  return registry;
}

const PlanningInvariant& planning_invariant(const std::string& id) {
  for (const auto& pi : planning_invariants()) {
    if (pi.id == id) return pi;
  }
  throw ConfigError("unknown planning invariant " + id);
}

const PlanningInvariant& planning_invariant_for(ScenarioKind kind) {
  for (const auto& pi : planning_invariants()) {
    if (pi.kind == kind) return pi;
  }
  throw ConfigError(std::string("no planning invariant for kind ") + to_string(kind));
}

bool polygon_off_road(const Polygon& poly, const LaneMap& map, const std::vector<int>& route) {
  for (int id : route) {
    const Lane& lane = map.lane(id);
    for (const auto& p : poly) {
      if (!(project(p, lane).dist > lane.half_width())) return false;
    }
  }
  return true;
}

bool static_off_road(const PhysicalObject& x, const LaneMap& map, const std::vector<int>& route) {
  return polygon_off_road(x.polygon(), map, route);
}

Point2 direction_towards_lanes(const Point2& pos, const LaneMap& map, const std::vector<int>& lanes) {
  double best = std::numeric_limits<double>::infinity();
  Point2 foot = pos;
  for (int id : lanes) {
    const LaneProjection p = project(pos, map.lane(id));
    if (p.dist < best) {
      best = p.dist;
      foot = p.foot;
    }
  }
  const Point2 d = foot - pos;
  const double n = norm(d);
  return n > 0.0 ? d * (1.0 / n) : Point2{0.0, 0.0};
}

bool dynamic_off_road(const PhysicalObject& x, const LaneMap& map, const std::vector<int>& route) {
  if (x.trajectory.empty()) return false;
  const Point2 h = unit_vector(x.heading);
  for (size_t i = 0; i < x.trajectory.size(); ++i) {
    if (!polygon_off_road(waypoint_polygon(x, i), map, route)) return false;
    if (dot(h, direction_towards_lanes(x.trajectory[i].pos, map, route)) > kApproachTolerance) return false;
  }
  return true;
}

bool drive_in_lane(const PhysicalObject& x, const LaneMap& map, int lane_id, const std::vector<int>& forbidden) {
  if (contains(forbidden, lane_id)) return false;
  std::vector<int> chain;
  for (int id : lane_chain(map, lane_id)) {
    if (!contains(forbidden, id)) chain.push_back(id);
  }
  auto pose_ok = [&](const Point2& pos, const Polygon& poly) {
    if (!contains(chain, transform(pos, map).lane_id)) return false;
    for (const auto& c : poly) {
      bool inside = false;
      for (int id : chain) {
        const Lane& lane = map.lane(id);
        if (project(c, lane).dist <= lane.half_width()) {
          inside = true;
          break;
        }
      }
      if (!inside) return false;
    }
    return true;
  };
  if (!pose_ok(x.center, x.polygon())) return false;
  for (size_t i = 0; i < x.trajectory.size(); ++i) {
    if (!pose_ok(x.trajectory[i].pos, waypoint_polygon(x, i))) return false;
  }
  return true;
}

bool follow_vehicle(const PhysicalObject& x, const EgoState& ego, const LaneMap& map, double following_distance) {
  if (x.type != ObjectType::Vehicle || map.empty()) return false;
  if (transform(x.center, map).lane_id != ego.lane_id()) return false;
  const double s = project(x.center, map.lane(ego.lane_id())).s;
  if (!(s + following_distance < ego.pose.s)) return false;
  if (x.speed > ego.speed) return false;
  return drive_in_lane(x, map, ego.lane_id(), {});
}

bool irrelevant_vehicle(const PhysicalObject& x, const EgoState& ego, const LaneMap& map,
                        const std::vector<int>& excluded_lanes) {
  if (x.type != ObjectType::Vehicle || map.empty()) return false;
  const int lane = transform(x.center, map).lane_id;
  std::vector<int> forbidden = excluded_lanes;
  forbidden.push_back(ego.lane_id());
  if (contains(forbidden, lane)) return false;
  return drive_in_lane(x, map, lane, forbidden);
}

bool heads_into_intersection(const PhysicalObject& x, const PlanningScenario& sc) {
  if (sc.context.intersection_lanes.empty() || sc.map.empty()) return false;
  for (int id : lane_chain(sc.map, transform(x.center, sc.map).lane_id)) {
    if (contains(sc.context.intersection_lanes, id)) return true;
  }
  return false;
}

bool static_ahead_of_blocker(const PhysicalObject& x, const PlanningScenario& sc) {
  if (x.type != ObjectType::StaticObject && x.type != ObjectType::Bicycle) return false;
  if (x.speed != 0.0) return false;
  return on_lane_ahead_of_blocker(x, sc);
}

bool vehicle_parked_ahead_of_blocker(const PhysicalObject& x, const PlanningScenario& sc) {
  if (x.type != ObjectType::Vehicle || x.speed != 0.0 || !x.trajectory.empty()) return false;
  return on_lane_ahead_of_blocker(x, sc);
}

bool satisfies(ConstraintKind k, const PhysicalObject& x, const PlanningScenario& sc) {
  const std::vector<int> lanes = sc.protected_lanes();
  switch (k) {
    case ConstraintKind::PI_C1_StaticOffRoad:
    case ConstraintKind::PI_C4_StaticOffRoadPedestrian:
      return x.speed == 0.0 && x.trajectory.empty() && static_off_road(x, sc.map, lanes);
    case ConstraintKind::PI_C5_DynamicOffRoad:
      return x.speed > 0.0 && dynamic_off_road(x, sc.map, lanes);
    case ConstraintKind::PI_C2_FollowingVehicle:
      return follow_vehicle(x, sc.ego, sc.map);
    case ConstraintKind::PI_C3_IrrelevantVehicle:
      return irrelevant_vehicle(x, sc.ego, sc.map, lanes) && !heads_into_intersection(x, sc);
    case ConstraintKind::SP_PI_C1_StaticAheadOfBlocker:
      return static_ahead_of_blocker(x, sc);
    case ConstraintKind::SP_PI_C2_VehicleParkedAheadOfBlocker:
      return vehicle_parked_ahead_of_blocker(x, sc);
  }
  return false;
}

bool is_context_object(const PhysicalObject& x, const PlanningScenario& sc) {
  return sc.context.blocker_id && *sc.context.blocker_id == x.id;
}

bool object_satisfies(const PlanningInvariant& pi, const PhysicalObject& x, const PlanningScenario& sc) {
  if (pi.kind == ScenarioKind::SignalIntersection && x.type == ObjectType::Pedestrian && sc.context.crosswalk &&
      !outside_crosswalk(x, *sc.context.crosswalk)) {
    return false;
  }
  auto it = pi.admissible.find(x.type);
  if (it == pi.admissible.end()) return false;
  for (ConstraintKind k : it->second) {
    if (satisfies(k, x, sc)) return true;
  }
  return false;
}

bool check_pi(const PlanningInvariant& pi, const PlanningScenario& sc) {
  if (pi.kind != sc.kind) {
    throw ConfigError(pi.id + " applies to " + to_string(pi.kind) + ", scenario is " + to_string(sc.kind));
  }
  for (const auto& x : sc.objects) {
    if (is_context_object(x, sc)) continue;
    if (!object_satisfies(pi, x, sc)) return false;
  }
  return true;
}

bool conflicts(DesiredBehavior desired, Verdict v) {
  switch (desired) {
    case DesiredBehavior::KeepCruising:
      return v == Verdict::Blocked || v == Verdict::FullyBlocked || v == Verdict::Stop;
    case DesiredBehavior::FinishLaneChange:
      return v == Verdict::NotClear;
    case DesiredBehavior::FinishLaneBorrow:
      return v == Verdict::WaitBehind || v == Verdict::PerceptionBlocked || v == Verdict::Blocked ||
             v == Verdict::Stop;
    case DesiredBehavior::PassIntersection:
      return v == Verdict::Stop || v == Verdict::Blocked;
  }
  return false;
}

std::optional<Violation> check_violation(const PlanningInvariant& pi, const PlanningScenario& sc,
                                         const PlanningDecision& decision) {
  if (!conflicts(pi.desired, decision.verdict)) return std::nullopt;
  if (!check_pi(pi, sc)) return std::nullopt;
  Violation v{pi.id, decision.subject, decision.target.value_or(""), {}, decision.verdict};
  for (const auto& x : sc.objects) {
    if (!is_context_object(x, sc)) v.objects.push_back(x);
  }
  return v;
}

}  // namespace semfuzz
