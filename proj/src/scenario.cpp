#include "semfuzz/scenario.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <set>

namespace semfuzz {

namespace {

constexpr double kDimTol = 1e-9;

struct TypeName {
  ObjectType type;
  const char* name;
};
constexpr TypeName kTypeNames[] = {
    {ObjectType::Pedestrian, "Pedestrian"},
    {ObjectType::Vehicle, "Vehicle"},
    {ObjectType::Bicycle, "Bicycle"},
    {ObjectType::StaticObject, "StaticObject"},
};

struct KindName {
  ScenarioKind kind;
  const char* name;
};
constexpr KindName kKindNames[] = {
    {ScenarioKind::LaneFollowSingle, "LaneFollowSingle"},
    {ScenarioKind::LaneFollowMulti, "LaneFollowMulti"},
    {ScenarioKind::LaneChange, "LaneChange"},
    {ScenarioKind::LaneBorrow, "LaneBorrow"},
    {ScenarioKind::StopSignIntersection, "StopSignIntersection"},
    {ScenarioKind::SignalIntersection, "SignalIntersection"},
    {ScenarioKind::BareIntersection, "BareIntersection"},
};

bool near(double a, double b) { return std::abs(a - b) <= kDimTol; }

}  // namespace

const char* to_string(ObjectType t) {
  for (const auto& e : kTypeNames) {
    if (e.type == t) return e.name;
  }
  return "?";
}

std::optional<ObjectType> object_type_from_string(const std::string& s) {
  for (const auto& e : kTypeNames) {
    if (s == e.name) return e.type;
  }
  return std::nullopt;
}

const char* to_string(ScenarioKind k) {
  for (const auto& e : kKindNames) {
    if (e.kind == k) return e.name;
  }
  return "?";
}

std::optional<ScenarioKind> scenario_kind_from_string(const std::string& s) {
  for (const auto& e : kKindNames) {
    if (s == e.name) return e.kind;
  }
  return std::nullopt;
}

double waypoint_heading(const PhysicalObject& obj, size_t i) {
  const auto& w = obj.trajectory;
  if (w.size() < 2) return obj.heading;
  Point2 d = i + 1 < w.size() ? w[i + 1].pos - w[i].pos : w[i].pos - w[i - 1].pos;
  if (norm(d) == 0.0) return obj.heading;
  return std::atan2(d.y, d.x);
}

Polygon waypoint_polygon(const PhysicalObject& obj, size_t i) {
  return object_polygon(obj.trajectory[i].pos, obj.length, obj.width, waypoint_heading(obj, i));
}

std::vector<int> PlanningScenario::planned_lanes() const {
  std::vector<int> out = ego.route;
  if (context.target_lane && std::find(out.begin(), out.end(), *context.target_lane) == out.end()) {
    out.push_back(*context.target_lane);
  }
  return out;
}

std::vector<int> PlanningScenario::protected_lanes() const {
  std::vector<int> out = planned_lanes();
  for (int id : context.intersection_lanes) {
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  }
  return out;
}

const PhysicalObject* PlanningScenario::find_object(const std::string& id) const {
  for (const auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

const PhysicalObject* PlanningScenario::blocker() const {
  return context.blocker_id ? find_object(*context.blocker_id) : nullptr;
}

std::vector<RangeViolation> validate_ranges(const PhysicalObject& obj, const EgoState& ego) {
  std::vector<RangeViolation> out;
  auto bad = [&](const char* field, std::string msg) { out.push_back({field, std::move(msg)}); };

  if (!is_finite(obj.center)) {
    bad("position", "non-finite coordinates");
  } else {
    if (std::abs(obj.center.x - ego.position.x) > defaults::kPositionRange) {
      bad("position", "x outside ego.x +/- 80 m");
    }
    if (std::abs(obj.center.y - ego.position.y) > defaults::kPositionRange) {
      bad("position", "y outside ego.y +/- 80 m");
    }
  }

  const bool static_heading = obj.type == ObjectType::StaticObject || obj.type == ObjectType::Bicycle;
  const double heading_max = static_heading ? std::numbers::pi : 2.0 * std::numbers::pi;
  if (!std::isfinite(obj.heading) || obj.heading < 0.0 || obj.heading >= heading_max) {
    bad("heading", static_heading ? "must be in [0, pi)" : "must be in [0, 2pi)");
  }

  if (!std::isfinite(obj.speed) || obj.speed < 0.0) {
    bad("speed", "must be a non-negative number");
  }

  auto fixed_dims = [&](double l, double w, double h) {
    if (!near(obj.length, l)) bad("length", "must be " + std::to_string(l));
    if (!near(obj.width, w)) bad("width", "must be " + std::to_string(w));
    if (!near(obj.height, h)) bad("height", "must be " + std::to_string(h));
  };

  switch (obj.type) {
    case ObjectType::StaticObject: {
      const double d[] = {obj.length, obj.width, obj.height};
      const char* names[] = {"length", "width", "height"};
      for (int i = 0; i < 3; ++i) {
        if (!(d[i] >= dims::kStaticMin && d[i] <= dims::kStaticMax)) bad(names[i], "must be in [0.5, 2.0]");
      }
      if (obj.speed != 0.0) bad("speed", "static objects do not move");
      break;
    }
    case ObjectType::Pedestrian:
      fixed_dims(dims::kPedestrianLength, dims::kPedestrianWidth, dims::kPedestrianHeight);
      if (obj.speed > dims::kPedestrianMaxSpeed) bad("speed", "pedestrian speed must be in [0, 1.4]");
      break;
    case ObjectType::Vehicle:
      fixed_dims(dims::kVehicleLength, dims::kVehicleWidth, dims::kVehicleHeight);
      if (obj.speed > 0.0 && !near(obj.speed, ego.speed)) bad("speed", "moving vehicles match ego speed");
      break;
    case ObjectType::Bicycle:
      fixed_dims(dims::kBicycleLength, dims::kBicycleWidth, dims::kBicycleHeight);
      if (obj.speed != 0.0) bad("speed", "parked bicycles do not move");
      break;
  }

  if (obj.speed == 0.0 && !obj.trajectory.empty()) {
    bad("trajectory", "must be empty for objects that do not move");
  }
  if (obj.speed > 0.0 && obj.trajectory.size() < 2) {
    bad("trajectory", "moving objects need at least 2 waypoints");
  }
  for (const auto& w : obj.trajectory) {
    if (!is_finite(w.pos) || !std::isfinite(w.t)) {
      bad("trajectory", "non-finite waypoint");
      break;
    }
  }
  return out;
}

std::vector<int> lane_chain(const LaneMap& map, int lane_id, size_t max_depth) {
  std::vector<int> out;
  std::set<int> seen;
  std::deque<std::pair<int, size_t>> queue{{lane_id, 0}};
  while (!queue.empty()) {
    auto [id, depth] = queue.front();
    queue.pop_front();
    if (!seen.insert(id).second || !map.contains(id)) continue;
    out.push_back(id);
    if (depth >= max_depth) continue;
    for (int succ : map.lane(id).successors()) queue.emplace_back(succ, depth + 1);
  }
  return out;
}

namespace {

// Walks s metres along a lane and its first successors, keeping lateral offset l.
Point2 advance_along_lanes(const LaneMap& map, int lane_id, double s, double l) {
  const Lane* lane = &map.lane(lane_id);
  for (int hops = 0; s > lane->length() && hops < 64; ++hops) {
    if (lane->successors().empty()) break;
    s -= lane->length();
    lane = &map.lane(lane->successors().front());
  }
  if (s <= lane->length()) return frenet_to_world(std::max(s, 0.0), l, *lane);
  const Point2 end = frenet_to_world(lane->length(), l, *lane);
  return end + unit_vector(lane->heading(lane->length())) * (s - lane->length());
}

}  // namespace

std::vector<Waypoint> synthesize_trajectory(const PhysicalObject& obj, const LaneMap& map, double horizon,
                                            double dt) {
  if (obj.type == ObjectType::StaticObject || obj.type == ObjectType::Bicycle || obj.speed == 0.0) {
    return {};
  }
  if (!(dt > 0.0) || !(horizon >= 0.0)) throw SynthesisError("horizon and dt must be positive");
  const size_t count = static_cast<size_t>(std::llround(horizon / dt)) + 1;
  std::vector<Waypoint> out;
  out.reserve(count);

  if (obj.type == ObjectType::Pedestrian) {
    const Point2 dir = unit_vector(obj.heading);
    for (size_t k = 0; k < count; ++k) {
      const double t = dt * static_cast<double>(k);
      out.push_back({t, obj.center + dir * (obj.speed * t)});
    }
    return out;
  }

  if (map.empty()) throw SynthesisError("vehicle " + obj.id + ": empty lane map");
  const FrenetPose fp = transform(obj.center, map);
  const Lane& lane = map.lane(fp.lane_id);
  if (!(std::abs(fp.l) <= lane.half_width())) {
    throw SynthesisError("vehicle " + obj.id + ": not on any lane");
  }
  for (size_t k = 0; k < count; ++k) {
    const double t = dt * static_cast<double>(k);
    out.push_back({t, advance_along_lanes(map, fp.lane_id, fp.s + obj.speed * t, fp.l)});
  }
  return out;
}

void finalize_scenario(PlanningScenario& sc) {
  if (sc.map.empty()) throw ScenarioError("map.lanes: at least one lane required");
  for (const Lane& lane : sc.map.lanes()) {
    for (int succ : lane.successors()) {
      if (!sc.map.contains(succ)) {
        throw ScenarioError("map.lanes[" + std::to_string(lane.id()) + "].successors: unknown lane id " +
                            std::to_string(succ));
      }
    }
  }
  if (sc.ego.route.empty()) throw ScenarioError("ego.route: at least one lane required");
  for (size_t i = 0; i < sc.ego.route.size(); ++i) {
    const int id = sc.ego.route[i];
    if (!sc.map.contains(id)) throw ScenarioError("ego.route: unknown lane id " + std::to_string(id));
    if (i > 0) {
      const auto& succ = sc.map.lane(sc.ego.route[i - 1]).successors();
      if (std::find(succ.begin(), succ.end(), id) == succ.end()) {
        throw ScenarioError("ego.route: lane " + std::to_string(id) + " does not follow lane " +
                            std::to_string(sc.ego.route[i - 1]));
      }
    }
  }
  const LaneProjection p = project(sc.ego.position, sc.map.lane(sc.ego.route.front()));
  sc.ego.pose = {p.s, p.l, sc.ego.route.front()};

  const auto& ctx = sc.context;
  auto need = [&](bool ok, const char* field) {
    if (!ok) {
      throw ScenarioError(std::string("context.") + field + ": required for kind " + to_string(sc.kind));
    }
  };
  switch (sc.kind) {
    case ScenarioKind::LaneFollowSingle:
    case ScenarioKind::LaneFollowMulti:
    case ScenarioKind::BareIntersection:
      break;
    case ScenarioKind::LaneChange:
      need(ctx.target_lane.has_value(), "target_lane");
      break;
    case ScenarioKind::LaneBorrow:
      need(ctx.blocker_id.has_value(), "blocker_id");
      need(ctx.target_lane.has_value(), "target_lane");
      if (!sc.find_object(*ctx.blocker_id)) {
        throw ScenarioError("context.blocker_id: no object with id " + *ctx.blocker_id);
      }
      break;
    case ScenarioKind::StopSignIntersection:
      need(ctx.stop_line_s.has_value(), "stop_line_s");
      break;
    case ScenarioKind::SignalIntersection:
      need(ctx.crosswalk.has_value(), "crosswalk");
      break;
  }
  if (ctx.target_lane && !sc.map.contains(*ctx.target_lane)) {
    throw ScenarioError("context.target_lane: unknown lane id " + std::to_string(*ctx.target_lane));
  }
  for (int id : ctx.associated_lanes) {
    if (!sc.map.contains(id)) throw ScenarioError("context.associated_lanes: unknown lane id " + std::to_string(id));
  }
  for (int id : ctx.intersection_lanes) {
    if (!sc.map.contains(id)) throw ScenarioError("context.intersection_lanes: unknown lane id " + std::to_string(id));
  }
  if (ctx.crosswalk) {
    if (ctx.crosswalk->size() < 3 || polygon_area(*ctx.crosswalk) <= 0.0) {
      throw ScenarioError("context.crosswalk: need >= 3 points in counter-clockwise order");
    }
  }

  std::set<std::string> ids;
  for (const auto& o : sc.objects) {
    if (!ids.insert(o.id).second) throw ScenarioError("objects: duplicate id " + o.id);
  }
}

}  // namespace semfuzz
