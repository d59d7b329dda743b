#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "semfuzz/fuzzer.h"
#include "semfuzz/geom.h"
#include "semfuzz/scenario.h"
#include "semfuzz/scenario_io.h"

namespace semfuzz::test {

inline std::string data_path(const std::string& rel) {
  return (std::filesystem::path(SEMFUZZ_DATA_DIR) / rel).string();
}

inline std::string seed_path(const std::string& file) { return data_path("seeds/" + file); }

inline PhysicalObject box(const std::string& id, double x, double y, double length = 1.0, double width = 1.0,
                          double heading = 0.0) {
  PhysicalObject o;
  o.id = id;
  o.type = ObjectType::StaticObject;
  o.center = {x, y};
  o.length = length;
  o.width = width;
  o.height = 1.0;
  o.heading = heading;
  return o;
}

inline PhysicalObject typed(const std::string& id, ObjectType type, double x, double y, double heading = 0.0) {
  PhysicalObject o;
  o.id = id;
  o.type = type;
  o.center = {x, y};
  o.heading = heading;
  switch (type) {
    case ObjectType::Pedestrian:
      o.length = dims::kPedestrianLength, o.width = dims::kPedestrianWidth, o.height = dims::kPedestrianHeight;
      break;
    case ObjectType::Vehicle:
      o.length = dims::kVehicleLength, o.width = dims::kVehicleWidth, o.height = dims::kVehicleHeight;
      break;
    case ObjectType::Bicycle:
      o.length = dims::kBicycleLength, o.width = dims::kBicycleWidth, o.height = dims::kBicycleHeight;
      break;
    case ObjectType::StaticObject:
      o.length = o.width = o.height = 1.0;
      break;
  }
  return o;
}

// Gives a walking pedestrian or a driving vehicle its predicted trajectory.
inline PhysicalObject moving(PhysicalObject o, double speed, const LaneMap& map) {
  o.speed = speed;
  o.trajectory = synthesize_trajectory(o, map);
  return o;
}

// Straight lanes along +x starting at x = 0, one per lateral offset.
inline PlanningScenario road(ScenarioKind kind, double width, std::vector<double> offsets, double length,
                             Point2 ego, double ego_speed = 10.0) {
  PlanningScenario sc;
  std::vector<Lane> lanes;
  for (size_t i = 0; i < offsets.size(); ++i) {
    lanes.emplace_back(static_cast<int>(i) + 1, std::vector<Point2>{{0.0, offsets[i]}, {length, offsets[i]}}, width);
  }
  sc.map = LaneMap(std::move(lanes));
  sc.kind = kind;
  sc.ego.position = ego;
  sc.ego.speed = ego_speed;
  sc.ego.route = {1};
  finalize_scenario(sc);
  return sc;
}

// Single straight 2.7 m lane from (0,0) to (200,0) with the ego at (60,0).
inline PlanningScenario narrow_lane(double width = 2.7) {
  return road(ScenarioKind::LaneFollowSingle, width, {0.0}, 200.0, {60.0, 0.0});
}

// Random polyline lane: segment lengths in [10, 50] m, turns up to max_turn radians per vertex.
inline Lane random_lane(std::mt19937_64& rng, int id, double max_turn = 0.5) {
  std::uniform_real_distribution<double> seg(10.0, 50.0), turn(-max_turn, max_turn), width(2.5, 4.0),
      start(-100.0, 100.0), heading(-std::numbers::pi, std::numbers::pi);
  std::uniform_int_distribution<int> count(2, 6);
  const int n = count(rng);
  std::vector<Point2> pts{{start(rng), start(rng)}};
  double h = heading(rng);
  for (int i = 1; i < n; ++i) {
    if (i > 1) h += turn(rng);
    const double len = seg(rng);
    pts.push_back(pts.back() + unit_vector(h) * len);
  }
  return Lane(id, pts, width(rng));
}

// True when (s, l) lies in the inner-corner shadow of some vertex, where nearest-point projection cannot
// recover the pair: within |l| tan(turn / 2) of a vertex on the side the lane turns toward.
inline bool in_corner_shadow(const Lane& lane, double s, double l, double slack = 1e-6) {
  const auto& c = lane.centerline();
  for (size_t k = 1; k + 1 < c.size(); ++k) {
    const Point2 a = c[k] - c[k - 1];
    const Point2 b = c[k + 1] - c[k];
    const double turn = std::atan2(cross(a, b), dot(a, b));
    if (turn == 0.0 || (turn > 0.0) != (l > 0.0)) continue;
    const double reach = std::abs(l) * std::tan(0.5 * std::abs(turn)) + slack;
    if (std::abs(s - lane.vertex_s(k)) <= reach) return true;
  }
  return false;
}

// Dense-sampling oracle for the polyline/polygon distance: both boundaries sampled at `step` (vertices included),
// each sample measured against the other shape's segments; 0 when a polyline sample lies inside the polygon.
inline double sampled_min_distance(const Polyline& line, const Polygon& poly, double step = 1e-3) {
  auto samples = [&](const std::vector<Point2>& pts, bool closed) {
    std::vector<Point2> out;
    const size_t n = closed ? pts.size() : pts.size() - 1;
    for (size_t i = 0; i < n; ++i) {
      const Point2 a = pts[i];
      const Point2 b = pts[(i + 1) % pts.size()];
      const int m = std::max(1, static_cast<int>(std::ceil(distance(a, b) / step)));
      for (int k = 0; k < m; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / m));
    }
    if (!closed) out.push_back(pts.back());
    return out;
  };
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : samples(line, false)) {
    if (point_in_polygon(p, poly)) return 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
      best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
    }
  }
  for (const auto& p : samples(poly, true)) {
    for (size_t i = 0; i + 1 < line.size(); ++i) best = std::min(best, point_segment_distance(p, line[i], line[i + 1]));
  }
  return best;
}

}  // namespace semfuzz::test
