#include <numbers>
#include <random>

#include "doctest.h"
#include "semfuzz/invariants.h"
#include "support.h"

using namespace semfuzz;
using namespace semfuzz::test;

namespace {

constexpr double kPi = std::numbers::pi;

PlanningScenario with_objects(PlanningScenario sc, std::vector<PhysicalObject> objs) {
  sc.objects = std::move(objs);
  return sc;
}

// Two-lane road with lane 2 running in the opposite direction.
PlanningScenario two_way_road() {
  PlanningScenario sc;
  sc.map = LaneMap({Lane(1, {{0.0, 0.0}, {200.0, 0.0}}, 3.5), Lane(2, {{200.0, 3.5}, {0.0, 3.5}}, 3.5)});
  sc.kind = ScenarioKind::LaneFollowSingle;
  sc.ego.position = {60.0, 0.0};
  sc.ego.speed = 10.0;
  sc.ego.route = {1};
  finalize_scenario(sc);
  return sc;
}

PlanningDecision decision(Verdict v) { return {"v1", v, "", std::string("target")}; }

}  // namespace

TEST_CASE("static_off_road") {
  const PlanningScenario sc = narrow_lane();
  const std::vector<int> route{1};
  CHECK(static_off_road(box("far", 70.0, 1.35 + 0.5 + 0.5), sc.map, route));
  CHECK(!static_off_road(box("in", 70.0, -1.30 - 0.5), sc.map, route));
  CHECK(static_off_road(box("left", 70.0, 1.36 + 0.5), sc.map, route));
  CHECK(static_off_road(box("right", 70.0, -1.36 - 0.5), sc.map, route));
  CHECK(!static_off_road(box("edge", 70.0, 1.35 + 0.5), sc.map, route));
  CHECK(!static_off_road(box("centre", 70.0, 0.0), sc.map, route));
}

TEST_CASE("dynamic_off_road") {
  const PlanningScenario sc = narrow_lane();
  const std::vector<int> route{1};
  const double y = -(1.35 + 2.0 + dims::kPedestrianWidth / 2.0);
  const auto parallel = moving(typed("p", ObjectType::Pedestrian, 70.0, y, 0.0), 1.0, sc.map);
  CHECK(dynamic_off_road(parallel, sc.map, route));

  const auto into = moving(typed("p", ObjectType::Pedestrian, 70.0, -6.0, kPi / 2.0), 0.5, sc.map);
  CHECK(!dynamic_off_road(into, sc.map, route));

  const auto away = moving(typed("p", ObjectType::Pedestrian, 70.0, -3.0, -3.0 * kPi / 4.0), 1.2, sc.map);
  CHECK(dynamic_off_road(away, sc.map, route));

  const auto crossing = moving(typed("p", ObjectType::Pedestrian, 70.0, 4.0, -3.0 * kPi / 4.0), 1.2, sc.map);
  CHECK(!dynamic_off_road(crossing, sc.map, route));

  CHECK(!dynamic_off_road(typed("p", ObjectType::Pedestrian, 70.0, y), sc.map, route));
}

TEST_CASE("follow_vehicle") {
  const PlanningScenario sc = road(ScenarioKind::LaneFollowMulti, 3.5, {0.0, 3.5}, 200.0, {60.0, 0.0});
  CHECK(follow_vehicle(moving(typed("v", ObjectType::Vehicle, 52.0, 0.0), 10.0, sc.map), sc.ego, sc.map));
  CHECK(!follow_vehicle(moving(typed("v", ObjectType::Vehicle, 58.0, 0.0), 10.0, sc.map), sc.ego, sc.map));
  CHECK(!follow_vehicle(moving(typed("v", ObjectType::Vehicle, 52.0, 3.5), 10.0, sc.map), sc.ego, sc.map));
  CHECK(!follow_vehicle(moving(typed("v", ObjectType::Vehicle, 40.0, 0.0), 12.0, sc.map), sc.ego, sc.map));
  CHECK(!follow_vehicle(typed("s", ObjectType::StaticObject, 40.0, 0.0), sc.ego, sc.map));
}

TEST_CASE("irrelevant_vehicle") {
  const PlanningScenario two_way = two_way_road();
  const auto reverse = moving(typed("r", ObjectType::Vehicle, 120.0, 3.5, kPi), 10.0, two_way.map);
  CHECK(irrelevant_vehicle(reverse, two_way.ego, two_way.map, two_way.protected_lanes()));
  CHECK(satisfies(ConstraintKind::PI_C3_IrrelevantVehicle, reverse, two_way));

  const PlanningScenario change = load_scenario(seed_path("lane_change.json"));
  const int target = *change.context.target_lane;
  const double y = change.map.lane(target).centerline().front().y;
  const auto on_target = moving(typed("t", ObjectType::Vehicle, 80.0, y), 10.0, change.map);
  CHECK(irrelevant_vehicle(on_target, change.ego, change.map, {}));
  CHECK(!irrelevant_vehicle(on_target, change.ego, change.map, change.protected_lanes()));
  CHECK(!satisfies(ConstraintKind::PI_C3_IrrelevantVehicle, on_target, change));

  PhysicalObject drifting = typed("d", ObjectType::Vehicle, 120.0, 3.5, kPi);
  drifting.speed = 10.0;
  for (int k = 0; k <= 8; ++k) drifting.trajectory.push_back({k * 0.5, {120.0 - 5.0 * k, 3.5 - 0.5 * k}});
  CHECK(!irrelevant_vehicle(drifting, two_way.ego, two_way.map, {}));
}

TEST_CASE("heads_into_intersection and the intersection rule for vehicles") {
  const PlanningScenario sc = load_scenario(seed_path("stop_sign.json"));
  const auto approaching = moving(typed("a", ObjectType::Vehicle, 113.25, -40.0, kPi / 2.0), 5.0, sc.map);
  const auto leaving = moving(typed("b", ObjectType::Vehicle, 113.25, 20.0, kPi / 2.0), 5.0, sc.map);
  CHECK(heads_into_intersection(approaching, sc));
  CHECK(!heads_into_intersection(leaving, sc));
  CHECK(!satisfies(ConstraintKind::PI_C3_IrrelevantVehicle, approaching, sc));
  CHECK(satisfies(ConstraintKind::PI_C3_IrrelevantVehicle, leaving, sc));
  CHECK(!heads_into_intersection(leaving, narrow_lane()));
}

TEST_CASE("crosswalk rule for pedestrians at signalized intersections") {
  const PlanningScenario signal = load_scenario(seed_path("signal_intersection.json"));
  const PlanningScenario bare = load_scenario(seed_path("bare_intersection.json"));
  const auto in_crosswalk = typed("p", ObjectType::Pedestrian, 102.0, -4.0);
  const auto outside = typed("q", ObjectType::Pedestrian, 95.0, -4.0);
  CHECK(!object_satisfies(planning_invariant("PI6"), in_crosswalk, signal));
  CHECK(object_satisfies(planning_invariant("PI6"), outside, signal));
  CHECK(object_satisfies(planning_invariant("PI7"), in_crosswalk, bare));
}

TEST_CASE("lane-borrow constraints ahead of the blocker") {
  const PlanningScenario sc = load_scenario(seed_path("lane_borrow.json"));
  const PhysicalObject* blocker = sc.blocker();
  REQUIRE(blocker);
  const auto ahead = typed("s", ObjectType::StaticObject, blocker->center.x + 6.0, blocker->center.y);
  const auto behind = typed("s", ObjectType::StaticObject, blocker->center.x - 6.0, blocker->center.y);
  CHECK(static_ahead_of_blocker(ahead, sc));
  CHECK(!static_ahead_of_blocker(behind, sc));
  CHECK(object_satisfies(planning_invariant("PI4"), ahead, sc));
  CHECK(!object_satisfies(planning_invariant("PI1"), ahead, with_objects(sc, {})));

  auto parked = typed("v", ObjectType::Vehicle, blocker->center.x + 10.0, blocker->center.y);
  CHECK(vehicle_parked_ahead_of_blocker(parked, sc));
  parked.speed = 1.0;
  CHECK(!vehicle_parked_ahead_of_blocker(parked, sc));
}

TEST_CASE("check_pi") {
  const PlanningScenario sc = narrow_lane();
  const auto& pi1 = planning_invariant("PI1");
  CHECK(check_pi(pi1, sc));
  CHECK(!check_pi(pi1, with_objects(sc, {box("b", 70.0, 0.0)})));
  const auto ped = moving(typed("p", ObjectType::Pedestrian, 70.0, -3.0, -kPi / 2.0), 1.0, sc.map);
  const auto follower = moving(typed("v", ObjectType::Vehicle, 50.0, 0.0), 10.0, sc.map);
  CHECK(check_pi(pi1, with_objects(sc, {box("b", 70.0, 2.5), follower, ped})));
  CHECK_THROWS_AS(check_pi(planning_invariant("PI3"), sc), ConfigError);
  CHECK_THROWS_AS(planning_invariant("PI9"), ConfigError);
}

TEST_CASE("check_violation") {
  const PlanningScenario sc = with_objects(narrow_lane(), {box("b", 70.0, 1.86), box("c", 72.0, -1.86)});
  const auto& pi1 = planning_invariant("PI1");
  const auto v = check_violation(pi1, sc, decision(Verdict::Blocked));
  REQUIRE(v);
  CHECK(v->pi == "PI1");
  CHECK(v->target == "target");
  CHECK(v->objects.size() == 2);
  CHECK(!check_violation(pi1, sc, decision(Verdict::Proceed)));
  CHECK(!check_violation(pi1, with_objects(narrow_lane(), {box("b", 70.0, 0.0)}), decision(Verdict::Blocked)));
}

TEST_CASE("conflicts with desired behaviour") {
  CHECK(conflicts(DesiredBehavior::KeepCruising, Verdict::Blocked));
  CHECK(conflicts(DesiredBehavior::KeepCruising, Verdict::Stop));
  CHECK(!conflicts(DesiredBehavior::KeepCruising, Verdict::Clear));
  CHECK(conflicts(DesiredBehavior::FinishLaneChange, Verdict::NotClear));
  CHECK(!conflicts(DesiredBehavior::FinishLaneChange, Verdict::ClearToChange));
  CHECK(conflicts(DesiredBehavior::FinishLaneBorrow, Verdict::WaitBehind));
  CHECK(!conflicts(DesiredBehavior::FinishLaneBorrow, Verdict::BorrowLane));
  CHECK(conflicts(DesiredBehavior::PassIntersection, Verdict::Stop));
  CHECK(!conflicts(DesiredBehavior::PassIntersection, Verdict::Proceed));
}

TEST_CASE("monotonicity: removing objects from a satisfying set keeps it satisfying") {
  const PlanningScenario sc = narrow_lane();
  const auto& pi1 = planning_invariant("PI1");
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> x(40.0, 120.0), y(-8.0, 8.0), h(-kPi, kPi), sp(0.2, 1.4);
  std::uniform_int_distribution<int> type(0, 3), count(1, 6);
  int satisfying = 0;
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<PhysicalObject> objs;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      auto o = typed("o" + std::to_string(i), static_cast<ObjectType>(type(rng)), x(rng), y(rng), h(rng));
      if (o.type == ObjectType::Pedestrian && i % 2) o = moving(o, sp(rng), sc.map);
      if (o.type == ObjectType::Vehicle) o = moving(typed(o.id, o.type, x(rng) - 40.0, 0.0), 8.0, sc.map);
      if (o.type == ObjectType::Vehicle || object_satisfies(pi1, o, sc) || trial % 4 == 0) objs.push_back(o);
    }
    const bool full = check_pi(pi1, with_objects(sc, objs));
    satisfying += full;
    for (size_t drop = 0; drop < objs.size(); ++drop) {
      auto fewer = objs;
      fewer.erase(fewer.begin() + static_cast<long>(drop));
      if (full) REQUIRE(check_pi(pi1, with_objects(sc, fewer)));
      else REQUIRE(!check_pi(pi1, with_objects(sc, objs)));
    }
  }
  CHECK(satisfying > 50);
}

TEST_CASE("static_off_road is rotation invariant when the circumscribing circle clears the band") {
  const PlanningScenario sc = narrow_lane();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> size(0.5, 2.0), h(-kPi, kPi), gap(1e-3, 3.0), x(40.0, 150.0);
  for (int i = 0; i < 1000; ++i) {
    const double len = size(rng), wid = size(rng);
    const double r = 0.5 * std::hypot(len, wid);
    const double y = (i % 2 ? 1.0 : -1.0) * (1.35 + r + gap(rng));
    const double cx = x(rng);
    const bool base = static_off_road(box("b", cx, y, len, wid, 0.0), sc.map, {1});
    REQUIRE(base);
    for (int k = 0; k < 5; ++k) REQUIRE(static_off_road(box("b", cx, y, len, wid, h(rng)), sc.map, {1}) == base);
  }
}
