#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "support.h"

using namespace semfuzz;
using semfuzz::test::seed_path;

namespace {

Json base_json() { return read_json_file(seed_path("v1_narrow_lane.json")); }

std::string error_of(const Json& j) {
  try {
    parse_scenario(j);
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return "";
}

const char* const kSeeds[] = {"v1_narrow_lane.json",     "autoware_lane_follow.json", "lane_follow_multi.json",
                              "lane_change.json",        "lane_borrow.json",          "stop_sign.json",
                              "signal_intersection.json", "bare_intersection.json"};

}  // namespace

TEST_CASE("bundled narrow-lane seed") {
  const PlanningScenario sc = load_scenario(seed_path("v1_narrow_lane.json"));
  CHECK(sc.kind == ScenarioKind::LaneFollowSingle);
  CHECK(sc.objects.empty());
  CHECK(sc.map.lane(1).width() == 2.7);
  CHECK(sc.ego.pose.lane_id == 1);
  CHECK(sc.ego.pose.s == doctest::Approx(60.0));
  CHECK(sc.ego.pose.l == doctest::Approx(0.0));
}

TEST_CASE("every bundled seed loads and its objects pass the range check") {
  for (const char* name : kSeeds) {
    CAPTURE(name);
    const PlanningScenario sc = load_scenario(seed_path(name));
    for (const auto& o : sc.objects) CHECK(validate_ranges(o, sc.ego).empty());
  }
}

TEST_CASE("parse errors name the offending field") {
  Json j = base_json();
  j["objects"] = Json::array({{{"id", "v"}, {"type", "Vehicle"}, {"position", {70, 0}}, {"speed", -1.0}}});
  CHECK(error_of(j).find("speed") != std::string::npos);

  j = base_json();
  j["kind"] = "StopSignIntersection";
  CHECK(error_of(j).find("context.stop_line_s") != std::string::npos);

  j = base_json();
  j["ego"]["route"] = {9};
  CHECK(error_of(j).find("ego.route") != std::string::npos);

  j = base_json();
  j["colour"] = "red";
  CHECK(error_of(j).find("colour") != std::string::npos);

  j = base_json();
  j["objects"] = Json::array({{{"id", "b"}, {"type", "StaticObject"}, {"position", {70, 5}}}});
  CHECK(error_of(j).find("length") != std::string::npos);

  j = base_json();
  j["kind"] = "LaneChange";
  j["context"] = {{"target_lane", 4}};
  CHECK(error_of(j).find("target_lane") != std::string::npos);

  j = base_json();
  j["map"]["lanes"][0]["width"] = 0.0;
  CHECK(error_of(j).find("map.lanes[0]") != std::string::npos);

  j = base_json();
  j["kind"] = "LaneBorrow";
  j["context"] = {{"blocker_id", "ghost"}, {"target_lane", 1}};
  CHECK(error_of(j).find("blocker_id") != std::string::npos);
}

TEST_CASE("validate_ranges") {
  EgoState ego;
  ego.position = {60.0, 0.0};
  ego.speed = 10.0;
  CHECK(validate_ranges(test::box("a", 70.0, 0.0), ego).empty());

  const auto far = validate_ranges(test::box("a", 160.0, 0.0), ego);
  REQUIRE(far.size() == 1);
  CHECK(far[0].field == "position");

  PhysicalObject ped = test::typed("p", ObjectType::Pedestrian, 62.0, 5.0);
  ped.speed = 2.0;
  ped.trajectory = {{0.0, ped.center}, {1.0, ped.center + Point2{2.0, 0.0}}};
  const auto fast = validate_ranges(ped, ego);
  REQUIRE(fast.size() == 1);
  CHECK(fast[0].field == "speed");

  CHECK(!validate_ranges(test::box("tiny", 70.0, 0.0, 0.4, 1.0), ego).empty());
  CHECK(!validate_ranges(test::box("big", 70.0, 0.0, 1.0, 2.1), ego).empty());

  PhysicalObject car = test::typed("c", ObjectType::Vehicle, 40.0, 0.0);
  car.speed = 7.0;
  car.trajectory = {{0.0, car.center}, {1.0, car.center + Point2{7.0, 0.0}}};
  CHECK(validate_ranges(car, ego).front().field == "speed");

  PhysicalObject bike = test::typed("b", ObjectType::Bicycle, 70.0, 3.0, 3.5);
  CHECK(validate_ranges(bike, ego).front().field == "heading");
}

TEST_CASE("synthesize_trajectory") {
  const LaneMap map({Lane(1, {{0.0, 0.0}, {200.0, 0.0}}, 3.5)});

  PhysicalObject ped = test::typed("p", ObjectType::Pedestrian, 0.0, 0.0, 0.0);
  ped.speed = 1.0;
  const auto w = synthesize_trajectory(ped, map, 5.0, 1.0);
  REQUIRE(w.size() == 6);
  for (int k = 0; k <= 5; ++k) {
    CHECK(w[k].t == doctest::Approx(k));
    CHECK(distance(w[k].pos, {static_cast<double>(k), 0.0}) < 1e-12);
  }

  CHECK(synthesize_trajectory(test::box("s", 10.0, 5.0), map).empty());

  PhysicalObject car = test::typed("c", ObjectType::Vehicle, 20.0, 0.5);
  car.speed = 10.0;
  const auto v = synthesize_trajectory(car, map, 3.0, 0.5);
  REQUIRE(v.size() == 7);
  for (size_t k = 1; k < v.size(); ++k) CHECK(distance(v[k].pos, v[k - 1].pos) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(v.back().pos.y == doctest::Approx(0.5));

  PhysicalObject lost = test::typed("x", ObjectType::Vehicle, 20.0, 30.0);
  lost.speed = 10.0;
  CHECK_THROWS_AS(synthesize_trajectory(lost, map), SynthesisError);
}

TEST_CASE("vehicle trajectories follow lane successors") {
  const LaneMap map({Lane(1, {{0.0, 0.0}, {50.0, 0.0}}, 3.5, {2}), Lane(2, {{50.0, 0.0}, {50.0, 100.0}}, 3.5)});
  PhysicalObject car = test::typed("c", ObjectType::Vehicle, 40.0, 0.0);
  car.speed = 10.0;
  const auto v = synthesize_trajectory(car, map, 3.0, 1.0);
  REQUIRE(v.size() == 4);
  CHECK(distance(v[3].pos, {50.0, 20.0}) < 1e-9);
}

TEST_CASE("trajectory spacing equals speed times dt on straight lanes") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> speed(0.1, 20.0), dt(0.1, 1.0), x(0.0, 100.0);
  const LaneMap map({Lane(1, {{0.0, 0.0}, {1000.0, 0.0}}, 3.5)});
  for (int i = 0; i < 200; ++i) {
    PhysicalObject car = test::typed("c", ObjectType::Vehicle, x(rng), 0.0);
    car.speed = speed(rng);
    const double step = dt(rng);
    const auto v = synthesize_trajectory(car, map, 4.0, step);
    for (size_t k = 1; k < v.size(); ++k) REQUIRE(std::abs(distance(v[k].pos, v[k - 1].pos) - car.speed * step) < 1e-9);
  }
}

TEST_CASE("serialization round trip") {
  for (const char* name : kSeeds) {
    CAPTURE(name);
    const PlanningScenario sc = load_scenario(seed_path(name));
    const Json once = to_json(sc);
    const Json twice = to_json(parse_scenario(once));
    CHECK(once == twice);
  }
  const auto path = std::filesystem::temp_directory_path() / "semfuzz_roundtrip.json";
  const PlanningScenario sc = load_scenario(seed_path("lane_borrow.json"));
  save_scenario(sc, path.string());
  CHECK(to_json(load_scenario(path.string())) == to_json(sc));
  std::filesystem::remove(path);
}

TEST_CASE("seeds split into a base scenario and the attacker genome") {
  const Seed borrow = load_seed(seed_path("lane_borrow.json"));
  CHECK(borrow.genome.empty());
  REQUIRE(borrow.base.blocker());
  const Seed stop = load_seed(seed_path("stop_sign.json"));
  CHECK(stop.base.objects.empty());
  CHECK(stop.genome.size() == 1);
}

TEST_CASE("lane chains and protected lanes") {
  const PlanningScenario sc = load_scenario(seed_path("stop_sign.json"));
  const auto chain = lane_chain(sc.map, 1);
  CHECK(chain == std::vector<int>{1, 2, 3});
  const auto prot = sc.protected_lanes();
  for (int id : {1, 2, 3, 7, 11, 21}) CHECK(std::find(prot.begin(), prot.end(), id) != prot.end());
  CHECK(std::find(prot.begin(), prot.end(), 6) == prot.end());

  const PlanningScenario change = load_scenario(seed_path("lane_change.json"));
  const auto planned = change.planned_lanes();
  CHECK(std::find(planned.begin(), planned.end(), *change.context.target_lane) != planned.end());
}
