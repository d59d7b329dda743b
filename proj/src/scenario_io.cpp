#include "semfuzz/scenario_io.h"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace semfuzz {

namespace {

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ScenarioError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ScenarioError(where + "." + it.key() + ": unknown field");
  }
}

const Json& field(const Json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) throw ScenarioError(where + "." + key + ": missing");
  return j.at(key);
}

double num(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ScenarioError(where + ": expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ScenarioError(where + ": expected an integer");
  return j.get<int>();
}

Point2 point(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ScenarioError(where + ": expected [x, y]");
  return {num(j[0], where + "[0]"), num(j[1], where + "[1]")};
}

std::vector<Point2> points(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ScenarioError(where + ": expected an array of [x, y]");
  std::vector<Point2> out;
  for (size_t i = 0; i < j.size(); ++i) out.push_back(point(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> ints(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ScenarioError(where + ": expected an array of lane ids");
  std::vector<int> out;
  for (size_t i = 0; i < j.size(); ++i) out.push_back(integer(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Json point_json(const Point2& p) { return Json::array({p.x, p.y}); }

Json points_json(const std::vector<Point2>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(point_json(p));
  return a;
}

void default_dims(PhysicalObject& o) {
  switch (o.type) {
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
      break;
  }
}

}  // namespace

PhysicalObject parse_object(const Json& j, const std::string& where) {
  check_keys(j, where, {"id", "type", "position", "length", "width", "height", "heading", "speed", "trajectory"});
  PhysicalObject o;
  const Json& id = field(j, where, "id");
  if (!id.is_string()) throw ScenarioError(where + ".id: expected a string");
  o.id = id.get<std::string>();
  const Json& type = field(j, where, "type");
  auto t = type.is_string() ? object_type_from_string(type.get<std::string>()) : std::nullopt;
  if (!t) throw ScenarioError(where + ".type: expected Pedestrian, Vehicle, Bicycle or StaticObject");
  o.type = *t;
  default_dims(o);
  o.center = point(field(j, where, "position"), where + ".position");
  if (o.type == ObjectType::StaticObject) {
    o.length = num(field(j, where, "length"), where + ".length");
    o.width = num(field(j, where, "width"), where + ".width");
    o.height = num(field(j, where, "height"), where + ".height");
  } else {
    if (j.contains("length")) o.length = num(j["length"], where + ".length");
    if (j.contains("width")) o.width = num(j["width"], where + ".width");
    if (j.contains("height")) o.height = num(j["height"], where + ".height");
  }
  if (j.contains("heading")) o.heading = num(j["heading"], where + ".heading");
  if (j.contains("speed")) o.speed = num(j["speed"], where + ".speed");
  if (j.contains("trajectory")) {
    const Json& tr = j["trajectory"];
    if (!tr.is_array()) throw ScenarioError(where + ".trajectory: expected [[t, x, y], ...]");
    for (size_t i = 0; i < tr.size(); ++i) {
      const std::string w = where + ".trajectory[" + std::to_string(i) + "]";
      if (!tr[i].is_array() || tr[i].size() != 3) throw ScenarioError(w + ": expected [t, x, y]");
      o.trajectory.push_back({num(tr[i][0], w), {num(tr[i][1], w), num(tr[i][2], w)}});
    }
  }
  return o;
}

Json to_json(const PhysicalObject& o) {
  Json j = {{"id", o.id},         {"type", to_string(o.type)}, {"position", point_json(o.center)},
            {"length", o.length}, {"width", o.width},          {"height", o.height},
            {"heading", o.heading}, {"speed", o.speed}};
  if (!o.trajectory.empty()) {
    Json tr = Json::array();
    for (const auto& w : o.trajectory) tr.push_back(Json::array({w.t, w.pos.x, w.pos.y}));
    j["trajectory"] = tr;
  }
  return j;
}

PlanningScenario parse_scenario(const Json& j) {
  check_keys(j, "scenario", {"map", "ego", "kind", "context", "objects"});
  PlanningScenario sc;

  const Json& map = field(j, "scenario", "map");
  check_keys(map, "map", {"lanes"});
  const Json& lanes = field(map, "map", "lanes");
  if (!lanes.is_array()) throw ScenarioError("map.lanes: expected an array");
  std::vector<Lane> parsed;
  for (size_t i = 0; i < lanes.size(); ++i) {
    const std::string w = "map.lanes[" + std::to_string(i) + "]";
    check_keys(lanes[i], w, {"id", "centerline", "width", "successors"});
    std::vector<int> succ;
    if (lanes[i].contains("successors")) succ = ints(lanes[i]["successors"], w + ".successors");
    try {
      parsed.emplace_back(integer(field(lanes[i], w, "id"), w + ".id"),
                          points(field(lanes[i], w, "centerline"), w + ".centerline"),
                          num(field(lanes[i], w, "width"), w + ".width"), succ);
    } catch (const ValidationError& e) {
      throw ScenarioError(w + ": " + e.what());
    }
  }
  for (auto& lane : parsed) {
    for (const auto& other : parsed) {
      for (int s : other.successors()) {
        if (s == lane.id()) lane.mutable_predecessors().push_back(other.id());
      }
    }
  }
  try {
    sc.map = LaneMap(std::move(parsed));
  } catch (const ConfigError& e) {
    throw ScenarioError(std::string("map.lanes: ") + e.what());
  }

  const Json& ego = field(j, "scenario", "ego");
  check_keys(ego, "ego", {"position", "heading", "speed", "width", "length", "route"});
  sc.ego.position = point(field(ego, "ego", "position"), "ego.position");
  sc.ego.heading = num(field(ego, "ego", "heading"), "ego.heading");
  sc.ego.speed = num(field(ego, "ego", "speed"), "ego.speed");
  if (ego.contains("width")) sc.ego.width = num(ego["width"], "ego.width");
  if (ego.contains("length")) sc.ego.length = num(ego["length"], "ego.length");
  sc.ego.route = ints(field(ego, "ego", "route"), "ego.route");
  if (sc.ego.speed < 0.0) throw ScenarioError("ego.speed: must be non-negative");
  if (!(sc.ego.width > 0.0) || !(sc.ego.length > 0.0)) throw ScenarioError("ego.width/length: must be positive");

  const Json& kind = field(j, "scenario", "kind");
  auto k = kind.is_string() ? scenario_kind_from_string(kind.get<std::string>()) : std::nullopt;
  if (!k) throw ScenarioError("kind: unknown scenario kind");
  sc.kind = *k;

  if (j.contains("context")) {
    const Json& c = j["context"];
    check_keys(c, "context",
               {"blocker_id", "target_lane", "stop_line_s", "crosswalk", "associated_lanes", "intersection_lanes"});
    if (c.contains("blocker_id")) {
      if (!c["blocker_id"].is_string()) throw ScenarioError("context.blocker_id: expected a string");
      sc.context.blocker_id = c["blocker_id"].get<std::string>();
    }
    if (c.contains("target_lane")) sc.context.target_lane = integer(c["target_lane"], "context.target_lane");
    if (c.contains("stop_line_s")) sc.context.stop_line_s = num(c["stop_line_s"], "context.stop_line_s");
    if (c.contains("crosswalk")) sc.context.crosswalk = points(c["crosswalk"], "context.crosswalk");
    if (c.contains("intersection_lanes")) {
      sc.context.intersection_lanes = ints(c["intersection_lanes"], "context.intersection_lanes");
    }
    if (c.contains("associated_lanes")) {
      sc.context.associated_lanes = ints(c["associated_lanes"], "context.associated_lanes");
    }
  }

  if (j.contains("objects")) {
    const Json& objs = j["objects"];
    if (!objs.is_array()) throw ScenarioError("objects: expected an array");
    for (size_t i = 0; i < objs.size(); ++i) {
      sc.objects.push_back(parse_object(objs[i], "objects[" + std::to_string(i) + "]"));
    }
  }

  finalize_scenario(sc);

  for (size_t i = 0; i < sc.objects.size(); ++i) {
    auto& o = sc.objects[i];
    const std::string w = "objects[" + std::to_string(i) + "]";
    if (o.speed > 0.0 && o.trajectory.empty()) {
      try {
        o.trajectory = synthesize_trajectory(o, sc.map);
      } catch (const SynthesisError& e) {
        throw ScenarioError(w + ".trajectory: " + e.what());
      }
    }
    const auto violations = validate_ranges(o, sc.ego);
    if (!violations.empty()) {
      throw ScenarioError(w + "." + violations.front().field + ": " + violations.front().message);
    }
  }
  return sc;
}

Json to_json(const PlanningScenario& sc) {
  Json lanes = Json::array();
  for (const Lane& lane : sc.map.lanes()) {
    lanes.push_back({{"id", lane.id()},
                     {"centerline", points_json(lane.centerline())},
                     {"width", lane.width()},
                     {"successors", lane.successors()}});
  }
  Json ego = {{"position", point_json(sc.ego.position)},
              {"heading", sc.ego.heading},
              {"speed", sc.ego.speed},
              {"width", sc.ego.width},
              {"length", sc.ego.length},
              {"route", sc.ego.route}};
  Json ctx = Json::object();
  if (sc.context.blocker_id) ctx["blocker_id"] = *sc.context.blocker_id;
  if (sc.context.target_lane) ctx["target_lane"] = *sc.context.target_lane;
  if (sc.context.stop_line_s) ctx["stop_line_s"] = *sc.context.stop_line_s;
  if (sc.context.crosswalk) ctx["crosswalk"] = points_json(*sc.context.crosswalk);
  if (!sc.context.associated_lanes.empty()) ctx["associated_lanes"] = sc.context.associated_lanes;
  if (!sc.context.intersection_lanes.empty()) ctx["intersection_lanes"] = sc.context.intersection_lanes;
  Json objs = Json::array();
  for (const auto& o : sc.objects) objs.push_back(to_json(o));
  return {{"map", {{"lanes", lanes}}},
          {"ego", ego},
          {"kind", to_string(sc.kind)},
          {"context", ctx},
          {"objects", objs}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot open");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ScenarioError(path + ": " + e.what());
  }
}

PlanningScenario load_scenario(const std::string& path) {
  const Json j = read_json_file(path);
  try {
    return parse_scenario(j);
  } catch (const ScenarioError& e) {
    throw ScenarioError(path + ": " + e.what());
  }
}

Seed make_seed(PlanningScenario sc) {
  Seed seed;
  std::vector<PhysicalObject> context;
  for (auto& o : sc.objects) {
    if (sc.context.blocker_id && *sc.context.blocker_id == o.id) {
      context.push_back(std::move(o));
    } else {
      seed.genome.push_back(std::move(o));
    }
  }
  sc.objects = std::move(context);
  seed.base = std::move(sc);
  return seed;
}

Seed load_seed(const std::string& path) { return make_seed(load_scenario(path)); }

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(tmp.string() + ": cannot open for writing");
    out << content;
    if (!out) throw std::runtime_error(tmp.string() + ": write failed");
  }
  fs::rename(tmp, target);
}

void save_scenario(const PlanningScenario& sc, const std::string& path) {
  write_file_atomic(path, to_json(sc).dump(2) + "\n");
}

}  // namespace semfuzz
