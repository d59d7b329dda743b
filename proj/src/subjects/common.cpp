#include "common.h"

#include <algorithm>
#include <limits>

namespace semfuzz {

namespace detail {

FrenetBox frenet_box(const Polygon& poly, const Lane& lane) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  FrenetBox b{inf, -inf, inf, -inf};
  for (const auto& p : poly) {
    const LaneProjection pr = project(p, lane);
    b.start_s = std::min(b.start_s, pr.s);
    b.end_s = std::max(b.end_s, pr.s);
    b.start_l = std::min(b.start_l, pr.l);
    b.end_l = std::max(b.end_l, pr.l);
  }
  return b;
}

Polyline route_polyline(const PlanningScenario& sc) {
  Polyline line;
  for (int id : sc.ego.route) {
    for (const auto& p : sc.map.lane(id).centerline()) {
      if (line.empty() || !(line.back() == p)) line.push_back(p);
    }
  }
  return line;
}

}  // namespace detail

DependenceGraph embedded_graph(const std::string& id) {
  const auto& graphs = detail::embedded_graphs();
  auto it = graphs.find(id);
  if (it == graphs.end()) throw ConfigError("no dependence graph for subject " + id);
  return parse_dependence_graph(nlohmann::json::parse(it->second));
}

Subject::Subject(SubjectInfo info, const std::vector<std::string>& predicate_ids) : info_(std::move(info)) {
  const DependenceGraph g = embedded_graph(info_.id);
  if (g.predicates.size() != predicate_ids.size()) {
    throw ConfigError(info_.id + ": dependence graph declares " + std::to_string(g.predicates.size()) +
                      " predicates, procedure instruments " + std::to_string(predicate_ids.size()));
  }
  for (size_t i = 0; i < predicate_ids.size(); ++i) {
    if (g.predicates[i].id != predicate_ids[i]) {
      throw ConfigError(info_.id + ": predicate " + std::to_string(i) + " is " + g.predicates[i].id +
                        " in the graph, expected " + predicate_ids[i]);
    }
  }
  profile_ = DistanceProfile::build(g);
  targets_ = g.targets;
}

bool Subject::accepts(ScenarioKind kind) const {
  return std::find(info_.kinds.begin(), info_.kinds.end(), kind) != info_.kinds.end();
}

PlanningDecision Subject::decide(const PlanningScenario& sc, TraceSink& sink) const {
  if (!accepts(sc.kind)) {
    throw ConfigError("subject " + info_.id + " does not handle " + to_string(sc.kind) + " scenarios");
  }
  return run(sc, sink);
}

PlanningDecision Subject::decide(const PlanningScenario& sc) const {
  NullSink sink;
  return decide(sc, sink);
}

PlanningDecision Subject::verdict(Verdict v, std::string reason) const {
  return {info_.id, v, std::move(reason), std::nullopt};
}

PlanningDecision Subject::fire(const std::string& target, std::string reason) const {
  if (std::find(targets_.begin(), targets_.end(), target) == targets_.end()) {
    throw ConfigError(info_.id + ": undeclared attack target " + target);
  }
  return {info_.id, info_.undesired, std::move(reason), target};
}

}  // namespace semfuzz
