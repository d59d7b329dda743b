// Stop-sign watch list: the ego waits at the stop line until every watched object has left.
// Decisions are taken in steady state, after the single-object timeout has elapsed.
#include <algorithm>

#include "common.h"

namespace semfuzz::detail {

namespace {

constexpr double kClosestLaneRadius = 5.0;

enum Pred : size_t { kType, kNearLane, kAssociated, kStopDistance, kExpire, kWatching };

class StopSignWatchList final : public Subject {
 public:
  StopSignWatchList(double max_stop_distance, int timeout_cycles)
      : Subject({"v7", "stop sign: wait while objects near the stop line of a guarded lane are watched",
                 {ScenarioKind::StopSignIntersection}, "PI5", "stop_sign.json", Verdict::Stop},
                {"p_type", "p_near_lane", "p_associated", "p_stop_distance", "p_expire", "p_watching"}),
        max_stop_distance_(max_stop_distance),
        timeout_cycles_(timeout_cycles) {}

 protected:
  PlanningDecision run(const PlanningScenario& sc, TraceSink& sink) const override {
    const Lane& ego_lane = sc.map.lane(sc.ego.lane_id());
    const double stop_line_s = sc.context.stop_line_s.value();
    std::vector<int> associated = sc.context.associated_lanes;
    if (associated.empty()) associated.push_back(sc.ego.lane_id());

    std::vector<std::string> watch_list;
    for (const auto& obj : sc.objects) {
      if (!emit_bool(sink, kType, obj.type == ObjectType::Bicycle || obj.type == ObjectType::Vehicle)) continue;
      const FrenetPose closest = transform(obj.center, sc.map);
      // The radius is applied inside the closest-lane lookup; the procedure only sees whether a lane came back.
      if (!emit_bool(sink, kNearLane, std::abs(closest.l) <= kClosestLaneRadius)) continue;
      const bool guarded = std::find(associated.begin(), associated.end(), closest.lane_id) != associated.end();
      if (!emit_bool(sink, kAssociated, guarded)) continue;
      const double to_stop_line = std::abs(stop_line_s - project(obj.center, ego_lane).s);
      if (emit_lt(sink, kStopDistance, to_stop_line, max_stop_distance_)) watch_list.push_back(obj.id);
    }

    const bool expire = watch_list.size() == 1;
    sink.record(kExpire, expire, std::abs(static_cast<double>(watch_list.size()) - 1.0));
    if (expire && timeout_cycles_ > 0) watch_list.clear();
    if (emit_bool(sink, kWatching, !watch_list.empty())) {
      return fire("t_stop_at_line", std::to_string(watch_list.size()) + " objects on the watch list");
    }
    return verdict(Verdict::Proceed, "watch list empty");
  }

 private:
  double max_stop_distance_;
  int timeout_cycles_;  // 0 disables the single-object timeout
};

}  // namespace

std::unique_ptr<Subject> make_v7(const SubjectConfig& c) {
  return std::make_unique<StopSignWatchList>(c.v7_max_stop_distance, c.v7_timeout_cycles);
}

}  // namespace semfuzz::detail
