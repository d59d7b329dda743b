// Rollout-based dynamic obstacle check: predicted footprints near every rollout block the lane.
#include <algorithm>
#include <limits>

#include "common.h"

namespace semfuzz::detail {

namespace {

constexpr double kAdHalfWidth = 0.925;
constexpr double kCriticalDistance = kAdHalfWidth + 1.2;
constexpr double kPathLength = 35.0;
constexpr double kPathStep = 1.0;

enum Pred : size_t { kCollision, kRolloutFree };

class DynamicBlock final : public Subject {
 public:
  DynamicBlock(int rollouts, double spacing)
      : Subject({"v9", "rollout planner: blocked when predicted trajectories come near every rollout",
                 {ScenarioKind::LaneFollowMulti, ScenarioKind::LaneFollowSingle}, "PI2", "lane_follow_multi.json",
                 Verdict::Blocked},
                {"p_collision", "p_rollout_free"}),
        rollouts_(rollouts),
        spacing_(spacing) {}

 protected:
  PlanningDecision run(const PlanningScenario& sc, TraceSink& sink) const override {
    const Lane& lane = sc.map.lane(sc.ego.lane_id());
    const double s0 = sc.ego.pose.s;
    const double s1 = std::min(lane.length(), s0 + kPathLength);

    std::vector<std::vector<Point2>> paths;
    for (int k = 0; k < rollouts_; ++k) {
      const double offset = (k - 0.5 * (rollouts_ - 1)) * spacing_;
      std::vector<Point2> path;
      for (double s = s0; s <= s1 + 1e-9; s += kPathStep) path.push_back(frenet_to_world(std::min(s, s1), offset, lane));
      paths.push_back(std::move(path));
    }

    std::vector<std::vector<Point2>> predictions;
    for (const auto& obj : sc.objects) {
      if (obj.is_static()) continue;
      std::vector<Point2> pts;
      for (size_t i = 0; i < obj.trajectory.size(); ++i) {
        const Polygon fp = waypoint_polygon(obj, i);
        pts.insert(pts.end(), fp.begin(), fp.end());
      }
      predictions.push_back(std::move(pts));
    }

    bool all_blocked = true;
    for (const auto& path : paths) {
      bool blocked = false;
      for (const auto& pred : predictions) {
        double closest = std::numeric_limits<double>::infinity();
        for (const auto& a : pred) {
          for (const auto& b : path) closest = std::min(closest, distance(a, b));
        }
        if (emit_lt(sink, kCollision, closest, kCriticalDistance)) blocked = true;
      }
      if (emit_bool(sink, kRolloutFree, !blocked)) all_blocked = false;
    }
    if (all_blocked) return fire("t_dynamic_blocked", "every rollout blocked by predicted trajectories");
    return verdict(Verdict::Clear, "an unblocked rollout remains");
  }

 private:
  int rollouts_;
  double spacing_;
};

}  // namespace

std::unique_ptr<Subject> make_v9(const SubjectConfig& c) {
  return std::make_unique<DynamicBlock>(c.v9_rollouts, c.v9_rollout_spacing);
}

}  // namespace semfuzz::detail
