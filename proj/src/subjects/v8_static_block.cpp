// Rollout-based static obstacle check: the ego stops when every candidate rollout is blocked.
#include "common.h"

namespace semfuzz::detail {

namespace {

constexpr double kCarWidth = 1.85;
constexpr double kCarLength = 4.5;
constexpr double kCriticalLateralDistance = kCarWidth / 2 + 1.2;
constexpr double kMinFollowingDistance = 35.0;

enum Pred : size_t { kLateral, kLongitudinalLow, kLongitudinalHigh, kUnblocked };

class StaticBlock final : public Subject {
 public:
  StaticBlock(int rollouts, double spacing)
      : Subject({"v8", "rollout planner: fully blocked when static contour points fall on every rollout",
                 {ScenarioKind::LaneFollowSingle, ScenarioKind::LaneFollowMulti}, "PI1", "autoware_lane_follow.json",
                 Verdict::FullyBlocked},
                {"p_lateral", "p_longitudinal_low", "p_longitudinal_high", "p_unblocked"}),
        rollouts_(rollouts),
        spacing_(spacing) {}

 protected:
  PlanningDecision run(const PlanningScenario& sc, TraceSink& sink) const override {
    const Lane& lane = sc.map.lane(sc.ego.lane_id());
    const double ego_s = sc.ego.pose.s;
    std::vector<double> offsets;
    for (int k = 0; k < rollouts_; ++k) offsets.push_back((k - 0.5 * (rollouts_ - 1)) * spacing_);
    std::vector<bool> blocked(offsets.size(), false);

    for (const auto& obj : sc.objects) {
      if (!obj.is_static()) continue;
      const Polygon contour = obj.polygon();
      std::vector<LaneProjection> points;
      for (const auto& p : contour) points.push_back(project(p, lane));
      for (size_t k = 0; k < offsets.size(); ++k) {
        for (const auto& pt : points) {
          const double lateral = std::abs(pt.l - offsets[k]);
          const double longitudinal = pt.s - ego_s;
          if (emit_le(sink, kLateral, lateral, kCriticalLateralDistance) &&
              emit_le(sink, kLongitudinalLow, -kCarLength / 1.5, longitudinal) &&
              emit_lt(sink, kLongitudinalHigh, longitudinal, kMinFollowingDistance)) {
            blocked[k] = true;
          }
        }
      }
    }

    bool fully_blocked = true;
    for (size_t k = 0; k < offsets.size(); ++k) {
      if (emit_bool(sink, kUnblocked, !blocked[k])) fully_blocked = false;
    }
    if (fully_blocked) return fire("t_fully_blocked", "every rollout blocked by static obstacles");
    return verdict(Verdict::Clear, "an unblocked rollout remains");
  }

 private:
  int rollouts_;
  double spacing_;
};

}  // namespace

std::unique_ptr<Subject> make_v8(const SubjectConfig& c) {
  return std::make_unique<StaticBlock>(c.v8_rollouts, c.v8_rollout_spacing);
}

}  // namespace semfuzz::detail
