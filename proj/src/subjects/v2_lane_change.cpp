// Backward-clearance check before a lane change.
#include <algorithm>

#include "common.h"

namespace semfuzz::detail {

namespace {

constexpr double kLateralFilter = 2.5;
constexpr double kBackwardSafeBuffer = 4.0;

enum Pred : size_t { kLateralSkip, kBackwardGap };

class LaneChangeClear final : public Subject {
 public:
  LaneChangeClear()
      : Subject({"v2", "lane change: not clear when a vehicle on the target lane is close behind",
                 {ScenarioKind::LaneChange}, "PI3", "lane_change.json", Verdict::NotClear},
                {"p_lateral_skip", "p_backward_gap"}) {}

 protected:
  PlanningDecision run(const PlanningScenario& sc, TraceSink& sink) const override {
    const Lane& target = sc.map.lane(sc.context.target_lane.value());
    const double ego_start_s = project(sc.ego.position, target).s - 0.5 * sc.ego.length;

    for (const auto& obj : sc.objects) {
      if (obj.type != ObjectType::Vehicle) continue;
      const FrenetBox b = frenet_box(obj.polygon(), target);
      const bool skip = b.end_l < -kLateralFilter || b.start_l > kLateralFilter;
      // Distance the box would have to move laterally to flip the filter.
      const double flip = skip ? std::max(-kLateralFilter - b.end_l, b.start_l - kLateralFilter)
                               : std::min(b.end_l + kLateralFilter, kLateralFilter - b.start_l);
      sink.record(kLateralSkip, skip, flip);
      if (skip) continue;
      if (emit_lt(sink, kBackwardGap, ego_start_s - b.end_s, kBackwardSafeBuffer)) {
        return fire("t_not_clear", "vehicle " + obj.id + " within the backward safe buffer");
      }
    }
    return verdict(Verdict::ClearToChange, "target lane clear");
  }
};

}  // namespace

std::unique_ptr<Subject> make_v2(const SubjectConfig&) { return std::make_unique<LaneChangeClear>(); }

}  // namespace semfuzz::detail
