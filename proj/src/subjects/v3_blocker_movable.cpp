// Decides whether the vehicle blocking the ego lane is parked (borrow) or queueing (wait).
#include <algorithm>

#include "common.h"

namespace semfuzz::detail {

namespace {

enum Pred : size_t { kSelf, kLateralSkip, kLongitudinalSkip };

class BlockerMovable final : public Subject {
 public:
  explicit BlockerMovable(double threshold)
      : Subject({"v3", "lane borrow: blocker judged queueing when another obstacle sits just ahead of it",
                 {ScenarioKind::LaneBorrow}, "PI4", "lane_borrow.json", Verdict::WaitBehind},
                {"p_self", "p_lateral_skip", "p_longitudinal_skip"}),
        threshold_(threshold) {}

 protected:
  PlanningDecision run(const PlanningScenario& sc, TraceSink& sink) const override {
    const PhysicalObject* blocker = sc.blocker();
    if (!blocker) throw ConfigError("lane-borrow scenario without a blocker");
    const Lane& lane = sc.map.lane(sc.ego.lane_id());
    const FrenetBox cur = frenet_box(blocker->polygon(), lane);

    for (const auto& obj : sc.objects) {
      if (emit_bool(sink, kSelf, obj.id == blocker->id)) continue;
      const FrenetBox b = frenet_box(obj.polygon(), lane);
      const bool apart = b.start_l > cur.end_l || b.end_l < cur.start_l;
      const double flip = apart ? std::max(b.start_l - cur.end_l, cur.start_l - b.end_l)
                                : std::min(cur.end_l - b.start_l, b.end_l - cur.start_l);
      sink.record(kLateralSkip, apart, flip);
      if (apart) continue;
      const double delta_s = b.start_s - cur.end_s;
      const bool outside = delta_s < 0.0 || delta_s > threshold_;
      const double edge = outside ? (delta_s < 0.0 ? -delta_s : delta_s - threshold_)
                                  : std::min(delta_s, threshold_ - delta_s);
      sink.record(kLongitudinalSkip, outside, edge);
      if (outside) continue;
      return fire("t_wait_behind", "obstacle " + obj.id + " queued ahead of the blocker");
    }
    return verdict(Verdict::BorrowLane, "blocker is parked");
  }

 private:
  double threshold_;
};

}  // namespace

std::unique_ptr<Subject> make_v3(const SubjectConfig& c) { return std::make_unique<BlockerMovable>(c.v3_threshold); }

}  // namespace semfuzz::detail
