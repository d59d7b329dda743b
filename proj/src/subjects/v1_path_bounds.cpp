// Lateral drivable-space check of the lane-follow path bounds decider.
#include <algorithm>

#include "common.h"

namespace semfuzz::detail {

namespace {

constexpr double kObstacleLatBuffer = 0.4;
constexpr double kAdcWidth = 2.11;
constexpr double kSliceGap = 5.0;     // obstacles closer than this longitudinally share a slice
constexpr double kLookahead = 80.0;   // m ahead of the ego considered by the decider

enum Pred : size_t { kSideCheck, kGapCheck };

class PathBoundsDecider final : public Subject {
 public:
  PathBoundsDecider()
      : Subject({"v1", "lane-follow path bounds: blocked when the lateral drivable gap is below the vehicle width",
                 {ScenarioKind::LaneFollowSingle, ScenarioKind::LaneFollowMulti}, "PI1", "v1_narrow_lane.json",
                 Verdict::Blocked},
                {"p_side_check", "p_gap_check"}) {}

 protected:
  PlanningDecision run(const PlanningScenario& sc, TraceSink& sink) const override {
    const Lane& lane = sc.map.lane(sc.ego.lane_id());
    const double ego_s = sc.ego.pose.s;

    std::vector<FrenetBox> boxes;
    for (const auto& obj : sc.objects) {
      if (obj.speed != 0.0) continue;
      const FrenetBox b = frenet_box(obj.polygon(), lane);
      if (b.end_s < ego_s || b.start_s > ego_s + kLookahead) continue;
      boxes.push_back(b);
    }
    std::sort(boxes.begin(), boxes.end(), [](const FrenetBox& a, const FrenetBox& b) { return a.start_s < b.start_s; });

    size_t i = 0;
    while (i < boxes.size()) {
      size_t j = i + 1;
      double slice_end = boxes[i].end_s;
      while (j < boxes.size() && boxes[j].start_s - slice_end <= kSliceGap) {
        slice_end = std::max(slice_end, boxes[j].end_s);
        ++j;
      }

      // Bounds in lane l; the lower bound folds obstacles whose center is at negative l.
      double lower = -lane.half_width();
      double upper = lane.half_width();
      for (size_t k = i; k < j; ++k) {
        const double mid = 0.5 * (boxes[k].start_l + boxes[k].end_l);
        if (emit_lt(sink, kSideCheck, mid, 0.0)) {
          lower = std::max(lower, boxes[k].end_l + kObstacleLatBuffer);
        } else {
          upper = std::min(upper, boxes[k].start_l - kObstacleLatBuffer);
        }
      }
      if (emit_lt(sink, kGapCheck, upper - lower, kAdcWidth)) {
        return fire("t_path_blocked", "drivable gap " + std::to_string(upper - lower) + " m below vehicle width");
      }
      i = j;
    }
    return verdict(Verdict::Clear, "drivable gap sufficient");
  }
};

}  // namespace

std::unique_ptr<Subject> make_v1(const SubjectConfig&) { return std::make_unique<PathBoundsDecider>(); }

}  // namespace semfuzz::detail
