// Beam scan estimating whether an obstacle hides too much of the view ahead before borrowing a lane.
// The scan state is kept across obstacles, as in the reference procedure.
#include <algorithm>
#include <numbers>

#include "common.h"

namespace semfuzz::detail {

namespace {

constexpr double kSearchRange = std::numbers::pi;
constexpr double kBeamLength = 20.0;
constexpr double kBeamStep = 0.08;
constexpr double kBlockAngleThreshold = 0.5;

enum Pred : size_t { kFirstOverlap, kOverlapEnd, kFound, kAngle };

double beam_gap(const Point2& from, const Point2& to, const Polygon& poly) {
  if (segment_overlaps_polygon(from, to, poly)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < poly.size(); ++i) {
    d = std::min(d, segment_segment_distance(from, to, poly[i], poly[(i + 1) % poly.size()]));
  }
  return d;
}

class PerceptionBlocked final : public Subject {
 public:
  PerceptionBlocked()
      : Subject({"v4", "lane borrow: perception judged blocked from the angular span of obstacles",
                 {ScenarioKind::LaneBorrow}, "PI4", "lane_borrow.json", Verdict::PerceptionBlocked},
                {"p_first_overlap", "p_overlap_end", "p_found", "p_angle"}) {}

 protected:
  PlanningDecision run(const PlanningScenario& sc, TraceSink& sink) const override {
    const double heading = sc.ego.heading;
    const Point2 pos = sc.ego.position;
    double left_most = normalize_angle(heading + 0.5 * kSearchRange);
    double right_most = normalize_angle(heading - 0.5 * kSearchRange);
    bool right_most_found = false;

    for (const auto& obj : sc.objects) {
      const Polygon poly = obj.polygon();
      for (double a = 0.0; a < kSearchRange; a += kBeamStep) {
        const double beam = heading - 0.5 * kSearchRange + a;
        const double gap = beam_gap(pos, pos + unit_vector(beam) * kBeamLength, poly);
        const bool overlap = gap == 0.0;
        if (!right_most_found) {
          sink.record(kFirstOverlap, overlap, gap);
          if (overlap) {
            right_most_found = true;
            right_most = beam;
          }
        }
        if (right_most_found) {
          sink.record(kOverlapEnd, !overlap, gap);
          if (!overlap) {
            left_most = beam - kBeamStep;
            break;
          }
        }
      }
      if (emit_bool(sink, kFound, !right_most_found)) continue;
      const double span = std::abs(normalize_angle(left_most - right_most));
      if (emit_lt(sink, kAngle, kBlockAngleThreshold, span)) {
        return fire("t_perception_blocked", "obstacle span " + std::to_string(span) + " rad");
      }
    }
    return verdict(Verdict::PerceptionOk, "view ahead not blocked");
  }
};

}  // namespace

std::unique_ptr<Subject> make_v4(const SubjectConfig&) { return std::make_unique<PerceptionBlocked>(); }

}  // namespace semfuzz::detail
