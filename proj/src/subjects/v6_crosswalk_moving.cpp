// Crosswalk stop check for walking pedestrians heading toward the ego.
#include "common.h"

namespace semfuzz::detail {

namespace {

constexpr double kStrictLDistance = 6.0;
constexpr double kInnerProductThreshold = 1e-6;

enum Pred : size_t { kLDistance, kTowards };

double polyline_distance(const Point2& p, const Polyline& line) {
  double d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < line.size(); ++i) d = std::min(d, point_segment_distance(p, line[i], line[i + 1]));
  return d;
}

class CrosswalkMoving final : public Subject {
 public:
  CrosswalkMoving()
      : Subject({"v6", "signalized crosswalk: stop for a nearby pedestrian moving toward the ego",
                 {ScenarioKind::SignalIntersection}, "PI6", "signal_intersection.json", Verdict::Stop},
                {"p_l_distance", "p_towards"}) {}

 protected:
  PlanningDecision run(const PlanningScenario& sc, TraceSink& sink) const override {
    const Polyline reference = route_polyline(sc);
    for (const auto& obj : sc.objects) {
      if (obj.type != ObjectType::Pedestrian) continue;
      if (!emit_lt(sink, kLDistance, polyline_distance(obj.center, reference), kStrictLDistance)) continue;
      const Point2 v = unit_vector(obj.heading) * obj.speed;
      const Point2 obs_to_adc = sc.ego.position - obj.center;
      if (emit_lt(sink, kTowards, kInnerProductThreshold, dot(v, obs_to_adc))) {
        return fire("t_stop_moving_pedestrian", "pedestrian " + obj.id + " moving toward the ego");
      }
    }
    return verdict(Verdict::Proceed, "no pedestrian approaching");
  }
};

}  // namespace

std::unique_ptr<Subject> make_v6(const SubjectConfig&) { return std::make_unique<CrosswalkMoving>(); }

}  // namespace semfuzz::detail
