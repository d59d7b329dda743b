// Crosswalk stop check for standing pedestrians near the driving reference line.
#include "common.h"

namespace semfuzz::detail {

namespace {

enum Pred : size_t { kStatic, kBlock };

class CrosswalkStatic final : public Subject {
 public:
  CrosswalkStatic()
      : Subject({"v5", "signalized crosswalk: stop for a standing pedestrian within vehicle width of the path",
                 {ScenarioKind::SignalIntersection}, "PI6", "signal_intersection.json", Verdict::Stop},
                {"p_static", "p_block"}) {}

 protected:
  PlanningDecision run(const PlanningScenario& sc, TraceSink& sink) const override {
    const Polyline reference = route_polyline(sc);
    const double threshold = sc.ego.width;
    for (const auto& obj : sc.objects) {
      if (obj.type != ObjectType::Pedestrian) continue;
      if (!emit_bool(sink, kStatic, obj.is_static())) continue;
      const double d = min_lateral_distance(reference, obj.polygon());
      if (emit_lt(sink, kBlock, d, threshold)) {
        return fire("t_stop_static_pedestrian", "pedestrian " + obj.id + " crosses the driving path");
      }
    }
    return verdict(Verdict::Proceed, "crosswalk clear");
  }
};

}  // namespace

std::unique_ptr<Subject> make_v5(const SubjectConfig&) { return std::make_unique<CrosswalkStatic>(); }

}  // namespace semfuzz::detail
