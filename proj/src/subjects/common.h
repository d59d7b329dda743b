#pragma once

#include <cmath>
#include <map>
#include <memory>

#include "semfuzz/subjects.h"

namespace semfuzz::detail {

const std::map<std::string, std::string>& embedded_graphs();

// Axis-aligned extent of a footprint in the Frenet frame of one lane.
struct FrenetBox {
  double start_s = 0.0;
  double end_s = 0.0;
  double start_l = 0.0;  // minimum l
  double end_l = 0.0;    // maximum l
};

FrenetBox frenet_box(const Polygon& poly, const Lane& lane);

// Records a comparison predicate and returns its outcome.
inline bool emit_lt(TraceSink& sink, size_t pred, double a, double b) {
  const bool taken = a < b;
  sink.record(pred, taken, std::abs(a - b));
  return taken;
}

inline bool emit_le(TraceSink& sink, size_t pred, double a, double b) {
  const bool taken = a <= b;
  sink.record(pred, taken, std::abs(a - b));
  return taken;
}

inline bool emit_bool(TraceSink& sink, size_t pred, bool taken) {
  sink.record(pred, taken, 0.0);
  return taken;
}

// Concatenated centerlines of the ego route.
Polyline route_polyline(const PlanningScenario& sc);

std::unique_ptr<Subject> make_v1(const SubjectConfig& c);
std::unique_ptr<Subject> make_v2(const SubjectConfig& c);
std::unique_ptr<Subject> make_v3(const SubjectConfig& c);
std::unique_ptr<Subject> make_v4(const SubjectConfig& c);
std::unique_ptr<Subject> make_v5(const SubjectConfig& c);
std::unique_ptr<Subject> make_v6(const SubjectConfig& c);
std::unique_ptr<Subject> make_v7(const SubjectConfig& c);
std::unique_ptr<Subject> make_v8(const SubjectConfig& c);
std::unique_ptr<Subject> make_v9(const SubjectConfig& c);

}  // namespace semfuzz::detail
