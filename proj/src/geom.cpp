#include "semfuzz/geom.h"

#include <algorithm>
#include <limits>
#include <numbers>

namespace semfuzz {

double normalize_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, kTwoPi);
  if (r > std::numbers::pi) r -= kTwoPi;
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

Lane::Lane(int id, std::vector<Point2> centerline, double width, std::vector<int> successors,
           std::vector<int> predecessors)
    : id_(id),
      centerline_(std::move(centerline)),
      width_(width),
      successors_(std::move(successors)),
      predecessors_(std::move(predecessors)) {
  if (centerline_.size() < 2) {
    throw ValidationError("lane " + std::to_string(id_) + ": centerline needs at least 2 points");
  }
  if (!(width_ > 0.0) || !std::isfinite(width_)) {
    throw ValidationError("lane " + std::to_string(id_) + ": width must be positive");
  }
  cum_s_.reserve(centerline_.size());
  cum_s_.push_back(0.0);
  for (size_t i = 1; i < centerline_.size(); ++i) {
    if (!is_finite(centerline_[i]) || !is_finite(centerline_[i - 1])) {
      throw ValidationError("lane " + std::to_string(id_) + ": non-finite centerline point");
    }
    const double d = distance(centerline_[i], centerline_[i - 1]);
    if (d <= 0.0) {
      throw ValidationError("lane " + std::to_string(id_) +
                            ": consecutive centerline points must be distinct");
    }
    cum_s_.push_back(cum_s_.back() + d);
  }
}

size_t Lane::segment_at(double s) const {
  auto it = std::lower_bound(cum_s_.begin() + 1, cum_s_.end(), s);
  if (it == cum_s_.end()) return cum_s_.size() - 2;
  return static_cast<size_t>(it - cum_s_.begin()) - 1;
}

double Lane::heading(double s) const {
  const size_t k = segment_at(std::clamp(s, 0.0, length()));
  const Point2 d = centerline_[k + 1] - centerline_[k];
  return std::atan2(d.y, d.x);
}

Point2 Lane::point_at(double s) const { return frenet_to_world(std::clamp(s, 0.0, length()), 0.0, *this); }

LaneMap::LaneMap(std::vector<Lane> lanes) : lanes_(std::move(lanes)) {
  std::sort(lanes_.begin(), lanes_.end(), [](const Lane& a, const Lane& b) { return a.id() < b.id(); });
  for (size_t i = 1; i < lanes_.size(); ++i) {
    if (lanes_[i].id() == lanes_[i - 1].id()) {
      throw ConfigError("duplicate lane id " + std::to_string(lanes_[i].id()));
    }
  }
}

bool LaneMap::contains(int id) const {
  auto it = std::lower_bound(lanes_.begin(), lanes_.end(), id,
                             [](const Lane& a, int v) { return a.id() < v; });
  return it != lanes_.end() && it->id() == id;
}

const Lane& LaneMap::lane(int id) const {
  auto it = std::lower_bound(lanes_.begin(), lanes_.end(), id,
                             [](const Lane& a, int v) { return a.id() < v; });
  if (it == lanes_.end() || it->id() != id) throw ConfigError("unknown lane id " + std::to_string(id));
  return *it;
}

LaneProjection project(const Point2& pos, const Lane& lane) {
  const auto& pts = lane.centerline();
  LaneProjection best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k + 1 < pts.size(); ++k) {
    const Point2 a = pts[k];
    const Point2 d = pts[k + 1] - a;
    const double len2 = dot(d, d);
    double t = dot(pos - a, d) / len2;
    t = std::isnan(t) ? 0.0 : std::clamp(t, 0.0, 1.0);
    const Point2 foot = a + d * t;
    const Point2 r = pos - foot;
    const double d2 = dot(r, r);
    if (k == 0 || d2 < best_d2) {  // the first segment is kept when distances overflow
      best_d2 = d2;
      best.segment = k;
      best.foot = foot;
      best.s = lane.vertex_s(k) + t * std::sqrt(len2);
    }
  }
  best.dist = std::sqrt(best_d2);
  const Point2 d = pts[best.segment + 1] - pts[best.segment];
  const double side = cross(d, pos - best.foot);
  best.l = side < 0.0 ? -best.dist : best.dist;
  return best;
}

FrenetPose transform(const Point2& pos, const LaneMap& map) {
  if (map.empty()) throw ConfigError("transform: lane map is empty");
  FrenetPose out;
  double best = std::numeric_limits<double>::infinity();
  for (const Lane& lane : map.lanes()) {  // ascending id, strict < keeps the lowest on ties
    const LaneProjection p = project(pos, lane);
    if (out.lane_id < 0 || p.dist < best) {
      best = p.dist;
      out = {p.s, p.l, lane.id()};
    }
  }
  return out;
}

Point2 frenet_to_world(double s, double l, const Lane& lane) {
  constexpr double kSlack = 1e-9;
  if (!(s >= -kSlack && s <= lane.length() + kSlack)) {
    throw RangeError("frenet_to_world: s=" + std::to_string(s) + " outside lane " +
                     std::to_string(lane.id()));
  }
  s = std::clamp(s, 0.0, lane.length());
  const size_t k = lane.segment_at(s);
  const Point2 a = lane.centerline()[k];
  const Point2 b = lane.centerline()[k + 1];
  const double seg = lane.vertex_s(k + 1) - lane.vertex_s(k);
  const Point2 t = (b - a) * (1.0 / seg);
  const Point2 n{-t.y, t.x};
  return a + t * (s - lane.vertex_s(k)) + n * l;
}

Polygon object_polygon(const Point2& center, double length, double width, double heading) {
  if (!(length > 0.0) || !(width > 0.0)) {
    throw ValidationError("object_polygon: length and width must be positive");
  }
  const Point2 f = unit_vector(heading) * (0.5 * length);
  const Point2 s = Point2{-std::sin(heading), std::cos(heading)} * (0.5 * width);
  return {center + f - s, center + f + s, center - f + s, center - f - s};
}

double polygon_area(const Polygon& poly) {
  double a = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

bool point_in_polygon(const Point2& p, const Polygon& poly) {
  bool inside = false;
  for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

namespace {

int orientation(const Point2& a, const Point2& b, const Point2& c) {
  const double v = cross(b - a, c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 d = b - a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return distance(p, a + d * t);
}

double segment_segment_distance(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

bool segment_overlaps_polygon(const Point2& a, const Point2& b, const Polygon& poly) {
  if (point_in_polygon(a, poly) || point_in_polygon(b, poly)) return true;
  for (size_t i = 0; i < poly.size(); ++i) {
    if (segments_intersect(a, b, poly[i], poly[(i + 1) % poly.size()])) return true;
  }
  return false;
}

bool polygons_overlap(const Polygon& a, const Polygon& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (segment_overlaps_polygon(a[i], a[(i + 1) % a.size()], b)) return true;
  }
  return !b.empty() && point_in_polygon(b[0], a);
}

double min_lateral_distance(const Polyline& line, const Polygon& poly) {
  double best = std::numeric_limits<double>::infinity();
  if (line.size() == 1) {
    if (point_in_polygon(line[0], poly)) return 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
      best = std::min(best, point_segment_distance(line[0], poly[i], poly[(i + 1) % poly.size()]));
    }
    return best;
  }
  for (size_t k = 0; k + 1 < line.size(); ++k) {
    if (point_in_polygon(line[k], poly)) return 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
      const double d =
          segment_segment_distance(line[k], line[k + 1], poly[i], poly[(i + 1) % poly.size()]);
      if (d == 0.0) return 0.0;
      best = std::min(best, d);
    }
  }
  return best;
}

double lateral_half_extent(double length, double width, double heading, double ref_heading) {
  const double rel = heading - ref_heading;
  return 0.5 * (length * std::abs(std::sin(rel)) + width * std::abs(std::cos(rel)));
}

}  // namespace semfuzz
