#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace semfuzz {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double k) const { return {x * k, y * k}; }
  bool operator==(const Point2& o) const = default;
};

inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Point2& a, const Point2& b) { return norm(a - b); }
inline Point2 unit_vector(double heading) { return {std::cos(heading), std::sin(heading)}; }
inline bool is_finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Wraps an angle into (-pi, pi].
double normalize_angle(double a);

// Polygon vertices in counter-clockwise order.
using Polygon = std::vector<Point2>;
using Polyline = std::vector<Point2>;

class Lane {
 public:
  Lane(int id, std::vector<Point2> centerline, double width,
       std::vector<int> successors = {}, std::vector<int> predecessors = {});

  int id() const { return id_; }
  const std::vector<Point2>& centerline() const { return centerline_; }
  double width() const { return width_; }
  double half_width() const { return 0.5 * width_; }
  double length() const { return cum_s_.back(); }
  const std::vector<int>& successors() const { return successors_; }
  const std::vector<int>& predecessors() const { return predecessors_; }
  std::vector<int>& mutable_predecessors() { return predecessors_; }

  // Arclength at centerline vertex i.
  double vertex_s(size_t i) const { return cum_s_[i]; }
  // Index of the segment containing s (the first one when s sits on a vertex).
  size_t segment_at(double s) const;
  double heading(double s) const;
  Point2 point_at(double s) const;

 private:
  int id_;
  std::vector<Point2> centerline_;
  double width_;
  std::vector<int> successors_;
  std::vector<int> predecessors_;
  std::vector<double> cum_s_;
};

class LaneMap {
 public:
  LaneMap() = default;
  explicit LaneMap(std::vector<Lane> lanes);

  const std::vector<Lane>& lanes() const { return lanes_; }
  bool empty() const { return lanes_.empty(); }
  bool contains(int id) const;
  // Throws ConfigError for unknown ids.
  const Lane& lane(int id) const;

 private:
  std::vector<Lane> lanes_;  // sorted by id
};

// Lateral offset l is positive to the left of the travel direction.
struct FrenetPose {
  double s = 0.0;
  double l = 0.0;
  int lane_id = -1;
};

struct LaneProjection {
  double s = 0.0;
  double l = 0.0;
  double dist = 0.0;
  Point2 foot;
  size_t segment = 0;
};

// Nearest-point projection onto one lane centerline, s clamped to [0, length].
LaneProjection project(const Point2& pos, const Lane& lane);

// Projection onto the nearest lane; ties go to the lowest lane id.
FrenetPose transform(const Point2& pos, const LaneMap& map);

Point2 frenet_to_world(double s, double l, const Lane& lane);

Polygon object_polygon(const Point2& center, double length, double width, double heading);

double polygon_area(const Polygon& poly);  // signed, positive for CCW
bool point_in_polygon(const Point2& p, const Polygon& poly);
bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d);
double point_segment_distance(const Point2& p, const Point2& a, const Point2& b);
double segment_segment_distance(const Point2& a, const Point2& b, const Point2& c, const Point2& d);
bool polygons_overlap(const Polygon& a, const Polygon& b);
bool segment_overlaps_polygon(const Point2& a, const Point2& b, const Polygon& poly);

// Minimum distance between a polyline and a polygon; 0 when they touch or overlap.
double min_lateral_distance(const Polyline& line, const Polygon& poly);

// Half of the footprint's extent along the normal of a direction.
double lateral_half_extent(double length, double width, double heading, double ref_heading);

}  // namespace semfuzz
