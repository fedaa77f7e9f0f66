#pragma once

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace lineart {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Point&, const Point&) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Ordered list of at least two points; consecutive points distinct.
using Polyline = std::vector<Point>;

struct Segment {
  Point a;
  Point b;
};

/// Determinants below this magnitude are treated as parallel.
inline constexpr double kParallelEps = 1e-12;

/// Unique intersection point of two closed segments, if any. Parallel and
/// collinear-overlapping pairs report nothing.
inline std::optional<Point> segment_intersection(const Segment& s1, const Segment& s2) {
  const Point r = s1.b - s1.a;
  const Point s = s2.b - s2.a;
  const double det = cross(r, s);
  if (std::abs(det) < kParallelEps)
    return std::nullopt;
  const Point qp = s2.a - s1.a;
  const double t = cross(qp, s) / det;
  const double u = cross(qp, r) / det;
  // Relative slack so touching endpoints survive rounding.
  constexpr double eps = 1e-12;
  if (t < -eps || t > 1.0 + eps || u < -eps || u > 1.0 + eps)
    return std::nullopt;
  const double tc = std::clamp(t, 0.0, 1.0);
  return s1.a + tc * r;
}

/// Parameter of the orthogonal projection of p onto the line through seg.
inline double project_param(const Segment& seg, Point p) {
  const Point d = seg.b - seg.a;
  const double len2 = dot(d, d);
  return len2 > 0.0 ? dot(p - seg.a, d) / len2 : 0.0;
}

/// Euclidean distance from p to the closed segment.
inline double distance_to_segment(const Segment& seg, Point p) {
  const double t = std::clamp(project_param(seg, p), 0.0, 1.0);
  return distance(p, seg.a + t * (seg.b - seg.a));
}

struct BBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
};

/// Tight bounding box of every point in every polyline. Requires at least one point.
inline BBox bounding_box(const std::vector<Polyline>& strokes) {
  bool first = true;
  BBox box;
  for (const auto& line : strokes) {
    for (const auto& p : line) {
      if (first) {
        box = {p.x, p.y, p.x, p.y};
        first = false;
      } else {
        box.min_x = std::min(box.min_x, p.x);
        box.min_y = std::min(box.min_y, p.y);
        box.max_x = std::max(box.max_x, p.x);
        box.max_y = std::max(box.max_y, p.y);
      }
    }
  }
  if (first)
    throw InvalidArgument("bounding box of an empty point set");
  return box;
}

} // namespace lineart
