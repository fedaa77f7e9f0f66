#pragma once

#include "error.hpp"
#include "geometry.hpp"
#include "image.hpp"
#include "raster.hpp"
#include "sketch.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <utility>
#include <vector>

namespace lineart {

struct CornerSet {
  std::vector<Point> points;
  double corner_radius = 3.0;
};

/// Vertices and undirected edges (i < j, sorted) of a stroke graph.
struct GraphData {
  std::vector<Point> vertices;
  std::vector<std::pair<int, int>> edges;
};

namespace detail {

struct SketchSegment {
  Segment seg;
  std::size_t stroke;
};

/// A corner candidate before deduplication, with every segment it lies on.
struct RawCorner {
  Point p;
  std::vector<std::pair<std::size_t, double>> on_segments; // (segment index, parameter)
};

inline bool share_endpoint(const Segment& s, const Segment& t) {
  return s.a == t.a || s.a == t.b || s.b == t.a || s.b == t.b;
}

struct CornerAnalysis {
  std::vector<SketchSegment> segments;
  std::vector<RawCorner> raw;
  std::vector<int> cluster_of; // raw index -> merged corner
  std::vector<Point> merged;
};

inline CornerAnalysis analyse_corners(const Sketch& sketch, double merge_radius) {
  CornerAnalysis a;
  for (std::size_t s = 0; s < sketch.strokes.size(); ++s) {
    const auto& line = sketch.strokes[s];
    const std::size_t first = a.segments.size();
    for (std::size_t i = 1; i < line.size(); ++i)
      a.segments.push_back({{line[i - 1], line[i]}, s});
    for (std::size_t i = 0; i < line.size(); ++i) {
      RawCorner rc{line[i], {}};
      if (i > 0)
        rc.on_segments.emplace_back(first + i - 1, 1.0);
      if (i + 1 < line.size())
        rc.on_segments.emplace_back(first + i, 0.0);
      a.raw.push_back(std::move(rc));
    }
  }

  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    for (std::size_t j = i + 1; j < a.segments.size(); ++j) {
      const Segment& si = a.segments[i].seg;
      const Segment& sj = a.segments[j].seg;
      if (share_endpoint(si, sj))
        continue;
      if (auto hit = segment_intersection(si, sj)) {
        a.raw.push_back({*hit,
                         {{i, std::clamp(project_param(si, *hit), 0.0, 1.0)},
                          {j, std::clamp(project_param(sj, *hit), 0.0, 1.0)}}});
      }
    }
  }

  // Greedy clustering in discovery order; the first member anchors a cluster.
  std::vector<Point> anchors;
  std::vector<Point> sums;
  std::vector<int> counts;
  a.cluster_of.resize(a.raw.size());
  for (std::size_t i = 0; i < a.raw.size(); ++i) {
    const Point p = a.raw[i].p;
    int found = -1;
    for (std::size_t c = 0; c < anchors.size(); ++c) {
      if (distance(anchors[c], p) <= merge_radius) {
        found = static_cast<int>(c);
        break;
      }
    }
    if (found < 0) {
      found = static_cast<int>(anchors.size());
      anchors.push_back(p);
      sums.push_back({0.0, 0.0});
      counts.push_back(0);
    }
    sums[found] = sums[found] + p;
    ++counts[found];
    a.cluster_of[i] = found;
  }
  a.merged.reserve(anchors.size());
  for (std::size_t c = 0; c < anchors.size(); ++c)
    a.merged.push_back((1.0 / counts[c]) * sums[c]);
  return a;
}

} // namespace detail

/// Every polyline vertex plus every pairwise segment intersection, merged
/// within `corner_radius` of each other.
inline CornerSet collect_corners(const Sketch& sketch, double corner_radius = 3.0) {
  return {detail::analyse_corners(sketch, corner_radius).merged, corner_radius};
}

/// Ground-truth stroke graph: corners as vertices; edges join consecutive
/// corners along each segment (segments are split at intersections).
inline GraphData ground_truth_graph(const Sketch& sketch, double corner_radius = 3.0) {
  const auto a = detail::analyse_corners(sketch, corner_radius);
  std::vector<std::vector<std::pair<double, int>>> along(a.segments.size());
  for (std::size_t i = 0; i < a.raw.size(); ++i)
    for (const auto& [seg, t] : a.raw[i].on_segments)
      along[seg].emplace_back(t, a.cluster_of[i]);

  std::set<std::pair<int, int>> edges;
  for (auto& pts : along) {
    std::sort(pts.begin(), pts.end());
    for (std::size_t k = 1; k < pts.size(); ++k) {
      const int u = pts[k - 1].second, v = pts[k].second;
      if (u != v)
        edges.emplace(std::min(u, v), std::max(u, v));
    }
  }
  return {a.merged, {edges.begin(), edges.end()}};
}

struct LabeledSample {
  GrayImage input;
  LabelImage labels;
};

/// Input image plus the three-class labelling: corner discs clipped to ink,
/// the remaining ink as lines, everything else background.
inline LabeledSample make_labels(const Sketch& sketch, double stroke_width, double corner_radius) {
  LabeledSample out;
  out.input = rasterize(sketch, stroke_width);
  const int w = out.input.width(), h = out.input.height();
  out.labels = LabelImage(w, h, kBackground);
  for (std::size_t i = 0; i < out.input.size(); ++i)
    if (out.input.pixels()[i] > 0.5)
      out.labels.pixels()[i] = kLines;

  const CornerSet corners = collect_corners(sketch, corner_radius);
  const int reach = static_cast<int>(std::ceil(corner_radius));
  for (const auto& c : corners.points) {
    const int cx = detail::round_coord(c.x), cy = detail::round_coord(c.y);
    for (int y = std::max(0, cy - reach - 1); y <= std::min(h - 1, cy + reach + 1); ++y)
      for (int x = std::max(0, cx - reach - 1); x <= std::min(w - 1, cx + reach + 1); ++x)
        if (out.labels(x, y) != kBackground && distance(c, {double(x), double(y)}) <= corner_radius)
          out.labels(x, y) = kCorners;
  }
  return out;
}

/// One-hot probabilities for a hard labelling.
inline ProbabilityMap labels_to_probmap(const LabelImage& labels, int classes = kNumClasses) {
  ProbabilityMap p(classes, labels.width(), labels.height(), 0.0);
  for (int y = 0; y < labels.height(); ++y)
    for (int x = 0; x < labels.width(); ++x) {
      const int c = labels(x, y);
      if (c >= classes)
        throw InvalidArgument("label id out of range");
      p(c, x, y) = 1.0;
    }
  return p;
}

/// Most probable class per pixel; ties resolve to the lowest id.
inline LabelImage argmax_labels(const ProbabilityMap& p) {
  LabelImage out(p.width(), p.height());
  for (int y = 0; y < p.height(); ++y)
    for (int x = 0; x < p.width(); ++x) {
      int best = 0;
      for (int c = 1; c < p.classes(); ++c)
        if (p(c, x, y) > p(best, x, y))
          best = c;
      out(x, y) = static_cast<std::uint8_t>(best);
    }
  return out;
}

} // namespace lineart
