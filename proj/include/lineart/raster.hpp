#pragma once

#include "error.hpp"
#include "geometry.hpp"
#include "image.hpp"
#include "sketch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace lineart {

namespace detail {

inline int round_coord(double v) { return static_cast<int>(std::floor(v + 0.5)); }

} // namespace detail

/// Visits the pixels covered by a straight segment of the given width.
/// Widths up to 1 px use the Bresenham run between the rounded endpoints;
/// wider strokes cover every pixel centre within width/2 of the segment.
/// Pixels outside [0, w) x [0, h) are skipped.
template <class Fn>
void for_each_stroke_pixel(Point a, Point b, double width, int w, int h, Fn&& fn) {
  if (width <= 1.0) {
    int x0 = detail::round_coord(a.x), y0 = detail::round_coord(a.y);
    const int x1 = detail::round_coord(b.x), y1 = detail::round_coord(b.y);
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
      if (x0 >= 0 && y0 >= 0 && x0 < w && y0 < h)
        fn(x0, y0);
      if (x0 == x1 && y0 == y1)
        break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
    return;
  }

  const double half = width / 2.0;
  const Segment seg{a, b};
  const int min_x = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - half)));
  const int max_x = std::min(w - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + half)));
  const int min_y = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - half)));
  const int max_y = std::min(h - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + half)));
  for (int y = min_y; y <= max_y; ++y)
    for (int x = min_x; x <= max_x; ++x)
      if (distance_to_segment(seg, {double(x), double(y)}) <= half + 1e-9)
        fn(x, y);
}

/// Draws polylines as binary ink (1.0) on a blank w x h image.
inline GrayImage draw_polylines(const std::vector<Polyline>& strokes, int w, int h, double stroke_width) {
  if (!(stroke_width > 0.0))
    throw InvalidArgument("stroke width must be positive");
  GrayImage img(w, h, 0.0);
  for (const auto& line : strokes)
    for (std::size_t i = 1; i < line.size(); ++i)
      for_each_stroke_pixel(line[i - 1], line[i], stroke_width, w, h, [&](int x, int y) { img(x, y) = 1.0; });
  return img;
}

/// Hard-edged rendering of a normalized sketch onto its canvas.
inline GrayImage rasterize(const Sketch& sketch, double stroke_width) {
  if (!sketch.normalized())
    throw InvalidArgument("rasterize: sketch is not normalized (canvas_size = 0)");
  return draw_polylines(sketch.strokes, sketch.canvas_size, sketch.canvas_size, stroke_width);
}

} // namespace lineart
