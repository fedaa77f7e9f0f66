#pragma once

#include "error.hpp"
#include "geometry.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace lineart {

/// Physical drawing area of the plotter.
struct MachineFrame {
  double box_size_mm = 64.0;
  Point origin_mm{25.0, 25.0};
  double safe_z_mm = -5.0;
  /// Multiplier from millimetres to machine units (0.1 for cm, 1/25.4 for inch).
  double unit_scale = 1.0;
  /// Emitted verbatim before the program when non-empty.
  std::string header;
};

struct GcodeProgram {
  std::vector<std::string> lines;

  std::string text() const {
    std::string out;
    for (const auto& l : lines) {
      out += l;
      out += '\n';
    }
    return out;
  }
};

namespace detail {

inline std::string fixed2(double v) {
  if (std::abs(v) < 0.005)
    v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

/// Two decimals with trailing zeros (and a bare point) dropped.
inline std::string trimmed2(double v) {
  std::string s = fixed2(v);
  while (!s.empty() && s.back() == '0')
    s.pop_back();
  if (!s.empty() && s.back() == '.')
    s.pop_back();
  return s;
}

} // namespace detail

/// Plotter program: an initial pen lift, then per stroke a rapid to its
/// first vertex, pen down, one move per remaining vertex, pen up. Canvas y
/// grows downwards, machine y upwards. Assumes absolute positioning.
inline GcodeProgram to_gcode(const std::vector<Polyline>& strokes, int canvas_size, const MachineFrame& frame = {}) {
  if (canvas_size <= 0)
    throw InvalidArgument("to_gcode: canvas size must be positive");
  if (!(frame.box_size_mm > 0.0))
    throw InvalidArgument("to_gcode: box size must be positive");
  const double s = canvas_size;
  const std::string lift = "G00 Z" + detail::trimmed2(frame.safe_z_mm * frame.unit_scale);
  GcodeProgram prog;
  if (!frame.header.empty())
    prog.lines.push_back(frame.header);
  prog.lines.push_back(lift);
  for (std::size_t k = 0; k < strokes.size(); ++k) {
    const auto& line = strokes[k];
    if (line.size() < 2)
      throw InvalidArgument("to_gcode: stroke " + std::to_string(k) + " has fewer than two vertices");
    for (std::size_t i = 0; i < line.size(); ++i) {
      const Point p = line[i];
      if (!(p.x >= 0.0 && p.x <= s && p.y >= 0.0 && p.y <= s))
        throw InvalidArgument("to_gcode: stroke " + std::to_string(k) + " vertex " + std::to_string(i) +
                              " lies outside the canvas");
      const double x = (frame.origin_mm.x + p.x / s * frame.box_size_mm) * frame.unit_scale;
      const double y = (frame.origin_mm.y + (1.0 - p.y / s) * frame.box_size_mm) * frame.unit_scale;
      prog.lines.push_back("X" + detail::fixed2(x) + " Y" + detail::fixed2(y));
      if (i == 0)
        prog.lines.push_back("G01 Z0");
    }
    prog.lines.push_back(lift);
  }
  return prog;
}

/// One `<path d="M x0 y0 L x1 y1 ...">` per stroke in canvas units.
inline std::string to_svg(const std::vector<Polyline>& strokes, int canvas_size) {
  const std::string s = std::to_string(canvas_size);
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                    "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    s + "\" height=\"" + s + "\" viewBox=\"0 0 " + s + " " + s + "\">\n" +
                    "<g fill=\"none\" stroke=\"black\" stroke-width=\"1\" stroke-linecap=\"round\" "
                    "stroke-linejoin=\"round\">\n";
  for (const auto& line : strokes) {
    if (line.empty())
      continue;
    std::string d = "M " + detail::trimmed2(line[0].x) + " " + detail::trimmed2(line[0].y);
    for (std::size_t i = 1; i < line.size(); ++i)
      d += " L " + detail::trimmed2(line[i].x) + " " + detail::trimmed2(line[i].y);
    out += "<path d=\"" + d + "\" />\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

} // namespace lineart
