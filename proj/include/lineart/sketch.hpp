#pragma once

#include "error.hpp"
#include "geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace lineart {

/// A vector drawing: ordered strokes, each a polyline. `canvas_size` is 0
/// until the sketch has been normalized onto an s x s canvas.
struct Sketch {
  std::vector<Polyline> strokes;
  int canvas_size = 0;
  std::string id;

  bool normalized() const { return canvas_size > 0; }
  std::size_t point_count() const {
    std::size_t n = 0;
    for (const auto& s : strokes)
      n += s.size();
    return n;
  }
};

enum class StrokeFormat { ndjson_simplified, plain_json };

struct ParseResult {
  std::vector<Sketch> sketches;
  /// Strokes dropped because they had fewer than two distinct points.
  std::size_t skipped_strokes = 0;
};

namespace detail {

inline Polyline zip_stroke(const nlohmann::json& stroke, std::size_t record) {
  if (!stroke.is_array() || stroke.size() < 2 || !stroke[0].is_array() || !stroke[1].is_array())
    throw ParseError(record, "stroke must be an [x-list, y-list] pair");
  const auto& xs = stroke[0];
  const auto& ys = stroke[1];
  if (xs.size() != ys.size())
    throw ParseError(record, "x-list and y-list differ in length");
  Polyline line;
  line.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!xs[i].is_number() || !ys[i].is_number())
      throw ParseError(record, "non-numeric coordinate");
    const Point p{xs[i].get<double>(), ys[i].get<double>()};
    if (!is_finite(p))
      throw ParseError(record, "non-finite coordinate");
    if (line.empty() || !(line.back() == p))
      line.push_back(p);
  }
  return line;
}

inline Sketch parse_record(const nlohmann::json& rec, std::size_t record, std::size_t& skipped) {
  const nlohmann::json* drawing = &rec;
  Sketch sketch;
  if (rec.is_object()) {
    auto it = rec.find("drawing");
    if (it == rec.end())
      throw ParseError(record, "missing field 'drawing'");
    drawing = &*it;
    if (auto key = rec.find("key_id"); key != rec.end())
      sketch.id = key->is_string() ? key->get<std::string>() : key->dump();
  }
  if (!drawing->is_array())
    throw ParseError(record, "'drawing' must be a list of strokes");
  for (const auto& stroke : *drawing) {
    Polyline line = zip_stroke(stroke, record);
    if (line.size() < 2) {
      ++skipped;
      continue;
    }
    sketch.strokes.push_back(std::move(line));
  }
  if (sketch.strokes.empty())
    throw ParseError(record, "drawing has no usable stroke");
  return sketch;
}

} // namespace detail

/// Reads Quick-draw simplified drawings. NDJSON holds one object per line
/// with a `drawing` field; plain JSON is an array of such objects (or of bare
/// drawings). Coordinates are kept as given.
inline ParseResult parse_stroke_file(std::istream& in, StrokeFormat format) {
  ParseResult result;
  if (format == StrokeFormat::ndjson_simplified) {
    std::string line;
    std::size_t record = 0;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos)
        continue;
      nlohmann::json rec;
      try {
        rec = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(record, e.what());
      }
      result.sketches.push_back(detail::parse_record(rec, record, result.skipped_strokes));
      ++record;
    }
    return result;
  }

  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    return result;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, e.what());
  }
  if (!doc.is_array())
    throw ParseError(0, "plain JSON input must be an array of drawings");
  for (std::size_t i = 0; i < doc.size(); ++i)
    result.sketches.push_back(detail::parse_record(doc[i], i, result.skipped_strokes));
  return result;
}

inline ParseResult parse_stroke_string(const std::string& text, StrokeFormat format) {
  std::istringstream in(text);
  return parse_stroke_file(in, format);
}

/// Border kept free on every side of a normalized canvas so that stroke
/// ink and corner discs stay on-canvas.
inline double normalization_margin(double stroke_width, double corner_radius) {
  return std::ceil(stroke_width) + corner_radius;
}

/// Uniformly scales and translates the sketch so its tight bounding box is
/// centred in an s x s canvas with `normalization_margin` on all sides.
inline Sketch normalize(const Sketch& sketch, int s, double stroke_width, double corner_radius = 3.0) {
  if (sketch.strokes.empty())
    throw InvalidArgument("normalize: empty sketch");
  if (s < 32)
    throw InvalidArgument("normalize: canvas size must be at least 32");
  if (!(stroke_width > 0.0) || !(corner_radius >= 0.0))
    throw InvalidArgument("normalize: stroke width must be positive");
  const double margin = normalization_margin(stroke_width, corner_radius);
  const double avail = s - 2.0 * margin;
  if (avail <= 0.0)
    throw InvalidArgument("normalize: margin leaves no drawable area");

  const BBox box = bounding_box(sketch.strokes);
  const double extent = std::max(box.width(), box.height());
  if (!(extent > 0.0))
    throw InvalidArgument("zero-extent sketch");

  const double scale = avail / extent;
  const Point centre{(box.min_x + box.max_x) / 2.0, (box.min_y + box.max_y) / 2.0};
  const Point target{s / 2.0, s / 2.0};

  Sketch out;
  out.id = sketch.id;
  out.canvas_size = s;
  out.strokes.reserve(sketch.strokes.size());
  for (const auto& line : sketch.strokes) {
    Polyline mapped;
    mapped.reserve(line.size());
    for (const auto& p : line)
      mapped.push_back(target + scale * (p - centre));
    out.strokes.push_back(std::move(mapped));
  }
  return out;
}

inline nlohmann::json to_json(const Sketch& sketch) {
  nlohmann::json strokes = nlohmann::json::array();
  for (const auto& line : sketch.strokes) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : line)
      pts.push_back({p.x, p.y});
    strokes.push_back(std::move(pts));
  }
  nlohmann::json j{{"canvas_size", sketch.canvas_size}, {"strokes", std::move(strokes)}};
  if (!sketch.id.empty())
    j["id"] = sketch.id;
  return j;
}

/// One Quick-draw simplified record: `{"key_id", "drawing": [[xs], [ys]]...}`.
inline nlohmann::json to_quickdraw(const Sketch& sketch) {
  nlohmann::json drawing = nlohmann::json::array();
  for (const auto& line : sketch.strokes) {
    nlohmann::json xs = nlohmann::json::array(), ys = nlohmann::json::array();
    for (const auto& p : line) {
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
    drawing.push_back({std::move(xs), std::move(ys)});
  }
  nlohmann::json j{{"drawing", std::move(drawing)}};
  if (!sketch.id.empty())
    j["key_id"] = sketch.id;
  return j;
}

inline Sketch sketch_from_json(const nlohmann::json& j) {
  Sketch sketch;
  try {
    sketch.canvas_size = j.at("canvas_size").get<int>();
    for (const auto& stroke : j.at("strokes")) {
      Polyline line;
      for (const auto& p : stroke)
        line.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      sketch.strokes.push_back(std::move(line));
    }
    if (auto it = j.find("id"); it != j.end())
      sketch.id = it->get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, e.what());
  }
  return sketch;
}

} // namespace lineart
