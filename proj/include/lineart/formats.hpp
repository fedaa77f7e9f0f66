#pragma once

#include "error.hpp"
#include "geometry.hpp"
#include "image.hpp"
#include "labels.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace lineart {

inline nlohmann::json graph_to_json(const GraphData& g) {
  nlohmann::json verts = nlohmann::json::array();
  for (const auto& p : g.vertices)
    verts.push_back({p.x, p.y});
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [i, j] : g.edges)
    edges.push_back({i, j});
  return {{"vertices", std::move(verts)}, {"edges", std::move(edges)}};
}

inline GraphData graph_from_json(const nlohmann::json& j) {
  GraphData g;
  try {
    for (const auto& v : j.at("vertices"))
      g.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    for (const auto& e : j.at("edges")) {
      int a = e.at(0).get<int>(), b = e.at(1).get<int>();
      if (a == b || a < 0 || b < 0 || a >= int(g.vertices.size()) || b >= int(g.vertices.size()))
        throw ParseError(0, "graph edge [" + std::to_string(a) + "," + std::to_string(b) + "] is invalid");
      g.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, e.what());
  }
  return g;
}

inline nlohmann::json strokes_to_json(const std::vector<Polyline>& strokes) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& line : strokes) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : line)
      pts.push_back({p.x, p.y});
    arr.push_back(std::move(pts));
  }
  return {{"strokes", std::move(arr)}};
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out)
    throw IoError("write failed for '" + path + "'");
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) { write_text_file(path, j.dump(2) + "\n"); }

// Probability-map raw format: one line of JSON header
// {"k":K,"h":H,"w":W,"order":"khw"} terminated by '\n', followed by
// K*H*W little-endian float32 values in plane-major order.

namespace detail {

inline std::uint32_t float_bits(float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, sizeof u);
  return u;
}

} // namespace detail

inline std::string encode_probmap(const ProbabilityMap& p) {
  nlohmann::json header{{"k", p.classes()}, {"h", p.height()}, {"w", p.width()}, {"order", "khw"}};
  std::string out = header.dump() + "\n";
  out.reserve(out.size() + p.data().size() * 4);
  for (double v : p.data()) {
    const std::uint32_t u = detail::float_bits(static_cast<float>(v));
    for (int b = 0; b < 4; ++b)
      out.push_back(static_cast<char>((u >> (8 * b)) & 0xFFu));
  }
  return out;
}

inline ProbabilityMap decode_probmap(const std::string& bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos)
    throw ParseError(0, "probability map: missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(0, nl));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("probability map header: ") + e.what());
  }
  int k = 0, h = 0, w = 0;
  try {
    k = header.at("k").get<int>();
    h = header.at("h").get<int>();
    w = header.at("w").get<int>();
    if (header.value("order", std::string("khw")) != "khw")
      throw ParseError(0, "probability map: only 'khw' order is supported");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("probability map header: ") + e.what());
  }
  if (k <= 0 || h <= 0 || w <= 0)
    throw ParseError(0, "probability map: dimensions must be positive");
  ProbabilityMap p(k, w, h);
  const std::size_t need = p.data().size() * 4;
  if (bytes.size() - nl - 1 != need)
    throw ParseError(0, "probability map: expected " + std::to_string(need) + " payload bytes, got " +
                          std::to_string(bytes.size() - nl - 1));
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + nl + 1);
  for (std::size_t i = 0; i < p.data().size(); ++i) {
    std::uint32_t u = 0;
    for (int b = 0; b < 4; ++b)
      u |= static_cast<std::uint32_t>(raw[4 * i + b]) << (8 * b);
    float f;
    std::memcpy(&f, &u, sizeof f);
    p.data()[i] = f;
  }
  return p;
}

inline std::string read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ProbabilityMap read_probmap(const std::string& path) { return decode_probmap(read_binary_file(path)); }
inline void write_probmap(const std::string& path, const ProbabilityMap& p) { write_text_file(path, encode_probmap(p)); }

} // namespace lineart
