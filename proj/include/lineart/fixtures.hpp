#pragma once

#include "dataset.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "labels.hpp"
#include "sketch.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace lineart {

/// Procedural line-art shapes used as hermetic test data.
enum class FixtureKind { line, x_cross, triangle, square, star, grid_hatch, zigzag, house };

inline constexpr std::array<FixtureKind, 8> kAllFixtureKinds = {
  FixtureKind::line, FixtureKind::x_cross, FixtureKind::triangle, FixtureKind::square,
  FixtureKind::star, FixtureKind::grid_hatch, FixtureKind::zigzag, FixtureKind::house};

inline std::string_view fixture_name(FixtureKind k) {
  switch (k) {
  case FixtureKind::line: return "line";
  case FixtureKind::x_cross: return "x_cross";
  case FixtureKind::triangle: return "triangle";
  case FixtureKind::square: return "square";
  case FixtureKind::star: return "star";
  case FixtureKind::grid_hatch: return "grid_hatch";
  case FixtureKind::zigzag: return "zigzag";
  case FixtureKind::house: return "house";
  }
  return "?";
}

inline std::optional<FixtureKind> fixture_from_name(std::string_view name) {
  for (auto k : kAllFixtureKinds)
    if (fixture_name(k) == name)
      return k;
  return std::nullopt;
}

namespace detail {

/// Uniform double in [lo, hi) from the raw 64-bit stream, identical on every platform.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline Point polar(double r, double a) { return {r * std::cos(a), r * std::sin(a)}; }

inline Sketch canonical_fixture(FixtureKind kind, std::mt19937_64& rng) {
  constexpr double pi = std::numbers::pi;
  Sketch s;
  switch (kind) {
  case FixtureKind::line:
    s.strokes = {{{0, 0}, {100, uniform(rng, -30, 30)}}};
    break;
  case FixtureKind::x_cross: {
    const double a = uniform(rng, 0.7, 1.3);
    const double t = uniform(rng, 0.3, 0.7), u = uniform(rng, 0.3, 0.7);
    const Point c{0, 0};
    const Point d1 = polar(100, 0), d2 = polar(100, a * pi / 2);
    s.strokes = {{c - t * d1, c + (1 - t) * d1}, {c - u * d2, c + (1 - u) * d2}};
    break;
  }
  case FixtureKind::triangle: {
    const double a0 = uniform(rng, 0, 2 * pi);
    Polyline tri;
    for (int i = 0; i < 3; ++i)
      tri.push_back(polar(uniform(rng, 80, 100), a0 + i * 2 * pi / 3 + uniform(rng, -0.3, 0.3)));
    if (rng() % 2)
      s.strokes = {{tri[0], tri[1], tri[2], tri[0]}};
    else
      s.strokes = {{tri[0], tri[1]}, {tri[1], tri[2]}, {tri[2], tri[0]}};
    break;
  }
  case FixtureKind::square: {
    const double w = 100, h = uniform(rng, 60, 100);
    const Point a{0, 0}, b{w, 0}, c{w, h}, d{0, h};
    if (rng() % 2)
      s.strokes = {{a, b, c, d, a}};
    else
      s.strokes = {{a, b, c}, {c, d, a}};
    break;
  }
  case FixtureKind::star: {
    const double a0 = uniform(rng, 0, 2 * pi);
    std::array<Point, 5> tip;
    for (int i = 0; i < 5; ++i)
      tip[i] = polar(100, a0 + i * 2 * pi / 5);
    s.strokes = {{tip[0], tip[2], tip[4], tip[1], tip[3], tip[0]}};
    break;
  }
  case FixtureKind::grid_hatch: {
    const int rows = uniform_int(rng, 2, 3), cols = uniform_int(rng, 2, 3);
    const double span = 100, over = uniform(rng, 12, 20);
    for (int r = 0; r < rows; ++r) {
      const double y = (r + 0.5) * span / rows + uniform(rng, -4, 4);
      s.strokes.push_back({{-over, y + uniform(rng, -3, 3)}, {span + over, y + uniform(rng, -3, 3)}});
    }
    for (int c = 0; c < cols; ++c) {
      const double x = (c + 0.5) * span / cols + uniform(rng, -4, 4);
      s.strokes.push_back({{x + uniform(rng, -3, 3), -over}, {x + uniform(rng, -3, 3), span + over}});
    }
    break;
  }
  case FixtureKind::zigzag: {
    const int n = uniform_int(rng, 3, 6);
    Polyline z;
    for (int i = 0; i <= n; ++i)
      z.push_back({i * 100.0 / n, (i % 2 ? 1.0 : -1.0) * uniform(rng, 15, 30)});
    s.strokes = {z};
    break;
  }
  case FixtureKind::house: {
    const double w = 100, h = uniform(rng, 60, 90), roof = uniform(rng, 35, 60);
    const Point a{0, h}, b{w, h}, c{w, 0}, d{0, 0}, apex{w * uniform(rng, 0.35, 0.65), -roof};
    s.strokes = {{a, b, c, d, a}, {d, apex, c}};
    break;
  }
  }
  return s;
}

} // namespace detail

/// Geometric constraints that keep every corner's blob distinct and clear
/// of unrelated strokes once rasterized.
struct FixtureConstraints {
  double min_corner_separation = 14.0;
  double min_segment_clearance = 9.0;
  double min_angle_deg = 25.0;
};

inline FixtureConstraints default_constraints(const RasterParams& p) {
  FixtureConstraints c;
  c.min_corner_separation = 4.0 * p.corner_radius + 2.0 * p.stroke_width;
  c.min_segment_clearance = 2.0 * p.corner_radius + p.stroke_width + 2.0;
  return c;
}

/// True when the normalized sketch satisfies the constraints.
inline bool fixture_is_well_separated(const Sketch& sk, double corner_radius, const FixtureConstraints& c) {
  const auto g = ground_truth_graph(sk, corner_radius);
  const auto& v = g.vertices;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (distance(v[i], v[j]) < c.min_corner_separation)
        return false;

  for (const auto& line : sk.strokes)
    for (std::size_t k = 1; k < line.size(); ++k) {
      const Segment seg{line[k - 1], line[k]};
      for (const auto& p : v) {
        const double d = distance_to_segment(seg, p);
        if (d > corner_radius && d < c.min_segment_clearance)
          return false;
      }
    }

  const double min_cos = std::cos(c.min_angle_deg * std::numbers::pi / 180.0);
  std::vector<std::vector<Point>> dirs(v.size());
  for (const auto& [i, j] : g.edges) {
    const Point d = v[j] - v[i];
    dirs[i].push_back((1.0 / norm(d)) * d);
    dirs[j].push_back((-1.0 / norm(d)) * d);
  }
  for (const auto& ds : dirs)
    for (std::size_t a = 0; a < ds.size(); ++a)
      for (std::size_t b = a + 1; b < ds.size(); ++b)
        if (dot(ds[a], ds[b]) > min_cos)
          return false;
  return true;
}

/// One randomly transformed fixture, normalized onto the canvas. Draws are
/// repeated until the constraints hold.
inline Sketch make_fixture(FixtureKind kind, std::mt19937_64& rng, const RasterParams& params,
                           const FixtureConstraints& constraints) {
  constexpr double pi = std::numbers::pi;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Sketch raw = detail::canonical_fixture(kind, rng);
    const double rot = detail::uniform(rng, 0, 2 * pi);
    const double aspect = detail::uniform(rng, 0.7, 1.0);
    const double cr = std::cos(rot), sr = std::sin(rot);
    for (auto& line : raw.strokes)
      for (auto& p : line) {
        const Point q{p.x, p.y * aspect};
        p = {cr * q.x - sr * q.y, sr * q.x + cr * q.y};
      }
    Sketch sk = normalize(raw, params.canvas_size, params.stroke_width, params.corner_radius);
    if (fixture_is_well_separated(sk, params.corner_radius, constraints))
      return sk;
  }
  throw InvalidArgument("could not draw a well-separated '" + std::string(fixture_name(kind)) + "' fixture");
}

/// `count` fixtures cycling through every kind, deterministic in `seed`.
inline std::vector<Sketch> fixture_suite(std::size_t count, std::uint64_t seed, const RasterParams& params,
                                         std::vector<FixtureKind> kinds = {kAllFixtureKinds.begin(),
                                                                           kAllFixtureKinds.end()}) {
  if (kinds.empty())
    throw InvalidArgument("fixture_suite: no kinds requested");
  std::mt19937_64 rng(seed);
  const auto constraints = default_constraints(params);
  std::vector<Sketch> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const FixtureKind k = kinds[i % kinds.size()];
    Sketch sk = make_fixture(k, rng, params, constraints);
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%04zu", i);
    sk.id = std::string(fixture_name(k)) + buf;
    out.push_back(std::move(sk));
  }
  return out;
}

} // namespace lineart
