#pragma once

#include "components.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "image.hpp"
#include "labels.hpp"
#include "raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lineart {

struct InterpParams {
  double beta = 1.8;       // mask width of the plausibility region (px)
  double tau0 = 0.35;      // initial plausibility threshold
  double lambda = 0.05;    // threshold update rate
  int n_iters = 10;        // feedback iterations
  double binarize_threshold = 0.5;
  std::size_t min_blob_area = 4;
  int dilate_px = 2;
  /// Width used to render the interpreted graph for the feedback diff.
  double render_width = 2.0;
  /// Padding applied to blob bounding boxes when testing whether a vertex
  /// pair lies inside a blob. Negative means "beta + dilate_px".
  double blob_pad_px = -1.0;
  /// Pairs farther apart are never proposed. 0 disables the limit.
  double max_edge_length = 0.0;
  /// Score a pair as 0 when its mask region runs through the corner blob of
  /// a third vertex: the drawn curve would be split at that vertex.
  bool split_at_corners = true;
  Connectivity connectivity = Connectivity::eight;

  double blob_pad() const { return blob_pad_px >= 0.0 ? blob_pad_px : beta + dilate_px; }

  void validate() const {
    if (!(beta > 0.0))
      throw InvalidArgument("beta must be positive");
    if (!(tau0 > 0.0 && tau0 < 1.0))
      throw InvalidArgument("tau0 must lie in (0, 1)");
    if (!(lambda >= 0.0 && lambda < 1.0))
      throw InvalidArgument("lambda must lie in [0, 1)");
    if (n_iters < 0)
      throw InvalidArgument("n_iters must be non-negative");
    if (dilate_px < 0)
      throw InvalidArgument("dilate_px must be non-negative");
    if (!(render_width > 0.0))
      throw InvalidArgument("render_width must be positive");
  }
};

/// Fixed (beta, tau) pairs studied for non-adaptive interpretation.
struct FixedTauPreset {
  double beta;
  double tau;
};
inline constexpr FixedTauPreset kFixedTauPresets[] = {{2.0, 0.3}, {3.0, 0.22}, {5.0, 0.2}, {7.0, 0.15}};

/// Per-pair thresholds, stored only where they differ from the default.
class ThresholdMap {
public:
  explicit ThresholdMap(double initial = 0.35)
    : initial_(initial) {}

  double initial() const { return initial_; }

  double get(int i, int j) const {
    auto it = overrides_.find(key(i, j));
    return it == overrides_.end() ? initial_ : it->second;
  }
  void set(int i, int j, double tau) { overrides_[key(i, j)] = tau; }
  std::size_t stored() const { return overrides_.size(); }

  template <class Fn>
  void for_each_stored(Fn&& fn) const {
    for (const auto& [k, v] : overrides_)
      fn(static_cast<int>(k >> 32), static_cast<int>(k & 0xFFFFFFFFu), v);
  }

private:
  static std::uint64_t key(int i, int j) {
    if (i > j)
      std::swap(i, j);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) | static_cast<std::uint32_t>(j);
  }

  double initial_;
  std::unordered_map<std::uint64_t, double> overrides_;
};

struct StrokeGraph {
  std::vector<Point> vertices;
  /// Radius of each vertex's corner blob around its centroid.
  std::vector<double> radii;
  std::vector<std::pair<int, int>> edges;
  ThresholdMap tau;
  /// Cached plausibility per pair, row-major n x n (upper triangle used);
  /// empty until scored.
  std::vector<double> eta;

  std::size_t size() const { return vertices.size(); }
  double score(int i, int j) const {
    if (i > j)
      std::swap(i, j);
    return eta[static_cast<std::size_t>(i) * vertices.size() + static_cast<std::size_t>(j)];
  }
  GraphData data() const { return {vertices, edges}; }
};

/// Visits the pixel centres of the plausibility region between p and q:
/// within beta/2 of the line pq and inside the segment's axial extent.
template <class Fn>
void for_each_mask_pixel(Point p, Point q, double beta, int w, int h, Fn&& fn) {
  const Point d = q - p;
  const double len = norm(d);
  if (!(len > 0.0))
    throw InvalidArgument("degenerate pair");
  const Point u = (1.0 / len) * d;
  const double half = beta / 2.0;
  const int min_x = std::max(0, static_cast<int>(std::floor(std::min(p.x, q.x) - half)));
  const int max_x = std::min(w - 1, static_cast<int>(std::ceil(std::max(p.x, q.x) + half)));
  const int min_y = std::max(0, static_cast<int>(std::floor(std::min(p.y, q.y) - half)));
  const int max_y = std::min(h - 1, static_cast<int>(std::ceil(std::max(p.y, q.y) + half)));
  constexpr double eps = 1e-9;
  for (int y = min_y; y <= max_y; ++y) {
    for (int x = min_x; x <= max_x; ++x) {
      const Point r{x - p.x, y - p.y};
      const double along = dot(r, u);
      if (along < -eps || along > len + eps)
        continue;
      if (std::abs(cross(u, r)) <= half + eps)
        fn(x, y);
    }
  }
}

/// Mean of the lines channel over the mask region between p and q
/// (0 when the region holds no pixel).
inline double plausibility(const GrayImage& lines, Point p, Point q, double beta) {
  if (p == q)
    throw InvalidArgument("degenerate pair");
  double sum = 0.0;
  std::size_t n = 0;
  for_each_mask_pixel(p, q, beta, lines.width(), lines.height(), [&](int x, int y) {
    sum += lines(x, y);
    ++n;
  });
  return n ? sum / n : 0.0;
}

/// Scores vertex pairs against a lines channel, excluding each endpoint's
/// own corner blob from the region.
class PairScorer {
public:
  PairScorer(const GrayImage& lines, const Image<int>& corner_labels, const std::vector<Point>& vertices,
             const std::vector<double>& radii, double beta, bool split_at_corners)
    : lines_(lines)
    , labels_(corner_labels)
    , vertices_(vertices)
    , radii_(radii)
    , beta_(beta)
    , split_(split_at_corners) {
    require_same_shape(labels_, lines_.width(), lines_.height(), "PairScorer");
    if (radii_.size() != vertices_.size())
      throw InvalidArgument("PairScorer: one radius per vertex required");
  }

  double score(int i, int j) const {
    const Point p = vertices_[i], q = vertices_[j];
    if (p == q)
      throw InvalidArgument("degenerate pair");
    double sum = 0.0;
    std::size_t n = 0;
    bool blocked = false;
    for_each_mask_pixel(p, q, beta_, lines_.width(), lines_.height(), [&](int x, int y) {
      const int owner = labels_(x, y);
      if (owner == i || owner == j)
        return;
      const Point c{double(x), double(y)};
      if (distance(c, p) < radii_[i] || distance(c, q) < radii_[j])
        return;
      if (owner >= 0)
        blocked = true;
      sum += lines_(x, y);
      ++n;
    });
    if (split_ && blocked)
      return 0.0;
    return n ? sum / n : 0.0;
  }

private:
  const GrayImage& lines_;
  const Image<int>& labels_;
  const std::vector<Point>& vertices_;
  const std::vector<double>& radii_;
  double beta_;
  bool split_;
};

struct CornerBlobs {
  std::vector<Point> vertices;
  std::vector<double> radii;
  Image<int> labels;
};

/// Binarizes the corners channel and returns the centroids of its
/// connected components as vertices.
inline CornerBlobs corner_blobs(const ProbabilityMap& p, const InterpParams& params) {
  if (p.classes() != kNumClasses)
    throw InvalidArgument("expected a 3-class probability map");
  const auto map =
    label_components(binarize(p.channel(kCorners), params.binarize_threshold), params.connectivity, params.min_blob_area);
  CornerBlobs out;
  for (const auto& c : map.components) {
    out.vertices.push_back(c.centroid);
    out.radii.push_back(c.extent + 0.5);
  }
  out.labels = map.labels;
  return out;
}

inline std::vector<Point> vertices_from_masks(const ProbabilityMap& p, const InterpParams& params) {
  return corner_blobs(p, params).vertices;
}

/// Scores every pair (cached in the graph) and sets the edge set to the
/// pairs whose score exceeds their threshold.
inline void score_pairs(StrokeGraph& g, const PairScorer& scorer, double max_edge_length = 0.0) {
  const std::size_t n = g.size();
  g.eta.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (max_edge_length > 0.0 && distance(g.vertices[i], g.vertices[j]) > max_edge_length)
        continue;
      g.eta[i * n + j] = scorer.score(static_cast<int>(i), static_cast<int>(j));
    }
}

inline void propose_edges(StrokeGraph& g) {
  g.edges.clear();
  const int n = static_cast<int>(g.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (g.score(i, j) > g.tau.get(i, j))
        g.edges.emplace_back(i, j);
}

/// Straight segments between the endpoints of every edge, drawn with the
/// dataset renderer.
inline GrayImage render_graph(const StrokeGraph& g, int width, int height, double stroke_width) {
  std::vector<Polyline> segs;
  segs.reserve(g.edges.size());
  for (const auto& [i, j] : g.edges)
    segs.push_back({g.vertices[i], g.vertices[j]});
  return draw_polylines(segs, width, height, stroke_width);
}

struct BlobDiff {
  std::vector<Component> absent;      // in the input, not rendered
  std::vector<Component> superfluous; // rendered, not in the input
};

inline BlobDiff blob_diff(const GrayImage& input, const GrayImage& rendered, const InterpParams& params) {
  require_same_shape(rendered, input.width(), input.height(), "blob_diff");
  const auto in_bin = binarize(input, params.binarize_threshold);
  const auto out_bin = binarize(rendered, params.binarize_threshold);
  const auto in_grown = dilate(in_bin, params.dilate_px);
  const auto out_grown = dilate(out_bin, params.dilate_px);
  BinaryImage missing(input.width(), input.height(), 0), extra(input.width(), input.height(), 0);
  for (std::size_t i = 0; i < input.size(); ++i) {
    missing.pixels()[i] = in_bin.pixels()[i] && !out_grown.pixels()[i];
    extra.pixels()[i] = out_bin.pixels()[i] && !in_grown.pixels()[i];
  }
  return {connected_components(missing, params.connectivity, params.min_blob_area),
          connected_components(extra, params.connectivity, params.min_blob_area)};
}

struct UpdateStats {
  std::size_t lowered = 0;
  std::size_t raised = 0;
};

/// Multiplies tau by (1 + lambda * delta) for every pair: delta = -1 when
/// both vertices sit inside one padded absent-blob box, +1 when inside one
/// padded superfluous-blob box, 0 otherwise. Absent wins ties.
inline UpdateStats update_thresholds(StrokeGraph& g, const BlobDiff& diff, double lambda, double pad) {
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw InvalidArgument("lambda must lie in [0, 1)");
  const std::size_t n = g.size();
  std::vector<std::int8_t> delta(n * n, 0);
  auto mark = [&](const std::vector<Component>& blobs, std::int8_t value) {
    std::vector<int> inside;
    for (const auto& b : blobs) {
      inside.clear();
      for (std::size_t v = 0; v < n; ++v)
        if (b.bbox.contains(g.vertices[v], pad))
          inside.push_back(static_cast<int>(v));
      for (std::size_t a = 0; a < inside.size(); ++a)
        for (std::size_t c = a + 1; c < inside.size(); ++c) {
          auto& d = delta[static_cast<std::size_t>(inside[a]) * n + static_cast<std::size_t>(inside[c])];
          if (value < 0 || d == 0)
            d = value;
        }
    }
  };
  mark(diff.superfluous, +1);
  mark(diff.absent, -1);

  UpdateStats stats;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const int d = delta[i * n + j];
      if (d == 0)
        continue;
      const int a = static_cast<int>(i), b = static_cast<int>(j);
      g.tau.set(a, b, g.tau.get(a, b) * (1.0 + lambda * d));
      (d < 0 ? stats.lowered : stats.raised) += 1;
    }
  return stats;
}

struct IterationDiagnostics {
  int iteration = 0;
  std::size_t edges = 0;
  std::size_t absent = 0;
  std::size_t superfluous = 0;
  std::size_t lowered = 0;
  std::size_t raised = 0;
  double tau_min = 0.0;
  double tau_max = 0.0;
  double tau_mean = 0.0;
};

struct InterpretResult {
  StrokeGraph graph;
  std::vector<IterationDiagnostics> iterations;
  std::vector<std::string> warnings;
};

namespace detail {

inline void tau_summary(const StrokeGraph& g, IterationDiagnostics& d) {
  const double n = static_cast<double>(g.size());
  const double pairs = n * (n - 1.0) / 2.0;
  const double t0 = g.tau.initial();
  if (pairs <= 0.0) {
    d.tau_min = d.tau_max = d.tau_mean = t0;
    return;
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  g.tau.for_each_stored([&](int, int, double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  });
  const double defaults = pairs - static_cast<double>(g.tau.stored());
  if (defaults > 0.0) {
    lo = std::min(lo, t0);
    hi = std::max(hi, t0);
  }
  d.tau_min = lo;
  d.tau_max = hi;
  d.tau_mean = (sum + defaults * t0) / pairs;
}

} // namespace detail

/// Full interpretation loop: vertices from the corners channel, edges from
/// the lines channel, thresholds refined by diffing the rendered graph
/// against the input for `n_iters` rounds.
inline InterpretResult interpret(const GrayImage& input, const ProbabilityMap& p, const InterpParams& params) {
  params.validate();
  if (!p.same_shape(input))
    throw ShapeMismatch("interpret: input image and probability map differ in shape");

  InterpretResult res;
  auto blobs = corner_blobs(p, params);
  StrokeGraph& g = res.graph;
  g.vertices = std::move(blobs.vertices);
  g.radii = std::move(blobs.radii);
  g.tau = ThresholdMap(params.tau0);
  if (g.vertices.empty())
    res.warnings.push_back("no vertices found in the corners channel");
  if (g.size() < 2)
    return res;

  const GrayImage lines = p.channel(kLines);
  const PairScorer scorer(lines, blobs.labels, g.vertices, g.radii, params.beta, params.split_at_corners);
  score_pairs(g, scorer, params.max_edge_length);

  for (int it = 0; it < params.n_iters; ++it) {
    propose_edges(g);
    const auto rendered = render_graph(g, input.width(), input.height(), params.render_width);
    const auto diff = blob_diff(input, rendered, params);
    const auto stats = update_thresholds(g, diff, params.lambda, params.blob_pad());
    IterationDiagnostics d;
    d.iteration = it;
    d.edges = g.edges.size();
    d.absent = diff.absent.size();
    d.superfluous = diff.superfluous.size();
    d.lowered = stats.lowered;
    d.raised = stats.raised;
    detail::tau_summary(g, d);
    res.iterations.push_back(d);
  }
  propose_edges(g);
  return res;
}

} // namespace lineart
