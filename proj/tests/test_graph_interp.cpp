#include "support.hpp"

#include <lineart/components.hpp>
#include <lineart/evaluation.hpp>
#include <lineart/graph_interp.hpp>
#include <lineart/labels.hpp>
#include <lineart/metrics.hpp>
#include <lineart/threshold_study.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace lineart;

namespace {

BinaryImage blank(int w, int h) { return BinaryImage(w, h, 0); }

/// Vertices and pair scores from oracle masks, thresholds all at `tau`.
StrokeGraph scored_graph(const ProbabilityMap& p, const InterpParams& params, double tau) {
  auto blobs = corner_blobs(p, params);
  StrokeGraph g;
  g.vertices = blobs.vertices;
  g.radii = blobs.radii;
  g.tau = ThresholdMap(tau);
  const GrayImage lines = p.channel(kLines);
  const PairScorer scorer(lines, blobs.labels, g.vertices, g.radii, params.beta, params.split_at_corners);
  score_pairs(g, scorer);
  propose_edges(g);
  return g;
}

Sketch triangle() {
  return test::make_sketch({{{40, 200}, {216, 200}, {128, 48}, {40, 200}}}, 256, "tri");
}

} // namespace

TEST(ConnectedComponents, Examples) {
  EXPECT_TRUE(connected_components(blank(16, 16)).empty());

  auto img = blank(16, 16);
  for (int y : {0, 1})
    for (int x : {0, 1}) {
      img(x, y) = 1;
      img(x + 10, y + 10) = 1;
    }
  const auto cc = connected_components(img);
  ASSERT_EQ(cc.size(), 2u);
  EXPECT_EQ(cc[0].centroid, (Point{0.5, 0.5}));
  EXPECT_EQ(cc[1].centroid, (Point{10.5, 10.5}));
  EXPECT_EQ(cc[0].pixel_count, 4u);
  EXPECT_EQ(cc[1].bbox.min_x, 10);
  EXPECT_EQ(cc[1].bbox.max_y, 11);

  auto diag = blank(8, 8);
  for (int i = 0; i < 5; ++i)
    diag(i, i) = 1;
  EXPECT_EQ(connected_components(diag, Connectivity::eight).size(), 1u);
  EXPECT_EQ(connected_components(diag, Connectivity::four).size(), 5u);
}

TEST(ConnectedComponents, AreaFilterAndOrder) {
  auto img = blank(10, 10);
  img(8, 1) = 1;
  img(1, 5) = img(2, 5) = img(3, 5) = 1;
  img(5, 1) = img(5, 2) = 1;
  const auto all = connected_components(img, Connectivity::eight, 1);
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0].bbox.min_x, 5); // same min_y as (8,1), smaller min_x first
  EXPECT_EQ(all[1].bbox.min_x, 8);
  EXPECT_EQ(connected_components(img, Connectivity::eight, 2).size(), 2u);
  EXPECT_EQ(connected_components(img, Connectivity::eight, 3).size(), 1u);
}

TEST(Dilate, EuclideanDisc) {
  auto img = blank(9, 9);
  img(4, 4) = 1;
  const auto d = dilate(img, 2);
  EXPECT_EQ(count_nonzero(d), 13u); // |dx|^2 + |dy|^2 <= 4
  EXPECT_EQ(d(6, 4), 1);
  EXPECT_EQ(d(6, 6), 0);
  EXPECT_EQ(dilate(img, 0), img);
}

TEST(VerticesFromMasks, Examples) {
  InterpParams params;
  const Point a{60, 100}, b{180, 140};
  const auto s = make_labels(test::make_sketch({{a, b}}, 256), 2.0, 3.0);
  const auto v = vertices_from_masks(labels_to_probmap(s.labels), params);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_LT(distance(v[0], a), 1.0);
  EXPECT_LT(distance(v[1], b), 1.0);

  EXPECT_TRUE(vertices_from_masks(ProbabilityMap(3, 32, 32, 0.0), params).empty());

  const auto x = make_labels(test::fixture(FixtureKind::x_cross), 2.0, 3.0);
  EXPECT_EQ(vertices_from_masks(labels_to_probmap(x.labels), params).size(), 5u);
  EXPECT_THROW(vertices_from_masks(ProbabilityMap(2, 4, 4), params), InvalidArgument);
}

TEST(Plausibility, ConstantChannels) {
  const GrayImage zero(32, 32, 0.0), one(32, 32, 1.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(0, 31);
  for (int t = 0; t < 50; ++t) {
    const Point p{c(rng), c(rng)}, q{c(rng), c(rng)};
    EXPECT_EQ(plausibility(zero, p, q, 1.8), 0.0);
    EXPECT_EQ(plausibility(one, p, q, 1.8), 1.0);
  }
  EXPECT_THROW(plausibility(one, {3, 3}, {3, 3}, 1.8), InvalidArgument);
}

TEST(Plausibility, HorizontalRunAndSinglePixel) {
  GrayImage row(20, 12, 0.0);
  for (int x = 2; x <= 12; ++x)
    row(x, 5) = 1.0;
  EXPECT_EQ(plausibility(row, {2, 5}, {12, 5}, 1.8), 1.0);

  // independent enumeration of M: centres with |y - 5| <= 0.9 and 2 <= x <= 12
  std::size_t m = 0;
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 20; ++x)
      m += std::abs(y - 5.0) <= 0.9 && x >= 2 && x <= 12;
  EXPECT_EQ(m, 11u);
  GrayImage one_pixel(20, 12, 0.0);
  one_pixel(7, 5) = 1.0;
  EXPECT_DOUBLE_EQ(plausibility(one_pixel, {2, 5}, {12, 5}, 1.8), 1.0 / m);
  // wider mask picks up the neighbouring rows
  EXPECT_DOUBLE_EQ(plausibility(one_pixel, {2, 5}, {12, 5}, 3.0), 1.0 / 33.0);
}

TEST(Plausibility, DiagonalMaskMatchesBruteForce) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> c(2, 28), v(0, 1);
  GrayImage img(32, 32);
  for (double& px : img.pixels())
    px = v(rng);
  for (int t = 0; t < 100; ++t) {
    const Point p{c(rng), c(rng)}, q{c(rng), c(rng)};
    const double beta = 1 + 4 * v(rng);
    const Point u = (1.0 / distance(p, q)) * (q - p);
    double sum = 0;
    std::size_t n = 0;
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x) {
        const Point r{x - p.x, y - p.y};
        const double along = dot(r, u);
        if (along >= -1e-9 && along <= distance(p, q) + 1e-9 && std::abs(cross(u, r)) <= beta / 2 + 1e-9) {
          sum += img(x, y);
          ++n;
        }
      }
    EXPECT_NEAR(plausibility(img, p, q, beta), n ? sum / n : 0.0, 1e-12);
  }
}

TEST(Plausibility, BoundedAndSymmetric) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> c(0, 63), v(0, 1);
  GrayImage img(64, 64);
  for (double& px : img.pixels())
    px = v(rng) < 0.3 ? v(rng) : 0.0;
  for (int t = 0; t < 300; ++t) {
    const Point p{c(rng), c(rng)}, q{c(rng), c(rng)};
    const double e = plausibility(img, p, q, 1.8);
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 1.0);
    EXPECT_EQ(e, plausibility(img, q, p, 1.8));
  }
}

TEST(ProposeEdges, ThresholdExtremes) {
  const auto s = make_labels(test::fixture(FixtureKind::star), 2.0, 3.0);
  const auto p = labels_to_probmap(s.labels);
  InterpParams params;
  const auto none = scored_graph(p, params, 1.1);
  EXPECT_TRUE(none.edges.empty());
  const auto all = scored_graph(p, params, -1.0);
  const std::size_t n = all.size();
  EXPECT_EQ(all.edges.size(), n * (n - 1) / 2);
}

TEST(ProposeEdges, TriangleOracle) {
  const auto sk = triangle();
  const auto s = make_labels(sk, 2.0, 3.0);
  const auto g = scored_graph(labels_to_probmap(s.labels), {}, 0.35);
  EXPECT_EQ(g.size(), 3u);
  const auto sc = score_edges(g.data(), ground_truth_graph(sk));
  EXPECT_EQ(sc.true_positive, 3u);
  EXPECT_EQ(sc.predicted, 3u);
}

TEST(ProposeEdges, MonotoneInThreshold) {
  const auto s = make_labels(test::fixture(FixtureKind::grid_hatch), 2.0, 3.0);
  auto g = scored_graph(labels_to_probmap(s.labels), {}, 0.35);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> vi(0, static_cast<int>(g.size()) - 1);
  for (int t = 0; t < 200; ++t) {
    const int i = vi(rng), j = vi(rng);
    if (i == j)
      continue;
    propose_edges(g);
    const auto has = [&](int a, int b) {
      const auto e = std::make_pair(std::min(a, b), std::max(a, b));
      return std::find(g.edges.begin(), g.edges.end(), e) != g.edges.end();
    };
    const bool before = has(i, j);
    const double tau = g.tau.get(i, j);
    g.tau.set(i, j, tau * 0.5);
    propose_edges(g);
    if (before) {
      EXPECT_TRUE(has(i, j));
    }
    g.tau.set(i, j, tau * 2.0);
    propose_edges(g);
    if (!before) {
      EXPECT_FALSE(has(i, j));
    }
    g.tau.set(i, j, tau);
  }
}

TEST(RenderGraph, Examples) {
  StrokeGraph g;
  g.vertices = {{10, 10}, {40, 30}, {20, 50}};
  EXPECT_EQ(count_nonzero(binarize(render_graph(g, 64, 64, 2.0), 0.5)), 0u);
  g.edges = {{0, 1}};
  EXPECT_EQ(render_graph(g, 64, 64, 2.0), rasterize(test::make_sketch({{{10, 10}, {40, 30}}}, 64), 2.0));

  const auto sk = triangle();
  const auto s = make_labels(sk, 2.0, 3.0);
  const auto truth = ground_truth_graph(sk);
  StrokeGraph tri;
  tri.vertices = truth.vertices;
  tri.edges = truth.edges;
  const auto rendered = render_graph(tri, 256, 256, 2.0);
  const auto a = binarize(rendered, 0.5), b = binarize(s.input, 0.5);
  const auto r = iou(a, b, 2);
  EXPECT_GE(*r.per_class[1], 0.95);
}

TEST(BlobDiff, Examples) {
  InterpParams params;
  const auto sq = test::make_sketch({{{40, 40}, {200, 40}, {200, 200}, {40, 200}, {40, 40}}}, 256);
  const auto input = rasterize(sq, 2.0);
  auto d = blob_diff(input, input, params);
  EXPECT_TRUE(d.absent.empty());
  EXPECT_TRUE(d.superfluous.empty());

  d = blob_diff(input, GrayImage(256, 256, 0.0), params);
  EXPECT_EQ(d.absent.size(), connected_components(binarize(input, 0.5), Connectivity::eight, 4).size());
  EXPECT_TRUE(d.superfluous.empty());

  const auto partial = draw_polylines({{{40, 200}, {40, 40}, {200, 40}, {200, 200}}}, 256, 256, 2.0);
  d = blob_diff(input, partial, params);
  ASSERT_EQ(d.absent.size(), 1u);
  EXPECT_TRUE(d.superfluous.empty());
  const auto& box = d.absent[0].bbox;
  EXPECT_LE(box.min_x, 45);
  EXPECT_GE(box.max_x, 195);
  EXPECT_GE(box.min_y, 195);
  EXPECT_LE(box.max_y, 205);

  d = blob_diff(partial, input, params);
  EXPECT_TRUE(d.absent.empty());
  EXPECT_EQ(d.superfluous.size(), 1u);
  EXPECT_THROW(blob_diff(input, GrayImage(10, 10), params), ShapeMismatch);
}

TEST(UpdateThresholds, HandValues) {
  StrokeGraph g;
  g.vertices = {{10, 10}, {20, 10}, {100, 100}};
  g.tau = ThresholdMap(0.35);
  Component blob;
  blob.bbox = {8, 8, 22, 12};
  blob.pixel_count = 10;
  BlobDiff absent{{blob}, {}};
  update_thresholds(g, absent, 0.05, 1.8);
  EXPECT_NEAR(g.tau.get(0, 1), 0.3325, 1e-15);
  EXPECT_EQ(g.tau.get(0, 2), 0.35);
  EXPECT_EQ(g.tau.get(1, 2), 0.35);

  StrokeGraph h = g;
  for (int i = 0; i < 10; ++i)
    update_thresholds(h, {}, 0.05, 1.8);
  EXPECT_EQ(h.tau.get(0, 1), g.tau.get(0, 1));

  StrokeGraph up;
  up.vertices = g.vertices;
  up.tau = ThresholdMap(0.35);
  const BlobDiff extra{{}, {blob}};
  for (int i = 0; i < 10; ++i)
    update_thresholds(up, extra, 0.05, 1.8);
  EXPECT_NEAR(up.tau.get(0, 1), 0.570113, 1e-6);
  EXPECT_NEAR(up.tau.get(0, 1), 0.35 * std::pow(1.05, 10), 1e-12);

  // absent wins when a pair sits in both kinds of blob
  StrokeGraph both;
  both.vertices = g.vertices;
  both.tau = ThresholdMap(0.35);
  const auto st = update_thresholds(both, {{blob}, {blob}}, 0.05, 1.8);
  EXPECT_NEAR(both.tau.get(0, 1), 0.3325, 1e-15);
  EXPECT_EQ(st.lowered, 1u);
  EXPECT_EQ(st.raised, 0u);
  EXPECT_THROW(update_thresholds(both, {}, 1.0, 1.8), InvalidArgument);
}

TEST(UpdateThresholds, PaddingDecidesContainment) {
  StrokeGraph g;
  g.vertices = {{5, 10}, {25, 10}};
  g.tau = ThresholdMap(0.5);
  Component blob;
  blob.bbox = {8, 8, 22, 12};
  update_thresholds(g, {{blob}, {}}, 0.1, 2.0);
  EXPECT_EQ(g.tau.get(0, 1), 0.5);
  update_thresholds(g, {{blob}, {}}, 0.1, 3.0);
  EXPECT_NEAR(g.tau.get(0, 1), 0.45, 1e-15);
}

TEST(Interpret, BlankInputGivesEmptyGraph) {
  const auto r = interpret(GrayImage(64, 64, 0.0), ProbabilityMap(3, 64, 64, 0.0), {});
  EXPECT_EQ(r.graph.size(), 0u);
  EXPECT_TRUE(r.graph.edges.empty());
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_THROW(interpret(GrayImage(64, 64), ProbabilityMap(3, 32, 64), {}), ShapeMismatch);
  InterpParams bad;
  bad.tau0 = 1.5;
  EXPECT_THROW(interpret(GrayImage(8, 8), ProbabilityMap(3, 8, 8), bad), InvalidArgument);
}

TEST(Interpret, TriangleStableAcrossIterations) {
  const auto sk = triangle();
  const auto s = make_labels(sk, 2.0, 3.0);
  const auto r = interpret(s.input, labels_to_probmap(s.labels), {});
  EXPECT_EQ(r.graph.size(), 3u);
  ASSERT_EQ(r.iterations.size(), 10u);
  for (const auto& d : r.iterations) {
    EXPECT_EQ(d.edges, 3u);
    EXPECT_EQ(d.absent, 0u);
    EXPECT_EQ(d.superfluous, 0u);
    EXPECT_EQ(d.tau_min, 0.35);
    EXPECT_EQ(d.tau_max, 0.35);
  }
  const auto sc = score_edges(r.graph.data(), ground_truth_graph(sk));
  EXPECT_EQ(sc.f1(), 1.0);
}

TEST(Interpret, PerfectRenderIsFixpoint) {
  const auto suite = fixture_suite(16, 31, {});
  for (const auto& sk : suite) {
    const auto s = make_labels(sk, 2.0, 3.0);
    const auto r = interpret(s.input, labels_to_probmap(s.labels), {});
    bool clean = true;
    for (const auto& d : r.iterations)
      clean = clean && d.absent == 0 && d.superfluous == 0;
    if (!clean)
      continue;
    for (const auto& d : r.iterations)
      EXPECT_EQ(d.edges, r.graph.edges.size()) << sk.id;
  }
}

TEST(Interpret, RaisedThresholdRecovers) {
  // first fixture whose fixed-threshold reading misses an edge at tau0 = 0.6
  InterpParams params;
  params.tau0 = 0.6;
  InterpParams fixed = params;
  fixed.n_iters = 0;
  const auto suite = fixture_suite(80, 11, {});
  int tried = 0;
  for (const auto& sk : suite) {
    const auto s = oracle_sample(sk, 2.0, 3.0);
    if (missed_edges(interpret(s.input, s.probs, fixed).graph.data(), s.truth) == 0)
      continue;
    ++tried;
    const auto r = interpret(s.input, s.probs, params);
    EXPECT_EQ(missed_edges(r.graph.data(), s.truth), 0u) << sk.id;
    EXPECT_LT(r.iterations.back().tau_min, 0.6);
    if (tried == 2)
      break;
  }
  EXPECT_EQ(tried, 2);
}

TEST(ThresholdStudy, ApproximateThreshold) {
  const std::vector<double> s{1, 1, 1, 0, 0, 0};
  EXPECT_DOUBLE_EQ(approximate_threshold(s, 3), 2.0 / 3.0); // ranks 2..4
  EXPECT_DOUBLE_EQ(approximate_threshold({0.9, 0.2}, 1), (0.9 + 0.2) / 2); // window clipped at the top
  EXPECT_DOUBLE_EQ(approximate_threshold({0.9, 0.5, 0.2}, 3), (0.5 + 0.2) / 2);
  EXPECT_EQ(approximate_threshold({}, 2), 0.0);
}

TEST(ThresholdStudy, HistogramsAndSkips) {
  std::vector<StudySample> samples;
  for (const auto& sk : fixture_suite(12, 5, {}))
    samples.push_back(oracle_sample(sk, 2.0, 3.0));
  StudySample empty;
  empty.id = "blank";
  empty.input = GrayImage(256, 256, 0.0);
  empty.probs = ProbabilityMap(3, 256, 256, 0.0);
  samples.push_back(empty);

  const auto r = threshold_study(samples, {3.0, 5.0, 7.0}, {});
  ASSERT_EQ(r.size(), 3u);
  for (const auto& bs : r) {
    EXPECT_EQ(bs.images.size(), 12u);
    EXPECT_EQ(bs.skipped, 1u);
    EXPECT_EQ(bs.tau_hat.total(), 12u);
    EXPECT_EQ(bs.margin.total(), 12u);
    for (const auto& it : bs.images) {
      EXPECT_GE(it.tau_hat, 0.0);
      EXPECT_LE(it.tau_hat, 1.0);
    }
  }
  const auto one = threshold_study({samples[0]}, {3.0}, {});
  EXPECT_EQ(one[0].tau_hat.total(), 1u);
  EXPECT_THROW(threshold_study(samples, {}, {}), InvalidArgument);
}

TEST(ThresholdStudy, SmoothingAndModes) {
  EXPECT_TRUE(is_unimodal(smooth({0, 1, 5, 9, 4, 1, 0}, 3)));
  EXPECT_FALSE(is_unimodal(smooth({9, 0, 0, 0, 0, 0, 9}, 3)));
  EXPECT_TRUE(is_unimodal(smooth({3, 3, 3}, 3)));
  const auto s = smooth({0, 3, 0}, 3);
  EXPECT_DOUBLE_EQ(s[0], 1.5);
  EXPECT_DOUBLE_EQ(s[1], 1.0);
}

TEST(ThresholdStudy, OracleSeparationThinStrokes) {
  std::vector<StudySample> samples;
  for (const auto& sk : fixture_suite(40, 13, {256, 1.0, 3.0}))
    samples.push_back(oracle_sample(sk, 1.0, 3.0));
  InterpParams p;
  p.min_blob_area = 2;
  p.render_width = 1.0;
  const auto r = threshold_study(samples, {1.8}, p);
  EXPECT_GE(r[0].separated_fraction(), 0.9);
}
