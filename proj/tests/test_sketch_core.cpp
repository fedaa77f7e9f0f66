#include "support.hpp"

#include <lineart/geometry.hpp>
#include <lineart/raster.hpp>
#include <lineart/sketch.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace lineart;

namespace {

void expect_point(Point p, double x, double y, double tol = 1e-9) {
  EXPECT_NEAR(p.x, x, tol);
  EXPECT_NEAR(p.y, y, tol);
}

Sketch random_sketch(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(-50.0, 150.0);
  std::uniform_int_distribution<int> n_strokes(1, 4), n_points(2, 6);
  Sketch sk;
  for (int s = n_strokes(rng); s > 0; --s) {
    Polyline line;
    for (int i = n_points(rng); i > 0; --i)
      line.push_back({coord(rng), coord(rng)});
    sk.strokes.push_back(line);
  }
  return sk;
}

} // namespace

TEST(ParseStrokeFile, ZipsCoordinateLists) {
  const auto r = parse_stroke_string(R"({"drawing": [[[0, 50], [0, 50]]]})", StrokeFormat::ndjson_simplified);
  ASSERT_EQ(r.sketches.size(), 1u);
  ASSERT_EQ(r.sketches[0].strokes.size(), 1u);
  const auto& line = r.sketches[0].strokes[0];
  ASSERT_EQ(line.size(), 2u);
  expect_point(line[0], 0, 0);
  expect_point(line[1], 50, 50);
  EXPECT_EQ(r.sketches[0].canvas_size, 0);
}

TEST(ParseStrokeFile, EmptyStream) {
  EXPECT_TRUE(parse_stroke_string("", StrokeFormat::ndjson_simplified).sketches.empty());
  EXPECT_TRUE(parse_stroke_string("", StrokeFormat::plain_json).sketches.empty());
}

TEST(ParseStrokeFile, ThreeStrokeSquareRecord) {
  // shaped like a simplified "square" drawing: three strokes of 3, 2 and 4 points
  const std::string rec =
    R"({"word":"square","countrycode":"US","key_id":"5070286462533632","recognized":true,)"
    R"("drawing":[[[20,20,230],[30,225,227]],[[230,232],[227,28]],[[232,120,18,20],[28,25,27,30]]]})";
  const auto r = parse_stroke_string(rec, StrokeFormat::ndjson_simplified);
  ASSERT_EQ(r.sketches.size(), 1u);
  const auto& sk = r.sketches[0];
  EXPECT_EQ(sk.id, "5070286462533632");
  ASSERT_EQ(sk.strokes.size(), 3u);
  EXPECT_EQ(sk.strokes[0].size(), 3u);
  EXPECT_EQ(sk.strokes[1].size(), 2u);
  EXPECT_EQ(sk.strokes[2].size(), 4u);
  expect_point(sk.strokes[2][3], 20, 30);
}

TEST(ParseStrokeFile, ShortStrokesSkippedAndCounted) {
  const auto r = parse_stroke_string(R"({"drawing": [[[1], [1]], [[3, 3], [4, 4]], [[0, 9], [0, 9]]]})",
                                     StrokeFormat::ndjson_simplified);
  ASSERT_EQ(r.sketches.size(), 1u);
  EXPECT_EQ(r.sketches[0].strokes.size(), 1u);
  EXPECT_EQ(r.skipped_strokes, 2u);
}

TEST(ParseStrokeFile, MalformedRecordCarriesIndex) {
  const std::string text = "{\"drawing\": [[[0, 1], [0, 1]]]}\n{\"drawing\": [[[0, 1], [0]]]}\n";
  try {
    parse_stroke_string(text, StrokeFormat::ndjson_simplified);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.record(), 1u);
  }
  EXPECT_THROW(parse_stroke_string("{not json\n", StrokeFormat::ndjson_simplified), ParseError);
  EXPECT_THROW(parse_stroke_string("{\"strokes\": []}\n", StrokeFormat::ndjson_simplified), ParseError);
}

TEST(ParseStrokeFile, PlainJsonArray) {
  const auto r = parse_stroke_string(R"([{"drawing": [[[0, 5], [0, 5]]]}, [[[1, 2, 3], [1, 1, 1]]]])",
                                     StrokeFormat::plain_json);
  ASSERT_EQ(r.sketches.size(), 2u);
  EXPECT_EQ(r.sketches[1].strokes[0].size(), 3u);
}

TEST(ParseStrokeFile, QuickdrawRoundTrip) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    Sketch sk = random_sketch(rng);
    sk.id = "s" + std::to_string(t);
    const auto text = to_quickdraw(sk).dump() + "\n";
    const auto back = parse_stroke_string(text, StrokeFormat::ndjson_simplified).sketches.at(0);
    EXPECT_EQ(back.id, sk.id);
    ASSERT_EQ(back.strokes.size(), sk.strokes.size());
    for (std::size_t i = 0; i < sk.strokes.size(); ++i)
      EXPECT_EQ(back.strokes[i], sk.strokes[i]);
    EXPECT_EQ(to_quickdraw(back).dump(), to_quickdraw(sk).dump());
  }
}

TEST(SketchJson, RoundTripExact) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    Sketch sk = normalize(random_sketch(rng), 256, 2.0);
    sk.id = "x";
    const auto back = sketch_from_json(nlohmann::json::parse(to_json(sk).dump()));
    EXPECT_EQ(back.canvas_size, sk.canvas_size);
    EXPECT_EQ(back.id, sk.id);
    EXPECT_EQ(back.strokes, sk.strokes);
  }
}

TEST(Normalize, SquareBoxFillsCanvasInsideMargin) {
  EXPECT_DOUBLE_EQ(normalization_margin(3.0, 3.0), 6.0);
  const auto sk = test::make_sketch({{{0, 0}, {100, 0}, {100, 100}, {0, 100}}}, 0);
  const auto n = normalize(sk, 256, 3.0, 3.0);
  const auto b = bounding_box(n.strokes);
  EXPECT_NEAR(b.min_x, 6, 1e-9);
  EXPECT_NEAR(b.max_x, 250, 1e-9);
  EXPECT_NEAR(b.min_y, 6, 1e-9);
  EXPECT_NEAR(b.max_y, 250, 1e-9);
  EXPECT_EQ(n.canvas_size, 256);
}

TEST(Normalize, WideBoxIsCentredAtSameScale) {
  const auto sk = test::make_sketch({{{0, 0}, {100, 50}}}, 0);
  const auto b = bounding_box(normalize(sk, 256, 3.0, 3.0).strokes);
  EXPECT_NEAR(b.min_x, 6, 1e-9);
  EXPECT_NEAR(b.max_x, 250, 1e-9);
  EXPECT_NEAR(b.min_y, 67, 1e-9);
  EXPECT_NEAR(b.max_y, 189, 1e-9);
}

TEST(Normalize, Idempotent) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto once = normalize(random_sketch(rng), 256, 2.0);
    const auto twice = normalize(once, 256, 2.0);
    for (std::size_t i = 0; i < once.strokes.size(); ++i)
      for (std::size_t k = 0; k < once.strokes[i].size(); ++k)
        expect_point(twice.strokes[i][k], once.strokes[i][k].x, once.strokes[i][k].y, 1e-9);
  }
}

TEST(Normalize, InvariantUnderUniformScaleAndTranslation) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> scale(0.01, 100.0), shift(-1e3, 1e3);
  for (int t = 0; t < 200; ++t) {
    const Sketch sk = random_sketch(rng);
    Sketch moved = sk;
    const double a = scale(rng);
    const Point d{shift(rng), shift(rng)};
    for (auto& line : moved.strokes)
      for (auto& p : line)
        p = a * p + d;
    const auto n1 = normalize(sk, 256, 2.0), n2 = normalize(moved, 256, 2.0);
    for (std::size_t i = 0; i < n1.strokes.size(); ++i)
      for (std::size_t k = 0; k < n1.strokes[i].size(); ++k)
        expect_point(n2.strokes[i][k], n1.strokes[i][k].x, n1.strokes[i][k].y, 1e-6);
  }
}

TEST(Normalize, Errors) {
  try {
    normalize(test::make_sketch({{{3, 3}, {3, 3}}}, 0), 256, 2.0);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_STREQ(e.what(), "zero-extent sketch");
  }
  EXPECT_THROW(normalize(Sketch{}, 256, 2.0), InvalidArgument);
  EXPECT_THROW(normalize(test::make_sketch({{{0, 0}, {1, 1}}}, 0), 31, 2.0), InvalidArgument);
}

TEST(SegmentIntersection, Examples) {
  auto x = segment_intersection({{0, 0}, {2, 2}}, {{0, 2}, {2, 0}});
  ASSERT_TRUE(x);
  expect_point(*x, 1, 1);
  EXPECT_FALSE(segment_intersection({{0, 0}, {1, 0}}, {{2, 0}, {3, 0}}));
  x = segment_intersection({{0, 0}, {4, 2}}, {{0, 2}, {4, 0}});
  ASSERT_TRUE(x);
  expect_point(*x, 2, 1);
}

TEST(SegmentIntersection, EdgeCases) {
  // collinear overlap and parallel pairs report nothing
  EXPECT_FALSE(segment_intersection({{0, 0}, {2, 0}}, {{1, 0}, {3, 0}}));
  EXPECT_FALSE(segment_intersection({{0, 0}, {2, 0}}, {{0, 1}, {2, 1}}));
  // touching at an endpoint counts
  auto x = segment_intersection({{0, 0}, {2, 0}}, {{2, 0}, {2, 5}});
  ASSERT_TRUE(x);
  expect_point(*x, 2, 0);
  // lines cross outside both segments
  EXPECT_FALSE(segment_intersection({{0, 0}, {1, 1}}, {{3, 0}, {2, 1}}));
}

TEST(SegmentIntersection, SymmetricAndRigidEquivariant) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> c(-10, 10), ang(0, 6.283185307179586);
  int hits = 0;
  for (int t = 0; t < 2000; ++t) {
    const Segment s1{{c(rng), c(rng)}, {c(rng), c(rng)}}, s2{{c(rng), c(rng)}, {c(rng), c(rng)}};
    const auto a = segment_intersection(s1, s2), b = segment_intersection(s2, s1);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (!a)
      continue;
    ++hits;
    expect_point(*b, a->x, a->y, 1e-9);
    const double th = ang(rng), cs = std::cos(th), sn = std::sin(th);
    const Point d{c(rng), c(rng)};
    auto f = [&](Point p) { return Point{cs * p.x - sn * p.y + d.x, sn * p.x + cs * p.y + d.y}; };
    const auto m = segment_intersection({f(s1.a), f(s1.b)}, {f(s2.a), f(s2.b)});
    ASSERT_TRUE(m);
    const Point fa = f(*a);
    expect_point(*m, fa.x, fa.y, 1e-9);
  }
  EXPECT_GT(hits, 100);
}

TEST(Rasterize, HorizontalOnePixelLineIsBresenhamRun) {
  const auto img = rasterize(test::make_sketch({{{2, 5}, {12, 5}}}, 32), 1.0);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      EXPECT_EQ(img(x, y), (y == 5 && x >= 2 && x <= 12) ? 1.0 : 0.0) << x << "," << y;
}

TEST(Rasterize, SquareOutlinePixelCount) {
  const auto sk = test::make_sketch({{{5, 5}, {14, 5}, {14, 14}, {5, 14}, {5, 5}}}, 20);
  const auto img = draw_polylines(sk.strokes, 20, 20, 1.0);
  double sum = 0;
  for (double v : img.pixels())
    sum += v;
  EXPECT_EQ(sum, 36.0);
}

TEST(Rasterize, InkIsPositiveAndBinary) {
  const auto sk = test::fixture(FixtureKind::star);
  const auto img = rasterize(sk, 2.0);
  double sum = 0;
  for (double v : img.pixels()) {
    EXPECT_TRUE(v == 0.0 || v == 1.0);
    sum += v;
  }
  EXPECT_GT(sum, 0.0);
}

TEST(Rasterize, WideStrokeCoversCapsule) {
  const auto img = draw_polylines({{{10, 10}, {20, 10}}}, 32, 32, 4.0);
  EXPECT_EQ(img(10, 12), 1.0);
  EXPECT_EQ(img(8, 10), 1.0);
  EXPECT_EQ(img(15, 13), 0.0);
  EXPECT_EQ(img(23, 10), 0.0);
}

TEST(Rasterize, UnnormalizedSketchRejected) {
  EXPECT_THROW(rasterize(test::make_sketch({{{0, 0}, {5, 5}}}, 0), 1.0), InvalidArgument);
}
