#pragma once

#include "error.hpp"
#include "evaluation.hpp"
#include "graph_interp.hpp"
#include "image.hpp"
#include "labels.hpp"
#include "sketch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace lineart {

/// An input image with segmentation masks and its ground-truth graph.
struct StudySample {
  std::string id;
  GrayImage input;
  ProbabilityMap probs;
  GraphData truth;
};

/// Oracle sample of a normalized sketch: its raster, one-hot masks and
/// ground-truth graph.
inline StudySample oracle_sample(const Sketch& sk, double stroke_width, double corner_radius) {
  auto lab = make_labels(sk, stroke_width, corner_radius);
  return {sk.id, std::move(lab.input), labels_to_probmap(lab.labels), ground_truth_graph(sk, corner_radius)};
}

struct ImageThreshold {
  std::string id;
  std::size_t vertices = 0;
  std::size_t true_edges = 0;
  double tau_hat = 0.0;
  double eta_mean = 0.0;
  /// Smallest score among ground-truth edges whose endpoints were found.
  double min_true_eta = 0.0;
  /// Largest score among the sampled non-edge pairs.
  double max_nonedge_eta = 0.0;
  bool separated = false;
};

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> counts;

  double bin_width() const { return (hi - lo) / counts.size(); }
  void add(double v) {
    const auto n = static_cast<long>(counts.size());
    long b = static_cast<long>(std::floor((v - lo) / bin_width()));
    counts[static_cast<std::size_t>(std::clamp(b, 0L, n - 1))] += 1;
  }
  std::size_t total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }
};

/// Moving average over a centred window of `k` bins, clipped at the ends.
inline std::vector<double> smooth(const std::vector<std::size_t>& counts, int k) {
  const int n = static_cast<int>(counts.size()), half = k / 2;
  std::vector<double> out(counts.size());
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    int m = 0;
    for (int j = std::max(0, i - half); j <= std::min(n - 1, i + half); ++j) {
      s += counts[j];
      ++m;
    }
    out[i] = s / m;
  }
  return out;
}

/// Non-decreasing up to a peak, non-increasing after it.
inline bool is_unimodal(const std::vector<double>& v) {
  std::size_t i = 1;
  while (i < v.size() && v[i] >= v[i - 1])
    ++i;
  while (i < v.size() && v[i] <= v[i - 1])
    ++i;
  return i >= v.size();
}

struct BetaStudy {
  double beta = 0.0;
  std::vector<ImageThreshold> images;
  std::size_t skipped = 0;
  Histogram tau_hat{0.0, 1.0, std::vector<std::size_t>(20, 0)};
  Histogram margin{-1.0, 1.0, std::vector<std::size_t>(40, 0)};

  double separated_fraction() const {
    if (images.empty())
      return 0.0;
    std::size_t n = 0;
    for (const auto& im : images)
      n += im.separated;
    return double(n) / images.size();
  }
  bool tau_hat_unimodal(int k = 3) const { return is_unimodal(smooth(tau_hat.counts, k)); }
};

struct StudyOptions {
  int smoothing = 3;
  std::size_t nonedge_sample = 50;
  std::uint64_t seed = 0;
  double match_tolerance = 2.0;
};

/// Approximate threshold from sorted scores: the mean of the scores ranked
/// E-1, E and E+1 (1-based, highest first), clipped to the available ranks.
inline double approximate_threshold(std::vector<double> scores, std::size_t true_edges, int k = 3) {
  if (scores.empty())
    return 0.0;
  std::sort(scores.begin(), scores.end(), std::greater<>());
  const long n = static_cast<long>(scores.size());
  const long centre = static_cast<long>(true_edges) - 1; // 0-based index of rank E
  const long half = k / 2;
  const long lo = std::clamp(centre - half, 0L, n - 1), hi = std::clamp(centre + half, 0L, n - 1);
  double s = 0.0;
  for (long i = lo; i <= hi; ++i)
    s += scores[i];
  return s / (hi - lo + 1);
}

/// Plausibility-score separation study for each mask width.
inline std::vector<BetaStudy> threshold_study(const std::vector<StudySample>& samples, const std::vector<double>& betas,
                                              const InterpParams& base, const StudyOptions& opt = {}) {
  if (betas.empty())
    throw InvalidArgument("threshold_study: no mask widths given");
  std::vector<BetaStudy> out;
  for (double beta : betas) {
    BetaStudy bs;
    bs.beta = beta;
    std::mt19937_64 rng(opt.seed);
    for (const auto& s : samples) {
      InterpParams p = base;
      p.beta = beta;
      const auto blobs = corner_blobs(s.probs, p);
      const std::size_t n = blobs.vertices.size();
      if (n < 2) {
        ++bs.skipped;
        continue;
      }
      StrokeGraph g;
      g.vertices = blobs.vertices;
      g.radii = blobs.radii;
      const GrayImage lines = s.probs.channel(kLines);
      const PairScorer scorer(lines, blobs.labels, g.vertices, g.radii, beta, p.split_at_corners);
      score_pairs(g, scorer, p.max_edge_length);

      const auto match = match_vertices(g.vertices, s.truth.vertices, opt.match_tolerance);
      std::vector<int> truth_to_pred(s.truth.vertices.size(), -1);
      for (std::size_t i = 0; i < n; ++i)
        if (match[i] >= 0)
          truth_to_pred[match[i]] = static_cast<int>(i);
      std::vector<char> is_edge(n * n, 0);
      for (auto [a, b] : s.truth.edges) {
        const int pa = truth_to_pred[a], pb = truth_to_pred[b];
        if (pa >= 0 && pb >= 0)
          is_edge[std::min(pa, pb) * n + std::max(pa, pb)] = 1;
      }

      std::vector<double> scores, nonedges;
      double min_true = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          const double e = g.score(int(i), int(j));
          scores.push_back(e);
          if (is_edge[i * n + j])
            min_true = std::min(min_true, e);
          else
            nonedges.push_back(e);
        }
      // Partial Fisher-Yates: a uniform sample of the non-edge scores.
      const std::size_t take = std::min(opt.nonedge_sample, nonedges.size());
      for (std::size_t i = 0; i < take; ++i) {
        const std::size_t r = i + static_cast<std::size_t>(rng() % (nonedges.size() - i));
        std::swap(nonedges[i], nonedges[r]);
      }
      double max_non = 0.0;
      for (std::size_t i = 0; i < take; ++i)
        max_non = std::max(max_non, nonedges[i]);

      ImageThreshold it;
      it.id = s.id;
      it.vertices = n;
      it.true_edges = s.truth.edges.size();
      it.tau_hat = approximate_threshold(scores, it.true_edges, opt.smoothing);
      it.eta_mean = std::accumulate(scores.begin(), scores.end(), 0.0) / scores.size();
      it.min_true_eta = std::isfinite(min_true) ? min_true : 0.0;
      it.max_nonedge_eta = max_non;
      it.separated = std::isfinite(min_true) && min_true > max_non;
      bs.tau_hat.add(it.tau_hat);
      bs.margin.add(it.tau_hat - it.eta_mean);
      bs.images.push_back(std::move(it));
    }
    out.push_back(std::move(bs));
  }
  return out;
}

struct PresetResult {
  FixedTauPreset preset;
  EdgeScore total;
  double mean_f1 = 0.0;
};

/// Interprets every sample once per preset with a fixed threshold (no
/// feedback) and scores the edges against ground truth.
inline PresetResult evaluate_fixed_tau(const std::vector<StudySample>& samples, FixedTauPreset preset,
                                       const InterpParams& base, double tolerance = 2.0) {
  InterpParams p = base;
  p.beta = preset.beta;
  p.tau0 = preset.tau;
  p.n_iters = 0;
  PresetResult r{preset, {}, 0.0};
  for (const auto& s : samples) {
    const auto res = interpret(s.input, s.probs, p);
    const auto sc = score_edges(res.graph.data(), s.truth, tolerance);
    r.total += sc;
    r.mean_f1 += sc.f1();
  }
  if (!samples.empty())
    r.mean_f1 /= samples.size();
  return r;
}

} // namespace lineart
