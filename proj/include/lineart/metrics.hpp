#pragma once

#include "error.hpp"
#include "image.hpp"
#include "labels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace lineart {

/// Per-pixel softmax over the class planes of an activation grid
/// (same layout as a ProbabilityMap). Max-subtracted for stability.
inline ProbabilityMap softmax_map(const ProbabilityMap& activations) {
  const int k = activations.classes();
  ProbabilityMap out(k, activations.width(), activations.height());
  std::vector<double> e(static_cast<std::size_t>(k));
  for (int y = 0; y < activations.height(); ++y) {
    for (int x = 0; x < activations.width(); ++x) {
      double peak = activations(0, x, y);
      for (int c = 1; c < k; ++c)
        peak = std::max(peak, activations(c, x, y));
      double sum = 0.0;
      for (int c = 0; c < k; ++c) {
        e[c] = std::exp(activations(c, x, y) - peak);
        sum += e[c];
      }
      for (int c = 0; c < k; ++c)
        out(c, x, y) = e[c] / sum;
    }
  }
  return out;
}

enum class LossMode { xent, mwx };

/// Class weights for the weighted cross-entropy.
///
/// `omega[c]` is the weight of class id c. `rank[c]` orders classes by
/// non-decreasing weight; the max-weight variant picks the class with the
/// larger rank, so when `rank` is the identity it is literally
/// omega(max(label, predicted)).
struct WeightScheme {
  LossMode mode = LossMode::xent;
  std::vector<double> omega;
  std::vector<int> rank;
  std::vector<int> absent_classes;

  bool identity_order() const {
    for (std::size_t c = 0; c < rank.size(); ++c)
      if (rank[c] != static_cast<int>(c))
        return false;
    return true;
  }
};

/// Weights inversely proportional to class frequency: total / (K * count).
/// Absent classes are counted as a single pixel and reported.
inline WeightScheme class_weights(const LabelImage& labels, int classes = kNumClasses) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(classes), 0);
  for (auto v : labels.pixels()) {
    if (v >= classes)
      throw InvalidArgument("label id out of range");
    ++counts[v];
  }
  WeightScheme w;
  const double total = static_cast<double>(labels.size());
  for (int c = 0; c < classes; ++c) {
    std::size_t n = counts[c];
    if (n == 0) {
      w.absent_classes.push_back(c);
      n = 1;
    }
    w.omega.push_back(total / (classes * static_cast<double>(n)));
  }
  std::vector<int> by_weight(static_cast<std::size_t>(classes));
  std::iota(by_weight.begin(), by_weight.end(), 0);
  std::stable_sort(by_weight.begin(), by_weight.end(), [&](int a, int b) { return w.omega[a] < w.omega[b]; });
  w.rank.assign(static_cast<std::size_t>(classes), 0);
  for (int r = 0; r < classes; ++r)
    w.rank[by_weight[r]] = r;
  return w;
}

inline constexpr double kProbabilityClamp = 1e-12;

/// Negative weighted log-likelihood of the true labels. Summation is
/// row-major in a fixed order, so the result is bit-reproducible.
inline double weighted_xent(const ProbabilityMap& p, const LabelImage& labels, const WeightScheme& scheme) {
  if (!p.same_shape(labels))
    throw ShapeMismatch("weighted_xent: probability map and labels differ in shape");
  if (static_cast<int>(scheme.omega.size()) != p.classes() || static_cast<int>(scheme.rank.size()) != p.classes())
    throw InvalidArgument("weighted_xent: weight scheme does not match class count");
  double loss = 0.0;
  for (int y = 0; y < p.height(); ++y) {
    for (int x = 0; x < p.width(); ++x) {
      const int truth = labels(x, y);
      if (truth >= p.classes())
        throw InvalidArgument("label id out of range");
      int weight_class = truth;
      if (scheme.mode == LossMode::mwx) {
        int predicted = 0;
        for (int c = 1; c < p.classes(); ++c)
          if (p(c, x, y) > p(predicted, x, y))
            predicted = c;
        if (scheme.rank[predicted] > scheme.rank[truth])
          weight_class = predicted;
      }
      loss -= scheme.omega[weight_class] * std::log(std::max(p(truth, x, y), kProbabilityClamp));
    }
  }
  return loss;
}

struct IouReport {
  /// Empty where a class is absent from both images.
  std::vector<std::optional<double>> per_class;
  double mean = 0.0;
};

inline IouReport iou(const LabelImage& pred, const LabelImage& truth, int classes = kNumClasses) {
  if (!pred.same_shape(truth))
    throw ShapeMismatch("iou: prediction and truth differ in shape");
  std::vector<std::size_t> inter(static_cast<std::size_t>(classes), 0), uni(static_cast<std::size_t>(classes), 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int a = pred.pixels()[i], b = truth.pixels()[i];
    if (a >= classes || b >= classes)
      throw InvalidArgument("label id out of range");
    if (a == b) {
      ++inter[a];
      ++uni[a];
    } else {
      ++uni[a];
      ++uni[b];
    }
  }
  IouReport r;
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < classes; ++c) {
    if (uni[c] == 0) {
      r.per_class.emplace_back();
      continue;
    }
    const double v = static_cast<double>(inter[c]) / static_cast<double>(uni[c]);
    r.per_class.emplace_back(v);
    sum += v;
    ++present;
  }
  r.mean = present ? sum / present : 0.0;
  return r;
}

} // namespace lineart
