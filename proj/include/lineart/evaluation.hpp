#pragma once

#include "geometry.hpp"
#include "labels.hpp"

#include <algorithm>
#include <cstddef>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

namespace lineart {

/// One-to-one matching of predicted to true vertices within `tolerance`,
/// closest pairs first. Returns, per predicted vertex, the true index or -1.
inline std::vector<int> match_vertices(const std::vector<Point>& pred, const std::vector<Point>& truth, double tolerance) {
  std::vector<std::tuple<double, int, int>> cand;
  for (std::size_t i = 0; i < pred.size(); ++i)
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const double d = distance(pred[i], truth[j]);
      if (d <= tolerance)
        cand.emplace_back(d, static_cast<int>(i), static_cast<int>(j));
    }
  std::sort(cand.begin(), cand.end());
  std::vector<int> out(pred.size(), -1);
  std::vector<bool> used(truth.size(), false);
  for (const auto& [d, i, j] : cand) {
    if (out[i] >= 0 || used[j])
      continue;
    out[i] = j;
    used[j] = true;
  }
  return out;
}

struct EdgeScore {
  std::size_t true_positive = 0;
  std::size_t predicted = 0;
  std::size_t truth = 0;

  double recall() const { return truth ? double(true_positive) / truth : 1.0; }
  double precision() const { return predicted ? double(true_positive) / predicted : (truth ? 0.0 : 1.0); }
  double f1() const {
    const double p = precision(), r = recall();
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  EdgeScore& operator+=(const EdgeScore& o) {
    true_positive += o.true_positive;
    predicted += o.predicted;
    truth += o.truth;
    return *this;
  }
};

/// Edge-level agreement after matching vertices within `tolerance` px.
inline EdgeScore score_edges(const GraphData& pred, const GraphData& truth, double tolerance = 2.0) {
  const auto m = match_vertices(pred.vertices, truth.vertices, tolerance);
  std::set<std::pair<int, int>> true_edges;
  for (auto [a, b] : truth.edges)
    true_edges.emplace(std::min(a, b), std::max(a, b));
  std::set<std::pair<int, int>> hits;
  for (auto [a, b] : pred.edges) {
    const int ta = m[a], tb = m[b];
    if (ta < 0 || tb < 0)
      continue;
    const std::pair<int, int> e{std::min(ta, tb), std::max(ta, tb)};
    if (true_edges.count(e))
      hits.insert(e);
  }
  return {hits.size(), pred.edges.size(), true_edges.size()};
}

/// Edges of `truth` that are missing from `pred`.
inline std::size_t missed_edges(const GraphData& pred, const GraphData& truth, double tolerance = 2.0) {
  const auto s = score_edges(pred, truth, tolerance);
  return s.truth - s.true_positive;
}

} // namespace lineart
