#pragma once

#include "error.hpp"
#include "geometry.hpp"

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace lineart {

/// Undirected multigraph as per-vertex neighbour lists kept in ascending
/// order. Each edge appears once in each endpoint's list.
class AdjacencyList {
public:
  AdjacencyList() = default;
  explicit AdjacencyList(std::size_t n)
    : adj_(n) {}

  static AdjacencyList from_edges(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
    AdjacencyList a(n);
    for (auto [u, v] : edges)
      a.add_edge(u, v);
    return a;
  }

  /// Takes neighbour lists as given; they are sorted and checked for symmetry.
  static AdjacencyList from_lists(std::vector<std::vector<int>> lists) {
    AdjacencyList a;
    a.adj_ = std::move(lists);
    const int n = static_cast<int>(a.adj_.size());
    for (auto& l : a.adj_)
      std::sort(l.begin(), l.end());
    for (int u = 0; u < n; ++u) {
      for (int v : a.adj_[u]) {
        if (v < 0 || v >= n)
          throw InvalidArgument("neighbour index " + std::to_string(v) + " out of range");
        if (v == u)
          throw InvalidArgument("self-loop at vertex " + std::to_string(u));
        const auto fwd = std::count(a.adj_[u].begin(), a.adj_[u].end(), v);
        const auto back = std::count(a.adj_[v].begin(), a.adj_[v].end(), u);
        if (fwd != back)
          throw InvalidArgument("graph not undirected");
      }
    }
    return a;
  }

  std::size_t size() const { return adj_.size(); }
  const std::vector<int>& neighbours(int u) const { return adj_[u]; }
  bool empty(int u) const { return adj_[u].empty(); }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& l : adj_)
      n += l.size();
    return n / 2;
  }

  void add_edge(int u, int v) {
    if (u == v)
      throw InvalidArgument("self-loop at vertex " + std::to_string(u));
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= adj_.size() || static_cast<std::size_t>(v) >= adj_.size())
      throw InvalidArgument("edge endpoint out of range");
    adj_[u].insert(std::upper_bound(adj_[u].begin(), adj_[u].end(), v), v);
    adj_[v].insert(std::upper_bound(adj_[v].begin(), adj_[v].end(), u), u);
  }

  /// Removes one copy of edge (u, v).
  void pop_edge(int u, int v) {
    erase_one(adj_[u], v);
    erase_one(adj_[v], u);
  }

private:
  static void erase_one(std::vector<int>& l, int v) {
    auto it = std::lower_bound(l.begin(), l.end(), v);
    if (it == l.end() || *it != v)
      throw InvalidArgument("pop_edge: edge not present");
    l.erase(it);
  }

  std::vector<std::vector<int>> adj_;
};

using StrokeSequence = std::vector<std::vector<int>>;

/// Extends `stroke` from u by repeatedly following (and removing) the
/// lowest-index remaining edge until the current vertex has none left.
inline void get_sequence(AdjacencyList& a, int u, std::vector<int>& stroke) {
  while (!a.empty(u)) {
    const int w = a.neighbours(u).front();
    a.pop_edge(u, w);
    stroke.push_back(w);
    u = w;
  }
}

/// Partitions every edge into pen strokes. Each stroke starts at the
/// lowest-index vertex that still has edges.
inline StrokeSequence strokes_gen(AdjacencyList a) {
  StrokeSequence strokes;
  int v = 0;
  const int n = static_cast<int>(a.size());
  for (;;) {
    while (v < n && a.empty(v))
      ++v;
    if (v == n)
      break;
    const int u = a.neighbours(v).front();
    std::vector<int> stroke{v, u};
    a.pop_edge(v, u);
    get_sequence(a, u, stroke);
    strokes.push_back(std::move(stroke));
  }
  return strokes;
}

inline std::vector<Polyline> strokes_to_points(const StrokeSequence& seq, const std::vector<Point>& vertices) {
  std::vector<Polyline> out;
  out.reserve(seq.size());
  for (const auto& s : seq) {
    Polyline line;
    line.reserve(s.size());
    for (int idx : s) {
      if (idx < 0 || static_cast<std::size_t>(idx) >= vertices.size())
        throw InvalidArgument("stroke vertex index " + std::to_string(idx) + " out of range");
      line.push_back(vertices[idx]);
    }
    out.push_back(std::move(line));
  }
  return out;
}

} // namespace lineart
