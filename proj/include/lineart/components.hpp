#pragma once

#include "geometry.hpp"
#include "image.hpp"

#include <algorithm>
#include <cstddef>
#include <vector>

namespace lineart {

enum class Connectivity { four = 4, eight = 8 };

struct PixelBox {
  int min_x = 0;
  int min_y = 0;
  int max_x = 0;
  int max_y = 0;

  bool contains(Point p, double pad = 0.0) const {
    return p.x >= min_x - pad && p.x <= max_x + pad && p.y >= min_y - pad && p.y <= max_y + pad;
  }
};

struct Component {
  std::size_t pixel_count = 0;
  Point centroid;
  PixelBox bbox;
  /// Largest distance from the centroid to a member pixel centre.
  double extent = 0.0;
};

/// Components plus a per-pixel index into them (-1 elsewhere, including
/// pixels of components dropped by the area filter).
struct ComponentMap {
  std::vector<Component> components;
  Image<int> labels;
};

/// Maximal connected regions of nonzero pixels with at least `min_area`
/// pixels, ordered by (bbox.min_y, bbox.min_x).
inline ComponentMap label_components(const BinaryImage& img, Connectivity conn = Connectivity::eight,
                                     std::size_t min_area = 1) {
  const int w = img.width(), h = img.height();
  Image<int> raw(w, h, -1);
  std::vector<std::vector<std::pair<int, int>>> members;
  std::vector<std::pair<int, int>> stack;

  static constexpr int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
  const int neighbours = conn == Connectivity::eight ? 8 : 4;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!img(x, y) || raw(x, y) >= 0)
        continue;
      const int id = static_cast<int>(members.size());
      members.emplace_back();
      auto& pix = members.back();
      raw(x, y) = id;
      stack.push_back({x, y});
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        pix.push_back({cx, cy});
        for (int k = 0; k < neighbours; ++k) {
          const int nx = cx + dx8[k], ny = cy + dy8[k];
          if (img.contains(nx, ny) && img(nx, ny) && raw(nx, ny) < 0) {
            raw(nx, ny) = id;
            stack.push_back({nx, ny});
          }
        }
      }
    }
  }

  struct Pending {
    Component comp;
    int raw_id;
  };
  std::vector<Pending> kept;
  for (std::size_t id = 0; id < members.size(); ++id) {
    const auto& pix = members[id];
    if (pix.size() < min_area)
      continue;
    Component c;
    c.pixel_count = pix.size();
    c.bbox = {pix[0].first, pix[0].second, pix[0].first, pix[0].second};
    double sx = 0.0, sy = 0.0;
    for (auto [px, py] : pix) {
      sx += px;
      sy += py;
      c.bbox.min_x = std::min(c.bbox.min_x, px);
      c.bbox.min_y = std::min(c.bbox.min_y, py);
      c.bbox.max_x = std::max(c.bbox.max_x, px);
      c.bbox.max_y = std::max(c.bbox.max_y, py);
    }
    c.centroid = {sx / pix.size(), sy / pix.size()};
    for (auto [px, py] : pix)
      c.extent = std::max(c.extent, distance(c.centroid, {double(px), double(py)}));
    kept.push_back({c, static_cast<int>(id)});
  }
  std::stable_sort(kept.begin(), kept.end(), [](const Pending& a, const Pending& b) {
    if (a.comp.bbox.min_y != b.comp.bbox.min_y)
      return a.comp.bbox.min_y < b.comp.bbox.min_y;
    return a.comp.bbox.min_x < b.comp.bbox.min_x;
  });

  ComponentMap out;
  out.labels = Image<int>(w, h, -1);
  std::vector<int> remap(members.size(), -1);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    remap[kept[i].raw_id] = static_cast<int>(i);
    out.components.push_back(kept[i].comp);
  }
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (raw.pixels()[i] >= 0)
      out.labels.pixels()[i] = remap[raw.pixels()[i]];
  return out;
}

inline std::vector<Component> connected_components(const BinaryImage& img, Connectivity conn = Connectivity::eight,
                                                   std::size_t min_area = 1) {
  return label_components(img, conn, min_area).components;
}

/// Binary dilation with a Euclidean disc of the given radius.
inline BinaryImage dilate(const BinaryImage& img, int radius) {
  if (radius <= 0)
    return img;
  std::vector<std::pair<int, int>> offsets;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius)
        offsets.push_back({dx, dy});
  BinaryImage out(img.width(), img.height(), 0);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      if (!img(x, y))
        continue;
      for (auto [dx, dy] : offsets)
        if (out.contains(x + dx, y + dy))
          out(x + dx, y + dy) = 1;
    }
  return out;
}

} // namespace lineart
