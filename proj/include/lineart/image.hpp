#pragma once

#include "error.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace lineart {

/// Dense row-major raster. Pixel (x, y) has its centre at integer
/// coordinates (x, y); rows grow downwards.
template <class T>
class Image {
public:
  Image() = default;
  Image(int width, int height, T fill = T{})
    : width_(width)
    , height_(height)
    , pixels_(checked_area(width, height), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  T& operator()(int x, int y) { return pixels_[index(x, y)]; }
  const T& operator()(int x, int y) const { return pixels_[index(x, y)]; }

  std::vector<T>& pixels() { return pixels_; }
  const std::vector<T>& pixels() const { return pixels_; }

  bool same_shape(int w, int h) const { return width_ == w && height_ == h; }
  template <class U>
  bool same_shape(const Image<U>& other) const {
    return same_shape(other.width(), other.height());
  }

  friend bool operator==(const Image&, const Image&) = default;

private:
  static std::size_t checked_area(int w, int h) {
    if (w < 0 || h < 0)
      throw InvalidArgument("image dimensions must be non-negative");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> pixels_;
};

/// Intensities in [0, 1]; 1 is ink.
using GrayImage = Image<double>;
/// 0/1 mask.
using BinaryImage = Image<std::uint8_t>;

/// Hard per-pixel class ids.
using LabelImage = Image<std::uint8_t>;

enum Label : std::uint8_t { kBackground = 0, kLines = 1, kCorners = 2 };
inline constexpr int kNumClasses = 3;

/// K planes of per-pixel class probabilities, stored plane-major (k, y, x).
class ProbabilityMap {
public:
  ProbabilityMap() = default;
  ProbabilityMap(int classes, int width, int height, double fill = 0.0)
    : classes_(classes)
    , width_(width)
    , height_(height)
    , probs_(static_cast<std::size_t>(classes) * static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
             fill) {
    if (classes <= 0 || width < 0 || height < 0)
      throw InvalidArgument("probability map dimensions must be positive");
  }

  int classes() const { return classes_; }
  int width() const { return width_; }
  int height() const { return height_; }

  double& operator()(int c, int x, int y) { return probs_[index(c, x, y)]; }
  double operator()(int c, int x, int y) const { return probs_[index(c, x, y)]; }

  std::vector<double>& data() { return probs_; }
  const std::vector<double>& data() const { return probs_; }

  /// One class plane as an image.
  GrayImage channel(int c) const {
    GrayImage out(width_, height_);
    for (int y = 0; y < height_; ++y)
      for (int x = 0; x < width_; ++x)
        out(x, y) = (*this)(c, x, y);
    return out;
  }

  template <class U>
  bool same_shape(const Image<U>& img) const {
    return img.width() == width_ && img.height() == height_;
  }

private:
  std::size_t index(int c, int x, int y) const {
    return (static_cast<std::size_t>(c) * static_cast<std::size_t>(height_) + static_cast<std::size_t>(y)) *
             static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int classes_ = 0;
  int width_ = 0;
  int height_ = 0;
  std::vector<double> probs_;
};

inline BinaryImage binarize(const GrayImage& img, double threshold) {
  BinaryImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i)
    out.pixels()[i] = img.pixels()[i] > threshold ? 1 : 0;
  return out;
}

inline std::size_t count_nonzero(const BinaryImage& img) {
  std::size_t n = 0;
  for (auto v : img.pixels())
    n += v != 0;
  return n;
}

template <class T>
void require_same_shape(const Image<T>& a, int w, int h, const char* what) {
  if (!a.same_shape(w, h))
    throw ShapeMismatch(std::string(what) + ": image shapes differ (" + std::to_string(a.width()) + "x" +
                        std::to_string(a.height()) + " vs " + std::to_string(w) + "x" + std::to_string(h) + ")");
}

} // namespace lineart
