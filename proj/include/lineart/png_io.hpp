#pragma once

#include "error.hpp"
#include "image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace lineart {

/// Writes an 8-bit single-channel PNG.
inline void write_png_gray8(const std::string& path, const Image<std::uint8_t>& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.pixels().data(), 0, nullptr))
    throw IoError("cannot write PNG '" + path + "': " + image.message);
}

/// Reads any PNG as 8-bit gray.
inline Image<std::uint8_t> read_png_gray8(const std::string& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw IoError("cannot read PNG '" + path + "': " + image.message);
  image.format = PNG_FORMAT_GRAY;
  Image<std::uint8_t> img(static_cast<int>(image.width), static_cast<int>(image.height));
  if (!png_image_finish_read(&image, nullptr, img.pixels().data(), 0, nullptr)) {
    png_image_free(&image);
    throw IoError("cannot decode PNG '" + path + "': " + image.message);
  }
  return img;
}

/// Ink is stored as 255, background as 0.
inline void write_gray_png(const std::string& path, const GrayImage& img) {
  Image<std::uint8_t> bytes(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i)
    bytes.pixels()[i] = static_cast<std::uint8_t>(std::lround(std::clamp(img.pixels()[i], 0.0, 1.0) * 255.0));
  write_png_gray8(path, bytes);
}

inline GrayImage read_gray_png(const std::string& path) {
  const auto bytes = read_png_gray8(path);
  GrayImage img(bytes.width(), bytes.height());
  for (std::size_t i = 0; i < bytes.size(); ++i)
    img.pixels()[i] = bytes.pixels()[i] / 255.0;
  return img;
}

/// Class ids are stored verbatim as gray levels.
inline void write_label_png(const std::string& path, const LabelImage& labels) { write_png_gray8(path, labels); }

inline LabelImage read_label_png(const std::string& path, int classes = kNumClasses) {
  auto labels = read_png_gray8(path);
  for (auto v : labels.pixels())
    if (v >= classes)
      throw IoError("label PNG '" + path + "' holds class id " + std::to_string(v) + " >= " + std::to_string(classes));
  return labels;
}

} // namespace lineart
