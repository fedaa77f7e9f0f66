#pragma once

#include <lineart/fixtures.hpp>
#include <lineart/sketch.hpp>

#include <filesystem>
#include <random>
#include <string>

namespace lineart::test {

/// Fresh empty directory under the system temp dir, unique per test name.
inline std::filesystem::path scratch_dir(const std::string& name) {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / ("lineart_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline Sketch make_sketch(std::vector<Polyline> strokes, int canvas_size, std::string id = {}) {
  Sketch sk;
  sk.strokes = std::move(strokes);
  sk.canvas_size = canvas_size;
  sk.id = std::move(id);
  return sk;
}

/// One normalized fixture of the given kind.
inline Sketch fixture(FixtureKind kind, std::uint64_t seed = 1, const RasterParams& p = {}) {
  return fixture_suite(1, seed, p, {kind}).front();
}

} // namespace lineart::test
