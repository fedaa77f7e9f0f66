#pragma once

#include "error.hpp"
#include "formats.hpp"
#include "labels.hpp"
#include "png_io.hpp"
#include "sketch.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace lineart {

struct RasterParams {
  int canvas_size = 256;
  double stroke_width = 2.0;
  double corner_radius = 3.0;
};

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

struct ManifestEntry {
  std::string id;
  std::string split; // "train" or "test"
  std::string input;  // paths relative to the dataset root
  std::string labels;
  std::string graph;
};

struct Manifest {
  RasterParams params;
  SplitSpec split;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::vector<ManifestEntry> samples; // in source order
};

inline nlohmann::json to_json(const Manifest& m) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& e : m.samples)
    samples.push_back({{"id", e.id}, {"split", e.split}, {"input", e.input}, {"labels", e.labels}, {"graph", e.graph}});
  return {{"params",
           {{"canvas_size", m.params.canvas_size},
            {"stroke_width", m.params.stroke_width},
            {"corner_radius", m.params.corner_radius}}},
          {"seed", m.split.seed},
          {"train_fraction", m.split.train_fraction},
          {"counts", {{"train", m.train_count}, {"test", m.test_count}}},
          {"samples", std::move(samples)}};
}

inline Manifest manifest_from_json(const nlohmann::json& j) {
  Manifest m;
  try {
    const auto& p = j.at("params");
    m.params = {p.at("canvas_size").get<int>(), p.at("stroke_width").get<double>(), p.at("corner_radius").get<double>()};
    m.split = {j.at("train_fraction").get<double>(), j.at("seed").get<std::uint64_t>()};
    m.train_count = j.at("counts").at("train").get<std::size_t>();
    m.test_count = j.at("counts").at("test").get<std::size_t>();
    for (const auto& e : j.at("samples"))
      m.samples.push_back({e.at("id").get<std::string>(), e.at("split").get<std::string>(),
                           e.at("input").get<std::string>(), e.at("labels").get<std::string>(),
                           e.at("graph").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("manifest: ") + e.what());
  }
  return m;
}

/// Train membership per source index: a seeded Fisher-Yates permutation,
/// the first floor(n * fraction) positions go to train.
inline std::vector<bool> split_membership(std::size_t n, const SplitSpec& split) {
  if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0))
    throw InvalidArgument("train fraction must lie strictly between 0 and 1");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i)
    order[i] = i;
  std::mt19937_64 rng(split.seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t k = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[k]);
  }
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * split.train_fraction));
  std::vector<bool> train(n, false);
  for (std::size_t i = 0; i < n_train; ++i)
    train[order[i]] = true;
  return train;
}

inline std::string sample_id(const Sketch& s, std::size_t index) {
  if (!s.id.empty())
    return s.id;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", index);
  return buf;
}

/// Writes input image, label image and ground-truth graph for every sketch
/// under `<out_dir>/{train,test}/`, plus `manifest.json`. Output is a pure
/// function of (source, params, split).
inline Manifest generate_dataset(const std::vector<Sketch>& source, const std::filesystem::path& out_dir,
                                 const RasterParams& params, const SplitSpec& split, unsigned threads = 0) {
  namespace fs = std::filesystem;
  if (source.empty())
    throw InvalidArgument("generate_dataset: empty source");
  const auto train = split_membership(source.size(), split);

  Manifest m;
  m.params = params;
  m.split = split;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < source.size(); ++i) {
    ManifestEntry e;
    e.id = sample_id(source[i], i);
    if (!seen.insert(e.id).second)
      throw InvalidArgument("duplicate sample id '" + e.id + "'");
    e.split = train[i] ? "train" : "test";
    e.input = e.split + "/" + e.id + ".input.png";
    e.labels = e.split + "/" + e.id + ".labels.png";
    e.graph = e.split + "/" + e.id + ".graph.json";
    (train[i] ? m.train_count : m.test_count) += 1;
    m.samples.push_back(std::move(e));
  }

  std::error_code ec;
  for (const char* sub : {"train", "test"}) {
    fs::create_directories(out_dir / sub, ec);
    if (ec)
      throw IoError("cannot create '" + (out_dir / sub).string() + "': " + ec.message());
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= source.size())
        return;
      try {
        const Sketch sk = source[i].canvas_size == params.canvas_size
                            ? source[i]
                            : normalize(source[i], params.canvas_size, params.stroke_width, params.corner_radius);
        const auto sample = make_labels(sk, params.stroke_width, params.corner_radius);
        const auto& e = m.samples[i];
        write_gray_png((out_dir / e.input).string(), sample.input);
        write_label_png((out_dir / e.labels).string(), sample.labels);
        write_json_file((out_dir / e.graph).string(), graph_to_json(ground_truth_graph(sk, params.corner_radius)));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next = source.size();
        return;
      }
    }
  };
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(source.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t)
      pool.emplace_back(worker);
    worker();
  }
  if (failure)
    std::rethrow_exception(failure);

  write_json_file((out_dir / "manifest.json").string(), to_json(m));
  return m;
}

} // namespace lineart
