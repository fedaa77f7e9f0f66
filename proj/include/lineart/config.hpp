#pragma once

#include "dataset.hpp"
#include "emit.hpp"
#include "error.hpp"
#include "fixtures.hpp"
#include "graph_interp.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace lineart {

/// Everything a pipeline command needs. Serialized flat, so config keys and
/// command-line flags share the same names.
struct PipelineConfig {
  RasterParams raster;
  InterpParams interp;
  MachineFrame frame;

  std::uint64_t seed = 0;
  long count = -1; // -1: use every source record
  double train_fraction = 0.8;
  unsigned threads = 0; // 0: hardware concurrency
  std::string format = "ndjson";
  std::string kind; // fixture kind, empty: cycle through all
  std::vector<double> betas{3.0, 5.0, 7.0};
  std::size_t nonedge_sample = 50;
  double match_tolerance = 2.0;

  std::string source, input, labels, probs, pred, truth, manifest, out;

  void validate() const {
    interp.validate();
    if (raster.canvas_size < 32)
      throw InvalidArgument("canvas_size must be at least 32");
    if (!(raster.stroke_width > 0.0))
      throw InvalidArgument("stroke_width must be positive");
    if (!(raster.corner_radius > 0.0))
      throw InvalidArgument("corner_radius must be positive");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
      throw InvalidArgument("train_fraction must lie in (0, 1)");
    if (format != "ndjson" && format != "json")
      throw InvalidArgument("format must be ndjson or json");
    if (!kind.empty() && !fixture_from_name(kind))
      throw InvalidArgument("unknown fixture kind '" + kind + "'");
    if (!(frame.box_size_mm > 0.0))
      throw InvalidArgument("box_size_mm must be positive");
    if (!(frame.unit_scale > 0.0))
      throw InvalidArgument("unit_scale must be positive");
    if (!(match_tolerance > 0.0))
      throw InvalidArgument("match_tolerance must be positive");
    for (double b : betas)
      if (!(b > 0.0))
        throw InvalidArgument("every beta must be positive");
  }
};

inline nlohmann::json to_json(const PipelineConfig& c) {
  return {
    {"canvas_size", c.raster.canvas_size},
    {"stroke_width", c.raster.stroke_width},
    {"corner_radius", c.raster.corner_radius},
    {"beta", c.interp.beta},
    {"tau0", c.interp.tau0},
    {"lambda", c.interp.lambda},
    {"n_iters", c.interp.n_iters},
    {"binarize_threshold", c.interp.binarize_threshold},
    {"min_blob_area", c.interp.min_blob_area},
    {"dilate_px", c.interp.dilate_px},
    {"render_width", c.interp.render_width},
    {"blob_pad_px", c.interp.blob_pad_px},
    {"max_edge_length", c.interp.max_edge_length},
    {"split_at_corners", c.interp.split_at_corners},
    {"connectivity", c.interp.connectivity == Connectivity::four ? 4 : 8},
    {"box_size_mm", c.frame.box_size_mm},
    {"origin_x_mm", c.frame.origin_mm.x},
    {"origin_y_mm", c.frame.origin_mm.y},
    {"safe_z_mm", c.frame.safe_z_mm},
    {"unit_scale", c.frame.unit_scale},
    {"gcode_header", c.frame.header},
    {"seed", c.seed},
    {"count", c.count},
    {"train_fraction", c.train_fraction},
    {"threads", c.threads},
    {"format", c.format},
    {"kind", c.kind},
    {"betas", c.betas},
    {"nonedge_sample", c.nonedge_sample},
    {"match_tolerance", c.match_tolerance},
    {"source", c.source},
    {"input", c.input},
    {"labels", c.labels},
    {"probs", c.probs},
    {"pred", c.pred},
    {"truth", c.truth},
    {"manifest", c.manifest},
    {"out", c.out},
  };
}

namespace detail {

template <class T>
void take(const nlohmann::json& j, const char* key, T& dst) {
  if (j.contains(key))
    j.at(key).get_to(dst);
}

} // namespace detail

/// Overlays the keys present in `j` onto `base`. Unknown keys are rejected so
/// that typos do not silently fall back to defaults.
inline PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {}) {
  if (!j.is_object())
    throw InvalidArgument("config must be a JSON object");
  const auto known = to_json(base);
  for (const auto& [key, _] : j.items())
    if (!known.contains(key))
      throw InvalidArgument("unknown config key '" + key + "'");
  try {
    using detail::take;
    auto& c = base;
    take(j, "canvas_size", c.raster.canvas_size);
    take(j, "stroke_width", c.raster.stroke_width);
    take(j, "corner_radius", c.raster.corner_radius);
    take(j, "beta", c.interp.beta);
    take(j, "tau0", c.interp.tau0);
    take(j, "lambda", c.interp.lambda);
    take(j, "n_iters", c.interp.n_iters);
    take(j, "binarize_threshold", c.interp.binarize_threshold);
    take(j, "min_blob_area", c.interp.min_blob_area);
    take(j, "dilate_px", c.interp.dilate_px);
    take(j, "render_width", c.interp.render_width);
    take(j, "blob_pad_px", c.interp.blob_pad_px);
    take(j, "max_edge_length", c.interp.max_edge_length);
    take(j, "split_at_corners", c.interp.split_at_corners);
    if (j.contains("connectivity")) {
      const int n = j.at("connectivity").get<int>();
      if (n != 4 && n != 8)
        throw InvalidArgument("connectivity must be 4 or 8");
      c.interp.connectivity = n == 4 ? Connectivity::four : Connectivity::eight;
    }
    take(j, "box_size_mm", c.frame.box_size_mm);
    take(j, "origin_x_mm", c.frame.origin_mm.x);
    take(j, "origin_y_mm", c.frame.origin_mm.y);
    take(j, "safe_z_mm", c.frame.safe_z_mm);
    take(j, "unit_scale", c.frame.unit_scale);
    take(j, "gcode_header", c.frame.header);
    take(j, "seed", c.seed);
    take(j, "count", c.count);
    take(j, "train_fraction", c.train_fraction);
    take(j, "threads", c.threads);
    take(j, "format", c.format);
    take(j, "kind", c.kind);
    take(j, "betas", c.betas);
    take(j, "nonedge_sample", c.nonedge_sample);
    take(j, "match_tolerance", c.match_tolerance);
    take(j, "source", c.source);
    take(j, "input", c.input);
    take(j, "labels", c.labels);
    take(j, "probs", c.probs);
    take(j, "pred", c.pred);
    take(j, "truth", c.truth);
    take(j, "manifest", c.manifest);
    take(j, "out", c.out);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return base;
}

} // namespace lineart
