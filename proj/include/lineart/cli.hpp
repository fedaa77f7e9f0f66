#pragma once

#include "config.hpp"
#include "dataset.hpp"
#include "emit.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "fixtures.hpp"
#include "formats.hpp"
#include "graph_interp.hpp"
#include "labels.hpp"
#include "metrics.hpp"
#include "png_io.hpp"
#include "sketch.hpp"
#include "strokes.hpp"
#include "threshold_study.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace lineart::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kUsage = 2 };

namespace detail {

/// Re-raises a library error with the failing stage prepended, keeping its
/// category so the exit code stays the same.
template <class Fn>
auto staged(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ShapeMismatch& e) {
    throw ShapeMismatch(stage + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError(stage + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(stage + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(e.record(), stage + ": " + e.what());
  } catch (const Error& e) {
    throw Error(stage + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(stage + ": " + e.what());
  }
}

inline void require(const std::string& value, const char* flag) {
  if (value.empty())
    throw InvalidArgument(std::string("--") + flag + " is required");
}

inline void require_file(const std::string& path, const char* what) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw IoError(std::string(what) + " '" + path + "' does not exist");
}

inline std::filesystem::path out_dir(const PipelineConfig& c) {
  namespace fs = std::filesystem;
  const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  return dir;
}

inline std::string beta_tag(double beta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", beta);
  return buf;
}

inline std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline bool has_suffix(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

} // namespace detail

inline int cmd_fixture(const PipelineConfig& c, std::ostream& out) {
  if (c.count == 0)
    throw InvalidArgument("empty dataset requested");
  std::vector<FixtureKind> kinds(kAllFixtureKinds.begin(), kAllFixtureKinds.end());
  if (!c.kind.empty())
    kinds = {*fixture_from_name(c.kind)};
  const std::size_t n = c.count < 0 ? kinds.size() : static_cast<std::size_t>(c.count);
  const auto suite = fixture_suite(n, c.seed, c.raster, kinds);
  const auto path = detail::out_dir(c) / "fixtures.ndjson";
  std::string text;
  for (const auto& sk : suite)
    text += to_quickdraw(sk).dump() + "\n";
  write_text_file(path.string(), text);
  out << path.string() << "\n";
  return kOk;
}

inline int cmd_dataset(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  if (c.count == 0)
    throw InvalidArgument("empty dataset requested");
  detail::require(c.source, "source");
  detail::require_file(c.source, "source file");
  std::ifstream in(c.source, std::ios::binary);
  if (!in)
    throw IoError("cannot open source file '" + c.source + "'");
  auto parsed = detail::staged("parse", [&] {
    return parse_stroke_file(in, c.format == "json" ? StrokeFormat::plain_json : StrokeFormat::ndjson_simplified);
  });
  if (parsed.skipped_strokes)
    err << "warning: skipped " << parsed.skipped_strokes << " stroke(s) with fewer than two points\n";
  auto& sketches = parsed.sketches;
  if (c.count > 0) {
    if (sketches.size() < static_cast<std::size_t>(c.count))
      err << "warning: source holds only " << sketches.size() << " sketch(es)\n";
    else
      sketches.resize(static_cast<std::size_t>(c.count));
  }
  if (sketches.empty())
    throw InvalidArgument("empty dataset requested");
  const auto dir = detail::out_dir(c);
  const auto m = detail::staged("dataset", [&] {
    return generate_dataset(sketches, dir, c.raster, SplitSpec{c.train_fraction, c.seed}, c.threads);
  });
  err << m.train_count << " train, " << m.test_count << " test\n";
  out << (dir / "manifest.json").string() << "\n";
  return kOk;
}

inline int cmd_vectorize(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  detail::require(c.input, "input");
  if (c.labels.empty() == c.probs.empty())
    throw InvalidArgument("exactly one of --labels or --probs is required");
  detail::require_file(c.input, "input image");
  detail::require_file(c.labels.empty() ? c.probs : c.labels, "mask file");

  const auto input = detail::staged("read", [&] { return read_gray_png(c.input); });
  const auto probs = detail::staged("read", [&] {
    return c.labels.empty() ? read_probmap(c.probs) : labels_to_probmap(read_label_png(c.labels));
  });
  if (!probs.same_shape(input))
    throw ShapeMismatch("vectorize: input is " + std::to_string(input.width()) + "x" +
                        std::to_string(input.height()) + " but masks are " + std::to_string(probs.width()) + "x" +
                        std::to_string(probs.height()));
  if (input.width() != input.height())
    throw InvalidArgument("vectorize: canvas must be square");
  const int s = input.width();

  const auto res = detail::staged("interpret", [&] { return interpret(input, probs, c.interp); });
  const auto& g = res.graph;
  const auto seq = detail::staged("strokes", [&] {
    return strokes_gen(AdjacencyList::from_edges(g.size(), g.edges));
  });
  const auto polylines = strokes_to_points(seq, g.vertices);
  const auto gcode = detail::staged("gcode", [&] { return to_gcode(polylines, s, c.frame); });
  const auto svg = to_svg(polylines, s);

  nlohmann::json iters = nlohmann::json::array();
  for (const auto& d : res.iterations)
    iters.push_back({{"iteration", d.iteration},
                     {"edges", d.edges},
                     {"absent", d.absent},
                     {"superfluous", d.superfluous},
                     {"lowered", d.lowered},
                     {"raised", d.raised},
                     {"tau_min", d.tau_min},
                     {"tau_max", d.tau_max},
                     {"tau_mean", d.tau_mean}});
  const nlohmann::json diag{{"vertices", g.size()},
                            {"edges", g.edges.size()},
                            {"strokes", seq.size()},
                            {"iterations", iters},
                            {"warnings", res.warnings},
                            {"config", to_json(c)}};

  const auto dir = detail::out_dir(c);
  detail::staged("write", [&] {
    write_json_file((dir / "graph.json").string(), graph_to_json(g.data()));
    nlohmann::json idx = nlohmann::json::array();
    for (const auto& st : seq)
      idx.push_back(st);
    auto sj = strokes_to_json(polylines);
    sj["indices"] = std::move(idx);
    write_json_file((dir / "strokes.json").string(), sj);
    write_text_file((dir / "drawing.gcode").string(), gcode.text());
    write_text_file((dir / "drawing.svg").string(), svg);
    write_json_file((dir / "diagnostics.json").string(), diag);
  });

  for (const auto& w : res.warnings)
    err << "warning: " << w << "\n";
  for (const auto& d : res.iterations)
    out << "iter " << d.iteration << ": edges " << d.edges << ", absent " << d.absent << ", superfluous "
        << d.superfluous << ", tau " << detail::fmt(d.tau_min) << ".." << detail::fmt(d.tau_max) << "\n";
  out << g.size() << " vertices, " << g.edges.size() << " edges, " << seq.size() << " strokes\n";
  return kOk;
}

inline int cmd_eval(const PipelineConfig& c, std::ostream& out) {
  detail::require(c.pred, "pred");
  detail::require(c.truth, "truth");
  detail::require_file(c.pred, "prediction");
  detail::require_file(c.truth, "truth");
  const auto truth = detail::staged("read", [&] { return read_label_png(c.truth); });
  ProbabilityMap probs;
  LabelImage pred;
  detail::staged("read", [&] {
    if (detail::has_suffix(c.pred, ".png")) {
      pred = read_label_png(c.pred);
      probs = labels_to_probmap(pred);
    } else {
      probs = read_probmap(c.pred);
      if (probs.classes() != kNumClasses)
        throw InvalidArgument("probability map must have " + std::to_string(kNumClasses) + " classes");
      pred = argmax_labels(probs);
    }
  });
  if (!pred.same_shape(truth))
    throw ShapeMismatch("eval: prediction and truth differ in shape");

  const auto report = iou(pred, truth);
  auto scheme = class_weights(truth);
  const double xent = weighted_xent(probs, truth, scheme);
  scheme.mode = LossMode::mwx;
  const double mwx = weighted_xent(probs, truth, scheme);

  nlohmann::json per_class = nlohmann::json::array();
  for (const auto& v : report.per_class)
    per_class.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  const nlohmann::json metrics{{"iou", {{"per_class", per_class}, {"mean", report.mean}}},
                               {"loss", {{"xent", xent}, {"mwx", mwx}}},
                               {"weights", scheme.omega},
                               {"absent_classes", scheme.absent_classes}};
  write_json_file((detail::out_dir(c) / "metrics.json").string(), metrics);
  out << "mean iou " << detail::fmt(report.mean, 6) << "\n";
  for (std::size_t k = 0; k < report.per_class.size(); ++k)
    out << "  class " << k << ": " << (report.per_class[k] ? detail::fmt(*report.per_class[k], 6) : "n/a") << "\n";
  out << "xent " << detail::fmt(xent, 6) << "\nmwx " << detail::fmt(mwx, 6) << "\n";
  return kOk;
}

/// Loads every sample listed in a dataset manifest, in manifest order.
inline std::vector<StudySample> load_samples(const std::string& manifest_path) {
  namespace fs = std::filesystem;
  const auto m = manifest_from_json(read_json_file(manifest_path));
  const fs::path root = fs::path(manifest_path).parent_path();
  std::vector<StudySample> out;
  out.reserve(m.samples.size());
  for (const auto& e : m.samples) {
    StudySample s;
    s.id = e.id;
    s.input = read_gray_png((root / e.input).string());
    s.probs = labels_to_probmap(read_label_png((root / e.labels).string()));
    s.truth = graph_from_json(read_json_file((root / e.graph).string()));
    out.push_back(std::move(s));
  }
  return out;
}

inline int cmd_study(const PipelineConfig& c, std::ostream& out) {
  detail::require(c.manifest, "manifest");
  detail::require_file(c.manifest, "manifest");
  if (c.betas.empty())
    throw InvalidArgument("--betas needs at least one value");
  const auto samples = detail::staged("load", [&] { return load_samples(c.manifest); });
  if (samples.empty())
    throw InvalidArgument("empty dataset");
  const auto dir = detail::out_dir(c);

  StudyOptions opt;
  opt.nonedge_sample = c.nonedge_sample;
  opt.seed = c.seed;
  opt.match_tolerance = c.match_tolerance;
  const auto studies = detail::staged("study", [&] { return threshold_study(samples, c.betas, c.interp, opt); });

  nlohmann::json summary = nlohmann::json::array();
  for (const auto& bs : studies) {
    std::string csv = "id,vertices,true_edges,tau_hat,eta_mean,margin,min_true_eta,max_nonedge_eta,separated\n";
    for (const auto& it : bs.images)
      csv += it.id + "," + std::to_string(it.vertices) + "," + std::to_string(it.true_edges) + "," +
             detail::fmt(it.tau_hat, 6) + "," + detail::fmt(it.eta_mean, 6) + "," +
             detail::fmt(it.tau_hat - it.eta_mean, 6) + "," + detail::fmt(it.min_true_eta, 6) + "," +
             detail::fmt(it.max_nonedge_eta, 6) + "," + (it.separated ? "1" : "0") + "\n";
    const auto name = "tau_hat_beta" + detail::beta_tag(bs.beta) + ".csv";
    write_text_file((dir / name).string(), csv);
    summary.push_back({{"beta", bs.beta},
                       {"images", bs.images.size()},
                       {"skipped", bs.skipped},
                       {"separated_fraction", bs.separated_fraction()},
                       {"tau_hat_unimodal", bs.tau_hat_unimodal(opt.smoothing)},
                       {"tau_hat_histogram", {{"lo", bs.tau_hat.lo}, {"hi", bs.tau_hat.hi}, {"counts", bs.tau_hat.counts}}},
                       {"margin_histogram", {{"lo", bs.margin.lo}, {"hi", bs.margin.hi}, {"counts", bs.margin.counts}}}});
    out << "beta " << detail::beta_tag(bs.beta) << ": " << bs.images.size() << " images, " << bs.skipped
        << " skipped, separated " << detail::fmt(bs.separated_fraction()) << ", tau_hat "
        << (bs.tau_hat_unimodal(opt.smoothing) ? "unimodal" : "multimodal") << " -> " << name << "\n";
  }
  write_json_file((dir / "summary.json").string(), summary);

  std::string table = "mode,beta,tau,recall,precision,mean_f1\n";
  auto row = [&](const char* mode, double beta, double tau, const EdgeScore& t, double f1) {
    table += std::string(mode) + "," + detail::beta_tag(beta) + "," + detail::beta_tag(tau) + "," +
             detail::fmt(t.recall()) + "," + detail::fmt(t.precision()) + "," + detail::fmt(f1) + "\n";
    out << mode << " beta " << detail::beta_tag(beta) << " tau " << detail::beta_tag(tau) << ": recall "
        << detail::fmt(t.recall()) << " precision " << detail::fmt(t.precision()) << " f1 " << detail::fmt(f1)
        << "\n";
  };
  {
    EdgeScore total;
    double f1 = 0.0;
    for (const auto& s : samples) {
      const auto sc = score_edges(interpret(s.input, s.probs, c.interp).graph.data(), s.truth, c.match_tolerance);
      total += sc;
      f1 += sc.f1();
    }
    row("adaptive", c.interp.beta, c.interp.tau0, total, f1 / samples.size());
  }
  for (const auto& preset : kFixedTauPresets) {
    const auto r = evaluate_fixed_tau(samples, preset, c.interp, c.match_tolerance);
    row("fixed", preset.beta, preset.tau, r.total, r.mean_f1);
  }
  write_text_file((dir / "presets.csv").string(), table);
  return kOk;
}

namespace detail {

/// Value of `--config` if present, looked up before the real parse so the
/// file can seed the defaults that explicit flags then override.
inline std::string find_config_arg(int argc, const char* const* argv) {
  std::string path;
  for (int i = 1; i < argc; ++i) {
    const std::string_view a = argv[i];
    if (a == "--config" && i + 1 < argc)
      path = argv[++i];
    else if (a.starts_with("--config="))
      path = std::string(a.substr(9));
  }
  return path;
}

inline void add_config_options(CLI::App& app, PipelineConfig& c, int& connectivity) {
  app.add_option("--canvas_size", c.raster.canvas_size, "canvas side in pixels");
  app.add_option("--stroke_width", c.raster.stroke_width, "rasterized stroke width");
  app.add_option("--corner_radius", c.raster.corner_radius, "corner disc radius");
  app.add_option("--beta", c.interp.beta, "plausibility mask width");
  app.add_option("--tau0", c.interp.tau0, "initial plausibility threshold");
  app.add_option("--lambda", c.interp.lambda, "threshold update rate");
  app.add_option("--n_iters", c.interp.n_iters, "feedback iterations");
  app.add_option("--binarize_threshold", c.interp.binarize_threshold);
  app.add_option("--min_blob_area", c.interp.min_blob_area);
  app.add_option("--dilate_px", c.interp.dilate_px);
  app.add_option("--render_width", c.interp.render_width);
  app.add_option("--blob_pad_px", c.interp.blob_pad_px, "negative: beta + dilate_px");
  app.add_option("--max_edge_length", c.interp.max_edge_length, "0 disables");
  app.add_option("--split_at_corners", c.interp.split_at_corners);
  app.add_option("--connectivity", connectivity)->check(CLI::IsMember({4, 8}));
  app.add_option("--box_size_mm", c.frame.box_size_mm);
  app.add_option("--origin_x_mm", c.frame.origin_mm.x);
  app.add_option("--origin_y_mm", c.frame.origin_mm.y);
  app.add_option("--safe_z_mm", c.frame.safe_z_mm);
  app.add_option("--unit_scale", c.frame.unit_scale);
  app.add_option("--gcode_header", c.frame.header);
  app.add_option("--seed", c.seed);
  app.add_option("--count", c.count, "number of sketches");
  app.add_option("--train_fraction", c.train_fraction);
  app.add_option("--threads", c.threads, "0: all cores");
  app.add_option("--format", c.format, "ndjson or json");
  app.add_option("--kind", c.kind, "fixture kind");
  app.add_option("--betas", c.betas, "mask widths for the study")->delimiter(',');
  app.add_option("--nonedge_sample", c.nonedge_sample);
  app.add_option("--match_tolerance", c.match_tolerance);
  app.add_option("--source", c.source, "stroke file");
  app.add_option("--input", c.input, "input PNG");
  app.add_option("--labels", c.labels, "label PNG");
  app.add_option("--probs", c.probs, "probability map file");
  app.add_option("--pred", c.pred, "predicted labels (.png) or probability map");
  app.add_option("--truth", c.truth, "truth label PNG");
  app.add_option("--manifest", c.manifest, "dataset manifest.json");
  app.add_option("--out", c.out, "output directory");
}

} // namespace detail

/// Parses arguments and runs one subcommand. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg;
  try {
    if (const auto path = detail::find_config_arg(argc, argv); !path.empty()) {
      detail::require_file(path, "config file");
      cfg = config_from_json(read_json_file(path));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  CLI::App app{"line drawing vectorizer"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  std::string config_path;
  bool dump = false;
  int connectivity = cfg.interp.connectivity == Connectivity::four ? 4 : 8;
  app.add_option("--config", config_path, "JSON config file");
  app.add_flag("--dump-config", dump, "print the effective config and exit");
  detail::add_config_options(app, cfg, connectivity);
  auto* fixture = app.add_subcommand("fixture", "write procedural fixture sketches");
  auto* dataset = app.add_subcommand("dataset", "rasterize sketches into a labelled dataset");
  auto* vectorize = app.add_subcommand("vectorize", "interpret masks into strokes, gcode and svg");
  auto* eval = app.add_subcommand("eval", "segmentation metrics");
  auto* study = app.add_subcommand("study", "threshold separation study and fixed-threshold sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  cfg.interp.connectivity = connectivity == 4 ? Connectivity::four : Connectivity::eight;

  try {
    cfg.validate();
    if (dump) {
      out << to_json(cfg).dump(2) << "\n";
      return kOk;
    }
    if (fixture->parsed())
      return cmd_fixture(cfg, out);
    if (dataset->parsed())
      return cmd_dataset(cfg, out, err);
    if (vectorize->parsed())
      return cmd_vectorize(cfg, out, err);
    if (eval->parsed())
      return cmd_eval(cfg, out);
    if (study->parsed())
      return cmd_study(cfg, out);
    err << app.help();
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
  } catch (const ShapeMismatch& e) {
    err << "error: " << e.what() << "\n";
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

} // namespace lineart::cli
