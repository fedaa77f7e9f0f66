#pragma once

#include "error.hpp"

#include <string>
#include <vector>

namespace lineart {

/// Encoder-decoder layout (k1 k2 d r): first kernel, common kernel, depth,
/// layers per level.
struct NetSpec {
  int k1 = 3;
  int k2 = 3;
  int depth = 1;
  int layers = 1;
};

enum class StageOp {
  conv,           // valid convolution, n - k + 1
  down,           // 2x2 stride-2 valid convolution, floor((n - 2) / 2) + 1
  up,             // 2x2 stride-2 valid transpose convolution, 2 (n - 1) + 2
  transpose_conv, // valid transpose convolution, n + k - 1
};

/// How the expanding path is built.
enum class DecoderMode {
  /// Upsample, then `layers` shrinking valid convolutions per level.
  shrinking,
  /// Exact mirror of the contracting path: every op replaced by its transpose.
  mirrored,
};

struct Stage {
  std::string name;
  StageOp op;
  int kernel = 0;
  int level = 0;
  int in = 0;
  int out = 0;
};

struct SkipCheck {
  int level = 0;
  int encoder = 0;
  int decoder = 0;
};

struct ShapeReport {
  std::vector<Stage> stages;
  std::vector<SkipCheck> skips;
  int output = 0;
  bool feasible = true;
  /// Name of the first stage that made the input infeasible, if any.
  std::string first_failure;
  std::string reason;
};

inline int apply_stage(StageOp op, int kernel, int n) {
  switch (op) {
  case StageOp::conv:
    return n - kernel + 1;
  case StageOp::down:
    return n >= 2 ? (n - 2) / 2 + 1 : 0;
  case StageOp::up:
    return 2 * (n - 1) + 2;
  case StageOp::transpose_conv:
    return n + kernel - 1;
  }
  return 0;
}

/// Simulates feature-map sizes through the network for an n x n input.
/// Infeasibility (non-positive size, a downsample that drops a border row,
/// or a skip connection whose sizes differ) is reported, not thrown.
inline ShapeReport unet_shapes(const NetSpec& spec, int input, DecoderMode mode = DecoderMode::shrinking) {
  if (spec.k1 < 1 || spec.k2 < 1 || spec.k1 % 2 == 0 || spec.k2 % 2 == 0)
    throw InvalidArgument("unet_shapes: kernel sizes must be odd and positive");
  if (spec.depth < 1 || spec.layers < 1)
    throw InvalidArgument("unet_shapes: depth and layers must be at least 1");
  if (input < 1)
    throw InvalidArgument("unet_shapes: input size must be positive");

  ShapeReport rep;
  int n = input;
  bool alive = true;
  auto fail = [&](const std::string& stage, const std::string& why) {
    if (rep.feasible) {
      rep.feasible = false;
      rep.first_failure = stage;
      rep.reason = why;
    }
  };
  auto push = [&](std::string name, StageOp op, int kernel, int level) {
    if (!alive)
      return;
    if (op == StageOp::down && n % 2 != 0)
      fail(name, "downsample input " + std::to_string(n) + " is odd");
    const int out = apply_stage(op, kernel, n);
    rep.stages.push_back({name, op, kernel, level, n, out});
    n = out;
    if (n < 1) {
      fail(rep.stages.back().name, "size dropped to " + std::to_string(n));
      alive = false;
    }
  };

  std::vector<int> skip(static_cast<std::size_t>(spec.depth), 0);
  push("enc0.conv0", StageOp::conv, spec.k1, 0);
  for (int i = 1; i < spec.layers; ++i)
    push("enc0.conv" + std::to_string(i), StageOp::conv, spec.k2, 0);
  for (int l = 1; l <= spec.depth; ++l) {
    skip[l - 1] = n;
    const std::string lvl = (l == spec.depth ? "bottom" : "enc" + std::to_string(l));
    push(lvl + ".down", StageOp::down, 2, l);
    for (int i = 0; i < spec.layers; ++i)
      push(lvl + ".conv" + std::to_string(i), StageOp::conv, spec.k2, l);
  }

  for (int l = spec.depth - 1; l >= 0; --l) {
    const std::string lvl = "dec" + std::to_string(l);
    if (mode == DecoderMode::mirrored) {
      // Undo the level's convolutions before the upsample, mirroring the encoder.
      for (int i = spec.layers - 1; i >= 0; --i)
        push(lvl + ".tconv" + std::to_string(i), StageOp::transpose_conv, spec.k2, l + 1);
    }
    push(lvl + ".up", StageOp::up, 2, l);
    if (alive) {
      rep.skips.push_back({l, skip[l], n});
      if (skip[l] != n)
        fail(lvl + ".up", "skip size " + std::to_string(skip[l]) + " != upsampled " + std::to_string(n));
    }
    if (mode == DecoderMode::shrinking) {
      for (int i = 0; i < spec.layers; ++i)
        push(lvl + ".conv" + std::to_string(i), StageOp::conv, spec.k2, l);
    }
  }
  if (mode == DecoderMode::mirrored) {
    for (int i = spec.layers - 1; i >= 1; --i)
      push("out.tconv" + std::to_string(i), StageOp::transpose_conv, spec.k2, 0);
    push("out.tconv0", StageOp::transpose_conv, spec.k1, 0);
  }
  rep.output = alive ? n : 0;
  return rep;
}

/// Input sizes in [lo, hi] for which every stage is exact and every skip matches.
inline std::vector<int> feasible_input_sizes(const NetSpec& spec, int lo, int hi, DecoderMode mode = DecoderMode::shrinking) {
  std::vector<int> out;
  for (int n = std::max(1, lo); n <= hi; ++n)
    if (unet_shapes(spec, n, mode).feasible)
      out.push_back(n);
  return out;
}

} // namespace lineart
