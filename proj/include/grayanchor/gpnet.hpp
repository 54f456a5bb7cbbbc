// Copyright (c) 2026, The grayanchor Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Gray-pixel network: three convolutional pathways over constrained input
// cues, a fusion stack predicting a per-pixel grayness index, its weighted
// histogram-binned loss, a deterministic Adam trainer and Top-K estimation.
//
// Everything runs in double precision on the CPU so gradients can be
// checked against finite differences.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "grayanchor/grayclassic.hpp"
#include "grayanchor/image.hpp"
#include "grayanchor/imageio.hpp"
#include "grayanchor/kernels.hpp"

namespace grayanchor {

using kernels::Tensor3;

// ---- features ------------------------------------------------------------

/// f1: channel sum / white level. f2: rg and by log opponents.
/// f3: center-surround (sigma 5) of log r, g, b, y.
struct FeatureStack {
  Plane f1;
  std::array<Plane, 2> f2;
  std::array<Plane, 4> f3;
};

inline constexpr double kFeatureSigma = 5.0;

FeatureStack build_features(const LinearImage& img);

enum class FeatureMode {
  kConstrained,  // f1, f2, f3 into pathways 1, 2, 3
  kRawImage,     // the RGB image / white level into every pathway
};

/// Pathway inputs for the given mode.
std::array<Tensor3, 3> pathway_inputs(const LinearImage& img, FeatureMode mode);
std::array<Tensor3, 3> pathway_inputs(const FeatureStack& feats);

// ---- parameters ----------------------------------------------------------

struct NetArch {
  FeatureMode features = FeatureMode::kConstrained;
  int pathway_width = 32;
  int pathway_depth = 5;
  /// Hidden fusion widths; a final 1-channel layer follows.
  std::vector<int> fusion_widths = {64, 32, 16, 8};
  double sigma_out = 5.0;

  std::array<int, 3> input_channels() const;
  bool operator==(const NetArch&) const = default;
};

struct ConvLayer {
  int in = 0;
  int out = 0;
  std::vector<double> weight;  // [out][in][3][3]
  std::vector<double> bias;    // [out]
};

struct NetParams {
  NetArch arch;
  std::array<std::vector<ConvLayer>, 3> pathways;
  std::array<std::vector<std::vector<double>>, 3> prelu;  // per layer, per channel
  std::vector<ConvLayer> fusion;

  /// Same architecture, every tensor zero.
  static NetParams zeros(const NetArch& arch);
  /// He-normal kernels, zero biases, PReLU slopes 0.25 and a positive bias
  /// on the output layer so the clamp starts out inactive.
  static NetParams init(const NetArch& arch, std::uint64_t seed, double output_bias = 1.0);

  /// Every learnable tensor in checkpoint order: for each pathway and layer
  /// weight, bias, slopes; then for each fusion layer weight, bias.
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
  std::size_t parameter_count() const;
};

using ParamGrads = NetParams;

void save_checkpoint(const std::filesystem::path& path, const NetParams& params);
/// Throws CheckpointError on a bad magic, truncation or non-finite values.
/// If `expected` is given, a different architecture is rejected too.
NetParams load_checkpoint(const std::filesystem::path& path, const NetArch* expected = nullptr);

// ---- forward / backward --------------------------------------------------

struct ForwardCache {
  std::array<Tensor3, 3> inputs;
  std::array<std::vector<Tensor3>, 3> pre;   // conv outputs per pathway layer
  std::array<std::vector<Tensor3>, 3> post;  // PReLU outputs
  std::array<std::vector<double>, 3> plane_scale;  // 1/sqrt(var + eps) per plane
  Tensor3 fused_in;                          // standardized, concatenated
  std::vector<Tensor3> fusion_pre;
  std::vector<Tensor3> fusion_post;          // ReLU outputs of hidden layers
  Plane smoothed;
  bool valid = false;
};

inline constexpr double kStandardizeEps = 1e-6;

/// Grayness map of the same size as the inputs, >= 0 everywhere. Throws
/// StructuralError when the inputs do not match the architecture.
GraynessMap net_forward(const NetParams& params, const std::array<Tensor3, 3>& inputs,
                        ForwardCache* cache = nullptr);
GraynessMap net_forward(const NetParams& params, const FeatureStack& feats,
                        ForwardCache* cache = nullptr);

/// Reverse-mode gradients of sum(upstream * output). Throws UsageError when
/// the cache was not filled by net_forward.
ParamGrads net_backward(const NetParams& params, const ForwardCache& cache, const Plane& upstream);

// ---- loss ----------------------------------------------------------------

struct LossConfig {
  double delta = 0.001;
  int bins = 100;
  double cap = 20.0;
  double floor = 0.5;
};

/// Per-pixel angle in degrees between the pixel RGB and gt; zero pixels
/// are excluded.
GraynessMap gt_grayness(const LinearImage& img, const Illuminant& gt);

struct LossResult {
  double loss = 0.0;
  Plane grad;  // d loss / d pred
};

/// Sum over non-empty bins of the mean of |O-G| / (min(O,G)^2 + delta).
/// Pixels with |O-G| < floor contribute zero; bins split [0, cap] evenly
/// with G > cap in the last bin. Excluded gt pixels are skipped; throws
/// LossError when none remain.
LossResult binned_loss(const GraynessMap& pred, const GraynessMap& gt, const LossConfig& cfg = {});

// ---- training ------------------------------------------------------------

struct TrainConfig {
  double lr0 = 1e-4;
  double lr_peak = 1e-3;
  int epochs = 200;
  int batch_size = 16;
  double crop_min = 0.10;
  double crop_max = 1.00;
  int resize = 256;
  double flip_prob = 0.5;
  double gain_min = 0.6;
  double gain_max = 1.4;
  std::size_t top_k = 5000;
  std::uint64_t seed = 0;
  double output_bias = 1.0;
};

/// lr0 + (lr_peak - lr0) * sin^2(pi * step / total_steps).
double learning_rate(const TrainConfig& cfg, std::size_t step, std::size_t total_steps);

struct TrainSample {
  LinearImage image;
  Illuminant gt;
};

struct TrainResult {
  NetParams params;
  std::vector<double> epoch_loss;  // mean per-sample loss of each epoch
};

/// Random crop, bilinear resize to cfg.resize, flip and per-channel gains
/// applied to image and label. Pure function of the rng state.
TrainSample augment(const TrainSample& sample, const TrainConfig& cfg, std::uint64_t seed);

/// Bilinear resize with pixel-centre alignment.
LinearImage resize_bilinear(const LinearImage& img, int width, int height);

using EpochCallback = std::function<void(int epoch, double mean_loss)>;

TrainResult train(const std::vector<TrainSample>& samples, const NetArch& arch,
                  const TrainConfig& cfg, const LossConfig& loss_cfg = {},
                  const EpochCallback& on_epoch = {});
/// Loads every image of the dataset, then trains.
TrainResult train(const Dataset& data, const NetArch& arch, const TrainConfig& cfg,
                  const LossConfig& loss_cfg = {}, const EpochCallback& on_epoch = {});

// ---- estimation ----------------------------------------------------------

/// Network grayness with masked pixels excluded.
GraynessMap gpnet_map(const LinearImage& img, const NetParams& params, const Mask& mask);

Illuminant gpnet_estimate(const LinearImage& img, const NetParams& params, std::size_t k,
                          const Mask& mask);

/// K scaled from a reference image area, at least 1.
std::size_t scaled_k(std::size_t k, std::size_t pixel_count, double reference_area = 5e6);

}  // namespace grayanchor
