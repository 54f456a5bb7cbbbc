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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "grayanchor/error.hpp"
#include "grayanchor/gpnet.hpp"

namespace grayanchor {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Samples the source region [x0, x0 + sw) x [y0, y0 + sh) at dw x dh pixel
// centres, clamping at the region edge.
LinearImage resample(const LinearImage& img, int x0, int y0, int sw, int sh, int dw, int dh,
                     bool flip) {
  std::array<Plane, 3> out{Plane(dw, dh), Plane(dw, dh), Plane(dw, dh)};
  const double fx = static_cast<double>(sw) / dw, fy = static_cast<double>(sh) / dh;
  for (int y = 0; y < dh; ++y) {
    const double sy = std::clamp((y + 0.5) * fy - 0.5, 0.0, static_cast<double>(sh - 1));
    const int iy = std::min(static_cast<int>(sy), sh - 1);
    const int iy1 = std::min(iy + 1, sh - 1);
    const double ty = sy - iy;
    for (int x = 0; x < dw; ++x) {
      const double sx = std::clamp((x + 0.5) * fx - 0.5, 0.0, static_cast<double>(sw - 1));
      const int ix = std::min(static_cast<int>(sx), sw - 1);
      const int ix1 = std::min(ix + 1, sw - 1);
      const double tx = sx - ix;
      const int ox = flip ? dw - 1 - x : x;
      for (int c = 0; c < 3; ++c) {
        const Plane& p = img.channel(c);
        const double top = (1 - tx) * p(x0 + ix, y0 + iy) + tx * p(x0 + ix1, y0 + iy);
        const double bot = (1 - tx) * p(x0 + ix, y0 + iy1) + tx * p(x0 + ix1, y0 + iy1);
        out[c](ox, y) = (1 - ty) * top + ty * bot;
      }
    }
  }
  return LinearImage(std::move(out), img.white_level());
}

void check_config(const TrainConfig& cfg) {
  if (!(cfg.lr0 > 0.0) || !(cfg.lr_peak > 0.0)) throw ConfigError("learning rates must be > 0");
  if (cfg.epochs < 1 || cfg.batch_size < 1) throw ConfigError("epochs and batch size must be >= 1");
  if (!(cfg.crop_min > 0.0 && cfg.crop_min <= cfg.crop_max && cfg.crop_max <= 1.0))
    throw ConfigError("crop range must lie in (0, 1]");
  if (cfg.resize < 4) throw ConfigError("resize must be >= 4");
  if (!(cfg.flip_prob >= 0.0 && cfg.flip_prob <= 1.0)) throw ConfigError("flip probability must lie in [0, 1]");
  if (!(cfg.gain_min > 0.0 && cfg.gain_min <= cfg.gain_max))
    throw ConfigError("gain range must be positive");
}

}  // namespace

LinearImage resize_bilinear(const LinearImage& img, int width, int height) {
  if (width < 1 || height < 1) throw InputError("resize target must be positive");
  return resample(img, 0, 0, img.width(), img.height(), width, height, false);
}

TrainSample augment(const TrainSample& s, const TrainConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  const int shorter = std::min(s.image.width(), s.image.height());
  const int side = std::clamp(static_cast<int>(std::lround(uniform(rng, cfg.crop_min, cfg.crop_max) * shorter)),
                              1, shorter);
  const int x0 = std::uniform_int_distribution<int>(0, s.image.width() - side)(rng);
  const int y0 = std::uniform_int_distribution<int>(0, s.image.height() - side)(rng);
  const bool flip = uniform(rng, 0.0, 1.0) < cfg.flip_prob;
  const std::array<double, 3> gains{uniform(rng, cfg.gain_min, cfg.gain_max),
                                    uniform(rng, cfg.gain_min, cfg.gain_max),
                                    uniform(rng, cfg.gain_min, cfg.gain_max)};
  LinearImage img = resample(s.image, x0, y0, side, side, cfg.resize, cfg.resize, flip);
  return {img.scaled(gains), s.gt.scaled(gains)};
}

double learning_rate(const TrainConfig& cfg, std::size_t step, std::size_t total_steps) {
  if (total_steps == 0) return cfg.lr0;
  const double s = std::sin(std::numbers::pi * static_cast<double>(step) / static_cast<double>(total_steps));
  return cfg.lr0 + (cfg.lr_peak - cfg.lr0) * s * s;
}

TrainResult train(const std::vector<TrainSample>& samples, const NetArch& arch,
                  const TrainConfig& cfg, const LossConfig& loss_cfg, const EpochCallback& on_epoch) {
  check_config(cfg);
  if (samples.empty()) throw ConfigError("training set is empty");

  TrainResult result{NetParams::init(arch, cfg.seed, cfg.output_bias), {}};
  NetParams& params = result.params;
  const auto tensors = params.tensors();
  NetParams m = NetParams::zeros(arch), v = NetParams::zeros(arch);
  const auto m_t = m.tensors(), v_t = v.tensors();

  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;
  const std::size_t n = samples.size();
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t steps_per_epoch = (n + batch - 1) / batch;
  const std::size_t total_steps = steps_per_epoch * static_cast<std::size_t>(cfg.epochs);

  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::size_t step = 0;
  double b1t = 1.0, b2t = 1.0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch, ++step) {
      const std::size_t end = std::min(n, start + batch);
      const double inv_b = 1.0 / static_cast<double>(end - start);
      NetParams acc = NetParams::zeros(arch);
      const auto acc_t = acc.tensors();
      for (std::size_t j = start; j < end; ++j) {
        const TrainSample s = augment(samples[order[j]], cfg, rng());
        ForwardCache cache;
        const GraynessMap pred = net_forward(params, pathway_inputs(s.image, arch.features), &cache);
        const LossResult loss = binned_loss(pred, gt_grayness(s.image, s.gt), loss_cfg);
        if (!std::isfinite(loss.loss))
          throw TrainingError("non-finite loss at step " + std::to_string(step));
        epoch_loss += loss.loss;
        const ParamGrads g = net_backward(params, cache, loss.grad);
        const auto g_t = g.tensors();
        for (std::size_t t = 0; t < g_t.size(); ++t)
          for (std::size_t i = 0; i < g_t[t].size(); ++i) acc_t[t][i] += g_t[t][i] * inv_b;
      }

      const double lr = learning_rate(cfg, step, total_steps);
      b1t *= kBeta1;
      b2t *= kBeta2;
      for (std::size_t t = 0; t < tensors.size(); ++t) {
        for (std::size_t i = 0; i < tensors[t].size(); ++i) {
          const double g = acc_t[t][i];
          if (!std::isfinite(g))
            throw TrainingError("non-finite gradient at step " + std::to_string(step));
          m_t[t][i] = kBeta1 * m_t[t][i] + (1 - kBeta1) * g;
          v_t[t][i] = kBeta2 * v_t[t][i] + (1 - kBeta2) * g * g;
          const double mh = m_t[t][i] / (1 - b1t), vh = v_t[t][i] / (1 - b2t);
          tensors[t][i] -= lr * mh / (std::sqrt(vh) + kAdamEps);
        }
      }
    }
    epoch_loss /= static_cast<double>(n);
    result.epoch_loss.push_back(epoch_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss);
  }
  return result;
}

TrainResult train(const Dataset& data, const NetArch& arch, const TrainConfig& cfg,
                  const LossConfig& loss_cfg, const EpochCallback& on_epoch) {
  std::vector<TrainSample> samples;
  samples.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    samples.push_back({load_image(data.resolve(i)), data.entries[i].gt});
  return train(samples, arch, cfg, loss_cfg, on_epoch);
}

}  // namespace grayanchor
