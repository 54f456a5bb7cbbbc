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

#include "grayanchor/grayclassic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "grayanchor/error.hpp"
#include "grayanchor/kernels.hpp"
#include "grayanchor/opponent.hpp"

namespace grayanchor {

namespace {

void check_mask(const LinearImage& img, const Mask& mask) {
  if (mask.width() != img.width() || mask.height() != img.height())
    throw InputError("mask dimensions do not match the image");
}

GraynessMap finish(GraynessMap raw, const DetectorConfig& cfg, const char* name) {
  if (std::none_of(raw.values().begin(), raw.values().end(),
                   [](double v) { return !is_excluded(v); }))
    throw DetectorError(std::string(name) + ": every pixel is flat or masked");
  GraynessMap out = cfg.smooth_window > 1 ? kernels::masked_box_mean(raw, cfg.smooth_window)
                                          : std::move(raw);
  for (double& v : out.values())
    if (v < cfg.zero_floor) v = 0.0;
  return out;
}

}  // namespace

GraynessMap grayness_gp(const LinearImage& img, GpVariant variant, const Mask& mask,
                        const DetectorConfig& cfg) {
  check_mask(img, mask);
  const LogImage logs = log_transform(img);
  const LocalOpKind kind =
      variant == GpVariant::kEdge ? LocalOpKind::gradient_magnitude() : LocalOpKind::local_std(3);
  const ScalarMap dr = local_op(logs[LogImage::kR], kind);
  const ScalarMap dg = local_op(logs[LogImage::kG], kind);
  const ScalarMap db = local_op(logs[LogImage::kB], kind);

  GraynessMap raw(img.width(), img.height(), kExcluded);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!mask[i]) continue;
    const double m[3] = {dr[i], dg[i], db[i]};
    const double mean_abs = (std::abs(m[0]) + std::abs(m[1]) + std::abs(m[2])) / 3.0;
    if (mean_abs < cfg.flat_epsilon) continue;
    const double mean = (m[0] + m[1] + m[2]) / 3.0;
    double var = 0.0;
    for (double v : m) var += (v - mean) * (v - mean);
    raw[i] = std::sqrt(var / 3.0) / (mean_abs + 1e-4);
  }
  return finish(std::move(raw), cfg, "gray-pixel detector");
}

GraynessMap grayness_gi(const LinearImage& img, const Mask& mask, const DetectorConfig& cfg) {
  check_mask(img, mask);
  const LogImage logs = log_transform(img);
  const LocalOpKind cs = LocalOpKind::center_surround(cfg.gi_sigma);
  const OpponentPlanes phi = color_opponent(logs, OpponentVariant::kVsLuminance);
  const ScalarMap dphi_r = local_op(phi.phi(0), cs);
  const ScalarMap dphi_b = local_op(phi.phi(2), cs);
  const ScalarMap contrast[3] = {local_op(logs[0], cs), local_op(logs[1], cs), local_op(logs[2], cs)};

  GraynessMap raw(img.width(), img.height(), kExcluded);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!mask[i]) continue;
    bool flat = false;
    for (const auto& c : contrast) flat = flat || std::abs(c[i]) <= cfg.flat_epsilon;
    if (flat) continue;
    raw[i] = std::hypot(dphi_r[i], dphi_b[i]);
  }
  return finish(std::move(raw), cfg, "grayness-index detector");
}

SelectAmount SelectAmount::top_k(std::size_t k) {
  if (k == 0) throw InputError("top_k needs K >= 1");
  return SelectAmount(k, 0.0);
}

SelectAmount SelectAmount::top_frac(double frac) {
  if (!(frac > 0.0 && frac <= 1.0)) throw InputError("top_frac needs 0 < f <= 1");
  return SelectAmount(0, frac);
}

std::size_t SelectAmount::count(std::size_t valid) const {
  if (k_ > 0) return k_;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(frac_ * static_cast<double>(valid))));
}

PixelSet select_gray(const GraynessMap& map, const SelectAmount& amount) {
  std::vector<std::size_t> candidates;
  candidates.reserve(map.size());
  for (std::size_t i = 0; i < map.size(); ++i)
    if (!is_excluded(map[i]) && !std::isnan(map[i])) candidates.push_back(i);
  const std::size_t k = amount.count(candidates.size());
  if (candidates.size() < k)
    throw SelectionError("requested " + std::to_string(k) + " pixels but only " +
                         std::to_string(candidates.size()) + " are valid");
  const auto less = [&map](std::size_t a, std::size_t b) {
    return map[a] < map[b] || (map[a] == map[b] && a < b);
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                    candidates.end(), less);
  PixelSet out;
  out.coords.reserve(k);
  const int w = map.width();
  for (std::size_t j = 0; j < k; ++j)
    out.coords.push_back({static_cast<int>(candidates[j] % w), static_cast<int>(candidates[j] / w)});
  return out;
}

Illuminant estimate_illuminant(const LinearImage& img, const PixelSet& pixels) {
  if (pixels.size() == 0) throw EstimationError("empty gray pixel set");
  double sum[3] = {0.0, 0.0, 0.0};
  for (const auto& p : pixels.coords) {
    if (p.x < 0 || p.y < 0 || p.x >= img.width() || p.y >= img.height())
      throw EstimationError("pixel outside the image");
    for (int c = 0; c < 3; ++c) sum[c] += img.channel(c)(p.x, p.y);
  }
  const double k = static_cast<double>(pixels.size());
  if (!(sum[0] > 0.0 && sum[1] > 0.0 && sum[2] > 0.0))
    throw EstimationError("selected pixels have a zero channel sum");
  return Illuminant(sum[0] / k, sum[1] / k, sum[2] / k);
}

}  // namespace grayanchor
