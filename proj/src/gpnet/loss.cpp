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

#include "grayanchor/error.hpp"
#include "grayanchor/gpnet.hpp"

namespace grayanchor {

GraynessMap gt_grayness(const LinearImage& img, const Illuminant& gt) {
  GraynessMap out(img.width(), img.height(), kExcluded);
  const auto& e = gt.rgb();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto p = img.pixel(i);
    if (p[0] == 0.0 && p[1] == 0.0 && p[2] == 0.0) continue;
    // atan2(|p x e|, p . e) keeps precision near zero angles.
    const double cx = p[1] * e[2] - p[2] * e[1];
    const double cy = p[2] * e[0] - p[0] * e[2];
    const double cz = p[0] * e[1] - p[1] * e[0];
    const double dot = p[0] * e[0] + p[1] * e[1] + p[2] * e[2];
    out[i] = std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot) * 180.0 / std::numbers::pi;
  }
  return out;
}

LossResult binned_loss(const GraynessMap& pred, const GraynessMap& gt, const LossConfig& cfg) {
  if (!(cfg.delta > 0.0) || cfg.bins < 1 || !(cfg.cap > cfg.floor) || !(cfg.floor > 0.0))
    throw InputError("loss config needs delta > 0, bins >= 1 and cap > floor > 0");
  if (!pred.same_shape(gt)) throw StructuralError("prediction and ground truth differ in size");

  const std::size_t n = pred.size();
  const double bin_width = cfg.cap / cfg.bins;
  std::vector<int> bin(n, -1);
  std::vector<double> value(n, 0.0), slope(n, 0.0);
  std::vector<double> bin_sum(cfg.bins, 0.0);
  std::vector<std::size_t> bin_count(cfg.bins, 0);

  for (std::size_t i = 0; i < n; ++i) {
    const double g = gt[i];
    if (is_excluded(g) || std::isnan(g)) continue;
    const int j = std::min(cfg.bins - 1, static_cast<int>(std::floor(std::max(g, 0.0) / bin_width)));
    bin[i] = j;
    ++bin_count[j];
    const double o = pred[i];
    const double d = std::abs(o - g);
    if (d < cfg.floor) continue;
    if (o < g) {
      const double q = o * o + cfg.delta;
      value[i] = (g - o) / q;
      slope[i] = -1.0 / q - (g - o) * 2.0 * o / (q * q);
    } else {
      const double q = g * g + cfg.delta;
      value[i] = (o - g) / q;
      slope[i] = 1.0 / q;
    }
    bin_sum[j] += value[i];
  }

  LossResult r;
  r.grad = Plane(pred.width(), pred.height());
  bool any = false;
  for (int j = 0; j < cfg.bins; ++j) {
    if (bin_count[j] == 0) continue;
    any = true;
    r.loss += bin_sum[j] / static_cast<double>(bin_count[j]);
  }
  if (!any) throw LossError("no valid ground-truth pixels");
  for (std::size_t i = 0; i < n; ++i)
    if (bin[i] >= 0) r.grad[i] = slope[i] / static_cast<double>(bin_count[bin[i]]);
  return r;
}

}  // namespace grayanchor
