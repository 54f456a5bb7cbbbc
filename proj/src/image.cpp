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

#include "grayanchor/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "grayanchor/error.hpp"

namespace grayanchor {

Plane::Plane(int width, int height, double fill)
    : width_(width), height_(height),
      data_(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill) {
  if (width < 0 || height < 0) throw InputError("negative plane dimensions");
}

LinearImage::LinearImage(int width, int height, double white_level)
    : channels_{Plane(width, height), Plane(width, height), Plane(width, height)},
      white_level_(white_level) {
  if (!(white_level > 0.0) || !std::isfinite(white_level))
    throw InputError("white level must be positive and finite");
}

LinearImage::LinearImage(std::array<Plane, 3> channels, double white_level)
    : channels_(std::move(channels)), white_level_(white_level) {
  if (!(white_level > 0.0) || !std::isfinite(white_level))
    throw InputError("white level must be positive and finite");
  if (!channels_[0].same_shape(channels_[1]) || !channels_[0].same_shape(channels_[2]))
    throw InputError("channel planes differ in size");
  for (const auto& ch : channels_) {
    for (double v : ch.values()) {
      if (!std::isfinite(v) || v < 0.0)
        throw InputError("image samples must be finite and non-negative");
    }
  }
}

LinearImage LinearImage::scaled(const std::array<double, 3>& gains) const {
  std::array<Plane, 3> out = channels_;
  for (int c = 0; c < 3; ++c) {
    if (!(gains[c] > 0.0)) throw InputError("channel gains must be positive");
    for (double& v : out[c].values()) v *= gains[c];
  }
  return LinearImage(std::move(out), white_level_);
}

Mask::Mask(int width, int height, bool fill)
    : width_(width), height_(height),
      valid_(static_cast<std::size_t>(width) * height, fill ? 1 : 0) {}

std::size_t Mask::count_valid() const noexcept {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), 1));
}

Illuminant::Illuminant(double r, double g, double b) {
  if (!std::isfinite(r) || !std::isfinite(g) || !std::isfinite(b) || r <= 0.0 ||
      g <= 0.0 || b <= 0.0) {
    throw InputError("illuminant components must be finite and positive, got (" +
                     std::to_string(r) + ", " + std::to_string(g) + ", " +
                     std::to_string(b) + ")");
  }
  const double n = std::sqrt(r * r + g * g + b * b);
  // Leave an already-normalized triple untouched so that normalization is
  // idempotent and a manifest round trip is exact.
  if (std::abs(n - 1.0) <= 4 * std::numeric_limits<double>::epsilon()) {
    e_ = {r, g, b};
    return;
  }
  e_ = {r / n, g / n, b / n};
}

}  // namespace grayanchor
