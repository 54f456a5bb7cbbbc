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

// Gray-pixel detectors (equal-IIM and grayness-index criteria), top-K
// selection and the mean-of-gray-pixels illuminant estimate.

#pragma once

#include <cstddef>
#include <vector>

#include "grayanchor/image.hpp"

namespace grayanchor {

struct DetectorConfig {
  /// Contrast gate in log units; flatter pixels are excluded.
  double flat_epsilon = 1e-4;
  /// Box window for the final smoothing pass; 1 disables smoothing.
  int smooth_window = 7;
  /// Center-surround scale for the grayness-index detector.
  double gi_sigma = 5.0;
  /// Final scores below this are set to exactly 0, so numerically-zero
  /// pixels tie and fall back to row-major order.
  double zero_floor = 1e-10;
};

enum class GpVariant { kEdge, kStd };

/// Equal-IIM criterion: std over r,g,b of the local log differences divided
/// by their mean magnitude (+1e-4). Throws DetectorError when every pixel is
/// gated or masked.
GraynessMap grayness_gp(const LinearImage& img, GpVariant variant, const Mask& mask,
                        const DetectorConfig& cfg = {});

/// Grayness index: magnitude of the center-surround response of the
/// log-chromaticity planes phi_r, phi_b.
GraynessMap grayness_gi(const LinearImage& img, const Mask& mask, const DetectorConfig& cfg = {});

struct PixelCoord {
  int x = 0;
  int y = 0;
  bool operator==(const PixelCoord&) const = default;
};

struct PixelSet {
  std::vector<PixelCoord> coords;  // ascending grayness, ties in row-major order
  std::size_t size() const noexcept { return coords.size(); }
};

class SelectAmount {
 public:
  static SelectAmount top_k(std::size_t k);
  static SelectAmount top_frac(double frac);

  /// Number of pixels to take out of `valid` candidates.
  std::size_t count(std::size_t valid) const;

 private:
  SelectAmount(std::size_t k, double frac) : k_(k), frac_(frac) {}
  std::size_t k_;
  double frac_;  // used when k_ == 0
};

/// The lowest-scoring non-excluded pixels. Throws SelectionError when fewer
/// candidates exist than requested.
PixelSet select_gray(const GraynessMap& map, const SelectAmount& amount);

/// Mean RGB over the set, unit-normalized.
Illuminant estimate_illuminant(const LinearImage& img, const PixelSet& pixels);

}  // namespace grayanchor
