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

// Synthetic Lambertian scenes: a grid of flat patches, each a reflectance
// times a multiplicative texture, lit by a uniform or linearly varying
// illuminant. Gray patches stay exactly gray, so they serve as ground truth
// for the detectors and as training data for the network.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "grayanchor/image.hpp"
#include "grayanchor/imageio.hpp"

namespace grayanchor {

enum class FieldKind { kUniform, kSmooth };

enum class TextureMode {
  /// Gray patches share one texture across channels; chromatic patches get
  /// an independent texture per channel.
  kGrayShared,
  /// Every patch shares its texture across channels. Chromatic patches then
  /// pass both local gray criteria too, since log-texture differences are
  /// identical in every channel.
  kAllShared,
};

struct SceneSpec {
  int width = 192;
  int height = 192;
  int grid_rows = 4;
  int grid_cols = 4;
  /// Fraction of patches that are gray; at least one when > 0.
  double gray_fraction = 0.25;
  /// Texture factor is 1 + a*u with u ~ U[-1, 1] per pixel, a in [0, 0.5).
  double texture_amplitude = 0.05;
  TextureMode texture_mode = TextureMode::kGrayShared;
  Illuminant illuminant{1.0, 1.0, 1.0};
  FieldKind field = FieldKind::kUniform;
  /// Smooth field: each channel is scaled by 1 + s_x*(x/(W-1) - 1/2)
  /// + s_y*(y/(H-1) - 1/2), with s_x, s_y drawn from [-strength, strength].
  double field_strength = 0.0;
  double white_level = 65535.0;
  /// Peak illumination scale as a fraction of white_level.
  double intensity = 0.5;
  /// Additive Gaussian noise, as a fraction of white_level. Off by default.
  double noise_sigma = 0.0;
  /// Explicit per-patch reflectances (row-major over the grid). When set,
  /// gray_fraction is ignored and patches with equal components are gray.
  std::optional<std::vector<std::array<double, 3>>> reflectances;
};

struct SceneTruth {
  Illuminant gt{1.0, 1.0, 1.0};
  Mask gray_mask;
  /// Per-pixel reflectance including texture.
  std::array<Plane, 3> reflectance;
  /// Per-pixel illumination, scale included; image = reflectance * illumination.
  std::array<Plane, 3> illumination;
};

/// Throws InputError on an invalid spec, GenerationError if any sample would
/// exceed 0.9 * white_level.
std::pair<LinearImage, SceneTruth> make_scene(const SceneSpec& spec, std::uint64_t seed);

/// Per-scene sampling ranges for make_dataset.
struct SceneDistribution {
  SceneSpec base;
  double gray_fraction_min = 0.15;
  double gray_fraction_max = 0.35;
  /// Illuminant chromaticity r, g ~ U[lo, hi]; b = 1 - r - g >= min_b.
  double chroma_lo = 0.2;
  double chroma_hi = 0.5;
  double min_b = 0.1;
};

/// Writes scene_NNNN.png (16-bit) and manifest.csv into out_dir.
Dataset make_dataset(std::size_t n, const SceneDistribution& dist, std::uint64_t seed,
                     const std::filesystem::path& out_dir);

/// Illuminant sampled from the chromaticity gamut in `dist`.
Illuminant sample_illuminant(const SceneDistribution& dist, std::uint64_t seed);

}  // namespace grayanchor
