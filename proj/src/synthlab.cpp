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

#include "grayanchor/synthlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "grayanchor/error.hpp"

namespace grayanchor {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

void validate(const SceneSpec& s) {
  if (s.width < 1 || s.height < 1) throw InputError("scene size must be positive");
  if (s.grid_rows < 1 || s.grid_cols < 1 || s.grid_rows > s.height || s.grid_cols > s.width)
    throw InputError("grid must have between 1 and one patch per pixel per axis");
  if (!(s.gray_fraction >= 0.0 && s.gray_fraction <= 1.0))
    throw InputError("gray fraction must lie in [0, 1]");
  if (!(s.texture_amplitude >= 0.0 && s.texture_amplitude < 0.5))
    throw InputError("texture amplitude must lie in [0, 0.5)");
  if (!(s.field_strength >= 0.0 && s.field_strength < 1.0))
    throw InputError("field strength must lie in [0, 1)");
  if (!(s.white_level > 0.0) || !(s.intensity > 0.0))
    throw InputError("white level and intensity must be positive");
  if (!(s.noise_sigma >= 0.0)) throw InputError("noise sigma must be >= 0");
  if (s.reflectances) {
    if (s.reflectances->size() != static_cast<std::size_t>(s.grid_rows) * s.grid_cols)
      throw InputError("need one reflectance per grid patch");
    for (const auto& r : *s.reflectances)
      for (double v : r)
        if (!(v > 0.0 && v <= 1.0)) throw InputError("reflectances must lie in (0, 1]");
  }
}

// Chromatic reflectances are kept visibly non-gray: max/min >= 1.25.
std::array<double, 3> chromatic_reflectance(Rng& rng) {
  for (;;) {
    std::array<double, 3> r{uniform(rng, 0.1, 1.0), uniform(rng, 0.1, 1.0), uniform(rng, 0.1, 1.0)};
    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    if (*hi >= 1.25 * *lo) return r;
  }
}

std::vector<std::array<double, 3>> draw_reflectances(const SceneSpec& s, Rng& rng) {
  if (s.reflectances) return *s.reflectances;
  const std::size_t n = static_cast<std::size_t>(s.grid_rows) * s.grid_cols;
  std::size_t n_gray = static_cast<std::size_t>(std::lround(s.gray_fraction * static_cast<double>(n)));
  if (s.gray_fraction > 0.0) n_gray = std::max<std::size_t>(n_gray, 1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> gray(n, false);
  for (std::size_t i = 0; i < n_gray; ++i) gray[order[i]] = true;

  std::vector<std::array<double, 3>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (gray[i]) {
      const double v = uniform(rng, 0.2, 0.9);
      out[i] = {v, v, v};
    } else {
      out[i] = chromatic_reflectance(rng);
    }
  }
  return out;
}

}  // namespace

std::pair<LinearImage, SceneTruth> make_scene(const SceneSpec& spec, std::uint64_t seed) {
  validate(spec);
  Rng rng(seed);
  const int w = spec.width, h = spec.height;
  const auto patches = draw_reflectances(spec, rng);

  double sx[3] = {0, 0, 0}, sy[3] = {0, 0, 0};
  if (spec.field == FieldKind::kSmooth) {
    for (int c = 0; c < 3; ++c) {
      sx[c] = uniform(rng, -spec.field_strength, spec.field_strength);
      sy[c] = uniform(rng, -spec.field_strength, spec.field_strength);
    }
  }

  SceneTruth truth;
  truth.gt = spec.illuminant;
  truth.gray_mask = Mask(w, h, false);
  for (int c = 0; c < 3; ++c) {
    truth.reflectance[c] = Plane(w, h);
    truth.illumination[c] = Plane(w, h);
  }

  const double scale = spec.intensity * spec.white_level;
  const double a = spec.texture_amplitude;
  for (int y = 0; y < h; ++y) {
    const int py = y * spec.grid_rows / h;
    const double fy = h > 1 ? static_cast<double>(y) / (h - 1) - 0.5 : 0.0;
    for (int x = 0; x < w; ++x) {
      const int px = x * spec.grid_cols / w;
      const double fx = w > 1 ? static_cast<double>(x) / (w - 1) - 0.5 : 0.0;
      const auto& rho = patches[static_cast<std::size_t>(py) * spec.grid_cols + px];
      const bool is_gray = rho[0] == rho[1] && rho[1] == rho[2];
      const bool shared = is_gray || spec.texture_mode == TextureMode::kAllShared;
      truth.gray_mask.set(x, y, is_gray);

      const double t0 = 1.0 + a * uniform(rng, -1.0, 1.0);
      for (int c = 0; c < 3; ++c) {
        const double t = (shared || c == 0) ? t0 : 1.0 + a * uniform(rng, -1.0, 1.0);
        truth.reflectance[c](x, y) = rho[c] * t;
        truth.illumination[c](x, y) = scale * spec.illuminant[c] * (1.0 + sx[c] * fx + sy[c] * fy);
      }
    }
  }

  std::array<Plane, 3> channels;
  std::normal_distribution<double> noise(0.0, spec.noise_sigma * spec.white_level);
  const double limit = 0.9 * spec.white_level;
  for (int c = 0; c < 3; ++c) {
    channels[c] = Plane(w, h);
    for (std::size_t i = 0; i < channels[c].size(); ++i) {
      double v = truth.reflectance[c][i] * truth.illumination[c][i];
      if (spec.noise_sigma > 0.0) v = std::max(0.0, v + noise(rng));
      if (v > limit)
        throw GenerationError("sample " + std::to_string(v) + " exceeds 0.9 * white level");
      channels[c][i] = v;
    }
  }
  return {LinearImage(std::move(channels), spec.white_level), std::move(truth)};
}

Illuminant sample_illuminant(const SceneDistribution& dist, std::uint64_t seed) {
  if (!(dist.chroma_lo > 0.0 && dist.chroma_lo < dist.chroma_hi && dist.min_b > 0.0 &&
        2.0 * dist.chroma_lo + dist.min_b < 1.0))
    throw InputError("illuminant gamut is empty");
  Rng rng(seed);
  for (;;) {
    const double r = uniform(rng, dist.chroma_lo, dist.chroma_hi);
    const double g = uniform(rng, dist.chroma_lo, dist.chroma_hi);
    const double b = 1.0 - r - g;
    if (b >= dist.min_b) return Illuminant(r, g, b);
  }
}

Dataset make_dataset(std::size_t n, const SceneDistribution& dist, std::uint64_t seed,
                     const std::filesystem::path& out_dir) {
  if (!(dist.gray_fraction_min >= 0.0 && dist.gray_fraction_min <= dist.gray_fraction_max &&
        dist.gray_fraction_max <= 1.0))
    throw InputError("gray fraction range must satisfy 0 <= min <= max <= 1");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  Dataset data;
  data.name = "synthlab";
  data.root = out_dir;
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    SceneSpec spec = dist.base;
    spec.illuminant = sample_illuminant(dist, rng());
    spec.gray_fraction = uniform(rng, dist.gray_fraction_min, dist.gray_fraction_max);
    const std::uint64_t scene_seed = rng();
    const auto [img, truth] = make_scene(spec, scene_seed);

    char name[32];
    std::snprintf(name, sizeof name, "scene_%04zu.png", i);
    save_png(out_dir / name, img, 16);
    data.entries.push_back({name, truth.gt, {}});
  }
  save_manifest(out_dir / "manifest.csv", data);
  return data;
}

}  // namespace grayanchor
