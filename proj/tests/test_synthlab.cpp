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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <iterator>

#include "grayanchor/error.hpp"
#include "grayanchor/evalbench.hpp"
#include "grayanchor/grayclassic.hpp"
#include "grayanchor/synthlab.hpp"
#include "test_util.hpp"

namespace grayanchor {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

TEST(MakeScene, AllGrayUnderWhiteIsAchromatic) {
  SceneSpec spec;
  spec.reflectances = std::vector<std::array<double, 3>>(16, {0.5, 0.5, 0.5});
  auto [img, truth] = make_scene(spec, 1);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const auto p = img.pixel(i);
    EXPECT_EQ(p[0], p[1]);
    EXPECT_EQ(p[1], p[2]);
  }
  EXPECT_EQ(truth.gray_mask.count_valid(), img.pixel_count());
}

TEST(MakeScene, GrayPatchesCarryTheIlluminantChromaticity) {
  SceneSpec spec;
  spec.illuminant = Illuminant(2, 1, 1);
  auto [img, truth] = make_scene(spec, 2);
  std::size_t n = 0;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    if (!truth.gray_mask[i]) continue;
    const auto p = img.pixel(i);
    EXPECT_NEAR(p[0] / p[1], 2.0, 1e-12);
    EXPECT_NEAR(p[2] / p[1], 1.0, 1e-12);
    ++n;
  }
  EXPECT_GT(n, 0u);
  EXPECT_EQ(truth.gt, spec.illuminant);
}

TEST(MakeScene, InversionRecoversReflectance) {
  for (FieldKind field : {FieldKind::kUniform, FieldKind::kSmooth}) {
    SceneSpec spec;
    spec.illuminant = Illuminant(0.3, 0.5, 0.2);
    spec.field = field;
    spec.field_strength = 0.3;
    auto [img, truth] = make_scene(spec, 3);
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < img.pixel_count(); ++i)
        ASSERT_NEAR(img.channel(c)[i] / truth.illumination[c][i], truth.reflectance[c][i], 1e-12);
    for (std::size_t i = 0; i < img.pixel_count(); ++i)
      if (truth.gray_mask[i]) {
        EXPECT_EQ(truth.reflectance[0][i], truth.reflectance[1][i]);
        EXPECT_EQ(truth.reflectance[1][i], truth.reflectance[2][i]);
      }
  }
}

TEST(MakeScene, DeterministicAndBounded) {
  SceneSpec spec;
  spec.illuminant = Illuminant(0.1, 0.2, 0.9);
  auto [a, ta] = make_scene(spec, 4);
  auto [b, tb] = make_scene(spec, 4);
  auto [c, tc] = make_scene(spec, 5);
  for (int ch = 0; ch < 3; ++ch) {
    EXPECT_TRUE(testing::bit_equal(a.channel(ch), b.channel(ch)));
    EXPECT_FALSE(testing::bit_equal(a.channel(ch), c.channel(ch)));
    for (double v : a.channel(ch).values()) EXPECT_LE(v, 0.9 * a.white_level());
  }
}

TEST(MakeScene, Errors) {
  SceneSpec spec;
  spec.intensity = 2.0;
  EXPECT_THROW(make_scene(spec, 1), GenerationError);
  spec = SceneSpec{};
  spec.texture_amplitude = 0.5;
  EXPECT_THROW(make_scene(spec, 1), InputError);
  spec = SceneSpec{};
  spec.grid_rows = 0;
  EXPECT_THROW(make_scene(spec, 1), InputError);
  spec = SceneSpec{};
  spec.reflectances = std::vector<std::array<double, 3>>(3, {0.5, 0.5, 0.5});
  EXPECT_THROW(make_scene(spec, 1), InputError);
}

TEST(SampleIlluminant, StaysInGamut) {
  SceneDistribution dist;
  for (std::uint64_t s = 0; s < 500; ++s) {
    const Illuminant e = sample_illuminant(dist, s);
    const double sum = e[0] + e[1] + e[2];
    EXPECT_GE(e[0] / sum, dist.chroma_lo - 1e-12);
    EXPECT_LE(e[0] / sum, dist.chroma_hi + 1e-12);
    EXPECT_GE(e[1] / sum, dist.chroma_lo - 1e-12);
    EXPECT_LE(e[1] / sum, dist.chroma_hi + 1e-12);
    EXPECT_GE(e[2] / sum, dist.min_b - 1e-12);
  }
}

TEST(MakeDataset, EmptyAndDeterministic) {
  testing::TempDir a("synth"), b("synth");
  EXPECT_EQ(make_dataset(0, SceneDistribution{}, 1, a / "empty").size(), 0u);
  EXPECT_EQ(load_manifest(a / "empty" / "manifest.csv").size(), 0u);

  SceneDistribution dist;
  dist.base.width = dist.base.height = 64;
  dist.base.grid_rows = dist.base.grid_cols = 2;
  make_dataset(3, dist, 9, a.path());
  make_dataset(3, dist, 9, b.path());
  for (const char* f : {"manifest.csv", "scene_0000.png", "scene_0001.png", "scene_0002.png"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(MakeDataset, HundredUnitNormRows) {
  testing::TempDir dir("synth");
  SceneDistribution dist;
  dist.base.width = dist.base.height = 32;
  dist.base.grid_rows = dist.base.grid_cols = 2;
  make_dataset(100, dist, 10, dir.path());
  const Dataset d = load_manifest(dir / "manifest.csv");
  ASSERT_EQ(d.size(), 100u);
  for (const auto& e : d.entries) EXPECT_NEAR(std::hypot(e.gt[0], e.gt[1], e.gt[2]), 1.0, 1e-12);
  EXPECT_TRUE(std::filesystem::exists(d.resolve(99)));
}

TEST(Oracle, DetectorsSelectInsideGrayMask) {
  SceneDistribution dist;
  for (int t = 0; t < 4; ++t) {
    SceneSpec spec = dist.base;
    spec.illuminant = sample_illuminant(dist, 40 + t);
    auto [img, truth] = make_scene(spec, 50 + t);
    const Mask all = Mask::all_valid(img);
    for (const GraynessMap& m : {grayness_gp(img, GpVariant::kEdge, all), grayness_gp(img, GpVariant::kStd, all),
                                 grayness_gi(img, all)}) {
      const PixelSet s = select_gray(m, SelectAmount::top_frac(0.001));
      std::size_t inside = 0;
      for (const auto& p : s.coords) inside += truth.gray_mask(p.x, p.y);
      EXPECT_GE(inside, 0.95 * s.size());
    }
  }
}

TEST(Oracle, GrayInteriorsSatisfyBothCriteria) {
  SceneSpec spec;
  spec.illuminant = Illuminant(0.6, 0.3, 0.1);
  auto [img, truth] = make_scene(spec, 60);
  DetectorConfig cfg;
  cfg.smooth_window = 1;
  cfg.zero_floor = 0.0;
  const Mask all = Mask::all_valid(img);
  const GraynessMap edge = grayness_gp(img, GpVariant::kEdge, all, cfg);
  const GraynessMap stdv = grayness_gp(img, GpVariant::kStd, all, cfg);
  const GraynessMap gi = grayness_gi(img, all, cfg);
  const int patch = spec.width / spec.grid_cols;
  int checked = 0, gated = 0;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const int px = x % patch, py = y % patch;
      if (!truth.gray_mask(x, y) || std::min({px, py, patch - 1 - px, patch - 1 - py}) < 16) continue;
      EXPECT_LT(edge(x, y), 1e-9);
      EXPECT_LT(stdv(x, y), 1e-9);
      if (is_excluded(gi(x, y)))
        ++gated;  // surround difference crossed zero
      else
        EXPECT_LT(gi(x, y), 1e-9);
      ++checked;
    }
  EXPECT_GT(checked, 0);
  EXPECT_LT(gated, checked / 100 + 1);
}

TEST(Oracle, SmallSmoothFieldBarelyMovesRecovery) {
  SceneDistribution dist;
  for (int t = 0; t < 4; ++t) {
    SceneSpec uniform = dist.base;
    uniform.illuminant = sample_illuminant(dist, 70 + t);
    SceneSpec smooth = uniform;
    smooth.field = FieldKind::kSmooth;
    smooth.field_strength = 0.02;
    auto [a, ta] = make_scene(uniform, 80 + t);
    auto [b, tb] = make_scene(smooth, 80 + t);
    const auto amount = SelectAmount::top_frac(0.001);
    auto err = [&](const LinearImage& img, const SceneTruth& truth) {
      const GraynessMap m = grayness_gi(img, Mask::all_valid(img));
      return recovery_error(estimate_illuminant(img, select_gray(m, amount)), truth.gt);
    };
    EXPECT_LT(err(b, tb) - err(a, ta), 1.0);
  }
}

TEST(Oracle, SharedChromaticTextureDefeatsLocalCriteria) {
  SceneSpec spec;
  spec.illuminant = Illuminant(0.5, 0.3, 0.2);
  spec.texture_mode = TextureMode::kAllShared;
  auto [img, truth] = make_scene(spec, 90);
  DetectorConfig cfg;
  cfg.smooth_window = 1;
  const GraynessMap edge = grayness_gp(img, GpVariant::kEdge, Mask::all_valid(img), cfg);
  const int patch = spec.width / spec.grid_cols;
  std::size_t chroma_zero = 0;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const int px = x % patch, py = y % patch;
      if (truth.gray_mask(x, y) || std::min({px, py, patch - 1 - px, patch - 1 - py}) < 2) continue;
      chroma_zero += edge(x, y) < 1e-6;
    }
  EXPECT_GT(chroma_zero, 0u);
}

}  // namespace
}  // namespace grayanchor
