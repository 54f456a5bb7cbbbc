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

#include "grayanchor/error.hpp"
#include "grayanchor/imageio.hpp"
#include "test_util.hpp"

namespace grayanchor {
namespace {

using testing::TempDir;

LinearImage filled(int w, int h, double white, std::array<double, 3> v) {
  std::array<Plane, 3> ch{Plane(w, h, v[0]), Plane(w, h, v[1]), Plane(w, h, v[2])};
  return LinearImage(std::move(ch), white);
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

TEST(LoadImage, BlackLevelCancelsExactly) {
  TempDir dir("io");
  save_png(dir / "a.png", filled(16, 16, 65535, {129, 129, 129}), 16);
  const LinearImage img = load_image(dir / "a.png", 129);
  EXPECT_EQ(img.white_level(), 65406);
  for (int c = 0; c < 3; ++c)
    for (double v : img.channel(c).values()) EXPECT_EQ(v, 0.0);
}

TEST(LoadImage, EightBitIdentity) {
  TempDir dir("io");
  LinearImage src = filled(16, 16, 255, {10, 200, 10});
  save_png(dir / "a.png", src, 8);
  const LinearImage img = load_image(dir / "a.png");
  EXPECT_EQ(img.white_level(), 255);
  EXPECT_EQ(img.channel(0)(3, 4), 10);
  EXPECT_EQ(img.channel(1)(3, 4), 200);
}

TEST(LoadImage, SixteenBitSubtraction) {
  TempDir dir("io");
  save_tiff(dir / "a.tif", filled(16, 17, 65535, {1000, 50, 65535}), 16);
  const LinearImage img = load_image(dir / "a.tif", 129);
  EXPECT_EQ(img.width(), 16);
  EXPECT_EQ(img.height(), 17);
  EXPECT_EQ(img.channel(0)(0, 0), 871);
  EXPECT_EQ(img.channel(1)(0, 0), 0);  // below the black level
  EXPECT_EQ(img.channel(2)(0, 0), 65406);
}

TEST(LoadImage, RoundTripIsExactForSixteenBit) {
  TempDir dir("io");
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> u(0, 65535);
  std::array<Plane, 3> ch{Plane(19, 23), Plane(19, 23), Plane(19, 23)};
  for (auto& p : ch)
    for (double& v : p.values()) v = u(rng);
  const LinearImage src(ch, 65535);
  for (const char* name : {"r.png", "r.tif"}) {
    const auto path = dir / name;
    std::string(name).ends_with(".png") ? save_png(path, src, 16) : save_tiff(path, src, 16);
    const LinearImage back = load_image(path);
    for (int c = 0; c < 3; ++c) EXPECT_TRUE(testing::bit_equal(back.channel(c), src.channel(c))) << name;
  }
}

TEST(LoadImage, Errors) {
  TempDir dir("io");
  EXPECT_THROW(load_image(dir / "missing.png"), DecodeError);
  write_text(dir / "junk.png", "not an image at all");
  EXPECT_THROW(load_image(dir / "junk.png"), DecodeError);
  save_png(dir / "small.png", filled(15, 40, 255, {1, 1, 1}), 8);
  EXPECT_THROW(load_image(dir / "small.png"), DimensionError);
  save_png(dir / "ok.png", filled(16, 16, 255, {1, 1, 1}), 8);
  EXPECT_THROW(load_image(dir / "ok.png", -1.0), InputError);
}

TEST(Polygon, EvenOddContainment) {
  const Polygon square{{0, 0}, {0, 9}, {4.5, 9}, {4.5, 0}};
  EXPECT_TRUE(polygon_contains(square, 2, 3));
  EXPECT_FALSE(polygon_contains(square, 5, 3));
  // Outer and inner square traced as one ring: the inner square is a hole.
  const Polygon frame{{0, 0}, {10, 0}, {10, 10}, {0, 10}, {0, 0}, {2, 2}, {2, 8}, {8, 8}, {8, 2}, {2, 2}};
  EXPECT_TRUE(polygon_contains(frame, 1, 5));
  EXPECT_FALSE(polygon_contains(frame, 5, 5));
}

TEST(ValidMask, Examples) {
  const LinearImage mid = filled(10, 10, 1.0, {0.5, 0.5, 0.5});
  EXPECT_EQ(valid_mask(mid, {}).count_valid(), 100u);

  std::array<Plane, 3> ch{Plane(10, 10, 0.5), Plane(10, 10, 0.5), Plane(10, 10, 0.5)};
  ch[1](3, 3) = 1.0;
  const Mask sat = valid_mask(LinearImage(ch, 1.0), {});
  EXPECT_FALSE(sat(3, 3));
  EXPECT_EQ(sat.count_valid(), 99u);

  // Left half: pixel centres x = 0..4 lie inside x < 4.5.
  const Polygon left{{-0.5, -0.5}, {4.5, -0.5}, {4.5, 9.5}, {-0.5, 9.5}};
  const Mask m = valid_mask(mid, {left});
  EXPECT_EQ(100u - m.count_valid(), 50u);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) EXPECT_EQ(m(x, y), x >= 5);
}

TEST(ValidMask, OpenRangeAndMonotone) {
  std::mt19937_64 rng(9);
  LinearImage img = testing::random_image(20, 20, rng, 1.0, 0.0, 1.0);
  const Mask full = valid_mask(img, {}, 0.0, 1.0);
  for (std::size_t i = 0; i < full.size(); ++i) {
    const auto p = img.pixel(i);
    const double mx = std::max({p[0], p[1], p[2]});
    EXPECT_EQ(full[i], mx > 0.0 && mx < 1.0);
  }
  const Mask narrow = valid_mask(img, {}, 0.3, 0.7);
  for (std::size_t i = 0; i < full.size(); ++i)
    if (narrow[i]) {
      EXPECT_TRUE(full[i]);
    }
  EXPECT_THROW(valid_mask(img, {}, 0.5, 0.5), InputError);
  EXPECT_THROW(valid_mask(img, {Polygon{{0, 0}, {1, 1}}}), InputError);
}

TEST(Manifest, ParseExamples) {
  TempDir dir("io");
  write_text(dir / "m.csv", "image,er,eg,eb,polygons\na.png,2,1,1,\nb.png,1,1,1,0:0;0:9;9:9;9:0\n");
  const Dataset d = load_manifest(dir / "m.csv");
  ASSERT_EQ(d.size(), 2u);
  EXPECT_NEAR(d.entries[0].gt[0], 2 / std::sqrt(6.0), 1e-15);
  EXPECT_NEAR(d.entries[0].gt[1], 1 / std::sqrt(6.0), 1e-15);
  EXPECT_TRUE(d.entries[0].exclusion_polygons.empty());
  ASSERT_EQ(d.entries[1].exclusion_polygons.size(), 1u);
  EXPECT_EQ(d.entries[1].exclusion_polygons[0].size(), 4u);
  EXPECT_EQ(d.entries[1].exclusion_polygons[0][2], (Point2{9, 9}));
  EXPECT_EQ(d.resolve(0), dir.path() / "a.png");

  write_text(dir / "empty.csv", "image,er,eg,eb,polygons\n");
  EXPECT_EQ(load_manifest(dir / "empty.csv").size(), 0u);
}

TEST(Manifest, RejectsBadRows) {
  TempDir dir("io");
  write_text(dir / "neg.csv", "image,er,eg,eb,polygons\na.png,2,-1,1,\n");
  EXPECT_THROW(load_manifest(dir / "neg.csv"), ManifestError);
  write_text(dir / "short.csv", "image,er,eg,eb,polygons\na.png,2,1\n");
  EXPECT_THROW(load_manifest(dir / "short.csv"), ManifestError);
  write_text(dir / "head.csv", "file,r,g,b\n");
  EXPECT_THROW(load_manifest(dir / "head.csv"), ManifestError);
  write_text(dir / "poly.csv", "image,er,eg,eb,polygons\na.png,1,1,1,0:0;1\n");
  EXPECT_THROW(load_manifest(dir / "poly.csv"), ManifestError);
  EXPECT_THROW(load_manifest(dir / "nothing.csv"), ManifestError);
}

TEST(Manifest, SaveLoadIsIdentity) {
  TempDir dir("io");
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  Dataset d;
  for (int i = 0; i < 20; ++i) {
    std::vector<Polygon> polys;
    for (int p = 0; p < i % 3; ++p) polys.push_back({{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}});
    d.entries.push_back({"img_" + std::to_string(i) + ".png", Illuminant(u(rng), u(rng), u(rng)), polys});
  }
  save_manifest(dir / "m.csv", d);
  const Dataset back = load_manifest(dir / "m.csv");
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(back.entries[i].image_path, d.entries[i].image_path);
    EXPECT_EQ(back.entries[i].gt, d.entries[i].gt);
    EXPECT_EQ(back.entries[i].exclusion_polygons, d.entries[i].exclusion_polygons);
  }
}

TEST(Polygons, CodecRoundTrip) {
  const std::vector<Polygon> polys{{{0, 0}, {0, 9}, {9, 9}}, {{1.5, 2.25}, {3, 4}, {5, 6}, {7, 8}}};
  EXPECT_EQ(parse_polygons(format_polygons(polys)), polys);
  EXPECT_TRUE(parse_polygons("").empty());
}

}  // namespace
}  // namespace grayanchor
