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

#include "grayanchor/error.hpp"
#include "grayanchor/opponent.hpp"
#include "test_util.hpp"

namespace grayanchor {
namespace {

using testing::max_abs_diff;

LinearImage constant(int w, int h, std::array<double, 3> v, double white = 1.0) {
  return LinearImage({Plane(w, h, v[0]), Plane(w, h, v[1]), Plane(w, h, v[2])}, white);
}

std::array<double, 3> random_gains(std::mt19937_64& rng, bool equal_rg = false) {
  std::uniform_real_distribution<double> u(0.2, 5.0);
  std::array<double, 3> c{u(rng), u(rng), u(rng)};
  if (equal_rg) c[1] = c[0];
  return c;
}

TEST(LogTransform, ConstantImage) {
  const LogImage l = log_transform(constant(5, 4, {0.3, 0.3, 0.3}));
  for (int i = 0; i < 4; ++i)
    for (double v : l[i].values()) EXPECT_DOUBLE_EQ(v, std::log(0.3));
}

TEST(LogTransform, ZeroIsClampedBeforeLog) {
  LinearImage img = constant(2, 2, {0.0, 1.0, 1.0});
  const LogImage l = log_transform(img);
  EXPECT_DOUBLE_EQ(l[LogImage::kR](1, 1), std::log(1e-5));
  EXPECT_DOUBLE_EQ(l[LogImage::kG](1, 1), 0.0);
  EXPECT_DOUBLE_EQ(l[LogImage::kB](1, 1), 0.0);
  // y averages the clamped channels: log(0.5 * (1e-5 + 1)).
  EXPECT_DOUBLE_EQ(l[LogImage::kY](1, 1), std::log(0.5 * (1e-5 + 1.0)));
  EXPECT_NEAR(l[LogImage::kY](1, 1), std::log(0.5), 1e-4);
}

TEST(LogTransform, ScalingShiftsEveryPlane) {
  std::mt19937_64 rng(1);
  const LinearImage img = testing::random_image(9, 7, rng);
  const LogImage a = log_transform(img), b = log_transform(img.scaled({3.0, 3.0, 3.0}));
  for (int i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) EXPECT_NEAR(b[i][j] - a[i][j], std::log(3.0), 1e-12);
}

TEST(LocalOp, ConstantMapGivesZeroForEveryKind) {
  const Plane c(12, 9, -2.5);
  for (const auto& kind : {LocalOpKind::center_surround(5), LocalOpKind::gradient_magnitude(),
                           LocalOpKind::local_std(3)}) {
    const ScalarMap out = local_op(c, kind);
    for (double v : out.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(LocalOp, ImpulseCenterSurround) {
  Plane p(21, 21);
  p(10, 10) = 1.0;
  const double g0 = 1.0 / (2 * M_PI);  // unnormalized peak of a unit 2-D Gaussian, sigma 1
  // Oracle from the truncated, renormalized 1-D taps: radius 3.
  double s = 0;
  for (int i = -3; i <= 3; ++i) s += std::exp(-i * i / 2.0);
  const double center = 1.0 - 1.0 / (s * s);
  EXPECT_NEAR(local_op(p, LocalOpKind::center_surround(1.0))(10, 10), center, 1e-14);
  EXPECT_NEAR(center, 1.0 - g0, 2e-3);  // truncation changes the peak only slightly
}

TEST(LocalOp, RampGradient) {
  Plane r(8, 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 8; ++x) r(x, y) = x;
  const Plane g = local_op(r, LocalOpKind::gradient_magnitude());
  for (int y = 1; y < 4; ++y)
    for (int x = 1; x < 7; ++x) EXPECT_DOUBLE_EQ(g(x, y), 1.0);
}

TEST(LocalOp, LocalStdIgnoresOffsets) {
  std::mt19937_64 rng(2);
  const Plane p = testing::random_plane(15, 11, rng);
  Plane q = p;
  for (double& v : q.values()) v += 7.25;
  EXPECT_LT(max_abs_diff(local_op(p, LocalOpKind::local_std(5)), local_op(q, LocalOpKind::local_std(5))), 1e-12);
}

TEST(LocalOp, RejectsBadParameters) {
  EXPECT_THROW(LocalOpKind::center_surround(0.0), InputError);
  EXPECT_THROW(LocalOpKind::local_std(4), InputError);
  EXPECT_THROW(LocalOpKind::local_std(1), InputError);
}

TEST(Iim, TwoPatchEdgeProfile) {
  // log image 0 | 1 along x; center-surround with sigma 5.
  const int w = 80, h = 3;
  Plane step(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = w / 2; x < w; ++x) step(x, y) = 1.0;
  const Plane cs = local_op(step, LocalOpKind::center_surround(5.0));
  // 1-D oracle: the blur across the edge uses only the x taps.
  const auto taps = kernels::gaussian_taps(5.0);
  const int r = 15;
  for (int x = 0; x < w; ++x) {
    double blur = 0;
    for (int d = -r; d <= r; ++d) {
      const int xx = std::clamp(x + d, 0, w - 1);  // far from the border the mirror never triggers
      blur += taps[d + r] * (xx >= w / 2 ? 1.0 : 0.0);
    }
    if (x >= r && x < w - r) {
      EXPECT_NEAR(cs(x, 1), step(x, 1) - blur, 1e-13);
    }
  }
  for (int d = 0; d < 16; ++d) EXPECT_NEAR(cs(w / 2 + d, 1), -cs(w / 2 - 1 - d, 1), 1e-13);
  EXPECT_EQ(cs(5, 1), 0.0);
  EXPECT_EQ(cs(w - 6, 1), 0.0);
}

TEST(Iim, GainInvariance) {
  std::mt19937_64 rng(3);
  const LinearImage img = testing::random_image(17, 13, rng);
  for (const auto& kind : {LocalOpKind::center_surround(2), LocalOpKind::gradient_magnitude(),
                           LocalOpKind::local_std(3)}) {
    // r, g, b IIMs are invariant to any gains; y only when the r and g gains match.
    const auto c = random_gains(rng);
    const auto a = iim(log_transform(img), kind), b = iim(log_transform(img.scaled(c)), kind);
    for (int i = 0; i < 3; ++i) EXPECT_LT(max_abs_diff(a[i], b[i]), 1e-9);
    const auto d = iim(log_transform(img.scaled(random_gains(rng, true))), kind);
    EXPECT_LT(max_abs_diff(a[3], d[3]), 1e-9);
  }
}

TEST(ColorOpponent, Examples) {
  const LogImage gray = log_transform(constant(2, 2, {0.4, 0.4, 0.4}));
  const auto rgby = color_opponent(gray, OpponentVariant::kRgBy);
  EXPECT_EQ(rgby.rg()(0, 0), 0.0);
  EXPECT_EQ(rgby.by()(0, 0), 0.0);
  const auto phi = color_opponent(gray, OpponentVariant::kVsLuminance);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(phi.phi(c)(1, 1), -std::log(3.0), 1e-14);

  const auto p = color_opponent(log_transform(constant(2, 2, {0.2, 0.1, 0.1})), OpponentVariant::kRgBy);
  EXPECT_NEAR(p.rg()(0, 0), std::log(2.0), 1e-14);
  EXPECT_NEAR(p.by()(0, 0), -std::log(1.5), 1e-14);
}

TEST(ColorOpponent, GainShiftsPlanesByConstant) {
  std::mt19937_64 rng(4);
  const LinearImage img = testing::random_image(6, 6, rng);
  const auto c = random_gains(rng);
  const auto a = color_opponent(log_transform(img), OpponentVariant::kRgBy);
  const auto b = color_opponent(log_transform(img.scaled(c)), OpponentVariant::kRgBy);
  for (std::size_t i = 0; i < a.rg().size(); ++i)
    EXPECT_NEAR(b.rg()[i] - a.rg()[i], std::log(c[0] / c[1]), 1e-12);
  // phi shifts by a constant on gray pixels: log(c_k / sum(c)) against log(1/3).
  const LinearImage g = constant(4, 4, {0.2, 0.2, 0.2});
  const auto pa = color_opponent(log_transform(g), OpponentVariant::kVsLuminance);
  const auto pb = color_opponent(log_transform(g.scaled(c)), OpponentVariant::kVsLuminance);
  for (int ch = 0; ch < 3; ++ch) {
    const double shift = std::log(3.0 * c[ch] / (c[0] + c[1] + c[2]));
    for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(pb.phi(ch)[i] - pa.phi(ch)[i], shift, 1e-12);
  }
}

TEST(DoubleOpponent, GrayImageIsZeroInBothOrders) {
  std::mt19937_64 rng(5);
  Plane tex = testing::random_plane(24, 24, rng, 0.2, 0.9);
  std::array<Plane, 3> ch{tex, tex, tex};
  const double e[3] = {2 / std::sqrt(6.0), 1 / std::sqrt(6.0), 1 / std::sqrt(6.0)};
  for (int c = 0; c < 3; ++c)
    for (double& v : ch[c].values()) v *= e[c];
  const LinearImage img(ch, 1.0);
  for (auto order : {OpponentOrder::kSpatialFirst, OpponentOrder::kColorFirst}) {
    const GraynessMap m = double_opponent(img, order, LocalOpKind::center_surround(5));
    for (double v : m.values()) EXPECT_LT(v, 1e-12);
  }
}

TEST(DoubleOpponent, OrdersAgreeForLinearOperator) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 10; ++t) {
    const LinearImage img = testing::random_image(23, 19, rng);
    const auto kind = LocalOpKind::center_surround(2.0 + t * 0.3);
    EXPECT_LT(max_abs_diff(double_opponent(img, OpponentOrder::kSpatialFirst, kind),
                           double_opponent(img, OpponentOrder::kColorFirst, kind)),
              1e-9);
  }
}

TEST(DoubleOpponent, OrdersDifferForNonlinearOperator) {
  std::mt19937_64 rng(7);
  const LinearImage img = testing::random_image(16, 16, rng);
  const auto kind = LocalOpKind::local_std(3);
  EXPECT_GT(max_abs_diff(double_opponent(img, OpponentOrder::kSpatialFirst, kind),
                         double_opponent(img, OpponentOrder::kColorFirst, kind)),
            1e-3);
}

TEST(DoubleOpponent, ChromaticEdgeIsPositive) {
  std::array<Plane, 3> ch{Plane(40, 10), Plane(40, 10), Plane(40, 10)};
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 40; ++x) {
      ch[0](x, y) = x < 20 ? 0.8 : 0.1;
      ch[1](x, y) = x < 20 ? 0.1 : 0.8;
      ch[2](x, y) = 0.1;
    }
  const GraynessMap m = double_opponent(LinearImage(ch, 1.0), OpponentOrder::kSpatialFirst,
                                        LocalOpKind::center_surround(2.0));
  for (int x = 17; x < 23; ++x) EXPECT_GT(m(x, 5), 0.1);
}

TEST(DoubleOpponent, GainInvariantWhenRedAndGreenGainsMatch) {
  std::mt19937_64 rng(8);
  const LinearImage img = testing::random_image(20, 20, rng);
  const auto kind = LocalOpKind::center_surround(3);
  const auto c = random_gains(rng, true);
  for (auto order : {OpponentOrder::kSpatialFirst, OpponentOrder::kColorFirst})
    EXPECT_LT(max_abs_diff(double_opponent(img, order, kind), double_opponent(img.scaled(c), order, kind)), 1e-9);
}

}  // namespace
}  // namespace grayanchor
