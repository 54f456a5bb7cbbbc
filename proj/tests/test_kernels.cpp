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
#include <numeric>

#include "grayanchor/error.hpp"
#include "grayanchor/kernels.hpp"
#include "test_util.hpp"

namespace grayanchor {
namespace {

using testing::max_abs_diff;
using testing::random_plane;
using testing::random_tensor;
namespace k = kernels;

// Brute-force 2-D Gaussian with an explicit mirrored index, no separability.
Plane gaussian_oracle(const Plane& in, double sigma) {
  const int r = static_cast<int>(std::ceil(3 * sigma));
  std::vector<double> t(2 * r + 1);
  double s = 0;
  for (int i = -r; i <= r; ++i) s += t[i + r] = std::exp(-i * i / (2 * sigma * sigma));
  for (double& v : t) v /= s;
  auto mirror = [](int i, int n) {
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
  };
  Plane out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < in.width(); ++x) {
      double acc = 0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
          acc += t[dy + r] * t[dx + r] * in(mirror(x + dx, in.width()), mirror(y + dy, in.height()));
      out(x, y) = acc;
    }
  return out;
}

TEST(Border, ReflectAndReplicate) {
  EXPECT_EQ(k::border_index(-1, 5, k::Border::kReflect), 0);
  EXPECT_EQ(k::border_index(-2, 5, k::Border::kReflect), 1);
  EXPECT_EQ(k::border_index(5, 5, k::Border::kReflect), 4);
  EXPECT_EQ(k::border_index(6, 5, k::Border::kReflect), 3);
  EXPECT_EQ(k::border_index(-12, 5, k::Border::kReflect), 1);
  EXPECT_EQ(k::border_index(-3, 5, k::Border::kReplicate), 0);
  EXPECT_EQ(k::border_index(9, 5, k::Border::kReplicate), 4);
  EXPECT_EQ(k::border_index(-1, 1, k::Border::kReflect), 0);
}

TEST(Gaussian, TapsNormalizedAndSymmetric) {
  const auto t = k::gaussian_taps(5.0);
  ASSERT_EQ(t.size(), 31u);
  EXPECT_NEAR(std::accumulate(t.begin(), t.end(), 0.0), 1.0, 1e-15);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(t[i], t[t.size() - 1 - i]);
}

TEST(Gaussian, MatchesBruteForceOracle) {
  std::mt19937_64 rng(1);
  for (auto [w, h, s] : {std::tuple{17, 11, 1.0}, {9, 23, 2.5}, {6, 5, 5.0}}) {
    const Plane in = random_plane(w, h, rng);
    EXPECT_LT(max_abs_diff(k::gaussian_filter(in, s), gaussian_oracle(in, s)), 1e-13);
    EXPECT_LT(max_abs_diff(k::serial::gaussian_filter(in, s), gaussian_oracle(in, s)), 1e-13);
  }
}

TEST(Gaussian, SelfAdjoint) {
  std::mt19937_64 rng(2);
  const Plane a = random_plane(13, 7, rng), b = random_plane(13, 7, rng);
  const Plane ga = k::gaussian_filter(a, 5.0), gb = k::gaussian_filter(b, 5.0);
  double l = 0, r = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    l += ga[i] * b[i];
    r += a[i] * gb[i];
  }
  EXPECT_NEAR(l, r, 1e-12);
}

TEST(CenterSurround, ConstantGivesExactZero) {
  const Plane c(20, 15, std::log(0.37));
  const Plane par = k::center_surround(c, 5.0), ser = k::serial::center_surround(c, 5.0);
  for (double v : par.values()) EXPECT_EQ(v, 0.0);
  for (double v : ser.values()) EXPECT_EQ(v, 0.0);
}

TEST(CenterSurround, EqualsInputMinusBlur) {
  std::mt19937_64 rng(3);
  const Plane in = random_plane(21, 18, rng);
  const Plane g = gaussian_oracle(in, 2.0);
  const Plane cs = k::center_surround(in, 2.0);
  for (std::size_t i = 0; i < in.size(); ++i) EXPECT_NEAR(cs[i], in[i] - g[i], 1e-13);
}

TEST(LocalOps, GradientLaplacianStdOracles) {
  Plane ramp(6, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 6; ++x) ramp(x, y) = 3.0 * x + 4.0 * y;
  // Interior central differences: (3, 4) -> magnitude 5.
  EXPECT_NEAR(k::gradient_magnitude(ramp)(2, 2), 5.0, 1e-12);
  EXPECT_NEAR(k::laplacian(ramp)(2, 2), 0.0, 1e-12);
  Plane checker(5, 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) checker(x, y) = (x + y) % 2;
  // 3x3 window at the centre: 4 ones, 5 zeros.
  const double m = 4.0 / 9.0;
  EXPECT_NEAR(k::local_std(checker, 3)(2, 2), std::sqrt(m - m * m), 1e-12);
}

TEST(MaskedBoxMean, SkipsExcludedAndKeepsThemExcluded) {
  Plane p(3, 1);
  p[0] = 1.0;
  p[1] = kExcluded;
  p[2] = 3.0;
  const Plane out = k::masked_box_mean(p, 3);
  EXPECT_EQ(out[0], 1.0);
  EXPECT_TRUE(is_excluded(out[1]));
  EXPECT_EQ(out[2], 3.0);
}

// ---- serial vs parallel --------------------------------------------------

class SerialParallel : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(SerialParallel, FiltersAgree) {
  const auto [w, h] = GetParam();
  std::mt19937_64 rng(w * 131 + h);
  Plane in = random_plane(w, h, rng);
  EXPECT_LT(max_abs_diff(k::gaussian_filter(in, 1.7), k::serial::gaussian_filter(in, 1.7)), 1e-13);
  EXPECT_LT(max_abs_diff(k::center_surround(in, 5.0), k::serial::center_surround(in, 5.0)), 1e-13);
  EXPECT_LT(max_abs_diff(k::gradient_magnitude(in), k::serial::gradient_magnitude(in)), 1e-14);
  EXPECT_LT(max_abs_diff(k::laplacian(in), k::serial::laplacian(in)), 1e-14);
  EXPECT_LT(max_abs_diff(k::local_std(in, 3), k::serial::local_std(in, 3)), 1e-12);
  EXPECT_LT(max_abs_diff(k::local_std(in, 7), k::serial::local_std(in, 7)), 1e-12);
  in[in.size() / 2] = kExcluded;
  const Plane a = k::masked_box_mean(in, 7), b = k::serial::masked_box_mean(in, 7);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (is_excluded(b[i])) {
      EXPECT_TRUE(is_excluded(a[i]));
    } else {
      EXPECT_NEAR(a[i], b[i], 1e-13);
    }
  }
}

TEST_P(SerialParallel, ConvForwardBackwardAgree) {
  const auto [w, h] = GetParam();
  std::mt19937_64 rng(w * 7 + h);
  const int ci = 3, co = 5;
  const auto in = random_tensor(ci, h, w, rng);
  const auto wt = random_tensor(co * ci, 3, 3, rng);
  const auto bias = random_tensor(co, 1, 1, rng);
  k::Tensor3 a, b;
  k::conv3x3_forward(in, wt.data, bias.data, co, a);
  k::serial::conv3x3_forward(in, wt.data, bias.data, co, b);
  for (std::size_t i = 0; i < a.data.size(); ++i) EXPECT_NEAR(a.data[i], b.data[i], 1e-12);

  const auto gout = random_tensor(co, h, w, rng);
  k::Tensor3 gi_a, gi_b;
  std::vector<double> gw_a(wt.data.size()), gw_b(wt.data.size()), gb_a(co), gb_b(co);
  k::conv3x3_backward(in, wt.data, co, gout, &gi_a, gw_a, gb_a);
  k::serial::conv3x3_backward(in, wt.data, co, gout, &gi_b, gw_b, gb_b);
  for (std::size_t i = 0; i < gi_a.data.size(); ++i) EXPECT_NEAR(gi_a.data[i], gi_b.data[i], 1e-11);
  for (std::size_t i = 0; i < gw_a.size(); ++i) EXPECT_NEAR(gw_a[i], gw_b[i], 1e-10);
  for (int i = 0; i < co; ++i) EXPECT_NEAR(gb_a[i], gb_b[i], 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Shapes, SerialParallel,
                         ::testing::Values(std::pair{1, 1}, std::pair{2, 3}, std::pair{16, 16},
                                           std::pair{77, 53}, std::pair{300, 9}));

TEST(Conv, DirectOracleWithReflectedPadding) {
  std::mt19937_64 rng(11);
  const int ci = 2, co = 3, h = 5, w = 4;
  const auto in = random_tensor(ci, h, w, rng);
  const auto wt = random_tensor(co * ci, 3, 3, rng);
  const auto bias = random_tensor(co, 1, 1, rng);
  k::Tensor3 out;
  k::conv3x3_forward(in, wt.data, bias.data, co, out);
  auto refl = [](int i, int n) { return i < 0 ? -i - 1 : (i >= n ? 2 * n - 1 - i : i); };
  for (int o = 0; o < co; ++o)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double acc = bias.data[o];
        for (int c = 0; c < ci; ++c)
          for (int ky = 0; ky < 3; ++ky)
            for (int kx = 0; kx < 3; ++kx)
              acc += wt.data[((o * ci + c) * 3 + ky) * 3 + kx] *
                     in.plane(c)[refl(y + ky - 1, h) * w + refl(x + kx - 1, w)];
        EXPECT_NEAR(out.plane(o)[y * w + x], acc, 1e-13);
      }
}

TEST(Conv, BackwardIsAdjointOfForward) {
  // <conv(x) - b, g> == <x, conv^T(g)> for the input gradient.
  std::mt19937_64 rng(12);
  const int ci = 4, co = 3, h = 9, w = 6;
  const auto x = random_tensor(ci, h, w, rng);
  const auto wt = random_tensor(co * ci, 3, 3, rng);
  const std::vector<double> zero_bias(co, 0.0);
  const auto g = random_tensor(co, h, w, rng);
  k::Tensor3 y, gx;
  k::conv3x3_forward(x, wt.data, zero_bias, co, y);
  std::vector<double> gw(wt.data.size()), gb(co);
  k::conv3x3_backward(x, wt.data, co, g, &gx, gw, gb);
  const double lhs = std::inner_product(y.data.begin(), y.data.end(), g.data.begin(), 0.0);
  const double rhs = std::inner_product(x.data.begin(), x.data.end(), gx.data.begin(), 0.0);
  EXPECT_NEAR(lhs, rhs, 1e-10);
  // Weight gradient: <y, g> is linear in w, so it equals <w, dW>.
  const double rw = std::inner_product(wt.data.begin(), wt.data.end(), gw.begin(), 0.0);
  EXPECT_NEAR(lhs, rw, 1e-10);
}

TEST(Conv, RejectsMismatchedParameters) {
  k::Tensor3 in(2, 4, 4), out;
  std::vector<double> w(3 * 2 * 9 - 1), b(3);
  EXPECT_THROW(k::conv3x3_forward(in, w, b, 3, out), StructuralError);
}

TEST(Threads, OutputIndependentOfThreadCount) {
  std::mt19937_64 rng(5);
  const Plane in = random_plane(211, 97, rng);
  const auto x = random_tensor(6, 97, 211, rng);
  const auto wt = random_tensor(8 * 6, 3, 3, rng);
  const std::vector<double> b(8, 0.1);
  const auto g = random_tensor(8, 97, 211, rng);

  auto run = [&](int threads) {
    k::set_threads(threads);
    k::Tensor3 y, gx;
    std::vector<double> gw(wt.data.size()), gb(8);
    k::conv3x3_forward(x, wt.data, b, 8, y);
    k::conv3x3_backward(x, wt.data, 8, g, &gx, gw, gb);
    return std::tuple{k::gaussian_filter(in, 3.0), k::local_std(in, 5), y.data, gx.data, gw, gb};
  };
  const auto one = run(1);
  const auto four = run(4);
  k::set_threads(0);
  EXPECT_TRUE(testing::bit_equal(std::get<0>(one), std::get<0>(four)));
  EXPECT_TRUE(testing::bit_equal(std::get<1>(one), std::get<1>(four)));
  EXPECT_EQ(std::get<2>(one), std::get<2>(four));
  EXPECT_EQ(std::get<3>(one), std::get<3>(four));
  EXPECT_EQ(std::get<4>(one), std::get<4>(four));
  EXPECT_EQ(std::get<5>(one), std::get<5>(four));
}

}  // namespace
}  // namespace grayanchor
