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

#include "grayanchor/opponent.hpp"

#include <algorithm>
#include <cmath>

#include "grayanchor/error.hpp"
#include "grayanchor/kernels.hpp"

namespace grayanchor {

LocalOpKind LocalOpKind::center_surround(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("center-surround sigma must be > 0");
  return LocalOpKind(Kind::kCenterSurround, sigma, 0);
}

LocalOpKind LocalOpKind::local_std(int window) {
  if (window < 3 || window % 2 == 0) throw InputError("local_std window must be odd and >= 3");
  return LocalOpKind(Kind::kLocalStd, 0.0, window);
}

LogImage log_transform(const LinearImage& img) {
  const int w = img.width(), h = img.height();
  const double floor = kLogFloor * img.white_level();
  LogImage out;
  out.white_level = img.white_level();
  for (auto& p : out.planes) p = Plane(w, h);
  const std::size_t n = img.pixel_count();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::max(img.channel(0)[i], floor);
    const double g = std::max(img.channel(1)[i], floor);
    const double b = std::max(img.channel(2)[i], floor);
    out.planes[0][i] = std::log(r);
    out.planes[1][i] = std::log(g);
    out.planes[2][i] = std::log(b);
    out.planes[3][i] = std::log(0.5 * (r + g));
  }
  return out;
}

ScalarMap local_op(const ScalarMap& map, const LocalOpKind& kind) {
  switch (kind.kind()) {
    case LocalOpKind::Kind::kCenterSurround:
      return kernels::center_surround(map, kind.sigma());
    case LocalOpKind::Kind::kGradientMagnitude:
      return kernels::gradient_magnitude(map);
    case LocalOpKind::Kind::kLocalStd:
      return kernels::local_std(map, kind.window());
  }
  throw InputError("unknown local operator");
}

std::array<ScalarMap, 4> iim(const LogImage& log_img, const LocalOpKind& kind) {
  return {local_op(log_img[0], kind), local_op(log_img[1], kind), local_op(log_img[2], kind),
          local_op(log_img[3], kind)};
}

namespace {

ScalarMap difference(const ScalarMap& a, const ScalarMap& b) {
  ScalarMap out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

GraynessMap root_sum_squares(const ScalarMap& a, const ScalarMap& b) {
  GraynessMap out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::hypot(a[i], b[i]);
  return out;
}

}  // namespace

OpponentPlanes color_opponent(const LogImage& log_img, OpponentVariant variant) {
  OpponentPlanes out{variant, {}};
  if (variant == OpponentVariant::kRgBy) {
    out.planes.push_back(difference(log_img[LogImage::kR], log_img[LogImage::kG]));
    out.planes.push_back(difference(log_img[LogImage::kB], log_img[LogImage::kY]));
    return out;
  }
  const int w = log_img.width(), h = log_img.height();
  ScalarMap log_lum(w, h);
  for (std::size_t i = 0; i < log_lum.size(); ++i)
    log_lum[i] = std::log(std::exp(log_img[0][i]) + std::exp(log_img[1][i]) + std::exp(log_img[2][i]));
  for (int c = 0; c < 3; ++c) out.planes.push_back(difference(log_img[c], log_lum));
  return out;
}

GraynessMap double_opponent(const LinearImage& img, OpponentOrder order, const LocalOpKind& kind) {
  const LogImage logs = log_transform(img);
  if (order == OpponentOrder::kSpatialFirst) {
    const auto m = iim(logs, kind);
    return root_sum_squares(difference(m[LogImage::kR], m[LogImage::kG]),
                            difference(m[LogImage::kB], m[LogImage::kY]));
  }
  const auto opp = color_opponent(logs, OpponentVariant::kRgBy);
  return root_sum_squares(local_op(opp.rg(), kind), local_op(opp.by(), kind));
}

}  // namespace grayanchor
