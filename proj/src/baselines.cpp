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

#include "grayanchor/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "grayanchor/error.hpp"
#include "grayanchor/kernels.hpp"

namespace grayanchor {

namespace {

Plane derivative(const Plane& in, int order) {
  switch (order) {
    case 0: {
      Plane out = in;
      for (double& v : out.values()) v = std::abs(v);
      return out;
    }
    case 1:
      return kernels::gradient_magnitude(in);
    default: {
      Plane out = kernels::laplacian(in);
      for (double& v : out.values()) v = std::abs(v);
      return out;
    }
  }
}

// Powers are taken relative to the channel maximum so large p cannot
// overflow: e = max * (mean (v/max)^p)^(1/p).
double channel_statistic(const Plane& values, const Mask& mask, double p) {
  double peak = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!mask[i]) continue;
    peak = std::max(peak, values[i]);
    ++n;
  }
  if (std::isinf(p) || peak == 0.0) return peak;
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (mask[i]) acc += p == 1.0 ? values[i] / peak : std::pow(values[i] / peak, p);
  return peak * std::pow(acc / static_cast<double>(n), 1.0 / p);
}

}  // namespace

Illuminant minkowski_estimate(const LinearImage& img, const MinkowskiSpec& spec, const Mask& mask) {
  if (spec.derivative_order < 0 || spec.derivative_order > 2)
    throw InputError("derivative order must be 0, 1 or 2");
  if (!(spec.norm >= 1.0)) throw InputError("Minkowski norm must be >= 1");
  if (!(spec.sigma >= 0.0)) throw InputError("smoothing sigma must be >= 0");
  if (mask.width() != img.width() || mask.height() != img.height())
    throw InputError("mask dimensions do not match the image");
  if (mask.count_valid() == 0) throw EstimationError("no valid pixels");

  double e[3];
  for (int c = 0; c < 3; ++c) {
    const Plane smoothed =
        spec.sigma > 0.0 ? kernels::gaussian_filter(img.channel(c), spec.sigma) : img.channel(c);
    e[c] = channel_statistic(derivative(smoothed, spec.derivative_order), mask, spec.norm);
  }
  if (!(e[0] > 0.0 && e[1] > 0.0 && e[2] > 0.0))
    throw EstimationError("a channel statistic is zero");
  return Illuminant(e[0], e[1], e[2]);
}

}  // namespace grayanchor
