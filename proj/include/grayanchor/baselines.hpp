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

#pragma once

#include <limits>

#include "grayanchor/image.hpp"

namespace grayanchor {

/// Statistic e_i = (mean |D^n (G_sigma * I_i)|^p)^(1/p) over valid pixels.
/// n = 0 is the value, 1 the gradient magnitude, 2 the |Laplacian|.
/// p = infinity takes the max. sigma = 0 skips smoothing.
struct MinkowskiSpec {
  int derivative_order = 0;
  double norm = 1.0;
  double sigma = 0.0;

  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  static MinkowskiSpec gray_world() { return {0, 1.0, 0.0}; }
  static MinkowskiSpec white_patch() { return {0, kInfinity, 0.0}; }
  static MinkowskiSpec shades_of_gray(double p = 6.0) { return {0, p, 0.0}; }
  static MinkowskiSpec general_gray_world(double p = 6.0, double sigma = 1.0) { return {0, p, sigma}; }
  static MinkowskiSpec gray_edge1(double p = 1.0, double sigma = 1.0) { return {1, p, sigma}; }
  static MinkowskiSpec gray_edge2(double p = 1.0, double sigma = 1.0) { return {2, p, sigma}; }
};

Illuminant minkowski_estimate(const LinearImage& img, const MinkowskiSpec& spec, const Mask& mask);

}  // namespace grayanchor
