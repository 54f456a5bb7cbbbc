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

// Log transform plus the spatial and colour opponent operators that the
// gray-pixel detectors and the network features are assembled from.

#pragma once

#include <array>
#include <vector>

#include "grayanchor/image.hpp"

namespace grayanchor {

/// Samples are clamped to kLogFloor * white_level before taking logs.
inline constexpr double kLogFloor = 1e-5;

/// Log planes of the clamped linear image: r, g, b and the yellow
/// channel y = 0.5 (r + g).
struct LogImage {
  enum Plane4 { kR = 0, kG = 1, kB = 2, kY = 3 };
  std::array<Plane, 4> planes;
  double white_level = 1.0;

  int width() const noexcept { return planes[0].width(); }
  int height() const noexcept { return planes[0].height(); }
  const Plane& operator[](int i) const noexcept { return planes[i]; }
};

/// The local difference operator used for illuminant-invariant measures.
class LocalOpKind {
 public:
  enum class Kind { kCenterSurround, kGradientMagnitude, kLocalStd };

  static LocalOpKind center_surround(double sigma);
  static LocalOpKind gradient_magnitude() { return LocalOpKind(Kind::kGradientMagnitude, 0.0, 0); }
  static LocalOpKind local_std(int window);

  Kind kind() const noexcept { return kind_; }
  double sigma() const noexcept { return sigma_; }
  int window() const noexcept { return window_; }
  /// Only center-surround commutes with channel subtraction.
  bool is_linear() const noexcept { return kind_ == Kind::kCenterSurround; }

 private:
  LocalOpKind(Kind k, double sigma, int window) : kind_(k), sigma_(sigma), window_(window) {}
  Kind kind_;
  double sigma_;
  int window_;
};

LogImage log_transform(const LinearImage& img);

ScalarMap local_op(const ScalarMap& map, const LocalOpKind& kind);

/// Illuminant-invariant measures: local_op applied to each of the four log
/// planes (r, g, b, y).
std::array<ScalarMap, 4> iim(const LogImage& log_img, const LocalOpKind& kind);

enum class OpponentVariant {
  kRgBy,          // rg = log r - log g, by = log b - log y
  kVsLuminance,   // phi_i = log I_i - log(I_r + I_g + I_b)
};

struct OpponentPlanes {
  OpponentVariant variant;
  std::vector<ScalarMap> planes;  // {rg, by} or {phi_r, phi_g, phi_b}

  const ScalarMap& rg() const { return planes.at(0); }
  const ScalarMap& by() const { return planes.at(1); }
  const ScalarMap& phi(int channel) const { return planes.at(channel); }
};

OpponentPlanes color_opponent(const LogImage& log_img, OpponentVariant variant);

enum class OpponentOrder {
  kSpatialFirst,  // local_op per log plane, then R-G and B-Y differences
  kColorFirst,    // R-G and B-Y log differences, then local_op
};

/// Double-opponent grayness: root-sum-of-squares of the R-G and B-Y double
/// opponent responses. Non-negative; zero where both responses vanish.
GraynessMap double_opponent(const LinearImage& img, OpponentOrder order, const LocalOpKind& kind);

}  // namespace grayanchor
