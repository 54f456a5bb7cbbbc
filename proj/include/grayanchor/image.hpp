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

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace grayanchor {

/// Dense single-channel field of doubles, row-major.
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, double fill = 0.0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool same_shape(const Plane& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  double& operator()(int x, int y) noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  double operator()(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  double* row(int y) noexcept { return data_.data() + static_cast<std::size_t>(y) * width_; }
  const double* row(int y) const noexcept {
    return data_.data() + static_cast<std::size_t>(y) * width_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

using ScalarMap = Plane;

/// Grayness maps store +inf for pixels that were gated out or masked.
/// Lower finite values mean grayer.
using GraynessMap = Plane;
inline constexpr double kExcluded = std::numeric_limits<double>::infinity();
inline bool is_excluded(double v) noexcept { return v == kExcluded; }

/// Camera-linear RGB image. Every sample is finite and non-negative; the
/// sensor range is [0, white_level].
class LinearImage {
 public:
  LinearImage() = default;
  /// Zero-filled image.
  LinearImage(int width, int height, double white_level);
  /// Takes ownership of three same-sized planes; throws InputError when a
  /// sample is negative or non-finite.
  LinearImage(std::array<Plane, 3> channels, double white_level);

  int width() const noexcept { return channels_[0].width(); }
  int height() const noexcept { return channels_[0].height(); }
  std::size_t pixel_count() const noexcept { return channels_[0].size(); }
  double white_level() const noexcept { return white_level_; }

  const Plane& channel(int c) const noexcept { return channels_[c]; }
  const std::array<Plane, 3>& channels() const noexcept { return channels_; }
  std::array<double, 3> pixel(int x, int y) const noexcept {
    return {channels_[0](x, y), channels_[1](x, y), channels_[2](x, y)};
  }
  std::array<double, 3> pixel(std::size_t i) const noexcept {
    return {channels_[0][i], channels_[1][i], channels_[2][i]};
  }

  /// Per-channel gain, diag(c)·I. White level is unchanged.
  LinearImage scaled(const std::array<double, 3>& gains) const;

 private:
  std::array<Plane, 3> channels_;
  double white_level_ = 1.0;
};

/// Per-pixel validity; true = usable.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, bool fill);
  static Mask all_valid(int width, int height) { return Mask(width, height, true); }
  static Mask all_valid(const LinearImage& img) {
    return Mask(img.width(), img.height(), true);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return valid_.size(); }
  bool operator()(int x, int y) const noexcept {
    return valid_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  bool operator[](std::size_t i) const noexcept { return valid_[i] != 0; }
  void set(int x, int y, bool v) noexcept {
    valid_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
  }
  void set(std::size_t i, bool v) noexcept { valid_[i] = v ? 1 : 0; }
  std::size_t count_valid() const noexcept;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> valid_;
};

/// Unit-L2 RGB illuminant direction with strictly positive components.
class Illuminant {
 public:
  /// Normalizes (r, g, b); throws InputError unless all are finite and > 0.
  Illuminant(double r, double g, double b);
  explicit Illuminant(const std::array<double, 3>& rgb)
      : Illuminant(rgb[0], rgb[1], rgb[2]) {}

  double operator[](int i) const noexcept { return e_[i]; }
  const std::array<double, 3>& rgb() const noexcept { return e_; }

  /// Componentwise product with positive gains, renormalized.
  Illuminant scaled(const std::array<double, 3>& gains) const {
    return Illuminant(e_[0] * gains[0], e_[1] * gains[1], e_[2] * gains[2]);
  }

  bool operator==(const Illuminant&) const = default;

 private:
  std::array<double, 3> e_{};
};

}  // namespace grayanchor
