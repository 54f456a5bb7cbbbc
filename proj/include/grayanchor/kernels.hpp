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

// Data-parallel inner loops shared by every module.
//
// Functions in grayanchor::kernels are the OpenMP versions used by the
// library. grayanchor::kernels::serial holds plain single-threaded
// references with the same contracts; tests compare the two and
// bench/kernels_bench measures them side by side.
//
// Every parallel kernel produces bit-identical output for any thread count:
// work is split into fixed-size chunks and cross-chunk reductions are
// summed in chunk order.

#pragma once

#include <span>
#include <vector>

#include "grayanchor/image.hpp"

namespace grayanchor::kernels {

/// Maps an out-of-range index into [0, n). kReflect mirrors about the
/// sample edge, duplicating the border sample (-1 -> 0, -2 -> 1), which
/// keeps symmetric filters self-adjoint. kReplicate clamps.
enum class Border { kReflect, kReplicate };
int border_index(int i, int n, Border border) noexcept;

/// Normalized 1-D Gaussian taps, radius ceil(3 sigma).
std::vector<double> gaussian_taps(double sigma);

/// C x H x W stack of planes, channel-major.
struct Tensor3 {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(int c, int h, int w, double fill = 0.0)
      : channels(c), height(h), width(w),
        data(static_cast<std::size_t>(c) * h * w, fill) {}
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(height) * width;
  }
  double* plane(int c) noexcept { return data.data() + c * plane_size(); }
  const double* plane(int c) const noexcept { return data.data() + c * plane_size(); }
  bool same_shape(const Tensor3& o) const noexcept {
    return channels == o.channels && height == o.height && width == o.width;
  }
};

// ---- image filters -------------------------------------------------------

/// Separable Gaussian blur, reflected borders, truncated at 3 sigma.
Plane gaussian_filter(const Plane& in, double sigma);
/// in - G_sigma * in. Evaluated in difference form, so a constant input
/// gives exactly zero.
Plane center_surround(const Plane& in, double sigma);
/// Central-difference gradient magnitude, replicated borders.
Plane gradient_magnitude(const Plane& in);
/// 4-neighbour Laplacian (signed), replicated borders.
Plane laplacian(const Plane& in);
/// Population standard deviation over an odd window, replicated borders.
Plane local_std(const Plane& in, int window);
/// Mean over the window of finite neighbours only; excluded (+inf) inputs
/// stay excluded. Windows are clipped at the image edge.
Plane masked_box_mean(const Plane& in, int window);

// ---- 3x3 convolution, reflected same-padding ----------------------------
//
// weight layout: [out][in][ky][kx]; bias: [out].

void conv3x3_forward(const Tensor3& in, std::span<const double> weight,
                     std::span<const double> bias, int out_channels,
                     Tensor3& out);

/// grad_in may be null. grad_weight and grad_bias are overwritten.
void conv3x3_backward(const Tensor3& in, std::span<const double> weight,
                      int out_channels, const Tensor3& grad_out,
                      Tensor3* grad_in, std::span<double> grad_weight,
                      std::span<double> grad_bias);

namespace serial {

Plane gaussian_filter(const Plane& in, double sigma);
Plane center_surround(const Plane& in, double sigma);
Plane gradient_magnitude(const Plane& in);
Plane laplacian(const Plane& in);
Plane local_std(const Plane& in, int window);
Plane masked_box_mean(const Plane& in, int window);

void conv3x3_forward(const Tensor3& in, std::span<const double> weight,
                     std::span<const double> bias, int out_channels,
                     Tensor3& out);
void conv3x3_backward(const Tensor3& in, std::span<const double> weight,
                      int out_channels, const Tensor3& grad_out,
                      Tensor3* grad_in, std::span<double> grad_weight,
                      std::span<double> grad_bias);

}  // namespace serial

/// Sets the OpenMP team size used by the parallel kernels; n <= 0 keeps
/// the runtime default.
void set_threads(int n);
int threads();

}  // namespace grayanchor::kernels
