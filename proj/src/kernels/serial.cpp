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

// Single-threaded reference kernels. Written for clarity, not speed.

#include <algorithm>
#include <cmath>

#include "grayanchor/error.hpp"
#include "grayanchor/kernels.hpp"

namespace grayanchor::kernels {

int border_index(int i, int n, Border border) noexcept {
  if (i >= 0 && i < n) return i;
  if (border == Border::kReplicate) return i < 0 ? 0 : n - 1;
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

std::vector<double> gaussian_taps(double sigma) {
  if (!(sigma > 0.0)) throw InputError("gaussian sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    taps[k + radius] = std::exp(-0.5 * (k * k) / (sigma * sigma));
    sum += taps[k + radius];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

namespace serial {

Plane gaussian_filter(const Plane& in, double sigma) {
  const auto taps = gaussian_taps(sigma);
  const int r = static_cast<int>(taps.size() / 2);
  const int w = in.width(), h = in.height();
  Plane tmp(w, h), out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int k = -r; k <= r; ++k)
        s += taps[k + r] * in(border_index(x + k, w, Border::kReflect), y);
      tmp(x, y) = s;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int k = -r; k <= r; ++k)
        s += taps[k + r] * tmp(x, border_index(y + k, h, Border::kReflect));
      out(x, y) = s;
    }
  return out;
}

// m - Gy*Gx*m = v + Gy*h with h = sum_i t_i (m - m(x+i)) and
// v = sum_j t_j (m - m(y+j)); both vanish exactly on constants.
Plane center_surround(const Plane& in, double sigma) {
  const auto taps = gaussian_taps(sigma);
  const int r = static_cast<int>(taps.size() / 2);
  const int w = in.width(), h = in.height();
  Plane hdiff(w, h), out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int k = -r; k <= r; ++k)
        s += taps[k + r] * (in(x, y) - in(border_index(x + k, w, Border::kReflect), y));
      hdiff(x, y) = s;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double v = 0.0, blur = 0.0;
      for (int k = -r; k <= r; ++k) {
        const int yy = border_index(y + k, h, Border::kReflect);
        v += taps[k + r] * (in(x, y) - in(x, yy));
        blur += taps[k + r] * hdiff(x, yy);
      }
      out(x, y) = v + blur;
    }
  return out;
}

Plane gradient_magnitude(const Plane& in) {
  const int w = in.width(), h = in.height();
  Plane out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double dx = 0.5 * (in(std::min(x + 1, w - 1), y) - in(std::max(x - 1, 0), y));
      const double dy = 0.5 * (in(x, std::min(y + 1, h - 1)) - in(x, std::max(y - 1, 0)));
      out(x, y) = std::sqrt(dx * dx + dy * dy);
    }
  return out;
}

Plane laplacian(const Plane& in) {
  const int w = in.width(), h = in.height();
  Plane out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      out(x, y) = in(std::min(x + 1, w - 1), y) + in(std::max(x - 1, 0), y) +
                  in(x, std::min(y + 1, h - 1)) + in(x, std::max(y - 1, 0)) -
                  4.0 * in(x, y);
    }
  return out;
}

Plane local_std(const Plane& in, int window) {
  if (window < 3 || window % 2 == 0) throw InputError("local_std window must be odd and >= 3");
  const int r = window / 2;
  const int w = in.width(), h = in.height();
  const double n = static_cast<double>(window) * window;
  Plane out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double mean = 0.0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
          mean += in(border_index(x + dx, w, Border::kReplicate),
                     border_index(y + dy, h, Border::kReplicate));
      mean /= n;
      double var = 0.0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const double d = in(border_index(x + dx, w, Border::kReplicate),
                              border_index(y + dy, h, Border::kReplicate)) - mean;
          var += d * d;
        }
      out(x, y) = std::sqrt(var / n);
    }
  return out;
}

Plane masked_box_mean(const Plane& in, int window) {
  if (window < 1 || window % 2 == 0) throw InputError("box window must be odd");
  const int r = window / 2;
  const int w = in.width(), h = in.height();
  Plane out(w, h, kExcluded);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (is_excluded(in(x, y))) continue;
      double s = 0.0;
      int n = 0;
      for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy)
        for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx) {
          const double v = in(xx, yy);
          if (is_excluded(v)) continue;
          s += v;
          ++n;
        }
      out(x, y) = s / n;
    }
  return out;
}

void conv3x3_forward(const Tensor3& in, std::span<const double> weight,
                     std::span<const double> bias, int out_channels, Tensor3& out) {
  const int ci = in.channels, h = in.height, w = in.width;
  if (weight.size() != static_cast<std::size_t>(out_channels) * ci * 9 ||
      bias.size() != static_cast<std::size_t>(out_channels))
    throw StructuralError("conv3x3 parameter size mismatch");
  out = Tensor3(out_channels, h, w);
  for (int o = 0; o < out_channels; ++o)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double s = bias[o];
        for (int i = 0; i < ci; ++i)
          for (int ky = 0; ky < 3; ++ky) {
            const int sy = border_index(y + ky - 1, h, Border::kReflect);
            for (int kx = 0; kx < 3; ++kx) {
              const int sx = border_index(x + kx - 1, w, Border::kReflect);
              s += weight[((o * ci + i) * 3 + ky) * 3 + kx] *
                   in.plane(i)[static_cast<std::size_t>(sy) * w + sx];
            }
          }
        out.plane(o)[static_cast<std::size_t>(y) * w + x] = s;
      }
}

void conv3x3_backward(const Tensor3& in, std::span<const double> weight,
                      int out_channels, const Tensor3& grad_out, Tensor3* grad_in,
                      std::span<double> grad_weight, std::span<double> grad_bias) {
  const int ci = in.channels, h = in.height, w = in.width;
  if (grad_out.channels != out_channels || grad_out.height != h || grad_out.width != w ||
      weight.size() != static_cast<std::size_t>(out_channels) * ci * 9 ||
      grad_weight.size() != weight.size() ||
      grad_bias.size() != static_cast<std::size_t>(out_channels))
    throw StructuralError("conv3x3 backward shape mismatch");
  std::fill(grad_weight.begin(), grad_weight.end(), 0.0);
  std::fill(grad_bias.begin(), grad_bias.end(), 0.0);
  if (grad_in) *grad_in = Tensor3(ci, h, w);
  for (int o = 0; o < out_channels; ++o)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double g = grad_out.plane(o)[static_cast<std::size_t>(y) * w + x];
        grad_bias[o] += g;
        for (int i = 0; i < ci; ++i)
          for (int ky = 0; ky < 3; ++ky) {
            const int sy = border_index(y + ky - 1, h, Border::kReflect);
            for (int kx = 0; kx < 3; ++kx) {
              const int sx = border_index(x + kx - 1, w, Border::kReflect);
              const std::size_t src = static_cast<std::size_t>(sy) * w + sx;
              const std::size_t widx = ((o * ci + i) * 3 + ky) * 3 + kx;
              grad_weight[widx] += g * in.plane(i)[src];
              if (grad_in) grad_in->plane(i)[src] += g * weight[widx];
            }
          }
      }
}

}  // namespace serial
}  // namespace grayanchor::kernels
