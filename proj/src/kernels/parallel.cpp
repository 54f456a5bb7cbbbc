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

#define EIGEN_DONT_PARALLELIZE
#include <Eigen/Core>
#include <omp.h>

#include <algorithm>
#include <cmath>

#include "grayanchor/error.hpp"
#include "grayanchor/kernels.hpp"

namespace grayanchor::kernels {

namespace {

// Eigen picks its vectorized reduction order from the runtime address of
// the operands, so everything that feeds a product or a sum is copied into
// an owned (max-aligned) matrix first. Maps over std::vector storage would
// make results depend on where the heap put them.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using StridedMap = Eigen::Map<RowMat, 0, Eigen::OuterStride<>>;
using ConstStridedMap = Eigen::Map<const RowMat, 0, Eigen::OuterStride<>>;

// Copies row y of `in` into buf with r reflected samples on each side.
void padded_row(const Plane& in, int y, int r, std::vector<double>& buf) {
  const int w = in.width();
  buf.resize(static_cast<std::size_t>(w) + 2 * r);
  const double* src = in.row(y);
  for (int x = -r; x < w + r; ++x) buf[x + r] = src[border_index(x, w, Border::kReflect)];
}

// Output rows handled per conv chunk. At least two rows so that the
// even/odd scatter phases in the backward pass never overlap.
int conv_chunk_rows(int width, int height) {
  return std::clamp((2048 + width - 1) / width, 2, std::max(height, 2));
}

// im2col for output rows [y0, y1): cols is (C_in*9) x ((y1-y0)*W).
void im2col_rows(const Tensor3& in, int y0, int y1, RowMat& cols) {
  const int ci = in.channels, h = in.height, w = in.width;
  const int n = (y1 - y0) * w;
  cols.resize(static_cast<Eigen::Index>(ci) * 9, n);
  for (int i = 0; i < ci; ++i) {
    const double* src = in.plane(i);
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx) {
        double* dst = cols.row((i * 3 + ky) * 3 + kx).data();
        for (int y = y0; y < y1; ++y) {
          const double* srow = src + static_cast<std::size_t>(border_index(y + ky - 1, h, Border::kReflect)) * w;
          double* drow = dst + static_cast<std::size_t>(y - y0) * w;
          drow[0] = srow[border_index(kx - 1, w, Border::kReflect)];
          for (int x = 1; x < w - 1; ++x) drow[x] = srow[x + kx - 1];
          if (w > 1) drow[w - 1] = srow[border_index(w - 1 + kx - 1, w, Border::kReflect)];
        }
      }
  }
}

// Adjoint of im2col_rows: accumulates cols back into grad planes.
void col2im_rows(const RowMat& cols, int y0, int y1, Tensor3& grad) {
  const int ci = grad.channels, h = grad.height, w = grad.width;
  for (int i = 0; i < ci; ++i) {
    double* dst = grad.plane(i);
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx) {
        const double* src = cols.row((i * 3 + ky) * 3 + kx).data();
        for (int y = y0; y < y1; ++y) {
          double* drow = dst + static_cast<std::size_t>(border_index(y + ky - 1, h, Border::kReflect)) * w;
          const double* srow = src + static_cast<std::size_t>(y - y0) * w;
          drow[border_index(kx - 1, w, Border::kReflect)] += srow[0];
          for (int x = 1; x < w - 1; ++x) drow[x + kx - 1] += srow[x];
          if (w > 1) drow[border_index(w - 1 + kx - 1, w, Border::kReflect)] += srow[w - 1];
        }
      }
  }
}

}  // namespace

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int threads() { return omp_get_max_threads(); }

Plane gaussian_filter(const Plane& in, double sigma) {
  const auto taps = gaussian_taps(sigma);
  const int r = static_cast<int>(taps.size() / 2);
  const int w = in.width(), h = in.height();
  Plane tmp(w, h), out(w, h);
#pragma omp parallel
  {
    std::vector<double> buf;
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      padded_row(in, y, r, buf);
      double* dst = tmp.row(y);
      for (int x = 0; x < w; ++x) {
        double s = 0.0;
        for (int k = 0; k <= 2 * r; ++k) s += taps[k] * buf[x + k];
        dst[x] = s;
      }
    }
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      double* dst = out.row(y);
      std::fill(dst, dst + w, 0.0);
      for (int k = -r; k <= r; ++k) {
        const double t = taps[k + r];
        const double* src = tmp.row(border_index(y + k, h, Border::kReflect));
        for (int x = 0; x < w; ++x) dst[x] += t * src[x];
      }
    }
  }
  return out;
}

Plane center_surround(const Plane& in, double sigma) {
  const auto taps = gaussian_taps(sigma);
  const int r = static_cast<int>(taps.size() / 2);
  const int w = in.width(), h = in.height();
  Plane hdiff(w, h), out(w, h);
#pragma omp parallel
  {
    std::vector<double> buf;
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      padded_row(in, y, r, buf);
      double* dst = hdiff.row(y);
      for (int x = 0; x < w; ++x) {
        const double c = buf[x + r];
        double s = 0.0;
        for (int k = 0; k <= 2 * r; ++k) s += taps[k] * (c - buf[x + k]);
        dst[x] = s;
      }
    }
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      double* dst = out.row(y);
      const double* center = in.row(y);
      std::vector<double> v(w, 0.0), blur(w, 0.0);
      for (int k = -r; k <= r; ++k) {
        const double t = taps[k + r];
        const int yy = border_index(y + k, h, Border::kReflect);
        const double* src = in.row(yy);
        const double* hd = hdiff.row(yy);
        for (int x = 0; x < w; ++x) {
          v[x] += t * (center[x] - src[x]);
          blur[x] += t * hd[x];
        }
      }
      for (int x = 0; x < w; ++x) dst[x] = v[x] + blur[x];
    }
  }
  return out;
}

Plane gradient_magnitude(const Plane& in) {
  const int w = in.width(), h = in.height();
  Plane out(w, h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const double* up = in.row(std::max(y - 1, 0));
    const double* mid = in.row(y);
    const double* down = in.row(std::min(y + 1, h - 1));
    double* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      const double dx = 0.5 * (mid[std::min(x + 1, w - 1)] - mid[std::max(x - 1, 0)]);
      const double dy = 0.5 * (down[x] - up[x]);
      dst[x] = std::sqrt(dx * dx + dy * dy);
    }
  }
  return out;
}

Plane laplacian(const Plane& in) {
  const int w = in.width(), h = in.height();
  Plane out(w, h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const double* up = in.row(std::max(y - 1, 0));
    const double* mid = in.row(y);
    const double* down = in.row(std::min(y + 1, h - 1));
    double* dst = out.row(y);
    for (int x = 0; x < w; ++x)
      dst[x] = mid[std::min(x + 1, w - 1)] + mid[std::max(x - 1, 0)] + up[x] + down[x] -
               4.0 * mid[x];
  }
  return out;
}

Plane local_std(const Plane& in, int window) {
  if (window < 3 || window % 2 == 0) throw InputError("local_std window must be odd and >= 3");
  const int r = window / 2;
  const int w = in.width(), h = in.height();
  const double n = static_cast<double>(window) * window;
  Plane out(w, h);
#pragma omp parallel
  {
    std::vector<const double*> rows(window);
    std::vector<int> cols(static_cast<std::size_t>(w) * window);
    for (int x = 0; x < w; ++x)
      for (int d = -r; d <= r; ++d)
        cols[static_cast<std::size_t>(x) * window + d + r] = border_index(x + d, w, Border::kReplicate);
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int d = -r; d <= r; ++d) rows[d + r] = in.row(border_index(y + d, h, Border::kReplicate));
      double* dst = out.row(y);
      for (int x = 0; x < w; ++x) {
        const int* cx = &cols[static_cast<std::size_t>(x) * window];
        double mean = 0.0;
        for (int a = 0; a < window; ++a)
          for (int b = 0; b < window; ++b) mean += rows[a][cx[b]];
        mean /= n;
        double var = 0.0;
        for (int a = 0; a < window; ++a)
          for (int b = 0; b < window; ++b) {
            const double d = rows[a][cx[b]] - mean;
            var += d * d;
          }
        dst[x] = std::sqrt(var / n);
      }
    }
  }
  return out;
}

Plane masked_box_mean(const Plane& in, int window) {
  if (window < 1 || window % 2 == 0) throw InputError("box window must be odd");
  const int r = window / 2;
  const int w = in.width(), h = in.height();
  Plane out(w, h, kExcluded);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - r), y1 = std::min(h - 1, y + r);
    for (int x = 0; x < w; ++x) {
      if (is_excluded(in(x, y))) continue;
      const int x0 = std::max(0, x - r), x1 = std::min(w - 1, x + r);
      double s = 0.0;
      int cnt = 0;
      for (int yy = y0; yy <= y1; ++yy) {
        const double* src = in.row(yy);
        for (int xx = x0; xx <= x1; ++xx) {
          if (is_excluded(src[xx])) continue;
          s += src[xx];
          ++cnt;
        }
      }
      out(x, y) = s / cnt;
    }
  }
  return out;
}

void conv3x3_forward(const Tensor3& in, std::span<const double> weight,
                     std::span<const double> bias, int out_channels, Tensor3& out) {
  const int ci = in.channels, h = in.height, w = in.width;
  if (weight.size() != static_cast<std::size_t>(out_channels) * ci * 9 ||
      bias.size() != static_cast<std::size_t>(out_channels))
    throw StructuralError("conv3x3 parameter size mismatch");
  if (!(out.channels == out_channels && out.height == h && out.width == w))
    out = Tensor3(out_channels, h, w);
  const RowMat wmat = Eigen::Map<const RowMat>(weight.data(), out_channels, static_cast<Eigen::Index>(ci) * 9);
  const int rows = conv_chunk_rows(w, h);
  const int nchunks = (h + rows - 1) / rows;
  const Eigen::Index hw = static_cast<Eigen::Index>(h) * w;
#pragma omp parallel
  {
    RowMat cols;
#pragma omp for schedule(static)
    for (int c = 0; c < nchunks; ++c) {
      const int y0 = c * rows, y1 = std::min(h, y0 + rows);
      im2col_rows(in, y0, y1, cols);
      StridedMap dst(out.data.data() + static_cast<std::size_t>(y0) * w, out_channels,
                     cols.cols(), Eigen::OuterStride<>(hw));
      dst.noalias() = wmat * cols;
      for (int o = 0; o < out_channels; ++o) dst.row(o).array() += bias[o];
    }
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
  const Eigen::Index k = static_cast<Eigen::Index>(ci) * 9;
  const RowMat wmat = Eigen::Map<const RowMat>(weight.data(), out_channels, k);
  const int rows = conv_chunk_rows(w, h);
  const int nchunks = (h + rows - 1) / rows;
  const Eigen::Index hw = static_cast<Eigen::Index>(h) * w;
  if (grad_in) {
    if (!(grad_in->channels == ci && grad_in->height == h && grad_in->width == w))
      *grad_in = Tensor3(ci, h, w);
    else
      std::fill(grad_in->data.begin(), grad_in->data.end(), 0.0);
  }

  std::vector<RowMat> wpart(nchunks);
  std::vector<Eigen::VectorXd> bpart(nchunks);
  // Even chunks first, then odd: scatter targets of same-parity chunks are
  // disjoint, and each pixel receives its contributions in a fixed order.
  for (int phase = 0; phase < 2; ++phase) {
#pragma omp parallel
    {
      RowMat cols, gcols, dy;
#pragma omp for schedule(static)
      for (int c = phase; c < nchunks; c += 2) {
        const int y0 = c * rows, y1 = std::min(h, y0 + rows);
        im2col_rows(in, y0, y1, cols);
        dy = ConstStridedMap(grad_out.data.data() + static_cast<std::size_t>(y0) * w, out_channels, cols.cols(),
                             Eigen::OuterStride<>(hw));
        wpart[c].noalias() = dy * cols.transpose();
        bpart[c] = dy.rowwise().sum();
        if (grad_in) {
          gcols.noalias() = wmat.transpose() * dy;
          col2im_rows(gcols, y0, y1, *grad_in);
        }
      }
    }
  }
  Eigen::Map<RowMat> gw(grad_weight.data(), out_channels, k);
  Eigen::Map<Eigen::VectorXd> gb(grad_bias.data(), out_channels);
  gw.setZero();
  gb.setZero();
  for (int c = 0; c < nchunks; ++c) {
    gw += wpart[c];
    gb += bpart[c];
  }
}

}  // namespace grayanchor::kernels
