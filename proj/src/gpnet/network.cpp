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

#include <algorithm>
#include <cmath>
#include <random>

#include "grayanchor/error.hpp"
#include "grayanchor/gpnet.hpp"
#include "grayanchor/opponent.hpp"

namespace grayanchor {

namespace {

Tensor3 stack(std::initializer_list<const Plane*> planes) {
  const Plane& first = **planes.begin();
  Tensor3 t(static_cast<int>(planes.size()), first.height(), first.width());
  int c = 0;
  for (const Plane* p : planes) std::copy(p->values().begin(), p->values().end(), t.plane(c++));
  return t;
}

Plane to_plane(const Tensor3& t, int c) {
  Plane p(t.width, t.height);
  std::copy(t.plane(c), t.plane(c) + t.plane_size(), p.values().begin());
  return p;
}

void check_arch(const NetArch& a) {
  if (a.pathway_width < 1 || a.pathway_depth < 1)
    throw StructuralError("pathway width and depth must be >= 1");
  for (int w : a.fusion_widths)
    if (w < 1) throw StructuralError("fusion widths must be >= 1");
  if (!(a.sigma_out > 0.0)) throw StructuralError("output smoothing sigma must be > 0");
}

ConvLayer make_layer(int in, int out) {
  return {in, out, std::vector<double>(static_cast<std::size_t>(out) * in * 9, 0.0),
          std::vector<double>(out, 0.0)};
}

}  // namespace

// ---- features ------------------------------------------------------------

FeatureStack build_features(const LinearImage& img) {
  const LogImage logs = log_transform(img);
  FeatureStack f;
  f.f1 = Plane(img.width(), img.height());
  const double inv_white = 1.0 / img.white_level();
  for (std::size_t i = 0; i < f.f1.size(); ++i)
    f.f1[i] = (img.channel(0)[i] + img.channel(1)[i] + img.channel(2)[i]) * inv_white;
  f.f2[0] = Plane(img.width(), img.height());
  f.f2[1] = Plane(img.width(), img.height());
  for (std::size_t i = 0; i < f.f1.size(); ++i) {
    f.f2[0][i] = logs[LogImage::kR][i] - logs[LogImage::kG][i];
    f.f2[1][i] = logs[LogImage::kB][i] - logs[LogImage::kY][i];
  }
  for (int i = 0; i < 4; ++i) f.f3[i] = kernels::center_surround(logs[i], kFeatureSigma);
  return f;
}

std::array<Tensor3, 3> pathway_inputs(const FeatureStack& f) {
  return {stack({&f.f1}), stack({&f.f2[0], &f.f2[1]}),
          stack({&f.f3[0], &f.f3[1], &f.f3[2], &f.f3[3]})};
}

std::array<Tensor3, 3> pathway_inputs(const LinearImage& img, FeatureMode mode) {
  if (mode == FeatureMode::kConstrained) return pathway_inputs(build_features(img));
  Tensor3 rgb(3, img.height(), img.width());
  const double inv_white = 1.0 / img.white_level();
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < rgb.plane_size(); ++i) rgb.plane(c)[i] = img.channel(c)[i] * inv_white;
  return {rgb, rgb, rgb};
}

// ---- parameters ----------------------------------------------------------

std::array<int, 3> NetArch::input_channels() const {
  if (features == FeatureMode::kConstrained) return {1, 2, 4};
  return {3, 3, 3};
}

NetParams NetParams::zeros(const NetArch& arch) {
  check_arch(arch);
  NetParams p;
  p.arch = arch;
  const auto in_ch = arch.input_channels();
  for (int k = 0; k < 3; ++k) {
    int in = in_ch[k];
    for (int l = 0; l < arch.pathway_depth; ++l) {
      p.pathways[k].push_back(make_layer(in, arch.pathway_width));
      p.prelu[k].emplace_back(arch.pathway_width, 0.0);
      in = arch.pathway_width;
    }
  }
  int in = 3 * arch.pathway_width;
  for (int w : arch.fusion_widths) {
    p.fusion.push_back(make_layer(in, w));
    in = w;
  }
  p.fusion.push_back(make_layer(in, 1));
  return p;
}

NetParams NetParams::init(const NetArch& arch, std::uint64_t seed, double output_bias) {
  NetParams p = zeros(arch);
  std::mt19937_64 rng(seed);
  auto fill = [&rng](ConvLayer& layer) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / (9.0 * layer.in)));
    for (double& w : layer.weight) w = dist(rng);
  };
  for (int k = 0; k < 3; ++k) {
    for (auto& layer : p.pathways[k]) fill(layer);
    for (auto& slopes : p.prelu[k]) std::fill(slopes.begin(), slopes.end(), 0.25);
  }
  for (auto& layer : p.fusion) fill(layer);
  p.fusion.back().bias[0] = output_bias;
  return p;
}

std::vector<std::span<double>> NetParams::tensors() {
  std::vector<std::span<double>> out;
  for (int k = 0; k < 3; ++k) {
    for (std::size_t l = 0; l < pathways[k].size(); ++l) {
      out.emplace_back(pathways[k][l].weight);
      out.emplace_back(pathways[k][l].bias);
      out.emplace_back(prelu[k][l]);
    }
  }
  for (auto& layer : fusion) {
    out.emplace_back(layer.weight);
    out.emplace_back(layer.bias);
  }
  return out;
}

std::vector<std::span<const double>> NetParams::tensors() const {
  auto mut = const_cast<NetParams*>(this)->tensors();
  return {mut.begin(), mut.end()};
}

std::size_t NetParams::parameter_count() const {
  std::size_t n = 0;
  for (auto t : tensors()) n += t.size();
  return n;
}

// ---- forward -------------------------------------------------------------

GraynessMap net_forward(const NetParams& params, const FeatureStack& feats, ForwardCache* cache) {
  return net_forward(params, pathway_inputs(feats), cache);
}

GraynessMap net_forward(const NetParams& params, const std::array<Tensor3, 3>& inputs,
                        ForwardCache* cache) {
  const NetArch& arch = params.arch;
  const auto in_ch = arch.input_channels();
  const int h = inputs[0].height, w = inputs[0].width;
  if (h < 1 || w < 1) throw StructuralError("empty network input");
  for (int k = 0; k < 3; ++k) {
    if (inputs[k].channels != in_ch[k] || inputs[k].height != h || inputs[k].width != w)
      throw StructuralError("pathway " + std::to_string(k) + " input has shape " +
                            std::to_string(inputs[k].channels) + "x" +
                            std::to_string(inputs[k].height) + "x" +
                            std::to_string(inputs[k].width));
  }

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c = ForwardCache{};
  c.inputs = inputs;
  const int width = arch.pathway_width;
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  c.fused_in = Tensor3(3 * width, h, w);

  for (int k = 0; k < 3; ++k) {
    const auto& layers = params.pathways[k];
    c.pre[k].resize(layers.size());
    c.post[k].resize(layers.size());
    const Tensor3* x = &c.inputs[k];
    for (std::size_t l = 0; l < layers.size(); ++l) {
      kernels::conv3x3_forward(*x, layers[l].weight, layers[l].bias, layers[l].out, c.pre[k][l]);
      Tensor3& a = c.post[k][l];
      a = c.pre[k][l];
      const auto& slope = params.prelu[k][l];
      for (int ch = 0; ch < a.channels; ++ch) {
        double* p = a.plane(ch);
        for (std::size_t i = 0; i < hw; ++i)
          if (!(p[i] > 0.0)) p[i] *= slope[ch];
      }
      x = &a;
    }
    // Per-plane standardization.
    c.plane_scale[k].assign(width, 0.0);
    for (int ch = 0; ch < width; ++ch) {
      const double* src = x->plane(ch);
      double mean = 0.0;
      for (std::size_t i = 0; i < hw; ++i) mean += src[i];
      mean /= static_cast<double>(hw);
      double var = 0.0;
      for (std::size_t i = 0; i < hw; ++i) var += (src[i] - mean) * (src[i] - mean);
      var /= static_cast<double>(hw);
      const double s = 1.0 / std::sqrt(var + kStandardizeEps);
      c.plane_scale[k][ch] = s;
      double* dst = c.fused_in.plane(k * width + ch);
      for (std::size_t i = 0; i < hw; ++i) dst[i] = (src[i] - mean) * s;
    }
  }

  const std::size_t n_fusion = params.fusion.size();
  c.fusion_pre.resize(n_fusion);
  c.fusion_post.resize(n_fusion - 1);
  const Tensor3* x = &c.fused_in;
  for (std::size_t l = 0; l < n_fusion; ++l) {
    const ConvLayer& layer = params.fusion[l];
    kernels::conv3x3_forward(*x, layer.weight, layer.bias, layer.out, c.fusion_pre[l]);
    if (l + 1 == n_fusion) break;
    Tensor3& a = c.fusion_post[l];
    a = c.fusion_pre[l];
    for (double& v : a.data) v = std::max(v, 0.0);
    x = &a;
  }

  c.smoothed = kernels::gaussian_filter(to_plane(c.fusion_pre.back(), 0), arch.sigma_out);
  GraynessMap out = c.smoothed;
  for (double& v : out.values()) v = std::max(v, 0.0);
  c.valid = true;
  return out;
}

// ---- backward ------------------------------------------------------------

ParamGrads net_backward(const NetParams& params, const ForwardCache& c, const Plane& upstream) {
  if (!c.valid) throw UsageError("net_backward needs a cache filled by net_forward");
  const int h = c.smoothed.height(), w = c.smoothed.width();
  if (upstream.width() != w || upstream.height() != h)
    throw StructuralError("upstream gradient does not match the output size");
  const std::size_t hw = static_cast<std::size_t>(h) * w;

  ParamGrads g = NetParams::zeros(params.arch);

  Plane through_clamp(w, h);
  for (std::size_t i = 0; i < hw; ++i) through_clamp[i] = c.smoothed[i] > 0.0 ? upstream[i] : 0.0;
  const Plane g_logits = kernels::gaussian_filter(through_clamp, params.arch.sigma_out);

  Tensor3 grad(1, h, w);
  std::copy(g_logits.values().begin(), g_logits.values().end(), grad.plane(0));
  Tensor3 grad_in;
  for (std::size_t l = params.fusion.size(); l-- > 0;) {
    if (l + 1 < params.fusion.size()) {
      const Tensor3& z = c.fusion_pre[l];
      for (std::size_t i = 0; i < grad.data.size(); ++i)
        if (!(z.data[i] > 0.0)) grad.data[i] = 0.0;
    }
    const Tensor3& input = l == 0 ? c.fused_in : c.fusion_post[l - 1];
    const ConvLayer& layer = params.fusion[l];
    kernels::conv3x3_backward(input, layer.weight, layer.out, grad, &grad_in, g.fusion[l].weight,
                              g.fusion[l].bias);
    std::swap(grad, grad_in);
  }

  const int width = params.arch.pathway_width;
  for (int k = 0; k < 3; ++k) {
    // Standardization backward: dx = s (dn - mean(dn) - n mean(dn n)).
    Tensor3 ga(width, h, w);
    for (int ch = 0; ch < width; ++ch) {
      const double* dn = grad.plane(k * width + ch);
      const double* n = c.fused_in.plane(k * width + ch);
      double m1 = 0.0, m2 = 0.0;
      for (std::size_t i = 0; i < hw; ++i) {
        m1 += dn[i];
        m2 += dn[i] * n[i];
      }
      m1 /= static_cast<double>(hw);
      m2 /= static_cast<double>(hw);
      const double s = c.plane_scale[k][ch];
      double* dx = ga.plane(ch);
      for (std::size_t i = 0; i < hw; ++i) dx[i] = s * (dn[i] - m1 - n[i] * m2);
    }

    const auto& layers = params.pathways[k];
    Tensor3 gx;
    for (std::size_t l = layers.size(); l-- > 0;) {
      const Tensor3& z = c.pre[k][l];
      const auto& slope = params.prelu[k][l];
      auto& g_slope = g.prelu[k][l];
      for (int ch = 0; ch < z.channels; ++ch) {
        const double* zp = z.plane(ch);
        double* gp = ga.plane(ch);
        double acc = 0.0;
        for (std::size_t i = 0; i < hw; ++i) {
          if (!(zp[i] > 0.0)) {
            acc += gp[i] * zp[i];
            gp[i] *= slope[ch];
          }
        }
        g_slope[ch] = acc;
      }
      const Tensor3& input = l == 0 ? c.inputs[k] : c.post[k][l - 1];
      kernels::conv3x3_backward(input, layers[l].weight, layers[l].out, ga, l == 0 ? nullptr : &gx,
                                g.pathways[k][l].weight, g.pathways[k][l].bias);
      if (l > 0) std::swap(ga, gx);
    }
  }
  return g;
}

// ---- estimation ----------------------------------------------------------

GraynessMap gpnet_map(const LinearImage& img, const NetParams& params, const Mask& mask) {
  if (mask.width() != img.width() || mask.height() != img.height())
    throw InputError("mask dimensions do not match the image");
  GraynessMap map = net_forward(params, pathway_inputs(img, params.arch.features));
  for (std::size_t i = 0; i < map.size(); ++i)
    if (!mask[i]) map[i] = kExcluded;
  return map;
}

Illuminant gpnet_estimate(const LinearImage& img, const NetParams& params, std::size_t k,
                          const Mask& mask) {
  const GraynessMap map = gpnet_map(img, params, mask);
  return estimate_illuminant(img, select_gray(map, SelectAmount::top_k(k)));
}

std::size_t scaled_k(std::size_t k, std::size_t pixel_count, double reference_area) {
  const double v = std::ceil(static_cast<double>(k) * static_cast<double>(pixel_count) / reference_area);
  return std::max<std::size_t>(1, static_cast<std::size_t>(v));
}

}  // namespace grayanchor
