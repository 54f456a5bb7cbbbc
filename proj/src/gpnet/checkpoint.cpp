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

// Checkpoint layout, all little-endian:
//   "GPNET1"
//   u32 feature mode (0 constrained, 1 raw image)
//   u32 pathway width, u32 pathway depth
//   u32 hidden fusion layer count, then one u32 width each
//   f64 output smoothing sigma
//   f64 tensors in NetParams::tensors() order

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "grayanchor/error.hpp"
#include "grayanchor/gpnet.hpp"

namespace grayanchor {

namespace {

constexpr char kMagic[6] = {'G', 'P', 'N', 'E', 'T', '1'};
constexpr std::uint32_t kMaxDim = 1u << 16;

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

template <typename T>
void put(std::ofstream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& is, const std::filesystem::path& path) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
    throw CheckpointError("truncated checkpoint " + path.string());
  return to_little(v);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const NetParams& params) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  const NetArch& a = params.arch;
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, a.features == FeatureMode::kConstrained ? 0 : 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(a.pathway_width));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(a.pathway_depth));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(a.fusion_widths.size()));
  for (int w : a.fusion_widths) put<std::uint32_t>(os, static_cast<std::uint32_t>(w));
  put<double>(os, a.sigma_out);
  for (auto t : params.tensors())
    for (double v : t) put<double>(os, v);
  if (!os) throw IoError("write failed for " + path.string());
}

NetParams load_checkpoint(const std::filesystem::path& path, const NetArch* expected) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open " + path.string());
  char magic[sizeof kMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw CheckpointError(path.string() + " is not a network checkpoint");

  NetArch a;
  const auto mode = get<std::uint32_t>(is, path);
  if (mode > 1) throw CheckpointError("unknown feature mode " + std::to_string(mode));
  a.features = mode == 0 ? FeatureMode::kConstrained : FeatureMode::kRawImage;
  const auto width = get<std::uint32_t>(is, path);
  const auto depth = get<std::uint32_t>(is, path);
  const auto n_hidden = get<std::uint32_t>(is, path);
  if (width == 0 || width > kMaxDim || depth == 0 || depth > kMaxDim || n_hidden > kMaxDim)
    throw CheckpointError("implausible architecture in " + path.string());
  a.pathway_width = static_cast<int>(width);
  a.pathway_depth = static_cast<int>(depth);
  a.fusion_widths.clear();
  for (std::uint32_t i = 0; i < n_hidden; ++i) {
    const auto w = get<std::uint32_t>(is, path);
    if (w == 0 || w > kMaxDim) throw CheckpointError("implausible fusion width");
    a.fusion_widths.push_back(static_cast<int>(w));
  }
  a.sigma_out = get<double>(is, path);
  if (!(a.sigma_out > 0.0) || !std::isfinite(a.sigma_out))
    throw CheckpointError("bad output sigma");
  if (expected && !(a == *expected))
    throw CheckpointError("checkpoint architecture differs from the expected one");

  NetParams p = NetParams::zeros(a);
  for (auto t : p.tensors()) {
    for (double& v : t) {
      v = get<double>(is, path);
      if (!std::isfinite(v)) throw CheckpointError("non-finite parameter in " + path.string());
    }
  }
  if (is.peek() != std::char_traits<char>::eof())
    throw CheckpointError("trailing bytes in " + path.string());
  return p;
}

}  // namespace grayanchor
