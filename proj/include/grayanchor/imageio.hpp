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

#include <filesystem>
#include <string>
#include <vector>

#include "grayanchor/image.hpp"

namespace grayanchor {

inline constexpr int kMinImageSide = 16;
inline constexpr double kDefaultDarkFrac = 0.02;
inline constexpr double kDefaultSatFrac = 0.98;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};
using Polygon = std::vector<Point2>;

struct DatasetEntry {
  std::string image_path;  // as written in the manifest
  Illuminant gt;
  std::vector<Polygon> exclusion_polygons;
};

struct Dataset {
  std::string name;
  std::filesystem::path root;  // directory relative image paths resolve against
  std::vector<DatasetEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
  std::filesystem::path resolve(std::size_t i) const;
};

/// Decodes an 8/16-bit PNG or uncompressed 8/16-bit TIFF and subtracts the
/// black level: s -> max(s - black_level, 0), white level
/// (2^bits - 1) - black_level. Throws DecodeError / DimensionError.
LinearImage load_image(const std::filesystem::path& path, double black_level = 0.0);

/// Writes samples rounded to the nearest integer, clamped to the bit range.
void save_png(const std::filesystem::path& path, const LinearImage& img, int bit_depth = 16);
void save_tiff(const std::filesystem::path& path, const LinearImage& img, int bit_depth = 16);
/// Single-channel 16-bit PNG.
void save_gray_png16(const std::filesystem::path& path, const Plane& values);

/// Even-odd point-in-polygon test; pixel centres sit at integer coordinates.
bool polygon_contains(const Polygon& poly, double x, double y);

/// valid iff dark_frac*wl < max channel < sat_frac*wl and the pixel centre is
/// outside every polygon. Throws InputError on bad thresholds or polygons
/// with fewer than three vertices.
Mask valid_mask(const LinearImage& img, const std::vector<Polygon>& polygons,
                double dark_frac = kDefaultDarkFrac, double sat_frac = kDefaultSatFrac);

/// Reads the `image,er,eg,eb,polygons` CSV. Image files are not touched.
Dataset load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const Dataset& data);

/// Polygon column codec: polygons split by '|', vertices by ';', "x:y".
std::vector<Polygon> parse_polygons(const std::string& field);
std::string format_polygons(const std::vector<Polygon>& polygons);

}  // namespace grayanchor
