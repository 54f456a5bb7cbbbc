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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grayanchor/baselines.hpp"
#include "grayanchor/gpnet.hpp"
#include "grayanchor/grayclassic.hpp"
#include "grayanchor/image.hpp"
#include "grayanchor/imageio.hpp"

namespace grayanchor {

// ---- metrics -------------------------------------------------------------

/// Angle in degrees between two illuminant directions.
double recovery_error(const Illuminant& a, const Illuminant& b);
double recovery_error(const std::array<double, 3>& a, const std::array<double, 3>& b);

/// Angle in degrees between gt/est (componentwise) and (1, 1, 1). Throws
/// MetricError when an est component is not positive.
double reproduction_error(const Illuminant& est, const Illuminant& gt);
double reproduction_error(const std::array<double, 3>& est, const std::array<double, 3>& gt);

struct ErrorStats {
  double median = 0.0;
  double mean = 0.0;
  double trimean = 0.0;
  double best25_mean = 0.0;
  double worst25_mean = 0.0;
};

/// Quantile at position q*(n-1) of the sorted values, linearly interpolated.
double quantile(std::span<const double> sorted, double q);

/// Throws StatsError on an empty list.
ErrorStats summarize(std::span<const double> errors);

struct FoldSplit {
  std::vector<std::vector<std::size_t>> folds;
  std::size_t k() const noexcept { return folds.size(); }
};

/// Seeded Fisher-Yates shuffle of 0..n-1 dealt round-robin into k folds.
/// Throws SplitError unless 1 <= k <= n.
FoldSplit kfold(std::size_t n, std::size_t k, std::uint64_t seed);
inline FoldSplit kfold(const Dataset& data, std::size_t k, std::uint64_t seed) {
  return kfold(data.size(), k, seed);
}

// ---- methods -------------------------------------------------------------

/// gray-world, white-patch, shades-of-gray, general-gray-world, gray-edge1,
/// gray-edge2, gray-pixel-edge, gray-pixel-std, grayness-index, gpnet.
const std::vector<std::string>& method_ids();
bool is_learned(const std::string& id);

struct MethodConfig {
  std::string id;
  /// Selection for the detectors and the network: absolute K if set,
  /// otherwise `frac` for the detectors and K = 5000 scaled to the image
  /// area for the network.
  std::optional<std::size_t> k;
  double frac = 0.001;
  std::size_t gpnet_k = 5000;
  DetectorConfig detector;
  double minkowski_p = 6.0;
  double minkowski_sigma = 1.0;
  double dark_frac = kDefaultDarkFrac;
  double sat_frac = kDefaultSatFrac;
  // Learned method.
  std::optional<std::filesystem::path> checkpoint;
  NetArch arch;
  TrainConfig train;
  LossConfig loss;
};

using Estimator = std::function<Illuminant(const LinearImage&, const Mask&)>;

/// Throws ConfigError for an unknown id. For the network, `params` must be
/// given.
Estimator make_estimator(const MethodConfig& cfg, const NetParams* params = nullptr);

// ---- benchmark -----------------------------------------------------------

struct ReportRow {
  std::string image;
  std::string method;
  double recovery = 0.0;      // NaN when the estimate failed
  double reproduction = 0.0;
};

struct Report {
  std::vector<ReportRow> rows;  // dataset order
  std::optional<ErrorStats> recovery;
  std::optional<ErrorStats> reproduction;
  std::size_t failures = 0;
};

/// Learned methods need `folds` (train on k-1, test on the held-out fold)
/// or a checkpoint in cfg. Images are evaluated in parallel; the report
/// does not depend on the thread count.
Report run_benchmark(const Dataset& data, const MethodConfig& cfg,
                     const std::optional<FoldSplit>& folds = std::nullopt);

/// CSV with header image,method,recovery_deg,reproduction_deg and #STATS
/// summary lines, 4 decimals.
void write_report(std::ostream& os, const Report& report);

}  // namespace grayanchor
