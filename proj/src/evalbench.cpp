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

#include "grayanchor/evalbench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>

#include "grayanchor/error.hpp"

namespace grayanchor {

namespace {

double angle_deg(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double cx = a[1] * b[2] - a[2] * b[1];
  const double cy = a[2] * b[0] - a[0] * b[2];
  const double cz = a[0] * b[1] - a[1] * b[0];
  const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot) * 180.0 / std::numbers::pi;
}

void require_positive(const std::array<double, 3>& v, const char* what) {
  for (double x : v)
    if (!(x > 0.0) || !std::isfinite(x))
      throw MetricError(std::string(what) + " components must be finite and positive");
}

}  // namespace

double recovery_error(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  require_positive(a, "illuminant");
  require_positive(b, "illuminant");
  return angle_deg(a, b);
}

double recovery_error(const Illuminant& a, const Illuminant& b) { return angle_deg(a.rgb(), b.rgb()); }

double reproduction_error(const std::array<double, 3>& est, const std::array<double, 3>& gt) {
  require_positive(est, "estimate");
  require_positive(gt, "ground truth");
  return angle_deg({gt[0] / est[0], gt[1] / est[1], gt[2] / est[2]}, {1.0, 1.0, 1.0});
}

double reproduction_error(const Illuminant& est, const Illuminant& gt) {
  return reproduction_error(est.rgb(), gt.rgb());
}

double quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw StatsError("quantile of an empty list");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return sorted[lo] + t * (sorted[hi] - sorted[lo]);
}

ErrorStats summarize(std::span<const double> errors) {
  if (errors.empty()) throw StatsError("no errors to summarize");
  std::vector<double> s(errors.begin(), errors.end());
  for (double v : s)
    if (std::isnan(v)) throw StatsError("NaN in error list");
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  const std::size_t quarter = (n + 3) / 4;

  ErrorStats st;
  st.median = quantile(s, 0.5);
  st.mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(n);
  st.trimean = (quantile(s, 0.25) + 2.0 * st.median + quantile(s, 0.75)) / 4.0;
  st.best25_mean = std::accumulate(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(quarter), 0.0) /
                   static_cast<double>(quarter);
  st.worst25_mean = std::accumulate(s.end() - static_cast<std::ptrdiff_t>(quarter), s.end(), 0.0) /
                    static_cast<double>(quarter);
  return st;
}

FoldSplit kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 1 || k > n)
    throw SplitError("cannot split " + std::to_string(n) + " entries into " + std::to_string(k) + " folds");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // Explicit Fisher-Yates: std::shuffle's draw sequence is not specified.
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i-- > 1;) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(idx[i], idx[j]);
  }
  FoldSplit split;
  split.folds.resize(k);
  for (std::size_t i = 0; i < n; ++i) split.folds[i % k].push_back(idx[i]);
  return split;
}

const std::vector<std::string>& method_ids() {
  static const std::vector<std::string> ids = {
      "gray-world",      "white-patch",     "shades-of-gray", "general-gray-world",
      "gray-edge1",      "gray-edge2",      "gray-pixel-edge", "gray-pixel-std",
      "grayness-index",  "gpnet"};
  return ids;
}

bool is_learned(const std::string& id) { return id == "gpnet"; }

Estimator make_estimator(const MethodConfig& cfg, const NetParams* params) {
  const std::string& id = cfg.id;
  auto minkowski = [](MinkowskiSpec spec) -> Estimator {
    return [spec](const LinearImage& img, const Mask& mask) { return minkowski_estimate(img, spec, mask); };
  };
  if (id == "gray-world") return minkowski(MinkowskiSpec::gray_world());
  if (id == "white-patch") return minkowski(MinkowskiSpec::white_patch());
  if (id == "shades-of-gray") return minkowski(MinkowskiSpec::shades_of_gray());
  if (id == "general-gray-world")
    return minkowski(MinkowskiSpec::general_gray_world(cfg.minkowski_p, cfg.minkowski_sigma));
  if (id == "gray-edge1") return minkowski(MinkowskiSpec::gray_edge1());
  if (id == "gray-edge2") return minkowski(MinkowskiSpec::gray_edge2());

  const SelectAmount amount = cfg.k ? SelectAmount::top_k(*cfg.k) : SelectAmount::top_frac(cfg.frac);
  const DetectorConfig det = cfg.detector;
  if (id == "gray-pixel-edge" || id == "gray-pixel-std") {
    const GpVariant v = id == "gray-pixel-edge" ? GpVariant::kEdge : GpVariant::kStd;
    return [v, amount, det](const LinearImage& img, const Mask& mask) {
      return estimate_illuminant(img, select_gray(grayness_gp(img, v, mask, det), amount));
    };
  }
  if (id == "grayness-index") {
    return [amount, det](const LinearImage& img, const Mask& mask) {
      return estimate_illuminant(img, select_gray(grayness_gi(img, mask, det), amount));
    };
  }
  if (id == "gpnet") {
    if (!params) throw ConfigError("gpnet needs trained parameters");
    const NetParams p = *params;
    const std::optional<std::size_t> k = cfg.k;
    const std::size_t base_k = cfg.gpnet_k;
    return [p, k, base_k](const LinearImage& img, const Mask& mask) {
      return gpnet_estimate(img, p, k ? *k : scaled_k(base_k, img.pixel_count()), mask);
    };
  }
  throw ConfigError("unknown method '" + id + "'");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Outcome {
  double recovery = kNaN;
  double reproduction = kNaN;
};

Outcome evaluate(const Dataset& data, std::size_t i, const Estimator& est, const MethodConfig& cfg) {
  try {
    const LinearImage img = load_image(data.resolve(i));
    const Mask mask = valid_mask(img, data.entries[i].exclusion_polygons, cfg.dark_frac, cfg.sat_frac);
    const Illuminant e = est(img, mask);
    return {recovery_error(e, data.entries[i].gt), reproduction_error(e, data.entries[i].gt)};
  } catch (const Error&) {
    return {};
  }
}

void evaluate_all(const Dataset& data, const std::vector<std::size_t>& indices, const Estimator& est,
                  const MethodConfig& cfg, std::vector<Outcome>& out) {
  const long n = static_cast<long>(indices.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long j = 0; j < n; ++j) out[indices[j]] = evaluate(data, indices[j], est, cfg);
}

}  // namespace

Report run_benchmark(const Dataset& data, const MethodConfig& cfg, const std::optional<FoldSplit>& folds) {
  const auto& ids = method_ids();
  if (std::find(ids.begin(), ids.end(), cfg.id) == ids.end())
    throw ConfigError("unknown method '" + cfg.id + "'");

  std::vector<Outcome> outcomes(data.size());
  if (is_learned(cfg.id)) {
    if (folds) {
      std::vector<TrainSample> all;
      all.reserve(data.size());
      for (std::size_t i = 0; i < data.size(); ++i)
        all.push_back({load_image(data.resolve(i)), data.entries[i].gt});
      for (std::size_t f = 0; f < folds->k(); ++f) {
        std::vector<TrainSample> train_set;
        for (std::size_t g = 0; g < folds->k(); ++g)
          if (g != f)
            for (std::size_t i : folds->folds[g]) train_set.push_back(all[i]);
        if (train_set.empty()) throw SplitError("a training split is empty");
        const TrainResult tr = train(train_set, cfg.arch, cfg.train, cfg.loss);
        evaluate_all(data, folds->folds[f], make_estimator(cfg, &tr.params), cfg, outcomes);
      }
    } else if (cfg.checkpoint) {
      const NetParams p = load_checkpoint(*cfg.checkpoint);
      std::vector<std::size_t> all(data.size());
      std::iota(all.begin(), all.end(), 0);
      evaluate_all(data, all, make_estimator(cfg, &p), cfg, outcomes);
    } else {
      throw ConfigError("gpnet benchmark needs folds or a checkpoint");
    }
  } else {
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), 0);
    evaluate_all(data, all, make_estimator(cfg), cfg, outcomes);
  }

  Report r;
  std::vector<double> rec, rep;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Outcome& o = outcomes[i];
    r.rows.push_back({data.entries[i].image_path, cfg.id, o.recovery, o.reproduction});
    if (std::isnan(o.recovery)) {
      ++r.failures;
    } else {
      rec.push_back(o.recovery);
      rep.push_back(o.reproduction);
    }
  }
  if (!rec.empty()) {
    r.recovery = summarize(rec);
    r.reproduction = summarize(rep);
  }
  return r;
}

namespace {

std::string fixed4(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void stats_line(std::ostream& os, const char* metric, const std::optional<ErrorStats>& st) {
  os << "#STATS," << metric;
  const ErrorStats s = st.value_or(ErrorStats{kNaN, kNaN, kNaN, kNaN, kNaN});
  for (double v : {s.median, s.mean, s.trimean, s.best25_mean, s.worst25_mean}) os << ',' << fixed4(v);
  os << '\n';
}

}  // namespace

void write_report(std::ostream& os, const Report& report) {
  os << "image,method,recovery_deg,reproduction_deg\n";
  for (const auto& row : report.rows)
    os << row.image << ',' << row.method << ',' << fixed4(row.recovery) << ','
       << fixed4(row.reproduction) << '\n';
  os << "#STATS,metric,median,mean,trimean,best25,worst25\n";
  stats_line(os, "recovery", report.recovery);
  stats_line(os, "reproduction", report.reproduction);
  os << "#STATS,failures," << report.failures << '\n';
}

}  // namespace grayanchor
