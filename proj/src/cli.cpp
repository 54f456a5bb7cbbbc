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

#include "grayanchor/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "grayanchor/error.hpp"
#include "grayanchor/evalbench.hpp"
#include "grayanchor/kernels.hpp"
#include "grayanchor/synthlab.hpp"

namespace grayanchor {

namespace {

struct Globals {
  std::uint64_t seed = 0;
  int threads = 0;
  bool quiet = false;
};

struct SelectFlags {
  std::optional<std::size_t> k;
  std::optional<double> frac;
};

struct MaskFlags {
  std::string manifest;
  double dark = kDefaultDarkFrac;
  double sat = kDefaultSatFrac;
  double black_level = 0.0;
};

struct TrainFlags {
  TrainConfig cfg;
  NetArch arch;
  bool raw = false;
};

void add_select(CLI::App* cmd, SelectFlags& s) {
  auto* k = cmd->add_option("--k", s.k, "Number of gray pixels to select")->check(CLI::PositiveNumber);
  auto* f = cmd->add_option("--frac", s.frac, "Fraction of valid pixels to select")
                ->check(CLI::Range(0.0, 1.0));
  k->excludes(f);
}

void add_mask(CLI::App* cmd, MaskFlags& m) {
  cmd->add_option("--mask-manifest", m.manifest, "Manifest supplying exclusion polygons for the image");
  cmd->add_option("--dark-frac", m.dark, "Pixels with max channel below this fraction of white are masked");
  cmd->add_option("--sat-frac", m.sat, "Pixels with max channel above this fraction of white are masked");
  cmd->add_option("--black-level", m.black_level, "Black level subtracted on load");
}

void add_train(CLI::App* cmd, TrainFlags& t) {
  cmd->add_option("--epochs", t.cfg.epochs)->check(CLI::PositiveNumber);
  cmd->add_option("--batch-size", t.cfg.batch_size)->check(CLI::PositiveNumber);
  cmd->add_option("--resize", t.cfg.resize, "Training crop side after resizing")->check(CLI::Range(4, 4096));
  cmd->add_option("--lr0", t.cfg.lr0);
  cmd->add_option("--lr-peak", t.cfg.lr_peak);
  cmd->add_option("--pathway-width", t.arch.pathway_width)->check(CLI::PositiveNumber);
  cmd->add_option("--fusion-widths", t.arch.fusion_widths, "Hidden fusion layer widths")->expected(0, 16);
  cmd->add_flag("--raw-features", t.raw, "Feed the raw image to every pathway (ablation)");
}

MethodConfig method_config(const std::string& id, const SelectFlags& s, const MaskFlags& m) {
  MethodConfig cfg;
  cfg.id = id;
  cfg.k = s.k;
  if (s.frac) cfg.frac = *s.frac;
  cfg.dark_frac = m.dark;
  cfg.sat_frac = m.sat;
  return cfg;
}

std::vector<Polygon> polygons_for(const std::filesystem::path& image, const std::string& manifest) {
  if (manifest.empty()) return {};
  const Dataset d = load_manifest(manifest);
  const auto want = std::filesystem::weakly_canonical(image);
  for (std::size_t i = 0; i < d.size(); ++i)
    if (std::filesystem::weakly_canonical(d.resolve(i)) == want) return d.entries[i].exclusion_polygons;
  throw ManifestError(image.string() + " is not listed in " + manifest);
}

std::optional<NetParams> maybe_checkpoint(const std::string& id, const std::string& path) {
  if (id != "gpnet") return std::nullopt;
  if (path.empty()) throw ConfigError("gpnet needs --checkpoint");
  return load_checkpoint(path);
}

int exit_code(ErrorClass c) {
  switch (c) {
    case ErrorClass::kUsage: return 1;
    case ErrorClass::kData: return 2;
    case ErrorClass::kNumeric: return 3;
  }
  return 3;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Illuminant estimation by gray pixel detection", "grayanchor"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice");
  app.add_option("--threads", g.threads, "Worker threads (default: GRAYANCHOR_THREADS or all cores)");
  app.add_flag("--quiet", g.quiet, "Suppress progress output");

  const auto& ids = method_ids();
  std::string method, image, out_path, checkpoint, manifest;
  SelectFlags sel;
  MaskFlags mask_flags;
  TrainFlags tf;
  std::size_t folds = 0;
  std::size_t n_scenes = 0;
  SceneDistribution dist;
  double smooth = 0.0;

  auto* est = app.add_subcommand("estimate", "Print the estimated illuminant as 'er eg eb'");
  est->add_option("--method", method)->required()->check(CLI::IsMember(ids));
  est->add_option("--image", image)->required();
  est->add_option("--checkpoint", checkpoint, "Network checkpoint for gpnet");
  add_select(est, sel);
  add_mask(est, mask_flags);

  auto* map = app.add_subcommand("map", "Write a 16-bit grayness PNG and print its scale factor");
  map->add_option("--method", method)
      ->required()
      ->check(CLI::IsMember({"gray-pixel-edge", "gray-pixel-std", "grayness-index", "gpnet"}));
  map->add_option("--image", image)->required();
  map->add_option("--out", out_path)->required();
  map->add_option("--checkpoint", checkpoint);
  add_mask(map, mask_flags);

  auto* bench = app.add_subcommand("bench", "Benchmark a method over a manifest and write the CSV report");
  bench->add_option("--manifest", manifest)->required();
  bench->add_option("--method", method)->required()->check(CLI::IsMember(ids));
  bench->add_option("--folds", folds, "Cross-validation folds (learned methods)")->check(CLI::Range(2, 1000));
  bench->add_option("--out", out_path, "CSV path (default: stdout)");
  bench->add_option("--checkpoint", checkpoint);
  add_select(bench, sel);
  add_mask(bench, mask_flags);
  add_train(bench, tf);

  auto* trn = app.add_subcommand("train", "Train the network and write a checkpoint");
  trn->add_option("--manifest", manifest)->required();
  trn->add_option("--out", out_path)->required();
  add_train(trn, tf);

  auto* syn = app.add_subcommand("synth", "Write a synthetic dataset with its manifest");
  syn->add_option("--n", n_scenes)->required();
  syn->add_option("--out", out_path)->required();
  syn->add_option("--width", dist.base.width)->check(CLI::Range(16, 8192));
  syn->add_option("--height", dist.base.height)->check(CLI::Range(16, 8192));
  syn->add_option("--grid", dist.base.grid_rows, "Patches per side")->check(CLI::Range(1, 64));
  syn->add_option("--texture", dist.base.texture_amplitude)->check(CLI::Range(0.0, 0.49));
  syn->add_option("--smooth", smooth, "Illumination gradient strength (0 = uniform)")->check(CLI::Range(0.0, 0.9));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  }

  try {
    int threads = g.threads;
    if (threads <= 0)
      if (const char* env = std::getenv("GRAYANCHOR_THREADS")) threads = std::atoi(env);
    kernels::set_threads(threads);
    tf.cfg.seed = g.seed;
    if (tf.raw) tf.arch.features = FeatureMode::kRawImage;

    if (*est) {
      const LinearImage img = load_image(image, mask_flags.black_level);
      const Mask mask = valid_mask(img, polygons_for(image, mask_flags.manifest), mask_flags.dark, mask_flags.sat);
      const auto params = maybe_checkpoint(method, checkpoint);
      const Estimator e = make_estimator(method_config(method, sel, mask_flags), params ? &*params : nullptr);
      const Illuminant ill = e(img, mask);
      char buf[96];
      std::snprintf(buf, sizeof buf, "%.6f %.6f %.6f", ill[0], ill[1], ill[2]);
      out << buf << '\n';
    } else if (*map) {
      const LinearImage img = load_image(image, mask_flags.black_level);
      const Mask mask = valid_mask(img, polygons_for(image, mask_flags.manifest), mask_flags.dark, mask_flags.sat);
      GraynessMap gm;
      if (method == "gpnet") {
        gm = gpnet_map(img, *maybe_checkpoint(method, checkpoint), mask);
      } else if (method == "grayness-index") {
        gm = grayness_gi(img, mask);
      } else {
        gm = grayness_gp(img, method == "gray-pixel-edge" ? GpVariant::kEdge : GpVariant::kStd, mask);
      }
      std::vector<double> finite;
      for (double v : gm.values())
        if (!is_excluded(v)) finite.push_back(v);
      std::sort(finite.begin(), finite.end());
      const double p99 = finite.empty() ? 0.0 : quantile(finite, 0.99);
      const double scale = p99 > 0.0 ? 65535.0 / p99 : 1.0;
      Plane png(gm.width(), gm.height());
      for (std::size_t i = 0; i < gm.size(); ++i)
        png[i] = is_excluded(gm[i]) ? 65535.0 : std::min(65535.0, gm[i] * scale);
      save_gray_png16(out_path, png);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.9g", scale);
      out << "scale " << buf << '\n';
    } else if (*bench) {
      const Dataset data = load_manifest(manifest);
      MethodConfig cfg = method_config(method, sel, mask_flags);
      cfg.arch = tf.arch;
      cfg.train = tf.cfg;
      if (!checkpoint.empty()) cfg.checkpoint = checkpoint;
      std::optional<FoldSplit> split;
      if (folds > 0) split = kfold(data, folds, g.seed);
      const Report report = run_benchmark(data, cfg, split);
      if (out_path.empty()) {
        write_report(out, report);
      } else {
        std::ofstream os(out_path, std::ios::trunc);
        if (!os) throw IoError("cannot write " + out_path);
        write_report(os, report);
      }
    } else if (*trn) {
      const Dataset data = load_manifest(manifest);
      EpochCallback progress;
      if (!g.quiet)
        progress = [&err](int epoch, double loss) { err << "epoch " << epoch + 1 << " loss " << loss << '\n'; };
      const TrainResult r = train(data, tf.arch, tf.cfg, LossConfig{}, progress);
      save_checkpoint(out_path, r.params);
    } else if (*syn) {
      dist.base.grid_cols = dist.base.grid_rows;
      if (smooth > 0.0) {
        dist.base.field = FieldKind::kSmooth;
        dist.base.field_strength = smooth;
      }
      const Dataset d = make_dataset(n_scenes, dist, g.seed, out_path);
      if (!g.quiet) err << "wrote " << d.size() << " scenes to " << out_path << '\n';
    }
    return 0;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code(e.error_class());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 3;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace grayanchor
