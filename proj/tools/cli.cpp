/*
 * Copyright 2026 The mtuq Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.hpp"

#include <omp.h>

#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mtuq/error.hpp"
#include "mtuq/evaluate.hpp"
#include "mtuq/manifest.hpp"
#include "mtuq/report.hpp"
#include "mtuq/synth.hpp"

namespace mtuq::cli {
namespace {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return kExitIo;
    case ErrorCode::kUndefinedMetric: return kExitUndefined;
    default: return kExitValidation;
  }
}

struct Flags {
  std::string manifest;
  std::string out;
  std::string config;
  std::vector<std::string> thresholds;
  bool allow_negative_f = false;
  std::size_t window = 1;
  std::size_t bins = kDefaultEceBins;
  bool normalize_entropy = false;
  bool no_sweep = false;
  int threads = 0;
};

void apply_threads(int threads) {
  if (threads < 0) throw Error(ErrorCode::kInvalidParameter, "--threads must be >= 1");
  if (threads > 0) omp_set_num_threads(threads);
}

std::vector<float> to_float(const std::vector<double>& v) {
  return std::vector<float>(v.begin(), v.end());
}

void open_for_write(std::ofstream& stream, const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  stream.open(path, std::ios::binary | std::ios::trunc);
  if (!stream) throw Error(ErrorCode::kIo, path.string() + ": cannot open for writing");
}

void close_written(std::ofstream& stream, const fs::path& path) {
  stream.close();
  if (!stream) throw Error(ErrorCode::kIo, path.string() + ": write failed");
}

EvalOptions eval_options(const Flags& flags) {
  EvalOptions options;
  if (!flags.thresholds.empty()) {
    options.thresholds.clear();
    for (const std::string& t : flags.thresholds) {
      ThresholdSpec spec = ThresholdSpec::parse(t);
      spec.allow_negative_f = flags.allow_negative_f;
      options.thresholds.push_back(spec);
    }
  }
  options.window = flags.window;
  options.bins = flags.bins;
  options.fusion.normalize_entropy = flags.normalize_entropy;
  options.sweep = !flags.no_sweep;
  options.validate();
  return options;
}

int cmd_fuse(const Flags& flags, std::ostream& out) {
  const DatasetManifest manifest = load_manifest(flags.manifest);
  const FusionOptions options{flags.normalize_entropy};
  const fs::path root(flags.out);
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const std::string& id = manifest.entries[i].image_id;
    const LoadedEntry entry = load_entry(manifest, i);
    FusedPrediction fused;
    try {
      fused = fuse(entry.seg, entry.depth, options);
    } catch (const Error& e) {
      throw Error(e.code(), "image '" + id + "': " + e.what());
    }
    const fs::path dir = root / id;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::kIo, dir.string() + ": cannot create directory");
    const Grid g = fused.seg.grid;
    const std::vector<std::size_t> hw{g.height, g.width};
    save_tensor(dir / "seg_prob.npy",
                Tensor::from<float>({fused.seg.classes, g.height, g.width},
                                    to_float(fused.seg.prob)));
    save_tensor(dir / "seg_label.npy", Tensor::from<std::int32_t>(hw, fused.seg.label));
    save_tensor(dir / "seg_unc.npy", Tensor::from<float>(hw, to_float(fused.seg.uncertainty)));
    save_tensor(dir / "depth.npy", Tensor::from<float>(hw, to_float(fused.depth.depth)));
    save_tensor(dir / "depth_alea.npy",
                Tensor::from<float>(hw, to_float(fused.depth.aleatoric)));
    save_tensor(dir / "depth_epi.npy",
                Tensor::from<float>(hw, to_float(fused.depth.epistemic)));
    save_tensor(dir / "depth_unc.npy", Tensor::from<float>(hw, to_float(fused.depth.total)));
  }
  out << "fused " << manifest.entries.size() << " image(s) into " << root.string() << '\n';
  return kExitOk;
}

int cmd_evaluate(const Flags& flags, std::ostream& out, std::ostream& err) {
  const EvalOptions options = eval_options(flags);
  const DatasetManifest manifest = load_manifest(flags.manifest);
  const DatasetEvaluation eval = evaluate_manifest(manifest, options);

  const fs::path json_path(flags.out);
  fs::path csv_path = json_path;
  csv_path.replace_extension(".csv");
  if (csv_path == json_path) {
    throw Error(ErrorCode::kInvalidParameter, "--out must not end in .csv");
  }
  std::ofstream json_stream;
  open_for_write(json_stream, json_path);
  json_stream << report_json(eval, options, flags.manifest);
  close_written(json_stream, json_path);
  std::ofstream csv_stream;
  open_for_write(csv_stream, csv_path);
  write_report_csv(csv_stream, eval, options);
  close_written(csv_stream, csv_path);
  out << "wrote " << json_path.string() << " and " << csv_path.string() << '\n';

  if (all_metrics_undefined(eval)) {
    err << "error: every dataset metric is undefined\n";
    return kExitUndefined;
  }
  return kExitOk;
}

int cmd_sweep(const Flags& flags, std::ostream& out, std::ostream& err) {
  Flags eval_flags = flags;
  eval_flags.no_sweep = false;
  const EvalOptions options = eval_options(eval_flags);
  const DatasetManifest manifest = load_manifest(flags.manifest);
  const DatasetEvaluation eval = evaluate_manifest(manifest, options);

  const fs::path csv_path(flags.out);
  std::ofstream stream;
  open_for_write(stream, csv_path);
  write_sweep_csv(stream, *eval.sweep);
  close_written(stream, csv_path);

  bool any_defined = false;
  for (Task task : kTasks) {
    const SweepCurve& curve = eval.sweep->curves[static_cast<std::size_t>(task)];
    for (UQMetric m : kUQMetrics) {
      out << task_name(task) << ' ' << metric_name(m) << " auc=";
      try {
        out << auc(curve.curve(m));
        any_defined = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUndefinedMetric) throw;
        out << "null";
      }
      out << '\n';
    }
  }
  if (!any_defined) {
    err << "error: every sweep AUC is undefined\n";
    return kExitUndefined;
  }
  return kExitOk;
}

int cmd_synth(const Flags& flags, std::ostream& out) {
  const SynthConfig config = flags.config.empty() ? SynthConfig{} : SynthConfig::load(flags.config);
  config.validate();
  const DatasetManifest manifest = write_synthetic_dataset(config, flags.out);
  out << "wrote " << manifest.entries.size() << " image(s) and "
      << (fs::path(flags.out) / "manifest.json").string() << '\n';
  return kExitOk;
}

void add_eval_flags(CLI::App* cmd, Flags& flags, bool with_thresholds) {
  if (with_thresholds) {
    cmd->add_option("--threshold", flags.thresholds,
                    "mean | median | robust:f=F | percentile:q=Q (repeatable)");
    cmd->add_flag("--allow-negative-f", flags.allow_negative_f,
                  "accept robust thresholds with f < 0");
    cmd->add_option("--bins", flags.bins, "ECE bin count")->capture_default_str();
    cmd->add_flag("--no-sweep", flags.no_sweep, "skip the percentile sweep");
  }
  cmd->add_option("--window", flags.window, "side of the square evaluation cell")
      ->capture_default_str();
  cmd->add_flag("--normalize-entropy", flags.normalize_entropy,
                "divide segmentation entropy by ln C");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Flags flags;
  CLI::App app{"Sample fusion and uncertainty metrics for segmentation and depth", "mtuq"};
  app.set_version_flag("--version", std::string(kToolName) + " " + tool_version());
  app.require_subcommand(1);
  app.add_option("--threads", flags.threads, "worker threads (default: OpenMP default)");

  CLI::App* fuse_cmd = app.add_subcommand("fuse", "write fused tensors per image");
  fuse_cmd->add_option("--manifest", flags.manifest, "dataset manifest")->required();
  fuse_cmd->add_option("--out", flags.out, "output directory")->required();
  fuse_cmd->add_flag("--normalize-entropy", flags.normalize_entropy,
                     "divide segmentation entropy by ln C");

  CLI::App* eval_cmd = app.add_subcommand("evaluate", "write a JSON report and a CSV table");
  eval_cmd->add_option("--manifest", flags.manifest, "dataset manifest")->required();
  eval_cmd->add_option("--out", flags.out, "report path (.json); the CSV sits beside it")
      ->required();
  add_eval_flags(eval_cmd, flags, true);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "percentile sweep curves and AUCs");
  sweep_cmd->add_option("--manifest", flags.manifest, "dataset manifest")->required();
  sweep_cmd->add_option("--out", flags.out, "curve CSV path")->required();
  add_eval_flags(sweep_cmd, flags, false);

  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
  synth_cmd->add_option("--config", flags.config, "JSON generator config");
  synth_cmd->add_option("--out", flags.out, "output directory")->required();

  for (CLI::App* sub : {fuse_cmd, eval_cmd, sweep_cmd, synth_cmd}) {
    sub->add_option("--threads", flags.threads, "worker threads");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolName << ' ' << tool_version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    apply_threads(flags.threads);
    if (fuse_cmd->parsed()) return cmd_fuse(flags, out);
    if (eval_cmd->parsed()) return cmd_evaluate(flags, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(flags, out, err);
    return cmd_synth(flags, out);
  } catch (const Error& e) {
    err << "error: " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace mtuq::cli
