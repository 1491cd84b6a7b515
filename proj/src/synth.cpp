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

#include "mtuq/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "mtuq/error.hpp"

namespace mtuq {
namespace {

using json = nlohmann::ordered_json;

constexpr std::uint64_t kSegStream = 0;
constexpr std::uint64_t kDepthStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kBlockStream = 3;
constexpr std::size_t kBlockSize = 8;

constexpr double kEpistemicShare = 0.3;
constexpr double kDepthNear = 10.0;
constexpr double kDepthSpan = 20.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double peak_strength(double difficulty) { return 0.25 + 4.0 * (1.0 - difficulty); }
double logit_noise(double difficulty) { return 0.3 + 1.2 * difficulty; }

void softmax(std::span<const double> logits, std::span<double> out) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t c = 0; c < logits.size(); ++c) {
    out[c] = std::exp(logits[c] - m);
    z += out[c];
  }
  for (double& p : out) p /= z;
}

// Renormalized elementwise power.
void sharpen(std::span<double> p, double gamma) {
  double z = 0.0;
  for (double& v : p) {
    v = std::pow(v, gamma);
    z += v;
  }
  for (double& v : p) v /= z;
}

// Stores a distribution as float32 so that it still sums to 1 closely.
void store_probs(std::span<const double> p, float* dst, std::size_t plane) {
  for (std::size_t c = 0; c < p.size(); ++c) dst[c * plane] = static_cast<float>(p[c]);
}

std::size_t draw_class(std::span<const double> probs, double u) {
  double total = 0.0;
  for (double p : probs) total += p;
  double cum = 0.0;
  const double target = u * total;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    cum += probs[c];
    if (target < cum) return c;
  }
  return probs.size() - 1;
}

struct Buffers {
  std::vector<float> seg;
  std::vector<float> depth;
  std::vector<std::int32_t> labels;
  std::vector<float> gt_depth;
};

void generate_seg_pixel(const SynthConfig& cfg, std::size_t image, std::size_t n,
                        std::size_t peak, Buffers& buf) {
  const std::size_t classes = cfg.classes;
  const std::size_t samples = cfg.samples;
  const std::size_t plane = cfg.height * cfg.width;
  CounterRng rng(cfg.seed, image, n, kSegStream);

  const double d_true = rng.uniform();
  const double d_emit = cfg.uncertainty_informative ? d_true : rng.uniform();

  std::vector<double> base(classes);
  for (double& b : base) b = 0.5 * rng.normal();

  std::vector<double> logits(classes);
  std::vector<double> emitted(classes);
  std::vector<double> truth(classes);
  std::vector<double> truth_mean(classes, 0.0);
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<double> eps(classes);
    for (double& e : eps) e = rng.normal();

    for (std::size_t c = 0; c < classes; ++c) {
      logits[c] = base[c] + (c == peak ? peak_strength(d_emit) : 0.0) +
                  logit_noise(d_emit) * eps[c];
    }
    softmax(logits, emitted);

    // The label distribution follows the unsharpened stored samples; when
    // uncertainty is uninformative it follows a twin ensemble built from
    // the true difficulty with the same noise draws.
    if (cfg.uncertainty_informative) {
      for (std::size_t c = 0; c < classes; ++c) {
        truth[c] = static_cast<float>(emitted[c]);
      }
    } else {
      for (std::size_t c = 0; c < classes; ++c) {
        logits[c] = base[c] + (c == peak ? peak_strength(d_true) : 0.0) +
                    logit_noise(d_true) * eps[c];
      }
      softmax(logits, truth);
    }
    for (std::size_t c = 0; c < classes; ++c) truth_mean[c] += truth[c];

    if (cfg.seg_calibration != SegCalibration::kCalibrated) sharpen(emitted, cfg.gamma);
    store_probs(emitted, buf.seg.data() + s * classes * plane + n, plane);
  }

  auto label = static_cast<std::int32_t>(draw_class(truth_mean, rng.uniform()));

  CounterRng noise(cfg.seed, image, n, kNoiseStream);
  const double u_ood = noise.uniform();
  const std::uint64_t random_class = noise.next() % classes;
  const double u_ignore = noise.uniform();
  if (u_ood < std::min(1.0, cfg.ood_shift)) label = static_cast<std::int32_t>(random_class);
  if (u_ignore < cfg.ignore_fraction) label = cfg.ignore_index;
  buf.labels[n] = label;
}

void generate_depth_pixel(const SynthConfig& cfg, std::size_t image, std::size_t n,
                          Buffers& buf) {
  const std::size_t samples = cfg.samples;
  const std::size_t plane = cfg.height * cfg.width;
  CounterRng rng(cfg.seed, image, n, kDepthStream);

  const double centre = kDepthNear + kDepthSpan * rng.uniform();
  const double d_true = rng.uniform();
  const double d_emit = cfg.uncertainty_informative ? d_true : rng.uniform();
  const auto rel_sd = [&](double d) { return cfg.depth_noise_sd * (0.2 + 1.8 * d); };
  const double total_var = std::pow(rel_sd(d_emit) * centre, 2);

  std::vector<float> mu(samples);
  std::vector<float> var(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    mu[s] = static_cast<float>(centre + std::sqrt(kEpistemicShare * total_var) * rng.normal());
    var[s] = static_cast<float>((1.0 - kEpistemicShare) * total_var * (0.5 + rng.uniform()));
  }

  // Fused statistics of the stored samples.
  double mean = 0.0;
  double alea = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    mean += std::max(0.0, static_cast<double>(mu[s]));
    alea += var[s];
  }
  mean /= static_cast<double>(samples);
  alea /= static_cast<double>(samples);
  double epi = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    epi += std::pow(std::max(0.0, static_cast<double>(mu[s])) - mean, 2);
  }
  epi /= static_cast<double>(samples);

  const double sd = cfg.uncertainty_informative ? std::sqrt(alea + epi) : rel_sd(d_true) * centre;
  double y = mean;
  for (int attempt = 0; attempt < 16; ++attempt) {
    const double candidate = mean + sd * rng.normal();
    if (candidate > 0.0) {
      y = candidate;
      break;
    }
  }

  CounterRng noise(cfg.seed, image, n, kNoiseStream + 16);
  if (noise.uniform() < cfg.invalid_depth_fraction) y = 0.0;
  buf.gt_depth[n] = static_cast<float>(y);

  const double bias = cfg.ood_shift * centre;
  for (std::size_t s = 0; s < samples; ++s) {
    buf.depth[(s * 2) * plane + n] = static_cast<float>(mu[s] + bias);
    buf.depth[(s * 2 + 1) * plane + n] = var[s];
  }
}

SegCalibration calibration_from(const std::string& s) {
  if (s == "calibrated") return SegCalibration::kCalibrated;
  if (s == "overconfident") return SegCalibration::kOverconfident;
  if (s == "underconfident") return SegCalibration::kUnderconfident;
  throw Error(ErrorCode::kFormat, "synth config: unknown seg_calibration '" + s + "'");
}

std::string calibration_name(SegCalibration c) {
  switch (c) {
    case SegCalibration::kCalibrated: return "calibrated";
    case SegCalibration::kOverconfident: return "overconfident";
    case SegCalibration::kUnderconfident: return "underconfident";
  }
  return "calibrated";
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t image, std::uint64_t pixel,
                       std::uint64_t stream)
    : key_(splitmix64(splitmix64(splitmix64(splitmix64(seed) ^ image) ^ pixel) ^ stream)) {}

std::uint64_t CounterRng::next() {
  return splitmix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_);
}

double CounterRng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform_open() {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void SynthConfig::validate() const {
  const auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kValidation, "synth config: " + what);
  };
  if (images == 0 || height == 0 || width == 0 || classes == 0 || samples == 0) {
    fail("images, height, width, classes and samples must be positive");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) fail("gamma must be positive");
  if (seg_calibration == SegCalibration::kCalibrated && gamma != 1.0) {
    fail("calibrated mode requires gamma = 1");
  }
  if (seg_calibration == SegCalibration::kOverconfident && !(gamma > 1.0)) {
    fail("overconfident mode requires gamma > 1");
  }
  if (seg_calibration == SegCalibration::kUnderconfident && !(gamma < 1.0)) {
    fail("underconfident mode requires gamma < 1");
  }
  if (!(depth_noise_sd > 0.0) || !std::isfinite(depth_noise_sd)) {
    fail("depth_noise_sd must be positive");
  }
  if (!(ood_shift >= 0.0) || !std::isfinite(ood_shift)) fail("ood_shift must be >= 0");
  if (!(ignore_fraction >= 0.0 && ignore_fraction <= 1.0) ||
      !(invalid_depth_fraction >= 0.0 && invalid_depth_fraction <= 1.0)) {
    fail("fractions must lie in [0, 1]");
  }
  if (ignore_index >= 0 && static_cast<std::size_t>(ignore_index) < classes) {
    fail("ignore_index must not be a valid class");
  }
}

SynthConfig SynthConfig::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kFormat, std::string("synth config: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kFormat, "synth config: expected an object");
  SynthConfig cfg;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "images") cfg.images = value.get<std::size_t>();
      else if (key == "height") cfg.height = value.get<std::size_t>();
      else if (key == "width") cfg.width = value.get<std::size_t>();
      else if (key == "classes") cfg.classes = value.get<std::size_t>();
      else if (key == "samples") cfg.samples = value.get<std::size_t>();
      else if (key == "seg_calibration") cfg.seg_calibration = calibration_from(value.get<std::string>());
      else if (key == "gamma") cfg.gamma = value.get<double>();
      else if (key == "depth_noise_sd") cfg.depth_noise_sd = value.get<double>();
      else if (key == "uncertainty_informative") cfg.uncertainty_informative = value.get<bool>();
      else if (key == "ood_shift") cfg.ood_shift = value.get<double>();
      else if (key == "blocky_labels") cfg.blocky_labels = value.get<bool>();
      else if (key == "ignore_fraction") cfg.ignore_fraction = value.get<double>();
      else if (key == "invalid_depth_fraction") cfg.invalid_depth_fraction = value.get<double>();
      else if (key == "ignore_index") cfg.ignore_index = value.get<std::int32_t>();
      else throw Error(ErrorCode::kFormat, "synth config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("synth config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

SynthConfig SynthConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, path.string() + ": cannot open synth config");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string SynthConfig::to_json() const {
  json doc;
  doc["seed"] = seed;
  doc["images"] = images;
  doc["height"] = height;
  doc["width"] = width;
  doc["classes"] = classes;
  doc["samples"] = samples;
  doc["seg_calibration"] = calibration_name(seg_calibration);
  doc["gamma"] = gamma;
  doc["depth_noise_sd"] = depth_noise_sd;
  doc["uncertainty_informative"] = uncertainty_informative;
  doc["ood_shift"] = ood_shift;
  doc["blocky_labels"] = blocky_labels;
  doc["ignore_fraction"] = ignore_fraction;
  doc["invalid_depth_fraction"] = invalid_depth_fraction;
  doc["ignore_index"] = ignore_index;
  return doc.dump(2);
}

SynthSample generate(const SynthConfig& config, std::size_t image) {
  config.validate();
  const std::size_t plane = config.height * config.width;
  Buffers buf;
  buf.seg.resize(config.samples * config.classes * plane);
  buf.depth.resize(config.samples * 2 * plane);
  buf.labels.resize(plane);
  buf.gt_depth.resize(plane);

  const std::size_t blocks_x = (config.width + kBlockSize - 1) / kBlockSize;
  const auto count = static_cast<std::ptrdiff_t>(plane);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto n = static_cast<std::size_t>(k);
    std::size_t peak = 0;
    if (config.blocky_labels) {
      const std::size_t block =
          (n / config.width) / kBlockSize * blocks_x + (n % config.width) / kBlockSize;
      peak = CounterRng(config.seed, image, block, kBlockStream).next() % config.classes;
    } else {
      peak = CounterRng(config.seed, image, n, kBlockStream).next() % config.classes;
    }
    generate_seg_pixel(config, image, n, peak, buf);
    generate_depth_pixel(config, image, n, buf);
  }

  const std::vector<std::size_t> hw{config.height, config.width};
  return {SegSampleStack(Tensor::from<float>(
              {config.samples, config.classes, config.height, config.width},
              std::move(buf.seg))),
          DepthSampleStack(Tensor::from<float>(
              {config.samples, 2, config.height, config.width}, std::move(buf.depth))),
          GroundTruthFrame{{config.height, config.width},
                           std::move(buf.labels),
                           std::move(buf.gt_depth)}};
}

DatasetManifest write_synthetic_dataset(const SynthConfig& config,
                                        const std::filesystem::path& out_dir) {
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, out_dir.string() + ": cannot create directory");

  DatasetManifest manifest;
  manifest.num_classes = config.classes;
  manifest.ignore_index = config.ignore_index;
  manifest.depth_invalid_value = 0.0;
  manifest.base_dir = out_dir;
  const std::vector<std::size_t> hw{config.height, config.width};
  for (std::size_t i = 0; i < config.images; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "img_%04zu", i);
    const std::string name(id);
    SynthSample sample = generate(config, i);
    ManifestEntry e{name, name + "_seg.npy", name + "_depth.npy", name + "_labels.npy",
                    name + "_gt_depth.npy"};
    save_tensor(out_dir / e.seg_stack_path, sample.seg.tensor());
    save_tensor(out_dir / e.depth_stack_path, sample.depth.tensor());
    save_tensor(out_dir / e.gt_label_path, Tensor::from<std::int32_t>(hw, sample.truth.labels));
    save_tensor(out_dir / e.gt_depth_path, Tensor::from<float>(hw, sample.truth.depth));
    manifest.entries.push_back(std::move(e));
  }
  save_manifest(out_dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace mtuq
