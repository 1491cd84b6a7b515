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

#include "mtuq/report.hpp"

#include <charconv>
#include <functional>

#include "json.hpp"
#include "mtuq/error.hpp"

namespace mtuq {
namespace {

using json = nlohmann::ordered_json;

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Evaluates a metric that throws kUndefinedMetric into a nullable value.
std::optional<double> defined(const std::function<double()>& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUndefinedMetric) throw;
    return std::nullopt;
  }
}

json counts_json(const UQCounts& c) {
  json j;
  j["n_ac"] = c.n_ac;
  j["n_au"] = c.n_au;
  j["n_ic"] = c.n_ic;
  j["n_iu"] = c.n_iu;
  for (UQMetric m : kUQMetrics) j[std::string(metric_name(m))] = nullable(metric_value(m, c));
  return j;
}

json seg_block(const ConfusionMatrix& confusion, const CalibrationBins& bins) {
  json j;
  j["miou"] = nullable(defined([&] { return miou(confusion); }));
  j["ece"] = nullable(defined([&] { return bins.ece(); }));
  j["scored_pixels"] = confusion.total();
  return j;
}

json depth_block(const SquaredError& se, const DeltaCounts& delta) {
  json j;
  j["rmse"] = nullable(defined([&] { return se.rmse(); }));
  for (std::size_t k = 0; k < 3; ++k) {
    j["delta" + std::to_string(k + 1)] = nullable(defined([&] { return delta.fraction(k); }));
  }
  j["valid_pixels"] = delta.valid;
  return j;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

}  // namespace

const char* tool_version() { return MTUQ_VERSION; }

std::string report_json(const DatasetEvaluation& eval, const EvalOptions& options,
                        const std::string& manifest_label) {
  json doc;
  doc["tool"] = {{"name", kToolName}, {"version", tool_version()}};

  json config;
  config["manifest"] = manifest_label;
  config["thresholds"] = json::array();
  for (const auto& t : options.thresholds) config["thresholds"].push_back(t.to_string());
  config["threshold_rule"] = "certain iff u < tau; tau computed per image on scored pixels";
  config["window"] = options.window;
  config["ece_bins"] = options.bins;
  config["normalize_entropy"] = options.fusion.normalize_entropy;
  config["delta_thresholds"] = kDeltaThresholds;
  config["accuracy"] = {{"segmentation", "argmax label == gt"},
                        {"depth", "max(pred/gt, gt/pred) < 1.25"}};
  config["uncertainty"] = {
      {"segmentation", options.fusion.normalize_entropy
                           ? "entropy of mean probabilities / ln C"
                           : "entropy of mean probabilities (nats)"},
      {"depth", "mean predicted variance + population variance of ReLU'd means"}};
  config["aggregation"] = "micro: merged counts over images, per-image thresholds";
  json sweep_cfg;
  sweep_cfg["enabled"] = options.sweep;
  sweep_cfg["percentiles"] = options.percentiles;
  sweep_cfg["percentile_rule"] = "nearest rank, ceil(q/100 * N)";
  sweep_cfg["auc"] = "trapezoid over defined points divided by their covered span";
  config["sweep"] = sweep_cfg;
  doc["config"] = config;

  json dataset;
  dataset["num_images"] = eval.images.size();
  dataset["segmentation"] = seg_block(eval.confusion, eval.calibration);
  dataset["depth"] = depth_block(eval.squared_error, eval.delta);
  dataset["uncertainty"] = json::array();
  for (std::size_t k = 0; k < options.thresholds.size(); ++k) {
    json entry;
    entry["threshold"] = options.thresholds[k].to_string();
    for (Task task : kTasks) {
      entry[std::string(task_name(task))] =
          counts_json(eval.uq[static_cast<std::size_t>(task)][k]);
    }
    dataset["uncertainty"].push_back(entry);
  }
  if (eval.sweep) {
    json aucs;
    for (Task task : kTasks) {
      json per_task;
      const SweepCurve& curve = eval.sweep->curves[static_cast<std::size_t>(task)];
      for (UQMetric m : kUQMetrics) {
        const auto points = curve.curve(m);
        per_task[std::string(metric_name(m))] =
            nullable(defined([&] { return auc(points); }));
      }
      aucs[std::string(task_name(task))] = per_task;
    }
    dataset["sweep_auc"] = aucs;
  } else {
    dataset["sweep_auc"] = nullptr;
  }
  doc["dataset"] = dataset;

  json images = json::array();
  for (const ImageEvaluation& img : eval.images) {
    json j;
    j["image_id"] = img.image_id;
    j["segmentation"] = seg_block(img.confusion, img.calibration);
    j["depth"] = depth_block(img.squared_error, img.delta);
    j["uncertainty"] = json::array();
    for (std::size_t k = 0; k < options.thresholds.size(); ++k) {
      json entry;
      entry["threshold"] = options.thresholds[k].to_string();
      for (Task task : kTasks) {
        const ThresholdResult& r = img.uq[static_cast<std::size_t>(task)][k];
        json block;
        block["tau"] = nullable(r.tau);
        block.update(counts_json(r.counts));
        entry[std::string(task_name(task))] = block;
      }
      j["uncertainty"].push_back(entry);
    }
    images.push_back(j);
  }
  doc["images"] = images;
  return doc.dump(2) + "\n";
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_report_csv(std::ostream& out, const DatasetEvaluation& eval,
                      const EvalOptions& options) {
  constexpr const char* kEol = "\r\n";
  out << "image_id,task,threshold,tau,n_ac,n_au,n_ic,n_iu,p_accurate_certain,"
         "p_uncertain_inaccurate,pavpu"
      << kEol;
  for (const ImageEvaluation& img : eval.images) {
    for (Task task : kTasks) {
      for (std::size_t k = 0; k < options.thresholds.size(); ++k) {
        const ThresholdResult& r = img.uq[static_cast<std::size_t>(task)][k];
        const UQCounts& c = r.counts;
        out << csv_field(img.image_id) << ',' << task_name(task) << ','
            << csv_field(options.thresholds[k].to_string()) << ','
            << optional_number(r.tau) << ',' << c.n_ac << ',' << c.n_au << ','
            << c.n_ic << ',' << c.n_iu;
        for (UQMetric m : kUQMetrics) out << ',' << optional_number(metric_value(m, c));
        out << kEol;
      }
    }
  }
}

bool all_metrics_undefined(const DatasetEvaluation& eval) {
  if (defined([&] { return miou(eval.confusion); })) return false;
  if (defined([&] { return eval.calibration.ece(); })) return false;
  if (defined([&] { return eval.squared_error.rmse(); })) return false;
  for (const auto& per_task : eval.uq) {
    for (const UQCounts& c : per_task) {
      if (pavpu(c)) return false;
    }
  }
  return true;
}

}  // namespace mtuq
