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

#include "mtuq/threshold.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "mtuq/error.hpp"
#include "mtuq/numeric.hpp"

namespace mtuq {
namespace {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidParameter,
                "threshold: cannot parse " + std::string(what) + " from '" +
                    std::string(text) + "'");
  }
  return v;
}

// Parses "key=value" following a "kind:" prefix.
double parse_param(std::string_view rest, std::string_view key) {
  const std::string prefix = std::string(key) + "=";
  if (rest.substr(0, prefix.size()) != prefix) {
    throw Error(ErrorCode::kInvalidParameter,
                "threshold: expected '" + prefix + "<number>', got '" +
                    std::string(rest) + "'");
  }
  return parse_number(rest.substr(prefix.size()), key);
}

template <bool kParallel>
CertaintyMask classify_impl(std::span<const double> u,
                            std::span<const std::uint8_t> scored, double tau) {
  if (!scored.empty() && scored.size() != u.size()) {
    throw Error(ErrorCode::kValidation, "uncertainty map and scored mask differ in size");
  }
  CertaintyMask mask;
  mask.tau = tau;
  mask.certain.assign(u.size(), 0);
  const auto count = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for if (kParallel) schedule(static)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto n = static_cast<std::size_t>(k);
    if ((scored.empty() || scored[n]) && u[n] < tau) mask.certain[n] = 1;
  }
  return mask;
}

}  // namespace

std::string ThresholdSpec::to_string() const {
  switch (kind) {
    case ThresholdKind::kMean: return "mean";
    case ThresholdKind::kMedian: return "median";
    case ThresholdKind::kRobust: return "robust:f=" + format_number(f);
    case ThresholdKind::kPercentile: return "percentile:q=" + format_number(q);
  }
  return "unknown";
}

ThresholdSpec ThresholdSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view kind = text.substr(0, colon);
  const std::string_view rest =
      colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  ThresholdSpec spec;
  if (kind == "mean" && colon == std::string_view::npos) {
    spec.kind = ThresholdKind::kMean;
  } else if (kind == "median" && colon == std::string_view::npos) {
    spec.kind = ThresholdKind::kMedian;
  } else if (kind == "robust") {
    spec.kind = ThresholdKind::kRobust;
    if (colon != std::string_view::npos) spec.f = parse_param(rest, "f");
  } else if (kind == "percentile" && colon != std::string_view::npos) {
    spec.kind = ThresholdKind::kPercentile;
    spec.q = parse_param(rest, "q");
  } else {
    throw Error(ErrorCode::kInvalidParameter,
                "threshold: '" + std::string(text) +
                    "' is not one of mean | median | robust:f=F | percentile:q=Q");
  }
  return spec;
}

void ThresholdSpec::validate() const {
  if (kind == ThresholdKind::kPercentile && !(q > 0.0 && q < 100.0)) {
    throw Error(ErrorCode::kInvalidParameter,
                "threshold: percentile q must lie in (0, 100), got " + format_number(q));
  }
  if (kind == ThresholdKind::kRobust) {
    if (!std::isfinite(f)) {
      throw Error(ErrorCode::kInvalidParameter, "threshold: robust f must be finite");
    }
    if (f < 0.0 && !allow_negative_f) {
      throw Error(ErrorCode::kUnstableThreshold,
                  "threshold: robust factor f=" + format_number(f) +
                      " is negative; negative factors give unstable evaluations "
                      "because tau can collapse to 0 and mark every pixel "
                      "uncertain. Pass --allow-negative-f to use it anyway.");
    }
  }
}

std::vector<double> scored_values(std::span<const double> u,
                                  std::span<const std::uint8_t> scored) {
  if (scored.empty()) return {u.begin(), u.end()};
  if (scored.size() != u.size()) {
    throw Error(ErrorCode::kValidation, "uncertainty map and scored mask differ in size");
  }
  std::vector<double> out;
  out.reserve(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (scored[n]) out.push_back(u[n]);
  }
  return out;
}

double lower_median(std::vector<double>& values) {
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

double robust_sigma(std::vector<double> values) {
  const double center = lower_median(values);
  for (double& v : values) v = std::fabs(v - center);
  return lower_median(values) / kMadConsistency;
}

std::size_t nearest_rank(double q, std::size_t n) {
  // q * n first so integral products stay exact before the division.
  const double r = std::ceil((q * static_cast<double>(n)) / 100.0);
  if (!(r >= 1.0)) return 1;
  return std::min(static_cast<std::size_t>(r), n);
}

double nearest_rank_percentile(std::vector<double>& values, double q) {
  const std::size_t rank = nearest_rank(q, values.size());
  const auto kth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(values.begin(), kth, values.end());
  return *kth;
}

double compute_threshold(std::span<const double> u,
                         std::span<const std::uint8_t> scored,
                         const ThresholdSpec& spec) {
  spec.validate();
  std::vector<double> values = scored_values(u, scored);
  if (values.empty()) {
    throw Error(ErrorCode::kUndefinedMetric, "threshold undefined: no scored pixels");
  }
  switch (spec.kind) {
    case ThresholdKind::kMean:
      return exact_sum(values.begin(), values.end()) / static_cast<double>(values.size());
    case ThresholdKind::kMedian:
      return lower_median(values);
    case ThresholdKind::kRobust: {
      const double sigma = robust_sigma(values);
      return lower_median(values) + spec.f * sigma;
    }
    case ThresholdKind::kPercentile:
      return nearest_rank_percentile(values, spec.q);
  }
  return 0.0;
}

CertaintyMask classify(std::span<const double> u,
                       std::span<const std::uint8_t> scored, double tau) {
  return classify_impl<true>(u, scored, tau);
}

namespace serial {
CertaintyMask classify(std::span<const double> u,
                       std::span<const std::uint8_t> scored, double tau) {
  return classify_impl<false>(u, scored, tau);
}
}  // namespace serial

}  // namespace mtuq
