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

#ifndef MTUQ_REPORT_HPP_
#define MTUQ_REPORT_HPP_

#include <ostream>
#include <string>

#include "mtuq/evaluate.hpp"

namespace mtuq {

inline constexpr const char* kToolName = "mtuq";
const char* tool_version();

// JSON report with fixed key order. Undefined metrics are null. Every ratio
// sits next to the UQCounts it was computed from. `manifest_label` is
// recorded verbatim in config.manifest.
std::string report_json(const DatasetEvaluation& eval, const EvalOptions& options,
                        const std::string& manifest_label);

// Per-image threshold table, RFC-4180:
// image_id,task,threshold,tau,n_ac,n_au,n_ic,n_iu,p_accurate_certain,
// p_uncertain_inaccurate,pavpu
void write_report_csv(std::ostream& out, const DatasetEvaluation& eval,
                      const EvalOptions& options);

// True when no dataset-level metric is defined.
bool all_metrics_undefined(const DatasetEvaluation& eval);

// RFC-4180 field quoting.
std::string csv_field(const std::string& value);

}  // namespace mtuq

#endif  // MTUQ_REPORT_HPP_
