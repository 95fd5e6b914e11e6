/* Copyright 2026 The SoftPQ Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SOFTPQ_TOOLS_CLI_H_
#define SOFTPQ_TOOLS_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "softpq/batch.h"
#include "softpq/metrics.h"

namespace softpq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDimension = 3;

// Evaluation settings merged from defaults, an optional JSON config file, a
// preset and explicit flags (later sources win).
struct RunConfig {
  SoftPQConfig softpq;
  std::vector<double> thresholds = DefaultApThresholds();
  std::uint64_t seed = 0;
  std::string out;
  bool svg = false;
  int threads = 1;
};

// Applies the keys of a JSON object: lower, upper, penalty, mode, thresholds,
// seed, out, svg, threads. Unknown keys and wrong types throw
// InvalidArgument.
void ApplyConfigJson(const std::string& json_text, RunConfig& config);
void ApplyConfigFile(const std::string& path, RunConfig& config);

// "benchmark" (l=0.25, h=0.5), "strict" (l=0.4, h=0.6) or "lenient"
// (l=0.05, h=0.5).
void ApplyPreset(const std::string& name, SoftPQConfig& config);

// JSON report for cmd eval; deterministic key and entry order.
std::string ReportJson(const std::vector<BatchEntry>& entries,
                       const RunConfig& config);

// CSV for cmd compare: name,pq,softpq,softpq_minus_pq.
std::string ComparisonCsv(const Comparison& comparison);

// Entry point shared by the executable and the tests. `args` excludes the
// program name.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace softpq::cli

#endif  // SOFTPQ_TOOLS_CLI_H_
