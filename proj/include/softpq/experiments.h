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

#ifndef SOFTPQ_EXPERIMENTS_H_
#define SOFTPQ_EXPERIMENTS_H_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "softpq/metrics.h"
#include "softpq/perturb.h"

namespace softpq {

// Named property evaluated over a finished table.
struct CurveCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CurveTable {
  std::string x_label;
  std::vector<double> x_values;
  // Insertion order is column order on output.
  std::vector<std::pair<std::string, std::vector<double>>> series;
  std::map<std::string, std::string> metadata;
  std::vector<CurveCheck> checks;

  // Throws InvalidArgument if `values` is not aligned with x_values or a
  // series of that name exists.
  void AddSeries(std::string name, std::vector<double> values);
  // Throws InvalidArgument for an unknown name.
  const std::vector<double>& Series(const std::string& name) const;
  bool HasSeries(const std::string& name) const;
  bool AllChecksPassed() const;
};

// Signed successive differences; the first entry is 0.
std::vector<double> DeltaSeries(const std::vector<double>& values);
// Largest decrease between adjacent entries (0 for a non-decreasing series).
double MaxAdjacentDrop(const std::vector<double>& values);

struct ErosionOptions {
  DiskGridSpec grid;
  int steps = 25;
  std::vector<SoftPQConfig> configs = {SoftPQConfig{}};
  bool baselines = true;
  int threads = 1;
};

// x = erosion iteration 0..steps. One SoftPQ series per config (named by
// SoftPQConfig::Name()), the baselines pq, f1, map, pixel_iou and dice when
// requested, and a "delta_<name>" companion for every series.
CurveTable ErosionCurve(const ErosionOptions& options);

// 0.05, 0.10, ..., 0.50
std::vector<double> DefaultLowerGrid();

struct SweepOptions {
  DiskGridSpec grid;
  std::vector<double> lower_grid = DefaultLowerGrid();
  double upper = 0.5;
  MorphOp perturbation = MorphOp::kErode;
  int steps = 25;
  int threads = 1;
};

// x = perturbation step 0..steps. Series "softpq_l<l>" per lower threshold
// plus "pq".
CurveTable ThresholdSweep(const SweepOptions& options);

struct OversegOptions {
  DiskGridSpec grid;
  std::vector<double> fractions = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<int> fragments_list = {1, 2, 3, 4, 5};
  SoftPQConfig config;
  std::vector<double> lower_envelope = DefaultLowerGrid();
  int gap = 1;
  std::uint64_t seed = 0;
  int threads = 1;
};

// x = split fraction. Per fragment count k: softpq_f<k>, pq_f<k>, f1_f<k>,
// map_f<k>, and envelope_min_f<k> / envelope_max_f<k> spanning SoftPQ over
// the lower thresholds in `lower_envelope`.
CurveTable OversegCurve(const OversegOptions& options);

struct AblationOptions {
  DiskGridSpec grid;
  std::vector<int> fragments_list = {1, 2, 3, 4, 5};
  double lower = 0.05;
  double upper = 0.5;
  int gap = 1;
  std::uint64_t seed = 0;
};

// x = fragment count, every instance split. Series sqrt, linear, log (SoftPQ
// under each penalty) and inv_sqrt, inv_linear, inv_log holding the inverse
// weight 1 / PenaltyWeight(kind, n) at n = fragment count.
CurveTable PenaltyAblation(const AblationOptions& options);

// Header "x,<series...>", one row per x value, numbers printed with 12
// significant digits.
std::string EmitCsv(const CurveTable& table);
// Self-contained 800x500 line chart, one polyline per series plus a legend.
std::string EmitSvg(const CurveTable& table);

// Parses EmitCsv output back into x values and series (no metadata).
CurveTable ParseCsv(const std::string& csv);

}  // namespace softpq

#endif  // SOFTPQ_EXPERIMENTS_H_
