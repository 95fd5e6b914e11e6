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

#ifndef SOFTPQ_BATCH_H_
#define SOFTPQ_BATCH_H_

#include <optional>
#include <string>
#include <vector>

#include "softpq/metrics.h"

namespace softpq {

struct ImagePair {
  std::string name;
  std::string gt_path;
  std::string pred_path;
};

struct DirectoryPairing {
  // Sorted by name.
  std::vector<ImagePair> pairs;
  // Regular files present in only one directory.
  std::vector<std::string> gt_only;
  std::vector<std::string> pred_only;

  bool complete() const { return gt_only.empty() && pred_only.empty(); }
};

// Pairs regular files by identical filename. Throws Error if either directory
// cannot be listed.
DirectoryPairing PairDirectories(const std::string& gt_dir,
                                 const std::string& pred_dir);

enum class BatchErrorKind { kNone, kUnreadable, kDimensionMismatch, kInvalid };

struct BatchEntry {
  ImagePair pair;
  std::optional<ScoreReport> report;
  BatchErrorKind error_kind = BatchErrorKind::kNone;
  std::string error;
};

// Evaluates every pair; errors are recorded per entry and the batch goes on.
// Output order follows `pairs` whatever the thread count.
std::vector<BatchEntry> EvaluateBatch(const std::vector<ImagePair>& pairs,
                                      const SoftPQConfig& config,
                                      const EvalOptions& options = {},
                                      int threads = 1);

struct ScoreMeans {
  std::size_t count = 0;
  double softpq = 0.0;
  double pq = 0.0;
  double sq = 0.0;
  double rq_f1 = 0.0;
  double map_score = 0.0;
  double pixel_iou = 0.0;
  double dice = 0.0;
};

// Arithmetic means over the successful entries.
ScoreMeans Aggregate(const std::vector<BatchEntry>& entries);

struct ComparisonRow {
  std::string name;
  double pq = 0.0;
  double softpq = 0.0;
  double difference = 0.0;  // softpq - pq
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  // Rows with softpq < pq - 1e-12.
  std::size_t violations = 0;
};

Comparison ComparePqSoftPQ(const std::vector<BatchEntry>& entries);

}  // namespace softpq

#endif  // SOFTPQ_BATCH_H_
