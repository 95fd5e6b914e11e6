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

#include "softpq/batch.h"

#include <algorithm>
#include <filesystem>
#include <map>
#include <thread>

#include "softpq/errors.h"

namespace softpq {
namespace {

std::map<std::string, std::string> ListFiles(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) throw Error("cannot list directory " + dir + ": " + ec.message());
  std::map<std::string, std::string> files;
  for (const fs::directory_entry& entry : it) {
    if (entry.is_regular_file()) {
      files[entry.path().filename().string()] = entry.path().string();
    }
  }
  return files;
}

BatchEntry EvaluateOne(const ImagePair& pair, const SoftPQConfig& config,
                       const EvalOptions& options) {
  BatchEntry entry{pair, std::nullopt, BatchErrorKind::kNone, ""};
  std::optional<LabelGrid> gt, pred;
  try {
    gt = ReadLabelFile(pair.gt_path);
    pred = ReadLabelFile(pair.pred_path);
  } catch (const Error& e) {
    entry.error_kind = BatchErrorKind::kUnreadable;
    entry.error = e.what();
    return entry;
  }
  try {
    entry.report = EvaluateAll(*gt, *pred, config, options);
  } catch (const DimensionMismatch& e) {
    entry.error_kind = BatchErrorKind::kDimensionMismatch;
    entry.error = pair.name + ": " + e.what();
  } catch (const Error& e) {
    entry.error_kind = BatchErrorKind::kInvalid;
    entry.error = pair.name + ": " + e.what();
  }
  return entry;
}

}  // namespace

DirectoryPairing PairDirectories(const std::string& gt_dir,
                                 const std::string& pred_dir) {
  const auto gt_files = ListFiles(gt_dir);
  const auto pred_files = ListFiles(pred_dir);
  DirectoryPairing out;
  for (const auto& [name, path] : gt_files) {
    auto it = pred_files.find(name);
    if (it == pred_files.end()) {
      out.gt_only.push_back(name);
    } else {
      out.pairs.push_back({name, path, it->second});
    }
  }
  for (const auto& [name, path] : pred_files) {
    if (!gt_files.contains(name)) out.pred_only.push_back(name);
  }
  return out;
}

std::vector<BatchEntry> EvaluateBatch(const std::vector<ImagePair>& pairs,
                                      const SoftPQConfig& config,
                                      const EvalOptions& options,
                                      int threads) {
  std::vector<BatchEntry> entries(pairs.size());
  const auto workers = std::min<std::size_t>(
      static_cast<std::size_t>(std::max(threads, 1)), pairs.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      entries[i] = EvaluateOne(pairs[i], config, options);
    }
    return entries;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < pairs.size(); i += workers) {
        entries[i] = EvaluateOne(pairs[i], config, options);
      }
    });
  }
  pool.clear();
  return entries;
}

ScoreMeans Aggregate(const std::vector<BatchEntry>& entries) {
  ScoreMeans means;
  for (const BatchEntry& e : entries) {
    if (!e.report) continue;
    ++means.count;
    means.softpq += e.report->softpq;
    means.pq += e.report->pq;
    means.sq += e.report->sq;
    means.rq_f1 += e.report->rq_f1;
    means.map_score += e.report->map_score;
    means.pixel_iou += e.report->pixel_iou;
    means.dice += e.report->dice;
  }
  if (means.count) {
    const auto n = static_cast<double>(means.count);
    for (double* v : {&means.softpq, &means.pq, &means.sq, &means.rq_f1,
                      &means.map_score, &means.pixel_iou, &means.dice}) {
      *v /= n;
    }
  }
  return means;
}

Comparison ComparePqSoftPQ(const std::vector<BatchEntry>& entries) {
  Comparison out;
  for (const BatchEntry& e : entries) {
    if (!e.report) continue;
    ComparisonRow row{e.pair.name, e.report->pq, e.report->softpq,
                      e.report->softpq - e.report->pq};
    if (row.softpq < row.pq - 1e-12) ++out.violations;
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace softpq
