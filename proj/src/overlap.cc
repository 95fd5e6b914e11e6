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

#include "softpq/overlap.h"

#include <algorithm>
#include <string>
#include <thread>
#include <unordered_map>

#include "softpq/errors.h"

namespace softpq {
namespace {

using PairKey = std::uint64_t;

PairKey MakeKey(LabelId gt, LabelId pred) {
  return (static_cast<PairKey>(gt) << 32) | pred;
}

struct BandCounts {
  std::unordered_map<PairKey, std::uint64_t> pairs;
  std::unordered_map<LabelId, std::uint64_t> gt_areas;
  std::unordered_map<LabelId, std::uint64_t> pred_areas;
};

void CountBand(std::span<const LabelId> gt, std::span<const LabelId> pred,
               BandCounts& out) {
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const LabelId g = gt[i];
    const LabelId p = pred[i];
    if (g != kBackground) ++out.gt_areas[g];
    if (p != kBackground) ++out.pred_areas[p];
    if (g != kBackground && p != kBackground) ++out.pairs[MakeKey(g, p)];
  }
}

}  // namespace

std::uint64_t OverlapMatrix::Intersection(LabelId gt, LabelId pred) const {
  auto it = std::lower_bound(pairs.begin(), pairs.end(), PairCount{gt, pred, 0},
                             [](const PairCount& a, const PairCount& b) {
                               return a.gt != b.gt ? a.gt < b.gt
                                                   : a.pred < b.pred;
                             });
  return it != pairs.end() && it->gt == gt && it->pred == pred
             ? it->intersection
             : 0;
}

OverlapMatrix JointHistogram(const LabelGrid& gt, const LabelGrid& pred,
                             int threads) {
  CheckSameShape(gt, pred);
  return JointHistogram(gt.labels(), pred.labels(), gt.height(), gt.width(),
                        threads);
}

OverlapMatrix JointHistogram(std::span<const LabelId> gt,
                             std::span<const LabelId> pred, std::size_t height,
                             std::size_t width, int threads) {
  if (gt.size() != height * width || pred.size() != height * width) {
    throw DimensionMismatch(
        "label buffers hold " + std::to_string(gt.size()) + " and " +
        std::to_string(pred.size()) + " values for shape " +
        std::to_string(height) + "x" + std::to_string(width));
  }
  const std::size_t rows = std::max<std::size_t>(height, 1);
  const std::size_t bands =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)),
                              1, rows);
  std::vector<BandCounts> counts(bands);
  const auto band_span = [&](std::size_t b, std::span<const LabelId> all) {
    const std::size_t r0 = rows * b / bands;
    const std::size_t r1 = rows * (b + 1) / bands;
    return all.subspan(r0 * width, (r1 - r0) * width);
  };
  if (bands == 1) {
    CountBand(gt, pred, counts[0]);
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(bands);
    for (std::size_t b = 0; b < bands; ++b) {
      workers.emplace_back([&, b] {
        CountBand(band_span(b, gt), band_span(b, pred), counts[b]);
      });
    }
  }

  std::map<PairKey, std::uint64_t> merged;
  OverlapMatrix result;
  for (const BandCounts& band : counts) {
    for (const auto& [key, n] : band.pairs) merged[key] += n;
    for (const auto& [id, n] : band.gt_areas) result.gt_areas[id] += n;
    for (const auto& [id, n] : band.pred_areas) result.pred_areas[id] += n;
  }
  result.pairs.reserve(merged.size());
  for (const auto& [key, n] : merged) {
    result.pairs.push_back({static_cast<LabelId>(key >> 32),
                            static_cast<LabelId>(key & 0xffffffffu), n});
  }
  return result;
}

IoUPairs ComputeIoUPairs(const OverlapMatrix& matrix) {
  IoUPairs out;
  out.reserve(matrix.pairs.size());
  for (const PairCount& pc : matrix.pairs) {
    const std::uint64_t uni =
        matrix.gt_areas.at(pc.gt) + matrix.pred_areas.at(pc.pred) -
        pc.intersection;
    out.push_back({pc.gt, pc.pred,
                   static_cast<double>(pc.intersection) /
                       static_cast<double>(uni)});
  }
  return out;
}

BinaryScores PixelBinaryScores(const OverlapMatrix& matrix) {
  std::uint64_t inter = 0;
  std::uint64_t fg_gt = 0;
  std::uint64_t fg_pred = 0;
  for (const PairCount& pc : matrix.pairs) inter += pc.intersection;
  for (const auto& [id, n] : matrix.gt_areas) fg_gt += n;
  for (const auto& [id, n] : matrix.pred_areas) fg_pred += n;
  if (fg_gt == 0 && fg_pred == 0) return {1.0, 1.0};
  const std::uint64_t uni = fg_gt + fg_pred - inter;
  return {static_cast<double>(inter) / static_cast<double>(uni),
          2.0 * static_cast<double>(inter) /
              static_cast<double>(fg_gt + fg_pred)};
}

BinaryScores PixelBinaryScores(const LabelGrid& gt, const LabelGrid& pred) {
  return PixelBinaryScores(JointHistogram(gt, pred));
}

}  // namespace softpq
