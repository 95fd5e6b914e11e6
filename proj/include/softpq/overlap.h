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

#ifndef SOFTPQ_OVERLAP_H_
#define SOFTPQ_OVERLAP_H_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "softpq/label_grid.h"

namespace softpq {

struct PairCount {
  LabelId gt;
  LabelId pred;
  std::uint64_t intersection;

  friend bool operator==(const PairCount&, const PairCount&) = default;
};

// Sparse GT x prediction confusion histogram. `pairs` holds only co-occurring
// nonzero label pairs, sorted by (gt, pred).
struct OverlapMatrix {
  std::vector<PairCount> pairs;
  std::map<LabelId, std::uint64_t> gt_areas;
  std::map<LabelId, std::uint64_t> pred_areas;

  // 0 when the pair never co-occurs.
  std::uint64_t Intersection(LabelId gt, LabelId pred) const;

  friend bool operator==(const OverlapMatrix&, const OverlapMatrix&) = default;
};

struct PairIoU {
  LabelId gt;
  LabelId pred;
  double iou;

  friend bool operator==(const PairIoU&, const PairIoU&) = default;
};

// One entry per stored intersection, same (gt, pred) order as the matrix.
using IoUPairs = std::vector<PairIoU>;

// Single pass over the pixels. With `threads` > 1 the rows are split into
// bands counted independently and merged; integer counts make the result
// identical to the sequential pass.
OverlapMatrix JointHistogram(const LabelGrid& gt, const LabelGrid& pred,
                             int threads = 1);
// Same over caller-owned row-major buffers of height * width ids each.
OverlapMatrix JointHistogram(std::span<const LabelId> gt,
                             std::span<const LabelId> pred, std::size_t height,
                             std::size_t width, int threads = 1);

IoUPairs ComputeIoUPairs(const OverlapMatrix& matrix);

struct BinaryScores {
  double pixel_iou = 0.0;
  double dice = 0.0;
};

// Foreground is any nonzero label. Both scores are 1.0 when both foregrounds
// are empty.
BinaryScores PixelBinaryScores(const OverlapMatrix& matrix);
BinaryScores PixelBinaryScores(const LabelGrid& gt, const LabelGrid& pred);

}  // namespace softpq

#endif  // SOFTPQ_OVERLAP_H_
