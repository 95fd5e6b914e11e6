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

#ifndef SOFTPQ_PERTURB_H_
#define SOFTPQ_PERTURB_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "softpq/label_grid.h"

namespace softpq {

// Regular grid of equal disks. The image is (rows * spacing + 1) x
// (cols * spacing + 1) and disk (i, j) is centred at
// (i * spacing + spacing / 2, j * spacing + spacing / 2).
struct DiskGridSpec {
  std::size_t rows = 5;
  std::size_t cols = 5;
  int radius = 18;
  int spacing = 51;

  // Throws InvalidArgument unless rows, cols >= 1, radius >= 0 and
  // spacing > 2 * radius.
  void Validate() const;
};

// Ids 1..rows*cols in row-major placement order. A disk holds the pixels whose
// squared distance to its centre is <= radius^2.
LabelGrid MakeDiskGrid(const DiskGridSpec& spec);

enum class MorphOp { kErode, kDilate };

// Per-instance morphology with the 4-connected cross, applied `iterations`
// times. Erosion clears instance pixels with a 4-neighbour outside the
// instance (pixels beyond the image border count as outside). Dilation grows
// instances into background only; a pixel claimed by several instances goes
// to the smallest id.
LabelGrid MorphInstances(const LabelGrid& grid, MorphOp op, int iterations);

struct PerturbResult {
  LabelGrid grid;
  // Human-readable notes about instances that could not be perturbed as
  // requested.
  std::vector<std::string> notes;
};

// Splits round(fraction * N) instances (chosen by a seeded shuffle) into
// `fragments` parts with vertical cuts equally spaced across each instance's
// bounding box. gap = 1 clears the first column of every fragment after the
// first; gap = 0 keeps every pixel. Fragments of split instances receive fresh
// ids, assigned in ascending original id then left-to-right order.
PerturbResult SplitInstances(const LabelGrid& grid, int fragments,
                             double fraction, int gap, std::uint64_t seed);

// Places `count` disks of `radius` entirely on background pixels with fresh
// ids. Each disk gets up to 1000 seeded placement attempts; InvalidArgument
// when none fits.
LabelGrid AddGhosts(const LabelGrid& grid, int count, int radius,
                    std::uint64_t seed);

// Keeps, for each instance, the ceil(keep_fraction * area) pixels nearest the
// instance centroid (ties in row-major order).
LabelGrid PartialMask(const LabelGrid& grid, double keep_fraction);

enum class PerturbKind { kErode, kDilate, kSplit, kGhost, kPartial };

std::string_view PerturbKindName(PerturbKind kind);
PerturbKind ParsePerturbKind(std::string_view name);

struct PerturbSpec {
  PerturbKind kind = PerturbKind::kErode;
  int iterations = 1;
  int fragments = 2;
  double fraction = 1.0;
  int gap = 1;
  int ghost_count = 3;
  int ghost_radius = 10;
  double keep_fraction = 0.5;
  std::uint64_t seed = 0;

  void Validate() const;
};

PerturbResult ApplyPerturbation(const LabelGrid& grid, const PerturbSpec& spec);

// round-half-away-from-zero(fraction * total), clamped to [0, total].
std::size_t CountForFraction(double fraction, std::size_t total);

}  // namespace softpq

#endif  // SOFTPQ_PERTURB_H_
