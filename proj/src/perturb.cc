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

#include "softpq/perturb.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "random.h"
#include "softpq/errors.h"

namespace softpq {
namespace {

constexpr int kGhostAttempts = 1000;

struct BoundingBox {
  std::size_t col_min = std::numeric_limits<std::size_t>::max();
  std::size_t col_max = 0;
};

LabelGrid ErodeOnce(const LabelGrid& in) {
  LabelGrid out = in;
  const std::size_t h = in.height();
  const std::size_t w = in.width();
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const LabelId id = in.at(r, c);
      if (id == kBackground) continue;
      const bool interior = r > 0 && r + 1 < h && c > 0 && c + 1 < w &&
                            in.at(r - 1, c) == id && in.at(r + 1, c) == id &&
                            in.at(r, c - 1) == id && in.at(r, c + 1) == id;
      if (!interior) out.at(r, c) = kBackground;
    }
  }
  return out;
}

LabelGrid DilateOnce(const LabelGrid& in) {
  LabelGrid out = in;
  const std::size_t h = in.height();
  const std::size_t w = in.width();
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      if (in.at(r, c) != kBackground) continue;
      LabelId best = kBackground;
      const auto consider = [&](LabelId id) {
        if (id != kBackground && (best == kBackground || id < best)) best = id;
      };
      if (r > 0) consider(in.at(r - 1, c));
      if (r + 1 < h) consider(in.at(r + 1, c));
      if (c > 0) consider(in.at(r, c - 1));
      if (c + 1 < w) consider(in.at(r, c + 1));
      out.at(r, c) = best;
    }
  }
  return out;
}

bool DiskFits(const LabelGrid& grid, long cr, long cc, int radius) {
  const long r2 = static_cast<long>(radius) * radius;
  for (long dr = -radius; dr <= radius; ++dr) {
    for (long dc = -radius; dc <= radius; ++dc) {
      if (dr * dr + dc * dc > r2) continue;
      if (grid.at(static_cast<std::size_t>(cr + dr),
                  static_cast<std::size_t>(cc + dc)) != kBackground) {
        return false;
      }
    }
  }
  return true;
}

void PaintDisk(LabelGrid& grid, long cr, long cc, int radius, LabelId id) {
  const long r2 = static_cast<long>(radius) * radius;
  for (long dr = -radius; dr <= radius; ++dr) {
    for (long dc = -radius; dc <= radius; ++dc) {
      if (dr * dr + dc * dc <= r2) {
        grid.at(static_cast<std::size_t>(cr + dr),
                static_cast<std::size_t>(cc + dc)) = id;
      }
    }
  }
}

LabelId NextFreshId(const LabelGrid& grid) {
  const LabelId max_id = grid.MaxId();
  if (max_id == std::numeric_limits<LabelId>::max()) {
    throw InvalidArgument("label id space exhausted");
  }
  return max_id + 1;
}

}  // namespace

void DiskGridSpec::Validate() const {
  if (rows == 0 || cols == 0) {
    throw InvalidArgument("disk grid needs at least one row and column");
  }
  if (radius < 0) throw InvalidArgument("disk radius must be >= 0");
  if (spacing <= 2 * radius) {
    throw InvalidArgument("disk spacing " + std::to_string(spacing) +
                          " must exceed twice the radius " +
                          std::to_string(radius));
  }
}

LabelGrid MakeDiskGrid(const DiskGridSpec& spec) {
  spec.Validate();
  const auto spacing = static_cast<std::size_t>(spec.spacing);
  LabelGrid grid(spec.rows * spacing + 1, spec.cols * spacing + 1);
  LabelId id = 1;
  for (std::size_t i = 0; i < spec.rows; ++i) {
    for (std::size_t j = 0; j < spec.cols; ++j) {
      PaintDisk(grid, static_cast<long>(i * spacing + spacing / 2),
                static_cast<long>(j * spacing + spacing / 2), spec.radius,
                id++);
    }
  }
  return grid;
}

LabelGrid MorphInstances(const LabelGrid& grid, MorphOp op, int iterations) {
  if (iterations < 0) throw InvalidArgument("iterations must be >= 0");
  LabelGrid out = grid;
  for (int i = 0; i < iterations; ++i) {
    out = op == MorphOp::kErode ? ErodeOnce(out) : DilateOnce(out);
  }
  return out;
}

std::size_t CountForFraction(double fraction, std::size_t total) {
  const double scaled = std::round(fraction * static_cast<double>(total));
  if (scaled <= 0.0) return 0;
  return std::min(total, static_cast<std::size_t>(scaled));
}

PerturbResult SplitInstances(const LabelGrid& grid, int fragments,
                             double fraction, int gap, std::uint64_t seed) {
  if (fragments < 1) throw InvalidArgument("fragments must be >= 1");
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw InvalidArgument("split fraction must lie in [0, 1]");
  }
  if (gap != 0 && gap != 1) throw InvalidArgument("split gap must be 0 or 1");

  PerturbResult result{grid, {}};
  if (fragments == 1) return result;

  std::map<LabelId, BoundingBox> boxes;
  for (std::size_t r = 0; r < grid.height(); ++r) {
    for (std::size_t c = 0; c < grid.width(); ++c) {
      const LabelId id = grid.at(r, c);
      if (id == kBackground) continue;
      BoundingBox& box = boxes[id];
      box.col_min = std::min(box.col_min, c);
      box.col_max = std::max(box.col_max, c);
    }
  }
  std::vector<LabelId> ids;
  for (const auto& [id, box] : boxes) ids.push_back(id);
  internal::SeededRng rng(seed);
  rng.Shuffle(ids);
  ids.resize(CountForFraction(fraction, ids.size()));
  std::sort(ids.begin(), ids.end());
  if (ids.empty()) return result;

  const auto k = static_cast<std::size_t>(fragments);
  LabelId next_id = NextFreshId(grid);
  for (LabelId id : ids) {
    const BoundingBox& box = boxes[id];
    const std::size_t width = box.col_max - box.col_min + 1;
    const std::size_t min_width = gap ? 2 * k - 1 : k;
    if (width < min_width) {
      result.notes.push_back("instance " + std::to_string(id) + " (width " +
                             std::to_string(width) + ") left unsplit: " +
                             std::to_string(fragments) +
                             " fragments do not fit");
      continue;
    }
    // Column offset (within the box) where fragment j starts.
    std::vector<std::size_t> starts(k + 1);
    for (std::size_t j = 0; j <= k; ++j) starts[j] = j * width / k;

    std::vector<LabelId> fragment_ids(k, kBackground);
    std::vector<bool> used(k, false);
    for (std::size_t r = 0; r < grid.height(); ++r) {
      for (std::size_t c = box.col_min; c <= box.col_max; ++c) {
        if (grid.at(r, c) != id) continue;
        const std::size_t offset = c - box.col_min;
        const auto j = static_cast<std::size_t>(
            std::upper_bound(starts.begin(), starts.end(), offset) -
            starts.begin() - 1);
        if (gap && j > 0 && offset == starts[j]) {
          result.grid.at(r, c) = kBackground;
          continue;
        }
        used[j] = true;
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (!used[j]) {
        result.notes.push_back("instance " + std::to_string(id) +
                               ": fragment " + std::to_string(j) +
                               " is empty");
        continue;
      }
      if (next_id == kBackground) throw InvalidArgument("label id space exhausted");
      fragment_ids[j] = next_id++;
    }
    for (std::size_t r = 0; r < grid.height(); ++r) {
      for (std::size_t c = box.col_min; c <= box.col_max; ++c) {
        if (grid.at(r, c) != id || result.grid.at(r, c) != id) continue;
        const std::size_t offset = c - box.col_min;
        const auto j = static_cast<std::size_t>(
            std::upper_bound(starts.begin(), starts.end(), offset) -
            starts.begin() - 1);
        result.grid.at(r, c) = fragment_ids[j];
      }
    }
  }
  return result;
}

LabelGrid AddGhosts(const LabelGrid& grid, int count, int radius,
                    std::uint64_t seed) {
  if (count < 0) throw InvalidArgument("ghost count must be >= 0");
  if (radius < 0) throw InvalidArgument("ghost radius must be >= 0");
  LabelGrid out = grid;
  if (count == 0) return out;
  const auto diameter = static_cast<std::size_t>(2 * radius + 1);
  if (grid.height() < diameter || grid.width() < diameter) {
    throw InvalidArgument("ghost of radius " + std::to_string(radius) +
                          " does not fit in a " + grid.ShapeString() +
                          " image");
  }
  internal::SeededRng rng(seed);
  const std::uint64_t row_span = grid.height() - diameter + 1;
  const std::uint64_t col_span = grid.width() - diameter + 1;
  LabelId next_id = NextFreshId(grid);
  for (int g = 0; g < count; ++g) {
    bool placed = false;
    for (int attempt = 0; attempt < kGhostAttempts && !placed; ++attempt) {
      const long cr = static_cast<long>(rng.Below(row_span)) + radius;
      const long cc = static_cast<long>(rng.Below(col_span)) + radius;
      if (DiskFits(out, cr, cc, radius)) {
        PaintDisk(out, cr, cc, radius, next_id++);
        placed = true;
      }
    }
    if (!placed) {
      throw InvalidArgument("could not place ghost " + std::to_string(g + 1) +
                            " of " + std::to_string(count) + " within " +
                            std::to_string(kGhostAttempts) +
                            " attempts: no background room");
    }
  }
  return out;
}

LabelGrid PartialMask(const LabelGrid& grid, double keep_fraction) {
  if (!(keep_fraction >= 0.0 && keep_fraction <= 1.0)) {
    throw InvalidArgument("keep fraction must lie in [0, 1]");
  }
  struct Accum {
    double row_sum = 0.0;
    double col_sum = 0.0;
    std::vector<std::size_t> pixels;  // row-major indices
  };
  std::map<LabelId, Accum> instances;
  const auto labels = grid.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kBackground) continue;
    Accum& a = instances[labels[i]];
    a.row_sum += static_cast<double>(i / grid.width());
    a.col_sum += static_cast<double>(i % grid.width());
    a.pixels.push_back(i);
  }
  LabelGrid out(grid.height(), grid.width());
  auto out_labels = out.mutable_labels();
  for (auto& [id, a] : instances) {
    const auto area = static_cast<double>(a.pixels.size());
    const double cr = a.row_sum / area;
    const double cc = a.col_sum / area;
    const auto dist2 = [&](std::size_t i) {
      const double dr = static_cast<double>(i / grid.width()) - cr;
      const double dc = static_cast<double>(i % grid.width()) - cc;
      return dr * dr + dc * dc;
    };
    // Pixels are already in row-major order, so a stable sort breaks ties.
    std::stable_sort(a.pixels.begin(), a.pixels.end(),
                     [&](std::size_t x, std::size_t y) {
                       return dist2(x) < dist2(y);
                     });
    const auto keep = std::min(
        a.pixels.size(),
        static_cast<std::size_t>(std::ceil(keep_fraction * area)));
    for (std::size_t k = 0; k < keep; ++k) out_labels[a.pixels[k]] = id;
  }
  return out;
}

std::string_view PerturbKindName(PerturbKind kind) {
  switch (kind) {
    case PerturbKind::kErode:
      return "erode";
    case PerturbKind::kDilate:
      return "dilate";
    case PerturbKind::kSplit:
      return "split";
    case PerturbKind::kGhost:
      return "ghost";
    case PerturbKind::kPartial:
      return "partial";
  }
  return "?";
}

PerturbKind ParsePerturbKind(std::string_view name) {
  for (PerturbKind kind :
       {PerturbKind::kErode, PerturbKind::kDilate, PerturbKind::kSplit,
        PerturbKind::kGhost, PerturbKind::kPartial}) {
    if (PerturbKindName(kind) == name) return kind;
  }
  throw InvalidArgument("unknown perturbation kind '" + std::string(name) +
                        "'");
}

void PerturbSpec::Validate() const {
  if (iterations < 0) throw InvalidArgument("iterations must be >= 0");
  if (fragments < 1 || fragments > 5) {
    throw InvalidArgument("fragments must lie in 1..5");
  }
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw InvalidArgument("split fraction must lie in [0, 1]");
  }
  if (gap != 0 && gap != 1) throw InvalidArgument("split gap must be 0 or 1");
  if (ghost_count < 0 || ghost_radius < 0) {
    throw InvalidArgument("ghost count and radius must be >= 0");
  }
  if (!(keep_fraction >= 0.0 && keep_fraction <= 1.0)) {
    throw InvalidArgument("keep fraction must lie in [0, 1]");
  }
}

PerturbResult ApplyPerturbation(const LabelGrid& grid,
                                const PerturbSpec& spec) {
  spec.Validate();
  switch (spec.kind) {
    case PerturbKind::kErode:
      return {MorphInstances(grid, MorphOp::kErode, spec.iterations), {}};
    case PerturbKind::kDilate:
      return {MorphInstances(grid, MorphOp::kDilate, spec.iterations), {}};
    case PerturbKind::kSplit:
      return SplitInstances(grid, spec.fragments, spec.fraction, spec.gap,
                            spec.seed);
    case PerturbKind::kGhost:
      return {AddGhosts(grid, spec.ghost_count, spec.ghost_radius, spec.seed),
              {}};
    case PerturbKind::kPartial:
      return {PartialMask(grid, spec.keep_fraction), {}};
  }
  throw InvalidArgument("unhandled perturbation kind");
}

}  // namespace softpq
