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

#ifndef SOFTPQ_LABEL_GRID_H_
#define SOFTPQ_LABEL_GRID_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace softpq {

using LabelId = std::uint32_t;

inline constexpr LabelId kBackground = 0;

// Dense row-major grid of instance ids. Every pixel carries exactly one id, so
// instance masks are disjoint by construction. Id 0 is background.
class LabelGrid {
 public:
  // Zero-filled grid. Throws InvalidArgument unless height, width >= 1.
  LabelGrid(std::size_t height, std::size_t width);
  // Takes ownership of `labels`, which must hold height * width entries.
  LabelGrid(std::size_t height, std::size_t width,
            std::vector<LabelId> labels);
  // Row-major nested initializer; all rows must have equal length.
  static LabelGrid FromRows(const std::vector<std::vector<LabelId>>& rows);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return labels_.size(); }

  LabelId at(std::size_t row, std::size_t col) const {
    return labels_[row * width_ + col];
  }
  LabelId& at(std::size_t row, std::size_t col) {
    return labels_[row * width_ + col];
  }

  std::span<const LabelId> labels() const { return labels_; }
  std::span<LabelId> mutable_labels() { return labels_; }

  bool SameShape(const LabelGrid& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }
  std::string ShapeString() const;

  LabelId MaxId() const;

  friend bool operator==(const LabelGrid&, const LabelGrid&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<LabelId> labels_;
};

struct LabelStats {
  std::size_t instance_count = 0;
  // Pixel count per nonzero id; never contains id 0 or a zero area.
  std::map<LabelId, std::uint64_t> areas;
  // Sorted ascending.
  std::vector<LabelId> id_list;
};

LabelStats ComputeStats(const LabelGrid& grid);

// Remaps nonzero ids to 1..K in order of first row-major occurrence.
LabelGrid RelabelSequential(const LabelGrid& grid);

// Throws DimensionMismatch naming both shapes unless `a` and `b` agree.
void CheckSameShape(const LabelGrid& a, const LabelGrid& b);

enum class ImageFormat { kPgmBinary, kAsciiMatrix };

// Picks kPgmBinary for a ".pgm" extension (case-insensitive), otherwise
// kAsciiMatrix.
ImageFormat FormatForPath(std::string_view path);

// Decoding raises FormatError with the failing byte offset.
LabelGrid ReadLabelImage(std::string_view bytes, ImageFormat format);
LabelGrid ReadLabelImage(std::istream& in, ImageFormat format);
LabelGrid ReadLabelFile(const std::string& path);

// PGM output uses the smallest maxval encoding that fits: maxval 255 with one
// byte per sample when every id is <= 255, else 65535 with two big-endian
// bytes. Ids above 65535 raise InvalidArgument.
std::string WriteLabelImage(const LabelGrid& grid, ImageFormat format);
void WriteLabelFile(const LabelGrid& grid, const std::string& path);

}  // namespace softpq

#endif  // SOFTPQ_LABEL_GRID_H_
