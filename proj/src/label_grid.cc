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

#include "softpq/label_grid.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "softpq/errors.h"

namespace softpq {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

// Cursor over the PGM header: skips whitespace and '#' comment lines.
class HeaderReader {
 public:
  HeaderReader(std::string_view bytes, std::size_t pos)
      : bytes_(bytes), pos_(pos) {}

  std::size_t pos() const { return pos_; }

  void SkipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      if (IsSpace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::uint64_t ReadUnsigned(const char* field) {
    SkipSpaceAndComments();
    const std::size_t start = pos_;
    std::uint64_t value = 0;
    while (pos_ < bytes_.size() &&
           std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + static_cast<std::uint64_t>(bytes_[pos_] - '0');
      if (value > std::numeric_limits<std::uint32_t>::max()) {
        throw FormatError(std::string("PGM ") + field + " too large", start);
      }
      ++pos_;
    }
    if (pos_ == start) {
      throw FormatError(std::string("PGM header: expected ") + field, start);
    }
    return value;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_;
};

LabelGrid ReadPgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw FormatError("not a binary PGM: missing P5 magic", 0);
  }
  HeaderReader header(bytes, 2);
  const std::uint64_t width = header.ReadUnsigned("width");
  const std::uint64_t height = header.ReadUnsigned("height");
  const std::uint64_t maxval = header.ReadUnsigned("maxval");
  std::size_t pos = header.pos();
  if (width == 0 || height == 0) {
    throw FormatError("PGM dimensions must be positive", 2);
  }
  if (maxval == 0 || maxval > 65535) {
    throw FormatError("PGM maxval must be in 1..65535", pos);
  }
  if (pos >= bytes.size() || !IsSpace(bytes[pos])) {
    throw FormatError("PGM header must end with one whitespace byte", pos);
  }
  ++pos;

  const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
  const std::size_t count = static_cast<std::size_t>(width * height);
  const std::size_t needed = count * sample_bytes;
  if (bytes.size() - pos < needed) {
    throw FormatError("truncated PGM data: expected " +
                          std::to_string(needed) + " sample bytes, found " +
                          std::to_string(bytes.size() - pos),
                      bytes.size());
  }
  std::vector<LabelId> labels(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = pos + i * sample_bytes;
    LabelId v = static_cast<unsigned char>(bytes[at]);
    if (sample_bytes == 2) {
      v = (v << 8) | static_cast<unsigned char>(bytes[at + 1]);
    }
    if (v > maxval) {
      throw FormatError("PGM sample " + std::to_string(v) +
                            " exceeds maxval " + std::to_string(maxval),
                        at);
    }
    labels[i] = v;
  }
  return LabelGrid(static_cast<std::size_t>(height),
                   static_cast<std::size_t>(width), std::move(labels));
}

LabelGrid ReadAscii(std::string_view bytes) {
  std::vector<LabelId> labels;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t line_start = pos;
    std::size_t line_end = bytes.find('\n', pos);
    if (line_end == std::string_view::npos) line_end = bytes.size();
    std::size_t row_len = 0;
    std::size_t i = line_start;
    while (i < line_end) {
      const char c = bytes[i];
      if (c == ' ' || c == '\t' || c == '\r') {
        ++i;
        continue;
      }
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        throw FormatError(std::string("unexpected character '") + c +
                              "' in ASCII label matrix",
                          i);
      }
      const std::size_t start = i;
      std::uint64_t value = 0;
      while (i < line_end && std::isdigit(static_cast<unsigned char>(bytes[i]))) {
        value = value * 10 + static_cast<std::uint64_t>(bytes[i] - '0');
        if (value > std::numeric_limits<LabelId>::max()) {
          throw FormatError("label exceeds 32-bit range", start);
        }
        ++i;
      }
      labels.push_back(static_cast<LabelId>(value));
      ++row_len;
    }
    pos = line_end + 1;
    if (row_len == 0) {
      // Blank lines are tolerated only at the end of the stream.
      const bool rest_blank = std::all_of(
          bytes.begin() + static_cast<std::ptrdiff_t>(std::min(pos, bytes.size())),
          bytes.end(), IsSpace);
      if (rest_blank) break;
      throw FormatError("empty row in ASCII label matrix", line_start);
    }
    if (height == 0) {
      width = row_len;
    } else if (row_len != width) {
      throw FormatError("ragged ASCII label matrix: row " +
                            std::to_string(height) + " has " +
                            std::to_string(row_len) + " values, expected " +
                            std::to_string(width),
                        line_start);
    }
    ++height;
  }
  if (height == 0) throw FormatError("empty ASCII label matrix", 0);
  return LabelGrid(height, width, std::move(labels));
}

std::string ReadAll(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

LabelGrid::LabelGrid(std::size_t height, std::size_t width)
    : LabelGrid(height, width, std::vector<LabelId>(height * width, 0)) {}

LabelGrid::LabelGrid(std::size_t height, std::size_t width,
                     std::vector<LabelId> labels)
    : height_(height), width_(width), labels_(std::move(labels)) {
  if (height_ == 0 || width_ == 0) {
    throw InvalidArgument("label grid must be at least 1x1, got " +
                          ShapeString());
  }
  if (labels_.size() != height_ * width_) {
    throw InvalidArgument("label buffer holds " +
                          std::to_string(labels_.size()) +
                          " values but shape is " + ShapeString());
  }
}

LabelGrid LabelGrid::FromRows(const std::vector<std::vector<LabelId>>& rows) {
  if (rows.empty()) throw InvalidArgument("label grid needs at least one row");
  const std::size_t width = rows.front().size();
  std::vector<LabelId> labels;
  labels.reserve(rows.size() * width);
  for (const auto& row : rows) {
    if (row.size() != width) throw InvalidArgument("ragged label rows");
    labels.insert(labels.end(), row.begin(), row.end());
  }
  return LabelGrid(rows.size(), width, std::move(labels));
}

std::string LabelGrid::ShapeString() const {
  return std::to_string(height_) + "x" + std::to_string(width_);
}

LabelId LabelGrid::MaxId() const {
  return labels_.empty() ? 0 : *std::max_element(labels_.begin(), labels_.end());
}

LabelStats ComputeStats(const LabelGrid& grid) {
  LabelStats stats;
  for (LabelId id : grid.labels()) {
    if (id != kBackground) ++stats.areas[id];
  }
  stats.instance_count = stats.areas.size();
  stats.id_list.reserve(stats.areas.size());
  for (const auto& [id, area] : stats.areas) stats.id_list.push_back(id);
  return stats;
}

LabelGrid RelabelSequential(const LabelGrid& grid) {
  std::unordered_map<LabelId, LabelId> remap;
  std::vector<LabelId> out(grid.labels().begin(), grid.labels().end());
  LabelId next = 1;
  for (LabelId& id : out) {
    if (id == kBackground) continue;
    auto [it, inserted] = remap.try_emplace(id, next);
    if (inserted) ++next;
    id = it->second;
  }
  return LabelGrid(grid.height(), grid.width(), std::move(out));
}

void CheckSameShape(const LabelGrid& a, const LabelGrid& b) {
  if (!a.SameShape(b)) {
    throw DimensionMismatch("label grid shapes differ: ground truth " +
                            a.ShapeString() + " vs prediction " +
                            b.ShapeString());
  }
}

ImageFormat FormatForPath(std::string_view path) {
  if (path.size() >= 4) {
    std::string ext(path.substr(path.size() - 4));
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
    if (ext == ".pgm") return ImageFormat::kPgmBinary;
  }
  return ImageFormat::kAsciiMatrix;
}

LabelGrid ReadLabelImage(std::string_view bytes, ImageFormat format) {
  return format == ImageFormat::kPgmBinary ? ReadPgm(bytes) : ReadAscii(bytes);
}

LabelGrid ReadLabelImage(std::istream& in, ImageFormat format) {
  const std::string bytes = ReadAll(in);
  return ReadLabelImage(bytes, format);
}

LabelGrid ReadLabelFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open label image: " + path);
  try {
    return ReadLabelImage(in, FormatForPath(path));
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what(), e.offset());
  }
}

std::string WriteLabelImage(const LabelGrid& grid, ImageFormat format) {
  std::string out;
  if (format == ImageFormat::kPgmBinary) {
    const LabelId max_id = grid.MaxId();
    if (max_id > 65535) {
      throw InvalidArgument("label id " + std::to_string(max_id) +
                            " does not fit in a 16-bit PGM");
    }
    const bool wide = max_id > 255;
    out = "P5\n" + std::to_string(grid.width()) + " " +
          std::to_string(grid.height()) + "\n" + (wide ? "65535" : "255") +
          "\n";
    out.reserve(out.size() + grid.size() * (wide ? 2 : 1));
    for (LabelId id : grid.labels()) {
      if (wide) out.push_back(static_cast<char>((id >> 8) & 0xff));
      out.push_back(static_cast<char>(id & 0xff));
    }
    return out;
  }
  std::ostringstream os;
  for (std::size_t r = 0; r < grid.height(); ++r) {
    for (std::size_t c = 0; c < grid.width(); ++c) {
      if (c) os << ' ';
      os << grid.at(r, c);
    }
    os << '\n';
  }
  return os.str();
}

void WriteLabelFile(const LabelGrid& grid, const std::string& path) {
  const std::string bytes = WriteLabelImage(grid, FormatForPath(path));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path);
}

}  // namespace softpq
