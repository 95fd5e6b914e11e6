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

#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include "softpq/errors.h"
#include "softpq/perturb.h"
#include "test_support.h"

namespace softpq {
namespace {

std::string Bytes(std::initializer_list<int> values) {
  std::string out;
  for (int v : values) out.push_back(static_cast<char>(v));
  return out;
}

TEST(ReadLabelImageTest, DecodesSixteenBitPgm) {
  const std::string data =
      "P5 2 2 65535\n" + Bytes({0, 0, 0, 1, 0, 1, 0, 0});
  const LabelGrid grid = ReadLabelImage(data, ImageFormat::kPgmBinary);
  EXPECT_EQ(grid, LabelGrid::FromRows({{0, 1}, {1, 0}}));
}

TEST(ReadLabelImageTest, DecodesAsciiMatrix) {
  EXPECT_EQ(ReadLabelImage(std::string("0 1\n1 0\n"), ImageFormat::kAsciiMatrix),
            LabelGrid::FromRows({{0, 1}, {1, 0}}));
  // Trailing newline is optional.
  EXPECT_EQ(ReadLabelImage(std::string("0 1\n1 0"), ImageFormat::kAsciiMatrix),
            LabelGrid::FromRows({{0, 1}, {1, 0}}));
}

TEST(ReadLabelImageTest, SkipsHeaderComments) {
  const std::string data = "P5\n# made by hand\n2 1\n# max\n255\n" +
                           Bytes({3, 4});
  EXPECT_EQ(ReadLabelImage(data, ImageFormat::kPgmBinary),
            LabelGrid::FromRows({{3, 4}}));
}

TEST(ReadLabelImageTest, WideMaxvalWithNarrowSamplesIsTruncated) {
  const std::string data = "P5 2 2 300\n" + Bytes({0, 1, 1, 0});
  try {
    ReadLabelImage(data, ImageFormat::kPgmBinary);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), data.size());
    EXPECT_NE(std::string(e.what()).find("truncated"), std::string::npos);
  }
}

TEST(ReadLabelImageTest, RejectsMalformedInputWithOffset) {
  EXPECT_THROW(ReadLabelImage(std::string("P2 1 1 255\n0"),
                              ImageFormat::kPgmBinary),
               FormatError);
  EXPECT_THROW(ReadLabelImage(std::string("P5 1 1\n"), ImageFormat::kPgmBinary),
               FormatError);
  EXPECT_THROW(ReadLabelImage("P5 1 1 70000\n" + Bytes({0, 0}),
                              ImageFormat::kPgmBinary),
               FormatError);
  try {
    ReadLabelImage("P5 2 1 10\n" + Bytes({3, 11}), ImageFormat::kPgmBinary);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 11u);  // second sample
  }
  try {
    ReadLabelImage(std::string("0 1\n1\n"), ImageFormat::kAsciiMatrix);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
  EXPECT_THROW(ReadLabelImage(std::string("0 -1\n"), ImageFormat::kAsciiMatrix),
               FormatError);
  EXPECT_THROW(ReadLabelImage(std::string(""), ImageFormat::kAsciiMatrix),
               FormatError);
  EXPECT_THROW(ReadLabelImage(std::string("4294967296\n"),
                              ImageFormat::kAsciiMatrix),
               FormatError);
}

TEST(WriteLabelImageTest, PgmRejectsIdsAbove16Bits) {
  LabelGrid g(1, 1);
  g.at(0, 0) = 65536;
  EXPECT_THROW(WriteLabelImage(g, ImageFormat::kPgmBinary), InvalidArgument);
  // ASCII has no such limit.
  EXPECT_EQ(ReadLabelImage(WriteLabelImage(g, ImageFormat::kAsciiMatrix),
                           ImageFormat::kAsciiMatrix),
            g);
}

TEST(WriteLabelImageTest, PgmHeaderLayout) {
  const std::string out = WriteLabelImage(LabelGrid::FromRows({{0, 1, 2}}),
                                          ImageFormat::kPgmBinary);
  EXPECT_EQ(out, "P5\n3 1\n255\n" + Bytes({0, 1, 2}));
  LabelGrid wide(1, 1);
  wide.at(0, 0) = 258;
  EXPECT_EQ(WriteLabelImage(wide, ImageFormat::kPgmBinary),
            "P5\n1 1\n65535\n" + Bytes({1, 2}));
}

TEST(LabelGridPropertyTest, WriteReadRoundTripsBothFormats) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t h = std::uniform_int_distribution<std::size_t>(1, 512)(rng);
    const std::size_t w = std::uniform_int_distribution<std::size_t>(1, 512)(rng);
    const LabelId max_id = trial % 3 == 0 ? 255 : 65535;
    std::uniform_int_distribution<LabelId> id(0, max_id);
    LabelGrid g(h, w);
    for (LabelId& v : g.mutable_labels()) v = id(rng);
    for (ImageFormat f : {ImageFormat::kPgmBinary, ImageFormat::kAsciiMatrix}) {
      ASSERT_EQ(ReadLabelImage(WriteLabelImage(g, f), f), g)
          << "trial " << trial << " " << g.ShapeString();
    }
  }
}

TEST(RelabelSequentialTest, FirstOccurrenceOrder) {
  EXPECT_EQ(RelabelSequential(LabelGrid::FromRows({{0, 7}, {7, 3}})),
            LabelGrid::FromRows({{0, 1}, {1, 2}}));
  const LabelGrid zeros(3, 4);
  EXPECT_EQ(RelabelSequential(zeros), zeros);
  const LabelGrid seq = LabelGrid::FromRows({{1, 1, 2}, {0, 3, 2}});
  EXPECT_EQ(RelabelSequential(seq), seq);
}

TEST(RelabelSequentialTest, PreservesPartitionAndCount) {
  testing::GridFuzzer fuzz(11, 24, 40);
  for (int trial = 0; trial < 100; ++trial) {
    const LabelGrid g = fuzz.NextPair().second;
    const LabelGrid r = RelabelSequential(g);
    EXPECT_EQ(ComputeStats(r).instance_count, ComputeStats(g).instance_count);
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_EQ(g.labels()[i] == 0, r.labels()[i] == 0);
      for (std::size_t j = i + 1; j < g.size(); j += 7) {
        ASSERT_EQ(g.labels()[i] == g.labels()[j], r.labels()[i] == r.labels()[j]);
      }
    }
  }
}

TEST(StatsTest, CountsAndAreas) {
  const LabelStats s = ComputeStats(LabelGrid::FromRows({{0, 1}, {1, 2}}));
  EXPECT_EQ(s.instance_count, 2u);
  EXPECT_EQ(s.areas, (std::map<LabelId, std::uint64_t>{{1, 2}, {2, 1}}));
  EXPECT_EQ(s.id_list, (std::vector<LabelId>{1, 2}));

  const LabelStats empty = ComputeStats(LabelGrid(4, 4));
  EXPECT_EQ(empty.instance_count, 0u);
  EXPECT_TRUE(empty.areas.empty());
}

TEST(StatsTest, DiskGridFixtureHas25Instances) {
  const LabelGrid g = MakeDiskGrid(DiskGridSpec{});
  EXPECT_EQ(ComputeStats(g).instance_count, 25u);
  EXPECT_EQ(testing::CountComponents(g), 25u);
}

TEST(LabelGridTest, RejectsEmptyShapes) {
  EXPECT_THROW(LabelGrid(0, 3), InvalidArgument);
  EXPECT_THROW(LabelGrid(2, 2, std::vector<LabelId>(3)), InvalidArgument);
}

TEST(LabelGridTest, FormatFromExtension) {
  EXPECT_EQ(FormatForPath("a/b.PGM"), ImageFormat::kPgmBinary);
  EXPECT_EQ(FormatForPath("a.txt"), ImageFormat::kAsciiMatrix);
  EXPECT_EQ(FormatForPath("x"), ImageFormat::kAsciiMatrix);
}

}  // namespace
}  // namespace softpq
