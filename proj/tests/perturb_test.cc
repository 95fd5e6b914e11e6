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

#include <cmath>

#include <gtest/gtest.h>
#include "softpq/errors.h"
#include "softpq/metrics.h"
#include "test_support.h"

namespace softpq {
namespace {

std::size_t DiskArea(int r) {
  std::size_t n = 0;
  for (int x = -r; x <= r; ++x) {
    for (int y = -r; y <= r; ++y) n += x * x + y * y <= r * r;
  }
  return n;
}

bool Subset(const LabelGrid& inner, const LabelGrid& outer) {
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (inner.labels()[i] && inner.labels()[i] != outer.labels()[i]) {
      return false;
    }
  }
  return true;
}

TEST(MakeDiskGridTest, DefaultSpec) {
  const LabelGrid g = MakeDiskGrid(DiskGridSpec{});
  EXPECT_EQ(g.height(), 256u);
  EXPECT_EQ(g.width(), 256u);
  const LabelStats s = ComputeStats(g);
  EXPECT_EQ(s.instance_count, 25u);
  EXPECT_EQ(s.id_list.front(), 1u);
  EXPECT_EQ(s.id_list.back(), 25u);
  for (const auto& [id, area] : s.areas) EXPECT_EQ(area, DiskArea(18));
  // Row-major placement: id 2 sits to the right of id 1.
  EXPECT_EQ(g.at(25, 25), 1u);
  EXPECT_EQ(g.at(25, 76), 2u);
  EXPECT_EQ(g.at(76, 25), 6u);
}

TEST(MakeDiskGridTest, SingleDisk) {
  DiskGridSpec spec;
  spec.rows = spec.cols = 1;
  spec.radius = 7;
  spec.spacing = 20;
  const LabelStats s = ComputeStats(MakeDiskGrid(spec));
  ASSERT_EQ(s.instance_count, 1u);
  EXPECT_EQ(s.areas.at(1), DiskArea(7));
}

TEST(MakeDiskGridTest, RejectsTouchingDisks) {
  DiskGridSpec spec;
  spec.spacing = 36;
  EXPECT_THROW(MakeDiskGrid(spec), InvalidArgument);
  spec = DiskGridSpec{};
  spec.rows = 0;
  EXPECT_THROW(MakeDiskGrid(spec), InvalidArgument);
}

TEST(MorphInstancesTest, ZeroIterationsIsIdentity) {
  const LabelGrid g = MakeDiskGrid(DiskGridSpec{});
  EXPECT_EQ(MorphInstances(g, MorphOp::kErode, 0), g);
  EXPECT_EQ(MorphInstances(g, MorphOp::kDilate, 0), g);
  EXPECT_THROW(MorphInstances(g, MorphOp::kErode, -1), InvalidArgument);
}

TEST(MorphInstancesTest, ErodeSquareToCentre) {
  LabelGrid g(5, 5);
  for (std::size_t r = 1; r <= 3; ++r) {
    for (std::size_t c = 1; c <= 3; ++c) g.at(r, c) = 4;
  }
  LabelGrid expected(5, 5);
  expected.at(2, 2) = 4;
  EXPECT_EQ(MorphInstances(g, MorphOp::kErode, 1), expected);
}

TEST(MorphInstancesTest, ErosionMatchesNaiveOracle) {
  LabelGrid oracle = MakeDiskGrid(DiskGridSpec{});
  LabelGrid fast = oracle;
  for (int step = 1; step <= 20; ++step) {
    oracle = testing::NaiveErode(oracle);
    fast = MorphInstances(fast, MorphOp::kErode, 1);
    ASSERT_EQ(fast, oracle) << "step " << step;
  }
}

TEST(MorphInstancesTest, DiskOfRadiusRVanishesAfterRPlusOneErosions) {
  // The cross element removes an L1 diamond per step; only the centre of a
  // radius-r disk survives r steps.
  for (int r : {3, 6, 18}) {
    DiskGridSpec spec;
    spec.rows = spec.cols = 1;
    spec.radius = r;
    spec.spacing = 2 * r + 3;
    const LabelGrid disk = MakeDiskGrid(spec);
    LabelGrid oracle = disk;
    for (int i = 0; i < r; ++i) oracle = testing::NaiveErode(oracle);
    const LabelGrid after_r = MorphInstances(disk, MorphOp::kErode, r);
    EXPECT_EQ(after_r, oracle);
    EXPECT_EQ(ComputeStats(after_r).areas.at(1), 1u);
    EXPECT_EQ(ComputeStats(MorphInstances(disk, MorphOp::kErode, r + 1))
                  .instance_count,
              0u);
  }
}

TEST(MorphInstancesTest, DilationConflictGoesToSmallerId) {
  EXPECT_EQ(MorphInstances(LabelGrid::FromRows({{3, 0, 2}}), MorphOp::kDilate, 1),
            LabelGrid::FromRows({{3, 2, 2}}));
  EXPECT_EQ(MorphInstances(LabelGrid::FromRows({{0, 0, 0}, {0, 5, 0}}),
                           MorphOp::kDilate, 1),
            LabelGrid::FromRows({{0, 5, 0}, {5, 5, 5}}));
}

TEST(MorphInstancesTest, MonotoneAndDisjoint) {
  const LabelGrid g = MakeDiskGrid(DiskGridSpec{});
  LabelGrid eroded = g, dilated = g;
  for (int i = 0; i < 12; ++i) {
    const LabelGrid e = MorphInstances(eroded, MorphOp::kErode, 1);
    const LabelGrid d = MorphInstances(dilated, MorphOp::kDilate, 1);
    EXPECT_TRUE(Subset(e, eroded));
    EXPECT_TRUE(Subset(dilated, d));
    eroded = e;
    dilated = d;
  }
  EXPECT_EQ(ComputeStats(dilated).instance_count, 25u);
}

TEST(SplitInstancesTest, NoOps) {
  const LabelGrid g = MakeDiskGrid(DiskGridSpec{});
  EXPECT_EQ(SplitInstances(g, 1, 1.0, 1, 0).grid, g);
  EXPECT_EQ(SplitInstances(g, 3, 0.0, 1, 0).grid, g);
  EXPECT_THROW(SplitInstances(g, 0, 1.0, 0, 0), InvalidArgument);
  EXPECT_THROW(SplitInstances(g, 2, 1.5, 0, 0), InvalidArgument);
}

TEST(SplitInstancesTest, FullSplitWithoutGapPartitions) {
  const LabelGrid g = MakeDiskGrid(DiskGridSpec{});
  const PerturbResult r = SplitInstances(g, 2, 1.0, 0, 0);
  EXPECT_TRUE(r.notes.empty());
  EXPECT_EQ(ComputeStats(r.grid).instance_count, 50u);
  for (std::size_t i = 0; i < g.size(); ++i) {
    ASSERT_EQ(g.labels()[i] != 0, r.grid.labels()[i] != 0);
  }
  // Fresh ids follow the original maximum.
  EXPECT_EQ(ComputeStats(r.grid).id_list.front(), 26u);
}

TEST(SplitInstancesTest, GapSplitDropsBelowHalfIoU) {
  const LabelGrid g = MakeDiskGrid(DiskGridSpec{});
  const LabelGrid pred = SplitInstances(g, 2, 1.0, 1, 0).grid;
  EXPECT_EQ(ComputeStats(pred).instance_count, 50u);
  for (const auto& [key, iou] : testing::NaiveIoU(g, pred)) {
    ASSERT_LT(iou, 0.5);
  }
  EXPECT_EQ(PanopticQuality(g, pred).pq, 0.0);
  EXPECT_GT(SoftPQ(g, pred, SoftPQConfig{}), 0.0);
}

TEST(SplitInstancesTest, PartialFractionUsesRoundHalfAway) {
  EXPECT_EQ(CountForFraction(0.5, 25), 13u);
  EXPECT_EQ(CountForFraction(0.1, 25), 3u);
  EXPECT_EQ(CountForFraction(0.2, 25), 5u);
  EXPECT_EQ(CountForFraction(1.0, 25), 25u);
  const LabelGrid g = MakeDiskGrid(DiskGridSpec{});
  const LabelGrid pred = SplitInstances(g, 3, 0.2, 1, 42).grid;
  EXPECT_EQ(ComputeStats(pred).instance_count, 20u + 5u * 3u);
}

TEST(SplitInstancesTest, SeedDeterminesChoice) {
  const LabelGrid g = MakeDiskGrid(DiskGridSpec{});
  EXPECT_EQ(SplitInstances(g, 2, 0.4, 1, 9).grid,
            SplitInstances(g, 2, 0.4, 1, 9).grid);
  EXPECT_NE(SplitInstances(g, 2, 0.4, 1, 9).grid,
            SplitInstances(g, 2, 0.4, 1, 10).grid);
}

TEST(SplitInstancesTest, TooNarrowInstancesAreNoted) {
  const LabelGrid g = LabelGrid::FromRows({{1, 1, 0, 2, 2, 2, 2, 2}});
  const PerturbResult r = SplitInstances(g, 3, 1.0, 0, 0);
  ASSERT_EQ(r.notes.size(), 1u);
  EXPECT_NE(r.notes[0].find("instance 1"), std::string::npos);
  EXPECT_EQ(r.grid, LabelGrid::FromRows({{1, 1, 0, 3, 4, 4, 5, 5}}));
}

TEST(AddGhostsTest, PlacesDisksOnBackground) {
  const LabelGrid g = MakeDiskGrid(DiskGridSpec{});
  EXPECT_EQ(AddGhosts(g, 0, 10, 1), g);
  const LabelGrid ghosts = AddGhosts(g, 3, 10, 1);
  const LabelStats s = ComputeStats(ghosts);
  EXPECT_EQ(s.instance_count, 28u);
  for (LabelId id : {26u, 27u, 28u}) EXPECT_EQ(s.areas.at(id), DiskArea(10));
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.labels()[i]) ASSERT_EQ(ghosts.labels()[i], g.labels()[i]);
  }
  EXPECT_EQ(AddGhosts(g, 3, 10, 1), ghosts);
}

TEST(AddGhostsTest, LowerF1ButKeepMatchQuality) {
  const LabelGrid gt = MakeDiskGrid(DiskGridSpec{});
  const LabelGrid pred = MorphInstances(gt, MorphOp::kErode, 2);
  // Ghost positions come from the ground truth's background.
  const LabelGrid placed = AddGhosts(gt, 3, 8, 5);
  LabelGrid ghosted = pred;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt.labels()[i] && placed.labels()[i]) {
      ghosted.mutable_labels()[i] = placed.labels()[i];
    }
  }
  const ScoreReport before = EvaluateAll(gt, pred, SoftPQConfig{});
  const ScoreReport after = EvaluateAll(gt, ghosted, SoftPQConfig{});
  EXPECT_EQ(after.fp, before.fp + 3);
  EXPECT_LT(after.rq_f1, before.rq_f1);
  EXPECT_EQ(after.sq, before.sq);
  EXPECT_EQ(after.per_anchor_modified, before.per_anchor_modified);
}

TEST(AddGhostsTest, FailsWithoutRoom) {
  LabelGrid full(10, 10);
  for (LabelId& v : full.mutable_labels()) v = 1;
  EXPECT_THROW(AddGhosts(full, 1, 2, 0), InvalidArgument);
  EXPECT_THROW(AddGhosts(LabelGrid(3, 3), 1, 2, 0), InvalidArgument);
}

TEST(PartialMaskTest, Extremes) {
  const LabelGrid g = MakeDiskGrid(DiskGridSpec{});
  EXPECT_EQ(PartialMask(g, 1.0), g);
  EXPECT_EQ(ComputeStats(PartialMask(g, 0.0)).instance_count, 0u);
  EXPECT_THROW(PartialMask(g, 1.5), InvalidArgument);
}

TEST(PartialMaskTest, HalfDiskIoUIsKeptOverArea) {
  const LabelGrid g = MakeDiskGrid(DiskGridSpec{});
  const LabelGrid half = PartialMask(g, 0.5);
  const std::size_t area = DiskArea(18);
  const auto kept = static_cast<std::size_t>(std::ceil(0.5 * area));
  EXPECT_TRUE(Subset(half, g));
  for (const auto& [key, iou] : testing::NaiveIoU(g, half)) {
    ASSERT_EQ(key.first, key.second);
    ASSERT_DOUBLE_EQ(iou, static_cast<double>(kept) / area);
  }
}

TEST(PerturbSpecTest, DispatchAndValidation) {
  const LabelGrid g = MakeDiskGrid(DiskGridSpec{});
  PerturbSpec spec;
  spec.kind = ParsePerturbKind("split");
  spec.fragments = 2;
  spec.fraction = 1.0;
  EXPECT_EQ(ComputeStats(ApplyPerturbation(g, spec).grid).instance_count, 50u);
  spec.fragments = 6;
  EXPECT_THROW(ApplyPerturbation(g, spec), InvalidArgument);
  EXPECT_THROW(ParsePerturbKind("blur"), InvalidArgument);
  EXPECT_EQ(PerturbKindName(PerturbKind::kGhost), "ghost");
}

}  // namespace
}  // namespace softpq
