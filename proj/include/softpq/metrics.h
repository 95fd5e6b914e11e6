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

#ifndef SOFTPQ_METRICS_H_
#define SOFTPQ_METRICS_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "softpq/label_grid.h"
#include "softpq/overlap.h"

namespace softpq {

enum class Penalty { kSqrt, kLinear, kLog };

// Which side of a pair anchors the soft-match aggregation. kOver groups soft
// matches per ground-truth segment (fragmented predictions); kUnder groups
// them per predicted segment (merged predictions).
enum class Mode { kOver, kUnder };

std::string_view PenaltyName(Penalty penalty);
std::string_view ModeName(Mode mode);
// Throw InvalidArgument on unknown names.
Penalty ParsePenalty(std::string_view name);
Mode ParseMode(std::string_view name);

struct SoftPQConfig {
  // Pairs with lower < IoU < upper earn penalty-weighted partial credit.
  double lower = 0.05;
  // Pairs with IoU >= upper are match candidates.
  double upper = 0.5;
  Penalty penalty = Penalty::kSqrt;
  Mode mode = Mode::kOver;

  // Throws InvalidArgument unless 0 <= lower <= upper, lower < 1 and
  // 0.5 <= upper <= 1.
  void Validate() const;
  // e.g. "softpq_l0.05_h0.5_sqrt_over"
  std::string Name() const;

  friend bool operator==(const SoftPQConfig&, const SoftPQConfig&) = default;
};

// Weight applied to a segment's summed soft-match IoU given its soft-match
// count `n`:
//   sqrt   -> 1 / sqrt(n + 1)
//   linear -> 1 / (n + 1)
//   log    -> 1 / ln(n + 1)
// `n` must be >= 1; the soft term vanishes at n = 0 and the log weight is
// undefined there. Throws InvalidArgument for n = 0.
double PenaltyWeight(Penalty penalty, std::size_t n);

struct MatchedPair {
  LabelId gt;
  LabelId pred;
  double iou;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

struct SoftEntry {
  LabelId other;
  double iou;

  friend bool operator==(const SoftEntry&, const SoftEntry&) = default;
};

struct MatchResult {
  // One-to-one; sorted by gt id.
  std::vector<MatchedPair> matched_pairs;
  // Anchor id (gt for Mode::kOver, pred for Mode::kUnder) -> soft entries in
  // ascending order of the other id.
  std::map<LabelId, std::vector<SoftEntry>> soft_sets;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t gt_count = 0;
  std::size_t pred_count = 0;

  std::size_t m() const { return matched_pairs.size(); }
};

// Greedy one-to-one matching over pairs with IoU >= threshold: candidates are
// taken by descending IoU, ties broken by smaller gt id then smaller pred id.
// Candidates that lose to an earlier pick are returned in `demoted`.
struct GreedyMatching {
  std::vector<MatchedPair> matched;
  std::vector<MatchedPair> demoted;
};
GreedyMatching GreedyMatch(const IoUPairs& pairs, double threshold);

// Splits pairs into the hard matching (IoU >= upper, greedy one-to-one) and
// soft entries (lower < IoU < upper). Match candidates demoted by the
// one-to-one rule join the soft entries when their IoU also exceeds `lower`.
// TP/FP/FN come from the hard matching alone.
MatchResult ClassifyMatches(const IoUPairs& pairs, const LabelStats& gt_stats,
                            const LabelStats& pred_stats,
                            const SoftPQConfig& config);

struct ModifiedIoU {
  // Anchors with a match or at least one soft entry.
  std::map<LabelId, double> per_anchor;
  double total = 0.0;
};

// Per anchor: matched IoU + PenaltyWeight(n) * (sum of soft IoUs), where n is
// the anchor's soft-match count. The total sums over anchors in id order.
ModifiedIoU ComputeModifiedIoU(const MatchResult& match,
                               const SoftPQConfig& config);

struct F1Counts {
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

// 2 tp / (2 tp + fp + fn); 1.0 when both sides are empty.
F1Counts F1FromMatches(const MatchResult& match);

// Combines the modified IoU with the match counts:
//   both empty        -> 1.0
//   m = 0             -> total / gt_count (0.0 when there is no ground truth)
//   m > 0             -> total * F1 / m
double SoftPQFromMatches(const MatchResult& match, const ModifiedIoU& modified);

double SoftPQ(const LabelGrid& gt, const LabelGrid& pred,
              const SoftPQConfig& config);

struct PanopticScores {
  double pq = 0.0;
  double sq = 0.0;
  double rq = 0.0;
};

// Matches at IoU >= 0.5 with the greedy rule above. PQ = SQ * RQ, all zero
// without true positives and all one when both grids are empty.
PanopticScores PanopticQuality(const IoUPairs& pairs, const LabelStats& gt_stats,
                               const LabelStats& pred_stats);
PanopticScores PanopticQuality(const LabelGrid& gt, const LabelGrid& pred);

// 0.50, 0.55, ..., 0.95
std::vector<double> DefaultApThresholds();

struct DetectionScores {
  double f1_at_half = 0.0;
  // Mean over thresholds of TP / (TP + FP + FN).
  double map_score = 0.0;
};

DetectionScores ComputeDetectionScores(const IoUPairs& pairs,
                                       const LabelStats& gt_stats,
                                       const LabelStats& pred_stats,
                                       const std::vector<double>& thresholds);
DetectionScores ComputeDetectionScores(
    const LabelGrid& gt, const LabelGrid& pred,
    const std::vector<double>& thresholds = DefaultApThresholds());

struct ScoreReport {
  double softpq = 0.0;
  double pq = 0.0;
  double sq = 0.0;
  double rq_f1 = 0.0;
  double map_score = 0.0;
  double pixel_iou = 0.0;
  double dice = 0.0;
  SoftPQConfig config;
  // Modified IoU per anchor segment; every anchor id of the grid is present
  // (0.0 when it earned no credit). Anchors are gt ids for Mode::kOver and
  // pred ids for Mode::kUnder.
  std::map<LabelId, double> per_anchor_modified;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t gt_count = 0;
  std::size_t pred_count = 0;

  friend bool operator==(const ScoreReport&, const ScoreReport&) = default;
};

struct EvalOptions {
  std::vector<double> ap_thresholds = DefaultApThresholds();
  // Worker threads for the pixel pass.
  int threads = 1;
};

// All metrics from one overlap histogram.
ScoreReport EvaluateAll(const OverlapMatrix& matrix, const SoftPQConfig& config,
                        const EvalOptions& options = {});
ScoreReport EvaluateAll(const LabelGrid& gt, const LabelGrid& pred,
                        const SoftPQConfig& config,
                        const EvalOptions& options = {});

// EvaluateAll over caller-owned row-major buffers (no copy of the labels).
// Throws DimensionMismatch when a buffer does not hold height * width ids.
ScoreReport EvaluateArrays(std::span<const LabelId> gt,
                           std::span<const LabelId> pred, std::size_t height,
                           std::size_t width, const SoftPQConfig& config,
                           const EvalOptions& options = {});

// The seven headline scores keyed softpq, pq, sq, rq_f1, map, pixel_iou, dice.
std::vector<std::pair<std::string, double>> ScoreMap(const ScoreReport& report);

LabelStats StatsFromAreas(const std::map<LabelId, std::uint64_t>& areas);

}  // namespace softpq

#endif  // SOFTPQ_METRICS_H_
