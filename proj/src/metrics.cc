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

#include "softpq/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "softpq/errors.h"

namespace softpq {
namespace {

std::string FormatThreshold(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

double F1(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) /
         static_cast<double>(2 * tp + fp + fn);
}

// Sums in ascending value order so the result does not depend on label ids.
double OrderedSum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

}  // namespace

std::string_view PenaltyName(Penalty penalty) {
  switch (penalty) {
    case Penalty::kSqrt:
      return "sqrt";
    case Penalty::kLinear:
      return "linear";
    case Penalty::kLog:
      return "log";
  }
  return "?";
}

std::string_view ModeName(Mode mode) {
  return mode == Mode::kOver ? "over" : "under";
}

Penalty ParsePenalty(std::string_view name) {
  if (name == "sqrt") return Penalty::kSqrt;
  if (name == "linear") return Penalty::kLinear;
  if (name == "log") return Penalty::kLog;
  throw InvalidArgument("unknown penalty '" + std::string(name) +
                        "' (expected sqrt, linear or log)");
}

Mode ParseMode(std::string_view name) {
  if (name == "over") return Mode::kOver;
  if (name == "under") return Mode::kUnder;
  throw InvalidArgument("unknown mode '" + std::string(name) +
                        "' (expected over or under)");
}

void SoftPQConfig::Validate() const {
  if (!(lower >= 0.0 && lower < 1.0)) {
    throw InvalidArgument("lower threshold must lie in [0, 1), got " +
                          FormatThreshold(lower));
  }
  if (!(upper >= 0.5 && upper <= 1.0)) {
    throw InvalidArgument("upper threshold must lie in [0.5, 1], got " +
                          FormatThreshold(upper));
  }
  if (lower > upper) {
    throw InvalidArgument("lower threshold " + FormatThreshold(lower) +
                          " exceeds upper threshold " + FormatThreshold(upper));
  }
}

std::string SoftPQConfig::Name() const {
  return "softpq_l" + FormatThreshold(lower) + "_h" + FormatThreshold(upper) +
         "_" + std::string(PenaltyName(penalty)) + "_" +
         std::string(ModeName(mode));
}

double PenaltyWeight(Penalty penalty, std::size_t n) {
  if (n == 0) {
    throw InvalidArgument("penalty weight requires a soft-match count >= 1");
  }
  const double x = static_cast<double>(n) + 1.0;
  switch (penalty) {
    case Penalty::kSqrt:
      return 1.0 / std::sqrt(x);
    case Penalty::kLinear:
      return 1.0 / x;
    case Penalty::kLog:
      return 1.0 / std::log(x);
  }
  return 0.0;
}

GreedyMatching GreedyMatch(const IoUPairs& pairs, double threshold) {
  std::vector<MatchedPair> candidates;
  for (const PairIoU& p : pairs) {
    if (p.iou >= threshold) candidates.push_back({p.gt, p.pred, p.iou});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const MatchedPair& a, const MatchedPair& b) {
              if (a.iou != b.iou) return a.iou > b.iou;
              if (a.gt != b.gt) return a.gt < b.gt;
              return a.pred < b.pred;
            });
  GreedyMatching out;
  std::unordered_set<LabelId> used_gt;
  std::unordered_set<LabelId> used_pred;
  for (const MatchedPair& c : candidates) {
    if (used_gt.contains(c.gt) || used_pred.contains(c.pred)) {
      out.demoted.push_back(c);
      continue;
    }
    used_gt.insert(c.gt);
    used_pred.insert(c.pred);
    out.matched.push_back(c);
  }
  const auto by_ids = [](const MatchedPair& a, const MatchedPair& b) {
    return a.gt != b.gt ? a.gt < b.gt : a.pred < b.pred;
  };
  std::sort(out.matched.begin(), out.matched.end(), by_ids);
  std::sort(out.demoted.begin(), out.demoted.end(), by_ids);
  return out;
}

MatchResult ClassifyMatches(const IoUPairs& pairs, const LabelStats& gt_stats,
                            const LabelStats& pred_stats,
                            const SoftPQConfig& config) {
  config.Validate();
  MatchResult result;
  GreedyMatching greedy = GreedyMatch(pairs, config.upper);
  result.matched_pairs = std::move(greedy.matched);

  const bool over = config.mode == Mode::kOver;
  const auto add_soft = [&](LabelId gt, LabelId pred, double iou) {
    if (over) {
      result.soft_sets[gt].push_back({pred, iou});
    } else {
      result.soft_sets[pred].push_back({gt, iou});
    }
  };
  // `pairs` and `demoted` are both in (gt, pred) order; merge so each soft set
  // stays ordered by the other id.
  auto demoted = greedy.demoted.begin();
  for (const PairIoU& p : pairs) {
    if (p.iou > config.lower && p.iou < config.upper) {
      add_soft(p.gt, p.pred, p.iou);
    } else if (demoted != greedy.demoted.end() && demoted->gt == p.gt &&
               demoted->pred == p.pred) {
      if (p.iou > config.lower) add_soft(p.gt, p.pred, p.iou);
      ++demoted;
    }
  }
  if (!over) {
    for (auto& [anchor, entries] : result.soft_sets) {
      std::sort(entries.begin(), entries.end(),
                [](const SoftEntry& a, const SoftEntry& b) {
                  return a.other < b.other;
                });
    }
  }

  result.gt_count = gt_stats.instance_count;
  result.pred_count = pred_stats.instance_count;
  result.tp = result.matched_pairs.size();
  result.fp = result.pred_count - result.tp;
  result.fn = result.gt_count - result.tp;
  return result;
}

ModifiedIoU ComputeModifiedIoU(const MatchResult& match,
                               const SoftPQConfig& config) {
  ModifiedIoU out;
  const bool over = config.mode == Mode::kOver;
  for (const MatchedPair& mp : match.matched_pairs) {
    out.per_anchor[over ? mp.gt : mp.pred] += mp.iou;
  }
  for (const auto& [anchor, entries] : match.soft_sets) {
    if (entries.empty()) continue;
    std::vector<double> ious;
    ious.reserve(entries.size());
    for (const SoftEntry& e : entries) ious.push_back(e.iou);
    const double soft_sum = OrderedSum(std::move(ious));
    out.per_anchor[anchor] += PenaltyWeight(config.penalty, entries.size()) *
                              soft_sum;
  }
  std::vector<double> values;
  values.reserve(out.per_anchor.size());
  for (const auto& [anchor, value] : out.per_anchor) values.push_back(value);
  out.total = OrderedSum(std::move(values));
  return out;
}

F1Counts F1FromMatches(const MatchResult& match) {
  return {F1(match.tp, match.fp, match.fn), match.tp, match.fp, match.fn};
}

double SoftPQFromMatches(const MatchResult& match,
                         const ModifiedIoU& modified) {
  if (match.gt_count == 0 && match.pred_count == 0) return 1.0;
  const std::size_t m = match.m();
  if (m == 0) {
    if (match.gt_count == 0) return 0.0;
    return modified.total / static_cast<double>(match.gt_count);
  }
  return modified.total * F1FromMatches(match).f1 / static_cast<double>(m);
}

double SoftPQ(const LabelGrid& gt, const LabelGrid& pred,
              const SoftPQConfig& config) {
  config.Validate();
  const OverlapMatrix matrix = JointHistogram(gt, pred);
  const MatchResult match =
      ClassifyMatches(ComputeIoUPairs(matrix), StatsFromAreas(matrix.gt_areas),
                      StatsFromAreas(matrix.pred_areas), config);
  return SoftPQFromMatches(match, ComputeModifiedIoU(match, config));
}

PanopticScores PanopticQuality(const IoUPairs& pairs,
                               const LabelStats& gt_stats,
                               const LabelStats& pred_stats) {
  if (gt_stats.instance_count == 0 && pred_stats.instance_count == 0) {
    return {1.0, 1.0, 1.0};
  }
  const GreedyMatching greedy = GreedyMatch(pairs, 0.5);
  const std::size_t tp = greedy.matched.size();
  if (tp == 0) return {0.0, 0.0, 0.0};
  std::vector<double> ious;
  ious.reserve(tp);
  for (const MatchedPair& mp : greedy.matched) ious.push_back(mp.iou);
  const double iou_sum = OrderedSum(std::move(ious));
  PanopticScores out;
  out.sq = iou_sum / static_cast<double>(tp);
  out.rq = F1(tp, pred_stats.instance_count - tp, gt_stats.instance_count - tp);
  out.pq = out.sq * out.rq;
  return out;
}

PanopticScores PanopticQuality(const LabelGrid& gt, const LabelGrid& pred) {
  const OverlapMatrix matrix = JointHistogram(gt, pred);
  return PanopticQuality(ComputeIoUPairs(matrix),
                         StatsFromAreas(matrix.gt_areas),
                         StatsFromAreas(matrix.pred_areas));
}

std::vector<double> DefaultApThresholds() {
  std::vector<double> out;
  for (int percent = 50; percent <= 95; percent += 5) {
    out.push_back(percent / 100.0);
  }
  return out;
}

DetectionScores ComputeDetectionScores(const IoUPairs& pairs,
                                       const LabelStats& gt_stats,
                                       const LabelStats& pred_stats,
                                       const std::vector<double>& thresholds) {
  if (thresholds.empty()) {
    throw InvalidArgument("detection scores need at least one IoU threshold");
  }
  const std::size_t gt_n = gt_stats.instance_count;
  const std::size_t pred_n = pred_stats.instance_count;
  const auto tp_at = [&](double tau) { return GreedyMatch(pairs, tau).matched.size(); };

  DetectionScores out;
  const std::size_t tp_half = tp_at(0.5);
  out.f1_at_half = F1(tp_half, pred_n - tp_half, gt_n - tp_half);
  double ap_sum = 0.0;
  for (double tau : thresholds) {
    const std::size_t tp = tp_at(tau);
    const std::size_t denom = tp + (pred_n - tp) + (gt_n - tp);
    ap_sum += denom == 0 ? 1.0
                         : static_cast<double>(tp) / static_cast<double>(denom);
  }
  out.map_score = ap_sum / static_cast<double>(thresholds.size());
  return out;
}

DetectionScores ComputeDetectionScores(const LabelGrid& gt,
                                       const LabelGrid& pred,
                                       const std::vector<double>& thresholds) {
  const OverlapMatrix matrix = JointHistogram(gt, pred);
  return ComputeDetectionScores(ComputeIoUPairs(matrix),
                                StatsFromAreas(matrix.gt_areas),
                                StatsFromAreas(matrix.pred_areas), thresholds);
}

LabelStats StatsFromAreas(const std::map<LabelId, std::uint64_t>& areas) {
  LabelStats stats;
  stats.areas = areas;
  stats.instance_count = areas.size();
  stats.id_list.reserve(areas.size());
  for (const auto& [id, area] : areas) stats.id_list.push_back(id);
  return stats;
}

ScoreReport EvaluateAll(const OverlapMatrix& matrix, const SoftPQConfig& config,
                        const EvalOptions& options) {
  config.Validate();
  const IoUPairs pairs = ComputeIoUPairs(matrix);
  const LabelStats gt_stats = StatsFromAreas(matrix.gt_areas);
  const LabelStats pred_stats = StatsFromAreas(matrix.pred_areas);

  const MatchResult match = ClassifyMatches(pairs, gt_stats, pred_stats, config);
  const ModifiedIoU modified = ComputeModifiedIoU(match, config);
  const PanopticScores panoptic = PanopticQuality(pairs, gt_stats, pred_stats);
  const DetectionScores detection =
      ComputeDetectionScores(pairs, gt_stats, pred_stats, options.ap_thresholds);
  const BinaryScores binary = PixelBinaryScores(matrix);

  ScoreReport report;
  report.softpq = SoftPQFromMatches(match, modified);
  report.pq = panoptic.pq;
  report.sq = panoptic.sq;
  report.rq_f1 = panoptic.rq;
  report.map_score = detection.map_score;
  report.pixel_iou = binary.pixel_iou;
  report.dice = binary.dice;
  report.config = config;
  const auto& anchors =
      config.mode == Mode::kOver ? gt_stats.id_list : pred_stats.id_list;
  for (LabelId id : anchors) report.per_anchor_modified[id] = 0.0;
  for (const auto& [id, value] : modified.per_anchor) {
    report.per_anchor_modified[id] = value;
  }
  report.tp = match.tp;
  report.fp = match.fp;
  report.fn = match.fn;
  report.gt_count = match.gt_count;
  report.pred_count = match.pred_count;
  return report;
}

ScoreReport EvaluateAll(const LabelGrid& gt, const LabelGrid& pred,
                        const SoftPQConfig& config,
                        const EvalOptions& options) {
  config.Validate();
  return EvaluateAll(JointHistogram(gt, pred, options.threads), config, options);
}

ScoreReport EvaluateArrays(std::span<const LabelId> gt,
                           std::span<const LabelId> pred, std::size_t height,
                           std::size_t width, const SoftPQConfig& config,
                           const EvalOptions& options) {
  config.Validate();
  return EvaluateAll(JointHistogram(gt, pred, height, width, options.threads),
                     config, options);
}

std::vector<std::pair<std::string, double>> ScoreMap(const ScoreReport& report) {
  return {{"softpq", report.softpq},       {"pq", report.pq},
          {"sq", report.sq},               {"rq_f1", report.rq_f1},
          {"map", report.map_score},       {"pixel_iou", report.pixel_iou},
          {"dice", report.dice}};
}

}  // namespace softpq
