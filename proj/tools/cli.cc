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

#include "cli.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "softpq/errors.h"
#include "softpq/experiments.h"
#include "softpq/label_grid.h"
#include "softpq/perturb.h"

namespace softpq::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path);
  out << text;
  if (!out) throw Error("write failed: " + path);
}

std::string FormatCsvNumber(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

Json ConfigJson(const SoftPQConfig& c) {
  return Json{{"lower", c.lower},
              {"upper", c.upper},
              {"penalty", std::string(PenaltyName(c.penalty))},
              {"mode", std::string(ModeName(c.mode))}};
}

// Flags shared by the evaluation-style subcommands.
struct CommonFlags {
  double lower = 0;
  double upper = 0;
  std::string penalty;
  std::string mode;
  std::uint64_t seed = 0;
  std::string config_path;
  std::string out;
  bool svg = false;
  std::string preset;
  int threads = 1;
  std::vector<double> thresholds;

  CLI::Option* lower_opt = nullptr;
  CLI::Option* upper_opt = nullptr;
  CLI::Option* penalty_opt = nullptr;
  CLI::Option* mode_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* svg_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* thresholds_opt = nullptr;

  void Register(CLI::App* app) {
    lower_opt = app->add_option("--lower", lower, "Lower IoU threshold");
    upper_opt = app->add_option("--upper", upper, "Upper IoU threshold");
    penalty_opt = app->add_option("--penalty", penalty, "sqrt|linear|log")
                      ->check(CLI::IsMember({"sqrt", "linear", "log"}));
    mode_opt = app->add_option("--mode", mode, "over|under")
                   ->check(CLI::IsMember({"over", "under"}));
    seed_opt = app->add_option("--seed", seed, "Random seed");
    app->add_option("--config", config_path, "JSON run configuration")
        ->check(CLI::ExistingFile);
    out_opt = app->add_option("--out", out, "Output path");
    svg_opt = app->add_flag("--svg", svg, "Also write an SVG chart");
    app->add_option("--preset", preset, "benchmark|strict|lenient")
        ->check(CLI::IsMember({"benchmark", "strict", "lenient"}));
    threads_opt = app->add_option("--threads", threads, "Worker threads")
                      ->check(CLI::PositiveNumber);
    thresholds_opt = app->add_option("--thresholds", thresholds,
                                     "IoU thresholds for mAP");
  }

  RunConfig Resolve() const {
    RunConfig run;
    if (!config_path.empty()) ApplyConfigFile(config_path, run);
    if (!preset.empty()) ApplyPreset(preset, run.softpq);
    if (lower_opt->count()) run.softpq.lower = lower;
    if (upper_opt->count()) run.softpq.upper = upper;
    if (penalty_opt->count()) run.softpq.penalty = ParsePenalty(penalty);
    if (mode_opt->count()) run.softpq.mode = ParseMode(mode);
    if (seed_opt->count()) run.seed = seed;
    if (out_opt->count()) run.out = out;
    if (svg_opt->count()) run.svg = svg;
    if (threads_opt->count()) run.threads = threads;
    if (thresholds_opt->count()) run.thresholds = thresholds;
    run.softpq.Validate();
    if (run.thresholds.empty()) {
      throw InvalidArgument("at least one mAP threshold is required");
    }
    return run;
  }
};

int EmitOutput(const std::string& text, const std::string& path,
               std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    WriteText(path, text);
  }
  return kExitOk;
}

int DoEval(const std::string& gt_path, const std::string& pred_path,
           const RunConfig& run, bool compare, std::ostream& out,
           std::ostream& err) {
  std::vector<ImagePair> pairs;
  const bool gt_dir = fs::is_directory(gt_path);
  const bool pred_dir = fs::is_directory(pred_path);
  if (gt_dir != pred_dir || (compare && !gt_dir)) {
    err << "error: expected " << (compare ? "two directories" : "two files or two directories")
        << ", got " << gt_path << " and " << pred_path << "\n";
    return kExitUsage;
  }
  if (gt_dir) {
    const DirectoryPairing pairing = PairDirectories(gt_path, pred_path);
    if (!pairing.complete()) {
      err << "error: unmatched files\n";
      for (const auto& n : pairing.gt_only) err << "  only in " << gt_path << ": " << n << "\n";
      for (const auto& n : pairing.pred_only) err << "  only in " << pred_path << ": " << n << "\n";
      return kExitUsage;
    }
    pairs = pairing.pairs;
  } else {
    pairs.push_back({fs::path(pred_path).filename().string(), gt_path, pred_path});
  }

  EvalOptions options;
  options.ap_thresholds = run.thresholds;
  const std::vector<BatchEntry> entries =
      EvaluateBatch(pairs, run.softpq, options, run.threads);
  int status = kExitOk;
  for (const BatchEntry& e : entries) {
    if (e.error_kind == BatchErrorKind::kNone) continue;
    err << "error: " << e.error << "\n";
    const int code = e.error_kind == BatchErrorKind::kDimensionMismatch
                         ? kExitDimension
                         : kExitUsage;
    if (status == kExitOk || code == kExitUsage) status = code;
  }
  if (status != kExitOk) return status;

  if (compare) {
    const Comparison cmp = ComparePqSoftPQ(entries);
    EmitOutput(ComparisonCsv(cmp), run.out, out);
    err << "violations (softpq < pq - 1e-12): " << cmp.violations << " of "
        << cmp.rows.size() << "\n";
    return kExitOk;
  }
  return EmitOutput(ReportJson(entries, run), run.out, out);
}

int DoExperiment(const std::string& name, const RunConfig& run, int steps,
                 const std::string& perturbation, int gap, std::ostream& out) {
  CurveTable table;
  if (name == "erosion") {
    ErosionOptions o;
    o.steps = steps;
    o.configs = {run.softpq};
    o.threads = run.threads;
    table = ErosionCurve(o);
  } else if (name == "sweep") {
    SweepOptions o;
    o.steps = steps;
    o.upper = run.softpq.upper;
    o.perturbation = perturbation == "dilate" ? MorphOp::kDilate : MorphOp::kErode;
    o.threads = run.threads;
    table = ThresholdSweep(o);
  } else if (name == "overseg") {
    OversegOptions o;
    o.config = run.softpq;
    o.gap = gap;
    o.seed = run.seed;
    o.threads = run.threads;
    table = OversegCurve(o);
  } else {
    AblationOptions o;
    o.lower = run.softpq.lower;
    o.upper = run.softpq.upper;
    o.gap = gap;
    o.seed = run.seed;
    table = PenaltyAblation(o);
  }
  const std::string csv_path = run.out.empty() ? name + ".csv" : run.out;
  WriteText(csv_path, EmitCsv(table));
  out << "wrote " << csv_path << " (" << table.x_values.size() << " rows)\n";
  if (run.svg) {
    const std::string svg_path =
        fs::path(csv_path).replace_extension(".svg").string();
    WriteText(svg_path, EmitSvg(table));
    out << "wrote " << svg_path << "\n";
  }
  for (const CurveCheck& c : table.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << "\n";
  }
  return kExitOk;
}

}  // namespace

void ApplyConfigJson(const std::string& json_text, RunConfig& config) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "lower") {
        config.softpq.lower = value.get<double>();
      } else if (key == "upper") {
        config.softpq.upper = value.get<double>();
      } else if (key == "penalty") {
        config.softpq.penalty = ParsePenalty(value.get<std::string>());
      } else if (key == "mode") {
        config.softpq.mode = ParseMode(value.get<std::string>());
      } else if (key == "thresholds") {
        config.thresholds = value.get<std::vector<double>>();
      } else if (key == "seed") {
        config.seed = value.get<std::uint64_t>();
      } else if (key == "out") {
        config.out = value.get<std::string>();
      } else if (key == "svg") {
        config.svg = value.get<bool>();
      } else if (key == "threads") {
        config.threads = value.get<int>();
      } else {
        throw InvalidArgument("unknown config key '" + key + "'");
      }
    }
  } catch (const Json::type_error& e) {
    throw InvalidArgument(std::string("config value has the wrong type: ") +
                          e.what());
  }
}

void ApplyConfigFile(const std::string& path, RunConfig& config) {
  ApplyConfigJson(ReadText(path), config);
}

void ApplyPreset(const std::string& name, SoftPQConfig& config) {
  if (name == "benchmark") {
    config.lower = 0.25;
    config.upper = 0.5;
  } else if (name == "strict") {
    config.lower = 0.4;
    config.upper = 0.6;
  } else if (name == "lenient") {
    config.lower = 0.05;
    config.upper = 0.5;
  } else {
    throw InvalidArgument("unknown preset '" + name + "'");
  }
}

std::string ReportJson(const std::vector<BatchEntry>& entries,
                       const RunConfig& config) {
  Json images = Json::array();
  for (const BatchEntry& e : entries) {
    if (!e.report) continue;
    const ScoreReport& r = *e.report;
    Json per_anchor = Json::object();
    for (const auto& [id, v] : r.per_anchor_modified) {
      per_anchor[std::to_string(id)] = v;
    }
    Json image{{"name", e.pair.name},
               {"gt", e.pair.gt_path},
               {"pred", e.pair.pred_path}};
    for (const auto& [key, value] : ScoreMap(r)) image[key] = value;
    image["tp"] = r.tp;
    image["fp"] = r.fp;
    image["fn"] = r.fn;
    image["gt_count"] = r.gt_count;
    image["pred_count"] = r.pred_count;
    image["anchor"] = config.softpq.mode == Mode::kOver ? "gt" : "pred";
    image["per_anchor_modified"] = per_anchor;
    images.push_back(std::move(image));
  }
  const ScoreMeans means = Aggregate(entries);
  Json report{{"config", ConfigJson(config.softpq)},
              {"map_thresholds", config.thresholds},
              {"images", images},
              {"aggregate",
               Json{{"count", means.count},
                    {"softpq", means.softpq},
                    {"pq", means.pq},
                    {"sq", means.sq},
                    {"rq_f1", means.rq_f1},
                    {"map", means.map_score},
                    {"pixel_iou", means.pixel_iou},
                    {"dice", means.dice}}}};
  return report.dump(2) + "\n";
}

std::string ComparisonCsv(const Comparison& comparison) {
  std::string csv = "name,pq,softpq,softpq_minus_pq\n";
  for (const ComparisonRow& row : comparison.rows) {
    csv += row.name + "," + FormatCsvNumber(row.pq) + "," +
           FormatCsvNumber(row.softpq) + "," + FormatCsvNumber(row.difference) +
           "\n";
  }
  return csv;
}

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"SoftPQ instance-segmentation evaluation toolkit", "softpq"};
  app.require_subcommand(1);

  // eval
  CLI::App* eval = app.add_subcommand("eval", "Score prediction masks against ground truth");
  std::string eval_gt, eval_pred;
  eval->add_option("gt", eval_gt, "Ground-truth file or directory")->required();
  eval->add_option("pred", eval_pred, "Prediction file or directory")->required();
  CommonFlags eval_flags;
  eval_flags.Register(eval);

  // compare
  CLI::App* compare = app.add_subcommand("compare", "Per-image PQ vs SoftPQ table");
  std::string cmp_gt, cmp_pred;
  compare->add_option("gt_dir", cmp_gt, "Ground-truth directory")->required();
  compare->add_option("pred_dir", cmp_pred, "Prediction directory")->required();
  CommonFlags cmp_flags;
  cmp_flags.Register(compare);

  // perturb
  CLI::App* perturb = app.add_subcommand("perturb", "Apply a controlled error to a label image");
  std::string perturb_in, perturb_out;
  PerturbSpec spec;
  std::string kind = "erode";
  perturb->add_option("input", perturb_in, "Input label image")->required();
  perturb->add_option("output", perturb_out, "Output label image")->required();
  perturb->add_option("--kind", kind, "erode|dilate|split|ghost|partial")
      ->check(CLI::IsMember({"erode", "dilate", "split", "ghost", "partial"}));
  perturb->add_option("--iterations", spec.iterations);
  perturb->add_option("--fragments", spec.fragments);
  perturb->add_option("--fraction", spec.fraction);
  perturb->add_option("--gap", spec.gap);
  perturb->add_option("--ghost-count", spec.ghost_count);
  perturb->add_option("--ghost-radius", spec.ghost_radius);
  perturb->add_option("--keep-fraction", spec.keep_fraction);
  perturb->add_option("--seed", spec.seed);

  // grid
  CLI::App* grid = app.add_subcommand("grid", "Write the synthetic disk-grid ground truth");
  std::string grid_out;
  DiskGridSpec disk;
  grid->add_option("output", grid_out, "Output label image")->required();
  grid->add_option("--rows", disk.rows);
  grid->add_option("--cols", disk.cols);
  grid->add_option("--radius", disk.radius);
  grid->add_option("--spacing", disk.spacing);

  // experiment
  CLI::App* experiment = app.add_subcommand("experiment", "Run a controlled experiment");
  std::string exp_name;
  int steps = 25;
  int gap = 1;
  std::string perturbation = "erode";
  experiment->add_option("name", exp_name, "erosion|sweep|overseg|ablation")
      ->required()
      ->check(CLI::IsMember({"erosion", "sweep", "overseg", "ablation"}));
  experiment->add_option("--steps", steps, "Perturbation steps")->check(CLI::PositiveNumber);
  experiment->add_option("--perturbation", perturbation, "erode|dilate (sweep)")
      ->check(CLI::IsMember({"erode", "dilate"}));
  experiment->add_option("--gap", gap, "Split gap in pixels (0 or 1)")
      ->check(CLI::Range(0, 1));
  CommonFlags exp_flags;
  exp_flags.Register(experiment);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*eval) {
      return DoEval(eval_gt, eval_pred, eval_flags.Resolve(), false, out, err);
    }
    if (*compare) {
      return DoEval(cmp_gt, cmp_pred, cmp_flags.Resolve(), true, out, err);
    }
    if (*perturb) {
      spec.kind = ParsePerturbKind(kind);
      spec.Validate();
      const LabelGrid input = ReadLabelFile(perturb_in);
      const PerturbResult result = ApplyPerturbation(input, spec);
      for (const std::string& note : result.notes) err << "note: " << note << "\n";
      WriteLabelFile(result.grid, perturb_out);
      return kExitOk;
    }
    if (*grid) {
      WriteLabelFile(MakeDiskGrid(disk), grid_out);
      return kExitOk;
    }
    if (*experiment) {
      return DoExperiment(exp_name, exp_flags.Resolve(), steps, perturbation, gap, out);
    }
  } catch (const DimensionMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kExitDimension;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace softpq::cli
