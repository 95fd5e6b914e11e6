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

#include "softpq/experiments.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <thread>

#include "softpq/errors.h"

namespace softpq {
namespace {

constexpr double kTolerance = 1e-12;

std::string FormatNumber(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string FormatShort(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Runs fn(i) for i in [0, n). Cells write only to their own slot, so the
// result does not depend on scheduling.
void ParallelFor(std::size_t n, int threads,
                 const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(threads, 1));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
}

std::vector<LabelGrid> MorphSequence(const LabelGrid& start, MorphOp op,
                                     int steps) {
  std::vector<LabelGrid> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(start);
  for (int i = 0; i < steps; ++i) {
    out.push_back(MorphInstances(out.back(), op, 1));
  }
  return out;
}

std::vector<double> Iota(int steps) {
  std::vector<double> x;
  for (int i = 0; i <= steps; ++i) x.push_back(i);
  return x;
}

std::string JoinNumbers(const std::vector<double>& values) {
  std::string out;
  for (double v : values) {
    if (!out.empty()) out += ' ';
    out += FormatShort(v);
  }
  return out;
}

CurveCheck Dominance(const CurveTable& table, const std::string& series,
                     const std::string& reference) {
  const auto& s = table.Series(series);
  const auto& ref = table.Series(reference);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < ref[i] - kTolerance) {
      return {"dominance " + series + " >= " + reference, false,
              "violated at x=" + FormatNumber(table.x_values[i]) + ": " +
                  FormatNumber(s[i]) + " < " + FormatNumber(ref[i])};
    }
  }
  return {"dominance " + series + " >= " + reference, true, ""};
}

CurveCheck Coincide(const CurveTable& table, const std::string& series,
                    const std::string& reference) {
  const auto& s = table.Series(series);
  const auto& ref = table.Series(reference);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(s[i] - ref[i]) > kTolerance) {
      return {"reduction " + series + " == " + reference, false,
              "differs at x=" + FormatNumber(table.x_values[i])};
    }
  }
  return {"reduction " + series + " == " + reference, true, ""};
}

CurveCheck SmootherThan(const CurveTable& table, const std::string& series,
                        const std::string& reference) {
  const double a = MaxAdjacentDrop(table.Series(series));
  const double b = MaxAdjacentDrop(table.Series(reference));
  return {"max drop " + series + " < " + reference, a < b,
          FormatNumber(a) + " vs " + FormatNumber(b)};
}

}  // namespace

void CurveTable::AddSeries(std::string name, std::vector<double> values) {
  if (values.size() != x_values.size()) {
    throw InvalidArgument("series '" + name + "' has " +
                          std::to_string(values.size()) + " values for " +
                          std::to_string(x_values.size()) + " x values");
  }
  if (HasSeries(name)) throw InvalidArgument("duplicate series '" + name + "'");
  series.emplace_back(std::move(name), std::move(values));
}

const std::vector<double>& CurveTable::Series(const std::string& name) const {
  for (const auto& [n, values] : series) {
    if (n == name) return values;
  }
  throw InvalidArgument("no series named '" + name + "'");
}

bool CurveTable::HasSeries(const std::string& name) const {
  return std::any_of(series.begin(), series.end(),
                     [&](const auto& s) { return s.first == name; });
}

bool CurveTable::AllChecksPassed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CurveCheck& c) { return c.passed; });
}

std::vector<double> DeltaSeries(const std::vector<double>& values) {
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t i = 1; i < values.size(); ++i) {
    out[i] = values[i] - values[i - 1];
  }
  return out;
}

double MaxAdjacentDrop(const std::vector<double>& values) {
  double drop = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    drop = std::max(drop, values[i - 1] - values[i]);
  }
  return drop;
}

CurveTable ErosionCurve(const ErosionOptions& options) {
  if (options.steps < 1) throw InvalidArgument("erosion needs steps >= 1");
  if (options.configs.empty()) {
    throw InvalidArgument("erosion needs at least one SoftPQ config");
  }
  for (const auto& c : options.configs) c.Validate();

  const LabelGrid gt = MakeDiskGrid(options.grid);
  const std::vector<LabelGrid> preds =
      MorphSequence(gt, MorphOp::kErode, options.steps);
  const std::size_t n = preds.size();
  const std::size_t nc = options.configs.size();

  // reports[step][config]
  std::vector<std::vector<ScoreReport>> reports(n,
                                                std::vector<ScoreReport>(nc));
  ParallelFor(n * nc, options.threads, [&](std::size_t cell) {
    const std::size_t step = cell / nc;
    const std::size_t ci = cell % nc;
    reports[step][ci] = EvaluateAll(gt, preds[step], options.configs[ci]);
  });

  CurveTable table;
  table.x_label = "erosion_step";
  table.x_values = Iota(options.steps);
  std::vector<std::string> names;
  for (std::size_t ci = 0; ci < nc; ++ci) {
    std::vector<double> v(n);
    for (std::size_t s = 0; s < n; ++s) v[s] = reports[s][ci].softpq;
    names.push_back(options.configs[ci].Name());
    table.AddSeries(names.back(), std::move(v));
  }
  if (options.baselines) {
    const std::pair<const char*, double ScoreReport::*> baselines[] = {
        {"pq", &ScoreReport::pq},         {"f1", &ScoreReport::rq_f1},
        {"map", &ScoreReport::map_score}, {"pixel_iou", &ScoreReport::pixel_iou},
        {"dice", &ScoreReport::dice}};
    for (const auto& [name, field] : baselines) {
      std::vector<double> v(n);
      for (std::size_t s = 0; s < n; ++s) v[s] = reports[s][0].*field;
      names.push_back(name);
      table.AddSeries(name, std::move(v));
    }
  }
  for (const std::string& name : names) {
    table.AddSeries("delta_" + name, DeltaSeries(table.Series(name)));
  }

  bool start_ok = true;
  for (const std::string& name : names) {
    start_ok = start_ok && table.Series(name).front() == 1.0;
  }
  table.checks.push_back({"step 0 scores all 1.0", start_ok, ""});
  const std::string& primary = names.front();
  const auto& sp = table.Series(primary);
  const bool monotone = std::is_sorted(sp.rbegin(), sp.rend());
  table.checks.push_back({"monotone non-increasing " + primary, monotone, ""});
  if (options.baselines) {
    table.checks.push_back(SmootherThan(table, primary, "pq"));
  }

  table.metadata["experiment"] = "erosion";
  table.metadata["steps"] = std::to_string(options.steps);
  table.metadata["grid"] = gt.ShapeString();
  return table;
}

std::vector<double> DefaultLowerGrid() {
  std::vector<double> out;
  for (int percent = 5; percent <= 50; percent += 5) {
    out.push_back(percent / 100.0);
  }
  return out;
}

CurveTable ThresholdSweep(const SweepOptions& options) {
  if (options.steps < 1) throw InvalidArgument("sweep needs steps >= 1");
  if (options.lower_grid.empty()) {
    throw InvalidArgument("sweep needs at least one lower threshold");
  }
  std::vector<SoftPQConfig> configs;
  for (double l : options.lower_grid) {
    SoftPQConfig c;
    c.lower = l;
    c.upper = options.upper;
    c.Validate();
    configs.push_back(c);
  }

  const LabelGrid gt = MakeDiskGrid(options.grid);
  const std::vector<LabelGrid> preds =
      MorphSequence(gt, options.perturbation, options.steps);
  const std::size_t n = preds.size();
  const std::size_t nc = configs.size();

  std::vector<OverlapMatrix> matrices(n);
  ParallelFor(n, options.threads, [&](std::size_t s) {
    matrices[s] = JointHistogram(gt, preds[s]);
  });
  std::vector<std::vector<double>> softpq(nc, std::vector<double>(n));
  std::vector<double> pq(n);
  ParallelFor(n * nc, options.threads, [&](std::size_t cell) {
    const std::size_t s = cell / nc;
    const std::size_t ci = cell % nc;
    const ScoreReport r = EvaluateAll(matrices[s], configs[ci]);
    softpq[ci][s] = r.softpq;
    if (ci == 0) pq[s] = r.pq;
  });

  CurveTable table;
  table.x_label = std::string(options.perturbation == MorphOp::kErode
                                  ? "erosion_step"
                                  : "dilation_step");
  table.x_values = Iota(options.steps);
  std::vector<std::string> names;
  for (std::size_t ci = 0; ci < nc; ++ci) {
    names.push_back("softpq_l" + FormatShort(configs[ci].lower));
    table.AddSeries(names.back(), softpq[ci]);
  }
  table.AddSeries("pq", pq);

  for (std::size_t ci = 0; ci < nc; ++ci) {
    table.checks.push_back(Dominance(table, names[ci], "pq"));
    if (configs[ci].lower == configs[ci].upper) {
      table.checks.push_back(Coincide(table, names[ci], "pq"));
    }
  }
  // Collapse: PQ hits zero while the most lenient SoftPQ still gives credit.
  const auto lenient = static_cast<std::size_t>(
      std::min_element(options.lower_grid.begin(), options.lower_grid.end()) -
      options.lower_grid.begin());
  bool collapse = false;
  for (std::size_t s = 0; s < n && !collapse; ++s) {
    collapse = pq[s] == 0.0 && softpq[lenient][s] > 0.0;
  }
  table.checks.push_back(
      {"pq collapses while " + names[lenient] + " > 0", collapse, ""});

  table.metadata["experiment"] = "sweep";
  table.metadata["upper"] = FormatShort(options.upper);
  table.metadata["lower_grid"] = JoinNumbers(options.lower_grid);
  table.metadata["steps"] = std::to_string(options.steps);
  return table;
}

CurveTable OversegCurve(const OversegOptions& options) {
  options.config.Validate();
  if (options.fractions.empty() || options.fragments_list.empty()) {
    throw InvalidArgument("overseg needs fractions and fragment counts");
  }
  const LabelGrid gt = MakeDiskGrid(options.grid);
  const std::size_t nf = options.fractions.size();
  const std::size_t nk = options.fragments_list.size();

  std::vector<SoftPQConfig> envelope;
  for (double l : options.lower_envelope) {
    SoftPQConfig c = options.config;
    c.lower = l;
    c.Validate();
    envelope.push_back(c);
  }

  struct Cell {
    ScoreReport report;
    double env_min = 0.0;
    double env_max = 0.0;
  };
  std::vector<Cell> cells(nf * nk);
  ParallelFor(nf * nk, options.threads, [&](std::size_t i) {
    const std::size_t k = i / nf;
    const std::size_t f = i % nf;
    const LabelGrid pred =
        SplitInstances(gt, options.fragments_list[k], options.fractions[f],
                       options.gap, options.seed)
            .grid;
    const OverlapMatrix matrix = JointHistogram(gt, pred);
    Cell& cell = cells[i];
    cell.report = EvaluateAll(matrix, options.config);
    cell.env_min = cell.env_max = cell.report.softpq;
    for (const SoftPQConfig& c : envelope) {
      const double v = EvaluateAll(matrix, c).softpq;
      cell.env_min = std::min(cell.env_min, v);
      cell.env_max = std::max(cell.env_max, v);
    }
  });

  CurveTable table;
  table.x_label = "split_fraction";
  table.x_values = options.fractions;
  for (std::size_t k = 0; k < nk; ++k) {
    const std::string suffix = "_f" + std::to_string(options.fragments_list[k]);
    const auto column = [&](auto extract) {
      std::vector<double> v(nf);
      for (std::size_t f = 0; f < nf; ++f) v[f] = extract(cells[k * nf + f]);
      return v;
    };
    table.AddSeries("softpq" + suffix,
                    column([](const Cell& c) { return c.report.softpq; }));
    table.AddSeries("pq" + suffix,
                    column([](const Cell& c) { return c.report.pq; }));
    table.AddSeries("f1" + suffix,
                    column([](const Cell& c) { return c.report.rq_f1; }));
    table.AddSeries("map" + suffix,
                    column([](const Cell& c) { return c.report.map_score; }));
    table.AddSeries("envelope_min" + suffix,
                    column([](const Cell& c) { return c.env_min; }));
    table.AddSeries("envelope_max" + suffix,
                    column([](const Cell& c) { return c.env_max; }));
    table.checks.push_back(Dominance(table, "softpq" + suffix, "pq" + suffix));
  }

  table.metadata["experiment"] = "overseg";
  table.metadata["config"] = options.config.Name();
  table.metadata["gap"] = std::to_string(options.gap);
  table.metadata["seed"] = std::to_string(options.seed);
  table.metadata["lower_envelope"] = JoinNumbers(options.lower_envelope);
  return table;
}

CurveTable PenaltyAblation(const AblationOptions& options) {
  if (options.fragments_list.empty()) {
    throw InvalidArgument("ablation needs at least one fragment count");
  }
  for (int k : options.fragments_list) {
    if (k < 1 || k > 5) throw InvalidArgument("fragment counts must lie in 1..5");
  }
  const LabelGrid gt = MakeDiskGrid(options.grid);
  const Penalty kinds[] = {Penalty::kSqrt, Penalty::kLinear, Penalty::kLog};

  CurveTable table;
  table.x_label = "fragments";
  for (int k : options.fragments_list) table.x_values.push_back(k);

  std::vector<std::vector<double>> scores(3);
  for (int k : options.fragments_list) {
    const LabelGrid pred =
        SplitInstances(gt, k, 1.0, options.gap, options.seed).grid;
    const OverlapMatrix matrix = JointHistogram(gt, pred);
    for (std::size_t i = 0; i < 3; ++i) {
      SoftPQConfig c;
      c.lower = options.lower;
      c.upper = options.upper;
      c.penalty = kinds[i];
      scores[i].push_back(EvaluateAll(matrix, c).softpq);
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    table.AddSeries(std::string(PenaltyName(kinds[i])), scores[i]);
  }
  for (Penalty kind : kinds) {
    std::vector<double> inv;
    for (int k : options.fragments_list) {
      inv.push_back(1.0 / PenaltyWeight(kind, static_cast<std::size_t>(k)));
    }
    table.AddSeries("inv_" + std::string(PenaltyName(kind)), std::move(inv));
  }

  bool ordered = true;
  for (std::size_t i = 0; i < table.x_values.size(); ++i) {
    if (table.x_values[i] >= 2) {
      ordered = ordered && scores[0][i] >= scores[1][i] - kTolerance;
    }
  }
  table.checks.push_back({"sqrt >= linear for fragments >= 2", ordered, ""});
  table.checks.push_back(SmootherThan(table, "sqrt", "linear"));

  table.metadata["experiment"] = "ablation";
  table.metadata["lower"] = FormatShort(options.lower);
  table.metadata["upper"] = FormatShort(options.upper);
  table.metadata["gap"] = std::to_string(options.gap);
  table.metadata["seed"] = std::to_string(options.seed);
  return table;
}

std::string EmitCsv(const CurveTable& table) {
  std::string out = "x";
  for (const auto& [name, values] : table.series) out += "," + name;
  out += '\n';
  for (std::size_t i = 0; i < table.x_values.size(); ++i) {
    out += FormatNumber(table.x_values[i]);
    for (const auto& [name, values] : table.series) {
      out += "," + FormatNumber(values[i]);
    }
    out += '\n';
  }
  return out;
}

CurveTable ParseCsv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("empty CSV");
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header.front() != "x") {
    throw InvalidArgument("CSV header must start with 'x'");
  }
  std::vector<std::vector<double>> columns(header.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ls, cell, ',')) {
      if (col >= header.size()) throw InvalidArgument("CSV row too long");
      columns[col++].push_back(std::stod(cell));
    }
    if (col != header.size()) throw InvalidArgument("CSV row too short");
  }
  CurveTable table;
  table.x_label = "x";
  table.x_values = columns[0];
  for (std::size_t c = 1; c < header.size(); ++c) {
    table.AddSeries(header[c], columns[c]);
  }
  return table;
}

std::string EmitSvg(const CurveTable& table) {
  constexpr double kWidth = 800, kHeight = 500;
  constexpr double kLeft = 60, kRight = 200, kTop = 30, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  static const char* kColors[] = {"#d62728", "#000000", "#1f77b4", "#2ca02c",
                                  "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
                                  "#7f7f7f", "#bcbd22", "#17becf"};

  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  if (!table.x_values.empty()) {
    x_min = *std::min_element(table.x_values.begin(), table.x_values.end());
    x_max = *std::max_element(table.x_values.begin(), table.x_values.end());
  }
  for (const auto& [name, values] : table.series) {
    for (double v : values) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  if (x_max == x_min) x_max = x_min + 1;
  if (y_max == y_min) y_max = y_min + 1;
  const auto px = [&](double x) {
    return kLeft + (x - x_min) / (x_max - x_min) * plot_w;
  };
  const auto py = [&](double y) {
    return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h;
  };
  const auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
      "viewBox=\"0 0 800 500\">\n"
      "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
  out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + plot_h) +
         "\" x2=\"" + num(kLeft + plot_w) + "\" y2=\"" + num(kTop + plot_h) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" +
         num(kLeft) + "\" y2=\"" + num(kTop + plot_h) +
         "\" stroke=\"black\"/>\n";
  out += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" +
         num(kHeight - 12) + "\" text-anchor=\"middle\" font-size=\"14\">" +
         table.x_label + "</text>\n";
  out += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py(y_max) + 4) +
         "\" text-anchor=\"end\" font-size=\"12\">" + FormatShort(y_max) +
         "</text>\n";
  out += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py(y_min) + 4) +
         "\" text-anchor=\"end\" font-size=\"12\">" + FormatShort(y_min) +
         "</text>\n";

  // Legend rows shrink so every series fits between the top and bottom margins.
  const double legend_step =
      table.series.empty()
          ? 16.0
          : std::min(16.0, (kHeight - kTop - 10) /
                               static_cast<double>(table.series.size()));
  const std::string legend_font = num(std::clamp(legend_step * 0.7, 6.0, 11.0));

  std::size_t index = 0;
  for (const auto& [name, values] : table.series) {
    const char* color = kColors[index % std::size(kColors)];
    std::string points;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!points.empty()) points += ' ';
      points += num(px(table.x_values[i])) + "," + num(py(values[i]));
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
    const double ly = kTop + legend_step * static_cast<double>(index);
    out += "<line x1=\"" + num(kWidth - kRight + 15) + "\" y1=\"" + num(ly) +
           "\" x2=\"" + num(kWidth - kRight + 35) + "\" y2=\"" + num(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + num(kWidth - kRight + 40) + "\" y=\"" +
           num(ly + 4) + "\" font-size=\"" + legend_font + "\">" + name + "</text>\n";
    ++index;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace softpq
