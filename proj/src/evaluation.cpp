#include "flowscope/evaluation.hpp"

#include "flowscope/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace flowscope {

std::vector<AccuracyRow> accuracy_report(const ModelRun& run)
{
  if (run.records.empty()) {
    throw Error(ErrorCode::InsufficientData,
                "run '" + run.model_id + "' has no evaluation records");
  }
  std::map<std::string, AccuracyRow> rows;
  for (const auto& r : run.records) {
    auto& row = rows[r.true_label];
    ++row.sample_size;
    if (r.predicted_label == r.true_label) {
      ++row.correct;
    }
  }
  std::vector<AccuracyRow> out;
  out.reserve(rows.size());
  for (auto& [category, row] : rows) {
    row.category = category;
    row.accuracy = static_cast<double>(row.correct) / static_cast<double>(row.sample_size);
    out.push_back(std::move(row));
  }
  return out;
}

FlowMatrix misclassification_flow(const ModelRun& run)
{
  FlowBuilder builder;
  for (const auto& r : run.records) {
    if (r.predicted_label != r.true_label) {
      builder.add(r.true_label, r.predicted_label);
    }
  }
  return builder.build();
}

std::string_view to_string(FindingKind kind)
{
  switch (kind) {
    case FindingKind::BidirectionalConfusion: return "BidirectionalConfusion";
    case FindingKind::BroadCategory: return "BroadCategory";
    case FindingKind::WrongLabelSuspect: return "WrongLabelSuspect";
    case FindingKind::AccuracyRegression: return "AccuracyRegression";
    case FindingKind::LabelImbalance: return "LabelImbalance";
    case FindingKind::LowTrustLabels: return "LowTrustLabels";
  }
  return "Unknown";
}

namespace {

void sort_findings(std::vector<DiagnosticFinding>& findings)
{
  std::sort(findings.begin(), findings.end(), [](const auto& a, const auto& b) {
    if (a.severity != b.severity) {
      return a.severity > b.severity;
    }
    if (a.subjects != b.subjects) {
      return a.subjects < b.subjects;
    }
    return a.kind < b.kind;
  });
}

double ratio(std::int64_t num, std::int64_t den)
{
  return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

} // namespace

std::vector<DiagnosticFinding> diagnose(const ModelRun& run,
                                        const DatasetSnapshot& snapshot,
                                        const DiagnoseOptions& options)
{
  std::vector<DiagnosticFinding> findings;
  const auto errors = misclassification_flow(run);
  if (errors.empty()) {
    return findings;
  }

  std::unordered_map<std::string, std::int64_t> true_size;
  std::unordered_map<std::string, std::int64_t> predicted_size;
  for (const auto& r : run.records) {
    ++true_size[r.true_label];
    ++predicted_size[r.predicted_label];
  }
  std::unordered_map<std::string_view, std::size_t> row_of;
  std::unordered_map<std::string_view, std::size_t> col_of;
  for (std::size_t i = 0; i < errors.rows(); ++i) {
    row_of.emplace(errors.left_labels()[i], i);
  }
  for (std::size_t j = 0; j < errors.cols(); ++j) {
    col_of.emplace(errors.right_labels()[j], j);
  }
  auto flow = [&](const std::string& from, const std::string& to) -> std::int64_t {
    auto r = row_of.find(from);
    auto c = col_of.find(to);
    if (r == row_of.end() || c == col_of.end()) {
      return 0;
    }
    return errors.at(r->second, c->second);
  };

  const auto& tax = snapshot.taxonomy();
  for (std::size_t i = 0; i < errors.rows(); ++i) {
    const auto& a = errors.left_labels()[i];
    for (std::size_t j = 0; j < errors.cols(); ++j) {
      const auto& b = errors.right_labels()[j];
      const auto ab = errors.at(i, j);
      if (ab < options.min_flow) {
        continue;
      }

      if (a < b) {
        const auto ba = flow(b, a);
        if (ba >= options.min_flow) {
          DiagnosticFinding f;
          f.kind = FindingKind::BidirectionalConfusion;
          f.subjects = { a, b };
          f.flows = { { a, b, ab }, { b, a, ba } };
          const double share_ab = ratio(ab, true_size[a]);
          const double share_ba = ratio(ba, true_size[b]);
          f.values = { { "share_" + a, share_ab }, { "share_" + b, share_ba } };
          f.severity = std::min(share_ab, share_ba);
          findings.push_back(std::move(f));
        }
      }

      auto ia = tax.find(a);
      auto ib = tax.find(b);
      if (ia && ib && tax.node(tax.lowest_common_ancestor(*ia, *ib)).level == 0) {
        DiagnosticFinding f;
        f.kind = FindingKind::WrongLabelSuspect;
        f.subjects = { a, b };
        f.flows = { { a, b, ab } };
        f.severity = ratio(ab, true_size[a]);
        f.values = { { "share", f.severity } };
        findings.push_back(std::move(f));
      }
    }
  }

  for (std::size_t j = 0; j < errors.cols(); ++j) {
    const auto& p = errors.right_labels()[j];
    DiagnosticFinding f;
    f.kind = FindingKind::BroadCategory;
    f.subjects = { p };
    std::int64_t inflow = 0;
    for (std::size_t i = 0; i < errors.rows(); ++i) {
      const auto c = errors.at(i, j);
      if (c >= options.min_flow) {
        f.flows.push_back({ errors.left_labels()[i], p, c });
        inflow += c;
      }
    }
    if (f.flows.size() >= options.broad_fanin && !f.flows.empty()) {
      f.severity = ratio(inflow, predicted_size[p]);
      f.values = { { "fanin", static_cast<double>(f.flows.size()) },
                   { "share_of_predictions", f.severity } };
      findings.push_back(std::move(f));
    }
  }

  sort_findings(findings);
  return findings;
}

LayeredFlow model_diff(std::span<const ModelRun* const> runs, bool with_item_paths)
{
  if (runs.size() < 2) {
    throw Error(ErrorCode::InsufficientData, "model comparison needs at least two runs");
  }
  std::vector<std::unordered_map<std::string_view, const std::string*>> predicted(runs.size());
  for (std::size_t k = 0; k < runs.size(); ++k) {
    predicted[k].reserve(runs[k]->records.size());
    for (const auto& r : runs[k]->records) {
      predicted[k].emplace(r.item_id, &r.predicted_label);
    }
  }

  LayeredFlow out;
  for (const auto* run : runs) {
    out.layers.push_back(run->model_id);
  }
  std::vector<FlowBuilder> builders(runs.size() - 1);
  if (with_item_paths) {
    out.item_paths.emplace();
  }
  std::vector<const std::string*> path(runs.size());
  std::size_t shared = 0;
  for (const auto& r : runs.front()->records) {
    bool everywhere = true;
    for (std::size_t k = 0; k < runs.size() && everywhere; ++k) {
      auto it = predicted[k].find(r.item_id);
      if (it == predicted[k].end()) {
        everywhere = false;
      } else {
        path[k] = it->second;
      }
    }
    if (!everywhere) {
      continue;
    }
    ++shared;
    for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
      builders[k].add(*path[k], *path[k + 1]);
    }
    if (with_item_paths) {
      auto& labels = (*out.item_paths)[r.item_id];
      for (const auto* p : path) {
        labels.push_back(*p);
      }
    }
  }
  if (shared == 0) {
    throw Error(ErrorCode::InsufficientData, "the runs share no evaluation items");
  }
  for (const auto& b : builders) {
    out.matrices.push_back(b.build());
  }
  return out;
}

LayeredFlow model_diff(std::span<const ModelRun> runs, bool with_item_paths)
{
  std::vector<const ModelRun*> ptrs;
  for (const auto& r : runs) {
    ptrs.push_back(&r);
  }
  return model_diff(std::span<const ModelRun* const>(ptrs), with_item_paths);
}

std::string_view to_string(Trend trend)
{
  switch (trend) {
    case Trend::StrictlyIncreasing: return "StrictlyIncreasing";
    case Trend::StrictlyDecreasing: return "StrictlyDecreasing";
    case Trend::OverallIncreasing: return "OverallIncreasing";
    case Trend::OverallDecreasing: return "OverallDecreasing";
    case Trend::Stable: return "Stable";
  }
  return "Stable";
}

std::string_view to_string(TrendColor color)
{
  switch (color) {
    case TrendColor::blue: return "blue";
    case TrendColor::red: return "red";
    case TrendColor::light_blue: return "light_blue";
    case TrendColor::orange: return "orange";
  }
  return "light_blue";
}

TrendColor color_of(Trend trend)
{
  switch (trend) {
    case Trend::StrictlyIncreasing: return TrendColor::blue;
    case Trend::StrictlyDecreasing: return TrendColor::red;
    case Trend::OverallIncreasing:
    case Trend::Stable: return TrendColor::light_blue;
    case Trend::OverallDecreasing: return TrendColor::orange;
  }
  return TrendColor::light_blue;
}

Trend classify_trend(std::span<const double> series, double epsilon)
{
  if (series.size() < 2) {
    throw Error(ErrorCode::InsufficientData, "a trend needs at least two points");
  }
  bool up = true;
  bool down = true;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double delta = series[i] - series[i - 1];
    up = up && delta > epsilon;
    down = down && delta < -epsilon;
  }
  if (up) {
    return Trend::StrictlyIncreasing;
  }
  if (down) {
    return Trend::StrictlyDecreasing;
  }
  const double overall = series.back() - series.front();
  if (std::abs(overall) <= epsilon) {
    return Trend::Stable;
  }
  return overall > 0.0 ? Trend::OverallIncreasing : Trend::OverallDecreasing;
}

std::vector<TrendClass> trend(const std::map<std::string, std::vector<double>>& series_by_category,
                              double epsilon)
{
  std::vector<TrendClass> out;
  out.reserve(series_by_category.size());
  for (const auto& [category, series] : series_by_category) {
    TrendClass t;
    t.category = category;
    t.series = series;
    try {
      t.trend = classify_trend(series, epsilon);
    } catch (const Error&) {
      throw Error(ErrorCode::InsufficientData,
                  "series for '" + category + "' has fewer than two points");
    }
    t.color = color_of(t.trend);
    out.push_back(std::move(t));
  }
  return out;
}

std::map<std::string, std::vector<double>> accuracy_series(std::span<const ModelRun* const> runs)
{
  std::map<std::string, std::vector<double>> out;
  std::map<std::string, std::size_t> seen;
  for (const auto* run : runs) {
    for (const auto& row : accuracy_report(*run)) {
      out[row.category].push_back(row.accuracy);
      ++seen[row.category];
    }
  }
  for (const auto& [category, n] : seen) {
    if (n != runs.size()) {
      out.erase(category);
    }
  }
  return out;
}

std::vector<DiagnosticFinding> audit(const DatasetSnapshot& snapshot,
                                     double beta,
                                     double trust_threshold)
{
  std::vector<DiagnosticFinding> out;
  const auto& tax = snapshot.taxonomy();
  for (std::size_t n = 0; n < tax.size(); ++n) {
    if (tax.is_leaf(n)) {
      if (snapshot.label_counts(n).subtree_total == 0) {
        continue;
      }
      auto q = quality_report(snapshot, tax.node(n).id, trust_threshold);
      if (q.flagged) {
        DiagnosticFinding f;
        f.kind = FindingKind::LowTrustLabels;
        f.subjects = { q.category };
        f.values = { { "trusted_share", q.trusted_share },
                     { "labels", static_cast<double>(q.labels) } };
        f.severity = trust_threshold > 0.0 ? 1.0 - q.trusted_share / trust_threshold : 0.0;
        out.push_back(std::move(f));
      }
      continue;
    }
    auto q = quantity_report(snapshot, tax.node(n).id, beta);
    if (q.total == 0) {
      continue;
    }
    for (const auto& child : q.children) {
      if (!child.flagged) {
        continue;
      }
      DiagnosticFinding f;
      f.kind = FindingKind::LabelImbalance;
      f.subjects = { q.parent, child.child };
      f.values = { { "share", child.share },
                   { "threshold", q.threshold },
                   { "count", static_cast<double>(child.count) } };
      f.severity = q.threshold > 0.0 ? 1.0 - child.share / q.threshold : 0.0;
      out.push_back(std::move(f));
    }
  }
  sort_findings(out);
  return out;
}

std::vector<DiagnosticFinding> regressions(const std::vector<TrendClass>& trends)
{
  std::vector<DiagnosticFinding> out;
  for (const auto& t : trends) {
    if (t.trend != Trend::StrictlyDecreasing && t.trend != Trend::OverallDecreasing) {
      continue;
    }
    DiagnosticFinding f;
    f.kind = FindingKind::AccuracyRegression;
    f.subjects = { t.category };
    const double drop = t.series.front() - t.series.back();
    f.values = { { "first", t.series.front() },
                 { "last", t.series.back() },
                 { "drop", drop } };
    f.severity = std::clamp(drop, 0.0, 1.0);
    out.push_back(std::move(f));
  }
  sort_findings(out);
  return out;
}

} // namespace flowscope
