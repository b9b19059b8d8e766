#pragma once

#include "flowscope/distributions.hpp"
#include "flowscope/flow_matrix.hpp"
#include "flowscope/snapshot.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flowscope {

struct AccuracyRow
{
  std::string category;
  std::int64_t sample_size = 0;
  std::int64_t correct = 0;
  double accuracy = 0.0;

  bool operator==(const AccuracyRow&) const = default;
};

//! One row per true label, sorted by category key. Throws InsufficientData on
//! an empty run.
std::vector<AccuracyRow> accuracy_report(const ModelRun& run);

//! True label -> predicted label over mispredicted records only.
FlowMatrix misclassification_flow(const ModelRun& run);

enum class FindingKind
{
  BidirectionalConfusion,
  BroadCategory,
  WrongLabelSuspect,
  AccuracyRegression,
  LabelImbalance,
  LowTrustLabels
};

std::string_view to_string(FindingKind kind);

struct FlowEvidence
{
  std::string from;
  std::string to;
  std::int64_t count = 0;

  bool operator==(const FlowEvidence&) const = default;
};

struct DiagnosticFinding
{
  FindingKind kind = FindingKind::BidirectionalConfusion;
  std::vector<std::string> subjects;
  std::vector<FlowEvidence> flows;
  //! Named scalar evidence (shares, sizes, accuracies).
  std::vector<std::pair<std::string, double>> values;
  double severity = 0.0;

  bool operator==(const DiagnosticFinding&) const = default;
};

struct DiagnoseOptions
{
  std::int64_t min_flow = 5;
  std::size_t broad_fanin = 3;
};

//! Misclassification-flow diagnostics:
//!  - BidirectionalConfusion: both A->B and B->A carry >= min_flow errors.
//!  - BroadCategory: a predicted label receives >= min_flow errors from each
//!    of >= broad_fanin distinct true labels.
//!  - WrongLabelSuspect: a flow >= min_flow between categories whose taxonomy
//!    paths already differ at level 1.
//! Sorted by severity (descending), then subject keys, then kind.
std::vector<DiagnosticFinding> diagnose(const ModelRun& run,
                                        const DatasetSnapshot& snapshot,
                                        const DiagnoseOptions& options = {});

struct LayeredFlow
{
  std::vector<std::string> layers; // model ids
  std::vector<FlowMatrix> matrices;
  //! item id -> predicted label per layer, when requested.
  std::optional<std::map<std::string, std::vector<std::string>>> item_paths;
};

//! Prediction changes between consecutive runs over the items every run
//! evaluated. Throws InsufficientData for < 2 runs or an empty intersection.
LayeredFlow model_diff(std::span<const ModelRun* const> runs, bool with_item_paths = false);
LayeredFlow model_diff(std::span<const ModelRun> runs, bool with_item_paths = false);

enum class Trend
{
  StrictlyIncreasing,
  StrictlyDecreasing,
  OverallIncreasing,
  OverallDecreasing,
  Stable
};

enum class TrendColor
{
  blue,
  red,
  light_blue,
  orange
};

std::string_view to_string(Trend trend);
std::string_view to_string(TrendColor color);
TrendColor color_of(Trend trend);

struct TrendClass
{
  std::string category;
  std::vector<double> series;
  Trend trend = Trend::Stable;
  TrendColor color = TrendColor::light_blue;
};

//! Consecutive deltas all > eps (< -eps) give the strict classes; otherwise
//! the endpoint difference decides, with |delta| <= eps mapping to Stable.
Trend classify_trend(std::span<const double> series, double epsilon = 0.005);

std::vector<TrendClass> trend(const std::map<std::string, std::vector<double>>& series_by_category,
                              double epsilon = 0.005);

//! Per-category accuracy across runs (in the given order), for categories
//! that every run evaluates.
std::map<std::string, std::vector<double>> accuracy_series(std::span<const ModelRun* const> runs);

//! Training-data audit: LabelImbalance for every flagged quantity child and
//! LowTrustLabels for every flagged leaf with labels.
std::vector<DiagnosticFinding> audit(const DatasetSnapshot& snapshot,
                                     double beta = 0.5,
                                     double trust_threshold = 0.5);

//! AccuracyRegression for every trend classified as decreasing.
std::vector<DiagnosticFinding> regressions(const std::vector<TrendClass>& trends);

} // namespace flowscope
