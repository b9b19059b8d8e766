#pragma once

// Analysis payloads shared by the CLI `report` command and the HTTP API, so
// both emit byte-identical JSON for the same snapshot and parameters.

#include "flowscope/serialize.hpp"
#include "flowscope/snapshot.hpp"

#include <string>
#include <vector>

namespace flowscope {

struct ReportParams
{
  std::string run;
  std::vector<std::string> runs; // empty: every run, by ordinal
  std::string node;              // empty: taxonomy root
  double beta = 0.5;
  double trust = 0.5;
  int depth = 2;
  std::string feature;
  std::string class_a;
  std::string class_b;
  std::string category;
  double epsilon = 0.005;
  std::int64_t min_flow = 5;
  std::size_t fanin = 3;
  std::size_t grid = 64;
};

json report_taxonomy(const DatasetSnapshot& snapshot);
json report_quantity(const DatasetSnapshot& snapshot, std::string_view node, double beta);
json report_quality(const DatasetSnapshot& snapshot, std::string_view node, double trust);
json report_multilevel(const DatasetSnapshot& snapshot, std::string_view node, int depth);
json report_features(const DatasetSnapshot& snapshot);
json report_feature_flow(const DatasetSnapshot& snapshot, std::string_view feature);
json report_importance(const DatasetSnapshot& snapshot, std::string_view feature);
//! Every categorical feature, highest importance first.
json report_ranking(const DatasetSnapshot& snapshot);
json report_welch(const DatasetSnapshot& snapshot,
                  std::string_view feature,
                  std::string_view a,
                  std::string_view b);
//! {summary, outline}.
json report_violin(const DatasetSnapshot& snapshot,
                   std::string_view feature,
                   std::string_view category,
                   std::size_t grid = 64);
json report_runs(const DatasetSnapshot& snapshot);
json report_accuracy(const DatasetSnapshot& snapshot, std::string_view run);
json report_misclassification(const DatasetSnapshot& snapshot, std::string_view run);
json report_diagnose(const DatasetSnapshot& snapshot,
                     std::string_view run,
                     const DiagnoseOptions& options);
//! {flow, layout}. A non-empty `category` keeps only items whose true label
//! lies in that subtree.
json report_model_diff(const DatasetSnapshot& snapshot,
                       const std::vector<std::string>& runs,
                       std::string_view category = {});
json report_trends(const DatasetSnapshot& snapshot,
                   const std::vector<std::string>& runs,
                   double epsilon);
json report_audit(const DatasetSnapshot& snapshot, double beta, double trust);

//! Body: {"matrices": [FlowMatrix JSON...]} or {"matrix": ...}, or an analysis
//! reference {"kind": "misclassification"|"model-diff"|"multilevel"|"feature-flow",
//! plus run/runs/category/node/depth/feature}; optional "options":
//! {gap, minShare, reorder, maxSweeps}.
json sankey_request(const DatasetSnapshot& snapshot, const json& body);

//! Dispatch for `report --kind`. `all` runs every analysis with defaults.
json run_report(const DatasetSnapshot& snapshot, std::string_view kind, const ReportParams& params);
const std::vector<std::string>& report_kinds();

//! Parses {left, right, counts} back into a FlowMatrix.
FlowMatrix flow_matrix_from_json(const json& j);

} // namespace flowscope
