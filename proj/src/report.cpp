#include "flowscope/report.hpp"

#include "flowscope/distributions.hpp"
#include "flowscope/error.hpp"
#include "flowscope/evaluation.hpp"
#include "flowscope/features.hpp"
#include "flowscope/layout.hpp"

#include <algorithm>

namespace flowscope {

namespace {

std::string node_or_root(const DatasetSnapshot& snapshot, std::string_view node)
{
  if (node.empty()) {
    const auto& tax = snapshot.taxonomy();
    return tax.node(tax.root()).id;
  }
  return std::string(node);
}

// Layouts of flows that may legitimately be empty (a perfect model, an
// unlabeled subtree) are reported as null rather than failing the payload.
json layout_or_null(const std::vector<FlowMatrix>& chain, const SankeyOptions& options = {})
{
  try {
    return layout_sankey(std::span<const FlowMatrix>(chain), options);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyFlow) {
      throw;
    }
    return nullptr;
  }
}

std::vector<const ModelRun*> resolve_runs(const DatasetSnapshot& snapshot,
                                          const std::vector<std::string>& ids)
{
  std::vector<const ModelRun*> out;
  if (ids.empty()) {
    for (const auto& r : snapshot.runs()) {
      out.push_back(&r);
    }
    return out;
  }
  for (const auto& id : ids) {
    out.push_back(&snapshot.run(id));
  }
  return out;
}

// Restricts every run to records whose true label lies under `category`.
std::vector<ModelRun> filtered_runs(const DatasetSnapshot& snapshot,
                                    const std::vector<const ModelRun*>& runs,
                                    std::string_view category)
{
  const auto& tax = snapshot.taxonomy();
  const auto root = tax.index_of(category);
  std::vector<ModelRun> out;
  out.reserve(runs.size());
  for (const auto* r : runs) {
    ModelRun copy{ r->model_id, r->ordinal, {} };
    for (const auto& rec : r->records) {
      const auto n = tax.find(rec.true_label);
      if (n && tax.in_subtree(*n, root)) {
        copy.records.push_back(rec);
      }
    }
    out.push_back(std::move(copy));
  }
  return out;
}

LayeredFlow diff_flow(const DatasetSnapshot& snapshot,
                      const std::vector<std::string>& runs,
                      std::string_view category)
{
  const auto resolved = resolve_runs(snapshot, runs);
  if (category.empty()) {
    return model_diff(std::span<const ModelRun* const>(resolved));
  }
  const auto subset = filtered_runs(snapshot, resolved, category);
  return model_diff(std::span<const ModelRun>(subset));
}

SankeyOptions sankey_options(const json& j)
{
  SankeyOptions o;
  if (j.is_null()) {
    return o;
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::InvalidArgument, "layout options must be an object");
  }
  try {
    o.gap = j.value("gap", o.gap);
    o.min_share = j.value("minShare", o.min_share);
    o.reorder = j.value("reorder", o.reorder);
    o.max_sweeps = j.value("maxSweeps", o.max_sweeps);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("invalid layout options: ") + e.what());
  }
  if (!(o.gap >= 0.0 && o.gap < 1.0) || !(o.min_share >= 0.0 && o.min_share < 1.0) ||
      o.max_sweeps < 0) {
    throw Error(ErrorCode::InvalidArgument, "layout options out of range");
  }
  return o;
}

std::vector<std::string> string_list(const json& j, const char* key)
{
  std::vector<std::string> out;
  if (!j.contains(key)) {
    return out;
  }
  try {
    return j.at(key).get<std::vector<std::string>>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be a list of strings");
  }
}

std::string string_field(const json& j, const char* key)
{
  if (!j.contains(key)) {
    return {};
  }
  if (!j.at(key).is_string()) {
    throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be a string");
  }
  return j.at(key).get<std::string>();
}

json error_json(const Error& e)
{
  return json{ { "code", std::string(to_string(e.code())) }, { "message", e.what() } };
}

// Runs one section of the `all` report; a section whose inputs are missing
// records its error instead of aborting the whole report.
template <typename Fn>
void section(json& out, const std::string& key, Fn&& fn)
{
  try {
    out[key] = fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Internal) {
      throw;
    }
    out[key] = json{ { "error", error_json(e) } };
  }
}

} // namespace

FlowMatrix flow_matrix_from_json(const json& j)
{
  try {
    auto left = j.at("left").get<std::vector<std::string>>();
    auto right = j.at("right").get<std::vector<std::string>>();
    std::vector<std::int64_t> counts;
    const auto& rows = j.at("counts");
    if (!rows.is_array() || rows.size() != left.size()) {
      throw Error(ErrorCode::InvalidArgument, "counts must have one row per left label");
    }
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != right.size()) {
        throw Error(ErrorCode::InvalidArgument, "counts rows must have one entry per right label");
      }
      for (const auto& c : row) {
        counts.push_back(c.get<std::int64_t>());
      }
    }
    return FlowMatrix::from_counts(std::move(left), std::move(right), std::move(counts));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("invalid flow matrix: ") + e.what());
  }
}

json report_taxonomy(const DatasetSnapshot& snapshot)
{
  json out = taxonomy_json(snapshot);
  const auto& tax = snapshot.taxonomy();
  std::map<std::string, double> weights;
  for (std::size_t n = 0; n < tax.size(); ++n) {
    weights[tax.node(n).id] = static_cast<double>(snapshot.label_counts(n).subtree_positive);
  }
  out["radial"] = layout_radial(tax, &weights);
  return out;
}

json report_quantity(const DatasetSnapshot& snapshot, std::string_view node, double beta)
{
  return quantity_report(snapshot, node_or_root(snapshot, node), beta);
}

json report_quality(const DatasetSnapshot& snapshot, std::string_view node, double trust)
{
  return quality_report(snapshot, node_or_root(snapshot, node), trust);
}

json report_multilevel(const DatasetSnapshot& snapshot, std::string_view node, int depth)
{
  const auto root = node_or_root(snapshot, node);
  auto matrices = multilevel_quantity(snapshot, root, depth);
  return json{ { "node", root },
               { "depth", depth },
               { "matrices", matrices },
               { "layout", layout_or_null(matrices) } };
}

json report_features(const DatasetSnapshot& snapshot)
{
  json out = json::array();
  for (const auto& f : snapshot.features()) {
    out.push_back({ { "name", f.name() },
                    { "kind", std::string(to_string(f.kind())) },
                    { "items", f.size() } });
  }
  return out;
}

json report_feature_flow(const DatasetSnapshot& snapshot, std::string_view feature)
{
  std::vector<FlowMatrix> chain{ feature_label_flow(snapshot, feature) };
  return json{ { "feature", feature }, { "flow", chain.front() }, { "layout", layout_or_null(chain) } };
}

json report_importance(const DatasetSnapshot& snapshot, std::string_view feature)
{
  return importance(snapshot, feature);
}

json report_ranking(const DatasetSnapshot& snapshot)
{
  return rank_features(snapshot);
}

json report_welch(const DatasetSnapshot& snapshot,
                  std::string_view feature,
                  std::string_view a,
                  std::string_view b)
{
  return welch(snapshot, feature, a, b);
}

json report_violin(const DatasetSnapshot& snapshot,
                   std::string_view feature,
                   std::string_view category,
                   std::size_t grid)
{
  auto summary = violin(snapshot, feature, category, grid);
  auto outline = layout_violin(summary, 1.0);
  return json{ { "feature", feature }, { "summary", summary }, { "outline", outline } };
}

json report_runs(const DatasetSnapshot& snapshot)
{
  json out = json::array();
  for (const auto& r : snapshot.runs()) {
    std::int64_t correct = 0;
    for (const auto& rec : r.records) {
      correct += rec.true_label == rec.predicted_label ? 1 : 0;
    }
    const auto n = static_cast<std::int64_t>(r.records.size());
    out.push_back({ { "modelId", r.model_id },
                    { "ordinal", r.ordinal },
                    { "records", n },
                    { "correct", correct },
                    { "accuracy", n ? static_cast<double>(correct) / static_cast<double>(n) : 0.0 } });
  }
  return out;
}

json report_accuracy(const DatasetSnapshot& snapshot, std::string_view run)
{
  const auto& r = snapshot.run(run);
  return json{ { "run", r.model_id }, { "rows", accuracy_report(r) } };
}

json report_misclassification(const DatasetSnapshot& snapshot, std::string_view run)
{
  const auto& r = snapshot.run(run);
  std::vector<FlowMatrix> chain{ misclassification_flow(r) };
  json records = json::array();
  for (const auto& rec : r.records) {
    if (rec.true_label != rec.predicted_label) {
      records.push_back({ { "itemId", rec.item_id },
                          { "trueLabel", rec.true_label },
                          { "predictedLabel", rec.predicted_label } });
    }
  }
  return json{ { "run", r.model_id },
               { "flow", chain.front() },
               { "layout", layout_or_null(chain) },
               { "records", std::move(records) } };
}

json report_diagnose(const DatasetSnapshot& snapshot,
                     std::string_view run,
                     const DiagnoseOptions& options)
{
  const auto& r = snapshot.run(run);
  return json{ { "run", r.model_id },
               { "minFlow", options.min_flow },
               { "fanin", options.broad_fanin },
               { "findings", diagnose(r, snapshot, options) } };
}

json report_model_diff(const DatasetSnapshot& snapshot,
                       const std::vector<std::string>& runs,
                       std::string_view category)
{
  auto flow = diff_flow(snapshot, runs, category);
  json layout = nullptr;
  try {
    layout = layout_sankey(flow);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyFlow) {
      throw;
    }
  }
  return json{ { "flow", flow }, { "layout", std::move(layout) } };
}

json report_trends(const DatasetSnapshot& snapshot,
                   const std::vector<std::string>& runs,
                   double epsilon)
{
  if (!(epsilon >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must be non-negative");
  }
  const auto resolved = resolve_runs(snapshot, runs);
  if (resolved.size() < 2) {
    throw Error(ErrorCode::InsufficientData, "trends need at least two runs");
  }
  json ids = json::array();
  for (const auto* r : resolved) {
    ids.push_back(r->model_id);
  }
  auto classes = trend(accuracy_series(std::span<const ModelRun* const>(resolved)), epsilon);
  return json{ { "runs", std::move(ids) },
               { "epsilon", epsilon },
               { "trends", classes },
               { "grid", layout_trend_grid(classes) },
               { "regressions", regressions(classes) } };
}

json report_audit(const DatasetSnapshot& snapshot, double beta, double trust)
{
  return json{ { "beta", beta }, { "trust", trust }, { "findings", audit(snapshot, beta, trust) } };
}

json sankey_request(const DatasetSnapshot& snapshot, const json& body)
{
  if (!body.is_object()) {
    throw Error(ErrorCode::InvalidArgument, "layout request must be a JSON object");
  }
  const auto options = sankey_options(body.contains("options") ? body["options"] : json());
  std::vector<FlowMatrix> chain;
  if (body.contains("matrices")) {
    if (!body["matrices"].is_array()) {
      throw Error(ErrorCode::InvalidArgument, "'matrices' must be an array");
    }
    for (const auto& m : body["matrices"]) {
      chain.push_back(flow_matrix_from_json(m));
    }
  } else if (body.contains("matrix")) {
    chain.push_back(flow_matrix_from_json(body["matrix"]));
  } else {
    const auto kind = string_field(body, "kind");
    if (kind == "misclassification") {
      chain.push_back(misclassification_flow(snapshot.run(string_field(body, "run"))));
    } else if (kind == "model-diff") {
      chain = diff_flow(snapshot, string_list(body, "runs"), string_field(body, "category")).matrices;
    } else if (kind == "multilevel") {
      int depth = 2;
      if (body.contains("depth")) {
        if (!body["depth"].is_number_integer()) {
          throw Error(ErrorCode::InvalidArgument, "'depth' must be an integer");
        }
        depth = body["depth"].get<int>();
      }
      chain = multilevel_quantity(snapshot, node_or_root(snapshot, string_field(body, "node")), depth);
    } else if (kind == "feature-flow") {
      chain.push_back(feature_label_flow(snapshot, string_field(body, "feature")));
    } else {
      throw Error(ErrorCode::InvalidArgument,
                  "layout request needs 'matrices', 'matrix' or a known 'kind'");
    }
  }
  return layout_sankey(std::span<const FlowMatrix>(chain), options);
}

const std::vector<std::string>& report_kinds()
{
  static const std::vector<std::string> kinds{ "accuracy", "misclassification", "quantity",
                                               "quality",  "multilevel",        "importance",
                                               "welch",    "violin",            "diagnose",
                                               "model-diff", "trend",           "audit",
                                               "taxonomy", "features",          "runs",
                                               "feature-flow", "all" };
  return kinds;
}

namespace {

json report_all(const DatasetSnapshot& snapshot, const ReportParams& p)
{
  const auto& tax = snapshot.taxonomy();
  const auto root = tax.node(tax.root()).id;
  json out = json::object();
  section(out, "taxonomy", [&] { return report_taxonomy(snapshot); });
  section(out, "quantity", [&] { return report_quantity(snapshot, root, p.beta); });
  section(out, "quality", [&] { return report_quality(snapshot, root, p.trust); });
  section(out, "multilevel", [&] { return report_multilevel(snapshot, root, p.depth); });
  section(out, "features", [&] { return report_features(snapshot); });
  section(out, "importance", [&] { return report_ranking(snapshot); });

  // Two-class statistics for every numeric feature over the two level-1
  // categories with the most positive labels.
  std::vector<std::size_t> top = tax.children(tax.root());
  std::stable_sort(top.begin(), top.end(), [&](std::size_t a, std::size_t b) {
    return snapshot.label_counts(a).subtree_positive > snapshot.label_counts(b).subtree_positive;
  });
  json welch_out = json::object();
  json violin_out = json::object();
  for (const auto& f : snapshot.features()) {
    if (f.kind() != FeatureKind::numeric) {
      continue;
    }
    if (top.size() >= 2) {
      section(welch_out, f.name(), [&] {
        return report_welch(snapshot, f.name(), tax.node(top[0]).id, tax.node(top[1]).id);
      });
    }
    json per_category = json::object();
    for (auto c : top) {
      section(per_category, tax.node(c).id,
              [&] { return report_violin(snapshot, f.name(), tax.node(c).id, p.grid); });
    }
    violin_out[f.name()] = std::move(per_category);
  }
  out["welch"] = std::move(welch_out);
  out["violin"] = std::move(violin_out);

  section(out, "runs", [&] { return report_runs(snapshot); });
  json per_run = json::object();
  const DiagnoseOptions diag{ p.min_flow, p.fanin };
  for (const auto& r : snapshot.runs()) {
    json entry = json::object();
    section(entry, "accuracy", [&] { return report_accuracy(snapshot, r.model_id); });
    section(entry, "misclassification", [&] { return report_misclassification(snapshot, r.model_id); });
    section(entry, "diagnose", [&] { return report_diagnose(snapshot, r.model_id, diag); });
    per_run[r.model_id] = std::move(entry);
  }
  out["perRun"] = std::move(per_run);
  section(out, "modelDiff", [&] { return report_model_diff(snapshot, p.runs); });
  section(out, "trends", [&] { return report_trends(snapshot, p.runs, p.epsilon); });
  section(out, "audit", [&] { return report_audit(snapshot, p.beta, p.trust); });
  return out;
}

std::string_view require(std::string_view value, const char* flag)
{
  if (value.empty()) {
    throw Error(ErrorCode::InvalidArgument, std::string("missing required parameter ") + flag);
  }
  return value;
}

} // namespace

json run_report(const DatasetSnapshot& snapshot, std::string_view kind, const ReportParams& p)
{
  if (kind == "accuracy") {
    return report_accuracy(snapshot, require(p.run, "--run"));
  }
  if (kind == "misclassification") {
    return report_misclassification(snapshot, require(p.run, "--run"));
  }
  if (kind == "quantity") {
    return report_quantity(snapshot, p.node, p.beta);
  }
  if (kind == "quality") {
    return report_quality(snapshot, p.node, p.trust);
  }
  if (kind == "multilevel") {
    return report_multilevel(snapshot, p.node, p.depth);
  }
  if (kind == "importance") {
    return p.feature.empty() ? report_ranking(snapshot) : report_importance(snapshot, p.feature);
  }
  if (kind == "welch") {
    return report_welch(snapshot, require(p.feature, "--feature"), require(p.class_a, "--a"),
                        require(p.class_b, "--b"));
  }
  if (kind == "violin") {
    return report_violin(snapshot, require(p.feature, "--feature"),
                         require(p.category, "--category"), p.grid);
  }
  if (kind == "diagnose") {
    return report_diagnose(snapshot, require(p.run, "--run"), DiagnoseOptions{ p.min_flow, p.fanin });
  }
  if (kind == "model-diff") {
    return report_model_diff(snapshot, p.runs, p.category);
  }
  if (kind == "trend") {
    return report_trends(snapshot, p.runs, p.epsilon);
  }
  if (kind == "audit") {
    return report_audit(snapshot, p.beta, p.trust);
  }
  if (kind == "taxonomy") {
    return report_taxonomy(snapshot);
  }
  if (kind == "features") {
    return report_features(snapshot);
  }
  if (kind == "runs") {
    return report_runs(snapshot);
  }
  if (kind == "feature-flow") {
    return report_feature_flow(snapshot, require(p.feature, "--feature"));
  }
  if (kind == "all") {
    return report_all(snapshot, p);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown report kind '" + std::string(kind) + "'");
}

} // namespace flowscope
