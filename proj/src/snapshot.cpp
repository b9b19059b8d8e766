#include "flowscope/snapshot.hpp"

#include "jsonl.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <unordered_set>

namespace flowscope {

std::string format_instant(Instant t)
{
  auto ms = t.time_since_epoch().count();
  std::time_t secs = static_cast<std::time_t>(ms / 1000);
  if (ms % 1000 < 0) {
    --secs;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf,
                static_cast<int>(((ms % 1000) + 1000) % 1000));
  return out;
}

DatasetSnapshot::DatasetSnapshot(Key,
                                 Taxonomy taxonomy,
                                 std::vector<LabeledInstance> instances,
                                 std::vector<FeatureColumn> features,
                                 std::vector<ModelRun> runs,
                                 SourceRegistry sources,
                                 std::set<int> trusted_ranks,
                                 Instant created_at)
  : taxonomy_(std::move(taxonomy))
  , instances_(std::move(instances))
  , features_(std::move(features))
  , runs_(std::move(runs))
  , sources_(std::move(sources))
  , trusted_ranks_(std::move(trusted_ranks))
  , created_at_(created_at)
{
  counts_.assign(taxonomy_.size(), {});
  by_node_.assign(taxonomy_.size(), {});
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    auto node = *taxonomy_.find(instances_[i].label);
    by_node_[node].push_back(i);
    auto& c = counts_[node];
    ++c.direct_total;
    if (instances_[i].decision == Decision::positive) {
      ++c.direct_positive;
    }
  }
  // Children carry higher levels than parents, so a level-descending pass
  // accumulates subtree totals.
  std::vector<std::size_t> order(taxonomy_.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return taxonomy_.node(a).level > taxonomy_.node(b).level;
  });
  for (auto n : order) {
    auto& c = counts_[n];
    c.subtree_positive += c.direct_positive;
    c.subtree_total += c.direct_total;
    if (auto p = taxonomy_.parent(n)) {
      counts_[*p].subtree_positive += c.subtree_positive;
      counts_[*p].subtree_total += c.subtree_total;
    }
  }
}

const FeatureColumn& DatasetSnapshot::feature(std::string_view name) const
{
  for (const auto& f : features_) {
    if (f.name() == name) {
      return f;
    }
  }
  throw Error(ErrorCode::UnknownFeature,
              "unknown feature '" + std::string(name) + "'");
}

const ModelRun& DatasetSnapshot::run(std::string_view model_id) const
{
  for (const auto& r : runs_) {
    if (r.model_id == model_id) {
      return r;
    }
  }
  throw Error(ErrorCode::UnknownRun,
              "unknown run '" + std::string(model_id) + "'");
}

std::vector<std::size_t> DatasetSnapshot::instances_in_subtree(std::size_t node) const
{
  std::vector<std::size_t> out;
  for (auto n : taxonomy_.subtree(node)) {
    const auto& direct = by_node_[n];
    out.insert(out.end(), direct.begin(), direct.end());
  }
  return out;
}

bool DatasetSnapshot::is_trusted(std::string_view source) const
{
  auto rank = sources_.rank(source);
  return rank && trusted_ranks_.count(*rank) > 0;
}

SnapshotStats DatasetSnapshot::stats() const
{
  SnapshotStats s;
  s.instances = instances_.size();
  for (const auto& r : runs_) {
    s.run_sizes.push_back(r.records.size());
  }
  return s;
}

bool DatasetSnapshot::operator==(const DatasetSnapshot& other) const
{
  return taxonomy_ == other.taxonomy_ && instances_ == other.instances_ &&
         features_ == other.features_ && runs_ == other.runs_ &&
         sources_ == other.sources_ &&
         trusted_ranks_ == other.trusted_ranks_ &&
         created_at_ == other.created_at_;
}

SnapshotPtr build_snapshot(Taxonomy taxonomy,
                           std::vector<LabeledInstance> instances,
                           std::vector<FeatureColumn> features,
                           std::vector<ModelRun> runs,
                           SourceRegistry sources,
                           std::set<int> trusted_ranks,
                           std::optional<Instant> created_at)
{
  std::vector<std::string> dangling;

  std::unordered_set<std::string> items;
  for (const auto& inst : instances) {
    items.insert(inst.item_id);
    if (!taxonomy.find(inst.label)) {
      dangling.push_back("instance '" + inst.item_id + "' label '" +
                         inst.label + "'");
    }
    if (!sources.contains(inst.source)) {
      dangling.push_back("instance '" + inst.item_id + "' source '" +
                         inst.source + "'");
    }
  }

  std::unordered_set<std::string> feature_names;
  for (const auto& column : features) {
    if (!feature_names.insert(column.name()).second) {
      dangling.push_back("feature '" + column.name() + "' defined twice");
    }
    for (const auto& item : column.item_ids()) {
      if (!items.count(item)) {
        dangling.push_back("feature '" + column.name() + "' item '" + item +
                           "'");
      }
    }
  }

  std::unordered_set<std::string> model_ids;
  std::set<long long> ordinals;
  for (const auto& run : runs) {
    if (!model_ids.insert(run.model_id).second) {
      dangling.push_back("run '" + run.model_id + "' defined twice");
    }
    if (!ordinals.insert(run.ordinal).second) {
      dangling.push_back("run '" + run.model_id + "' reuses ordinal " +
                         std::to_string(run.ordinal));
    }
    for (const auto& r : run.records) {
      for (const auto* label : { &r.true_label, &r.predicted_label }) {
        if (!taxonomy.find(*label)) {
          dangling.push_back("run '" + run.model_id + "' item '" + r.item_id +
                             "' label '" + *label + "'");
        }
      }
    }
  }

  if (!dangling.empty()) {
    std::string message = "dangling references: " + dangling.front();
    if (dangling.size() > 1) {
      message += " (and " + std::to_string(dangling.size() - 1) + " more)";
    }
    throw Error(ErrorCode::CrossReferenceError, message, std::move(dangling));
  }

  std::stable_sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) {
    return a.ordinal < b.ordinal;
  });

  Instant when = created_at.value_or(std::chrono::time_point_cast<std::chrono::milliseconds>(
    std::chrono::system_clock::now()));
  return std::make_shared<const DatasetSnapshot>(DatasetSnapshot::Key{},
                                                 std::move(taxonomy),
                                                 std::move(instances),
                                                 std::move(features),
                                                 std::move(runs),
                                                 std::move(sources),
                                                 std::move(trusted_ranks),
                                                 when);
}

namespace {

std::ifstream open_input(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::InvalidArgument,
                "cannot open '" + path.string() + "'");
  }
  return in;
}

template <typename Fn>
auto with_file(const std::filesystem::path& path, Fn&& fn)
{
  auto in = open_input(path);
  try {
    return fn(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.filename().string() + ": " + e.what(), e.details());
  }
}

struct LoadedParts
{
  Taxonomy taxonomy;
  std::vector<LabeledInstance> instances;
  std::vector<FeatureColumn> features;
  std::vector<ModelRun> runs;
  SourceRegistry sources;
  std::vector<std::string> warnings;
};

LoadedParts read_parts(const IngestPaths& paths,
                       const IngestOptions& options,
                       SourceRegistry sources)
{
  LoadedParts parts;
  parts.taxonomy = with_file(paths.taxonomy, [](std::istream& in) {
    return parse_taxonomy(in);
  });
  if (!paths.sources.empty()) {
    sources = with_file(paths.sources, [](std::istream& in) {
      return parse_sources(in);
    });
  }
  if (!paths.labels.empty()) {
    parts.instances = with_file(paths.labels, [&](std::istream& in) {
      return parse_labels(in, parts.taxonomy, sources, parts.warnings, options);
    });
  }
  if (!paths.features.empty()) {
    parts.features = with_file(paths.features, [](std::istream& in) {
      return parse_features(in);
    });
  }
  if (!paths.evaluation.empty()) {
    parts.runs = with_file(paths.evaluation, [&](std::istream& in) {
      return parse_evaluations(in, parts.taxonomy, options);
    });
  }
  parts.sources = std::move(sources);
  return parts;
}

} // namespace

IngestResult ingest_files(const IngestPaths& paths, const IngestOptions& options)
{
  auto parts = read_parts(paths, options, SourceRegistry::defaults());
  IngestResult result;
  result.snapshot = build_snapshot(std::move(parts.taxonomy),
                                   std::move(parts.instances),
                                   std::move(parts.features),
                                   std::move(parts.runs),
                                   std::move(parts.sources));
  result.warnings = std::move(parts.warnings);
  return result;
}

void save_snapshot(const DatasetSnapshot& snapshot, const std::filesystem::path& dir)
{
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::InvalidArgument,
                  "cannot write '" + (dir / name).string() + "'");
    }
    return out;
  };
  {
    auto out = open("taxonomy.jsonl");
    write_taxonomy(out, snapshot.taxonomy());
  }
  {
    auto out = open("labels.jsonl");
    write_labels(out, snapshot.instances());
  }
  {
    auto out = open("features.jsonl");
    write_features(out, snapshot.features());
  }
  {
    auto out = open("evaluation.jsonl");
    write_evaluation(out, snapshot.runs());
  }
  {
    auto out = open("sources.jsonl");
    write_sources(out, snapshot.sources());
  }
  detail::json manifest;
  manifest["created_at"] = format_instant(snapshot.created_at());
  manifest["created_at_ms"] = snapshot.created_at().time_since_epoch().count();
  manifest["trusted_ranks"] = snapshot.trusted_ranks();
  bool inner = false;
  for (const auto& inst : snapshot.instances()) {
    inner = inner || !snapshot.taxonomy().is_leaf(*snapshot.taxonomy().find(inst.label));
  }
  for (const auto& run : snapshot.runs()) {
    for (const auto& r : run.records) {
      for (const auto* label : { &r.true_label, &r.predicted_label }) {
        inner = inner || !snapshot.taxonomy().is_leaf(*snapshot.taxonomy().find(*label));
      }
    }
  }
  manifest["allow_inner_labels"] = inner;
  manifest["instances"] = snapshot.instances().size();
  auto runs = detail::json::array();
  for (const auto& run : snapshot.runs()) {
    runs.push_back({ { "model_id", run.model_id },
                     { "ordinal", run.ordinal },
                     { "records", run.records.size() } });
  }
  manifest["runs"] = runs;
  auto out = open("manifest.json");
  out << manifest.dump(2) << '\n';
}

IngestResult load_snapshot(const std::filesystem::path& dir)
{
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::InvalidArgument,
                "snapshot directory '" + dir.string() + "' does not exist");
  }
  detail::json manifest;
  {
    auto in = open_input(dir / "manifest.json");
    manifest = detail::json::parse(in, nullptr, false);
    if (manifest.is_discarded() || !manifest.is_object()) {
      throw Error(ErrorCode::MalformedRecord, "manifest.json is not a JSON object");
    }
  }
  struct Manifest
  {
    bool allow_inner_labels = false;
    std::vector<std::pair<std::string, long long>> runs;
    std::set<int> trusted{ 1, 2 };
    std::optional<Instant> created;
  } m;
  try {
    m.allow_inner_labels = manifest.value("allow_inner_labels", false);
    if (manifest.contains("runs")) {
      for (const auto& entry : manifest["runs"]) {
        m.runs.emplace_back(entry.at("model_id").get<std::string>(),
                            entry.at("ordinal").get<long long>());
      }
    }
    if (manifest.contains("trusted_ranks")) {
      m.trusted = manifest["trusted_ranks"].get<std::set<int>>();
    }
    if (manifest.contains("created_at_ms")) {
      m.created = Instant(std::chrono::milliseconds(manifest["created_at_ms"].get<long long>()));
    }
  } catch (const detail::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("manifest.json: ") + e.what());
  }

  IngestOptions options;
  options.allow_inner_labels = m.allow_inner_labels;
  IngestPaths paths{ dir / "taxonomy.jsonl", dir / "labels.jsonl",
                     dir / "features.jsonl", dir / "evaluation.jsonl",
                     dir / "sources.jsonl" };
  auto parts = read_parts(paths, options, SourceRegistry{});

  // Runs without records do not appear in evaluation.jsonl.
  for (const auto& [id, ordinal] : m.runs) {
    bool present = std::any_of(parts.runs.begin(), parts.runs.end(),
                               [&](const ModelRun& r) { return r.model_id == id; });
    if (!present) {
      ModelRun empty;
      empty.model_id = id;
      empty.ordinal = ordinal;
      parts.runs.push_back(std::move(empty));
    }
  }

  IngestResult result;
  result.snapshot = build_snapshot(std::move(parts.taxonomy),
                                   std::move(parts.instances),
                                   std::move(parts.features),
                                   std::move(parts.runs),
                                   std::move(parts.sources),
                                   std::move(m.trusted),
                                   m.created);
  result.warnings = std::move(parts.warnings);
  return result;
}

} // namespace flowscope
