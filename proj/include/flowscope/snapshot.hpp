#pragma once

#include "flowscope/ingest.hpp"
#include "flowscope/taxonomy.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace flowscope {

using Instant = std::chrono::sys_time<std::chrono::milliseconds>;

std::string format_instant(Instant t);

//! Per-node label tallies, computed once when the snapshot is built.
struct NodeLabelCounts
{
  std::int64_t direct_positive = 0;
  std::int64_t direct_total = 0;
  std::int64_t subtree_positive = 0;
  std::int64_t subtree_total = 0;
};

struct SnapshotStats
{
  std::size_t instances = 0;          // N
  std::vector<std::size_t> run_sizes; // N_E per run, in ordinal order
};

//! Immutable bundle of taxonomy, labels, features and evaluation runs at one
//! point in time. Only build_snapshot() constructs one; afterwards it is safe
//! to share across threads.
class DatasetSnapshot
{
  struct Key
  {};

public:
  DatasetSnapshot(Key,
                  Taxonomy taxonomy,
                  std::vector<LabeledInstance> instances,
                  std::vector<FeatureColumn> features,
                  std::vector<ModelRun> runs,
                  SourceRegistry sources,
                  std::set<int> trusted_ranks,
                  Instant created_at);

  const Taxonomy& taxonomy() const { return taxonomy_; }
  const std::vector<LabeledInstance>& instances() const { return instances_; }
  const std::vector<FeatureColumn>& features() const { return features_; }
  const std::vector<ModelRun>& runs() const { return runs_; }
  const SourceRegistry& sources() const { return sources_; }
  const std::set<int>& trusted_ranks() const { return trusted_ranks_; }
  Instant created_at() const { return created_at_; }

  //! Throws UnknownFeature.
  const FeatureColumn& feature(std::string_view name) const;
  //! Throws UnknownRun.
  const ModelRun& run(std::string_view model_id) const;

  const NodeLabelCounts& label_counts(std::size_t node) const { return counts_.at(node); }
  //! Instance indices labeled exactly at `node`, document order.
  const std::vector<std::size_t>& instances_at(std::size_t node) const
  {
    return by_node_.at(node);
  }
  //! Instance indices labeled anywhere in the subtree of `node`, in pre-order
  //! of the subtree then document order.
  std::vector<std::size_t> instances_in_subtree(std::size_t node) const;
  bool is_trusted(std::string_view source) const;

  SnapshotStats stats() const;

  bool operator==(const DatasetSnapshot& other) const;

private:
  Taxonomy taxonomy_;
  std::vector<LabeledInstance> instances_;
  std::vector<FeatureColumn> features_;
  std::vector<ModelRun> runs_;
  SourceRegistry sources_;
  std::set<int> trusted_ranks_;
  Instant created_at_;

  std::vector<NodeLabelCounts> counts_;
  std::vector<std::vector<std::size_t>> by_node_;

  friend std::shared_ptr<const DatasetSnapshot> build_snapshot(
    Taxonomy,
    std::vector<LabeledInstance>,
    std::vector<FeatureColumn>,
    std::vector<ModelRun>,
    SourceRegistry,
    std::set<int>,
    std::optional<Instant>);
};

using SnapshotPtr = std::shared_ptr<const DatasetSnapshot>;

//! Cross-validates the parts and assembles the snapshot; all-or-nothing.
//! Throws CrossReferenceError listing every dangling reference. Runs are
//! stored sorted by ordinal. `trusted_ranks` defaults to {1, 2}.
SnapshotPtr build_snapshot(Taxonomy taxonomy,
                           std::vector<LabeledInstance> instances,
                           std::vector<FeatureColumn> features,
                           std::vector<ModelRun> runs,
                           SourceRegistry sources,
                           std::set<int> trusted_ranks = { 1, 2 },
                           std::optional<Instant> created_at = std::nullopt);

//! Input file locations for ingest. Any of labels/features/evaluation/sources
//! may be empty paths.
struct IngestPaths
{
  std::filesystem::path taxonomy;
  std::filesystem::path labels;
  std::filesystem::path features;
  std::filesystem::path evaluation;
  std::filesystem::path sources;
};

struct IngestResult
{
  SnapshotPtr snapshot;
  std::vector<std::string> warnings;
};

IngestResult ingest_files(const IngestPaths& paths, const IngestOptions& options = {});

//! A snapshot directory holds taxonomy.jsonl, labels.jsonl, features.jsonl,
//! evaluation.jsonl, sources.jsonl and manifest.json.
void save_snapshot(const DatasetSnapshot& snapshot, const std::filesystem::path& dir);
IngestResult load_snapshot(const std::filesystem::path& dir);

} // namespace flowscope
