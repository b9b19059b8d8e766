#pragma once

// Deterministic synthetic catalogs for benchmarks and end-to-end tests.

#include "flowscope/ingest.hpp"
#include "flowscope/taxonomy.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace flowscope {

struct SynthOptions
{
  std::uint64_t seed = 7;
  std::vector<int> branching{ 5, 10, 10 }; // children per node, per level
  std::size_t instances = 100000;
  std::size_t runs = 3;
  std::size_t eval_per_run = 20000;
};

struct SynthCatalog
{
  Taxonomy taxonomy;
  std::vector<LabeledInstance> instances;
  std::vector<FeatureColumn> features;
  std::vector<ModelRun> runs;
  SourceRegistry sources;
};

//! Same options and seed give the same catalog. Leaf popularity is skewed,
//! numeric features shift with the level-1 category, and mistakes favour
//! sibling leaves so misclassification flows stay local.
SynthCatalog synthesize(const SynthOptions& options);

//! Writes taxonomy.jsonl, labels.jsonl, features.jsonl, evaluation.jsonl and
//! sources.jsonl into `dir` (created if needed).
void write_catalog(const SynthCatalog& catalog, const std::filesystem::path& dir);

} // namespace flowscope
