#include "flowscope/synth.hpp"

#include "flowscope/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

namespace flowscope {

namespace {

// Portable draws: std:: distributions differ between standard libraries, so
// everything is derived from the raw 64-bit engine output.
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
    : engine_(seed)
  {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

  double normal()
  {
    // Box-Muller; one draw per call keeps the stream simple
    const double u1 = std::max(uniform(), 1e-300);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

private:
  std::mt19937_64 engine_;
};

std::string padded(const char* prefix, std::size_t n)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%06zu", prefix, n);
  return buf;
}

Taxonomy make_taxonomy(const std::vector<int>& branching)
{
  std::vector<TaxonomyNode> nodes{ { "root", "All", std::nullopt, 0 } };
  std::vector<std::size_t> frontier{ 0 };
  for (std::size_t level = 0; level < branching.size(); ++level) {
    if (branching[level] < 1) {
      throw Error(ErrorCode::InvalidArgument, "branching factors must be positive");
    }
    std::vector<std::size_t> next;
    for (auto parent : frontier) {
      const std::string base = parent == 0 ? "c" : nodes[parent].id;
      for (int k = 1; k <= branching[level]; ++k) {
        const std::string id = base + "." + std::to_string(k);
        next.push_back(nodes.size());
        nodes.push_back({ id, "Category " + id.substr(2), nodes[parent].id,
                          static_cast<int>(level) + 1 });
      }
    }
    frontier = std::move(next);
  }
  return Taxonomy(std::move(nodes));
}

// Cumulative weights for a Zipf-like leaf popularity.
std::vector<double> cumulative_popularity(std::size_t n)
{
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += 1.0 / std::pow(static_cast<double>(i + 1), 0.6);
    cdf[i] = acc;
  }
  for (auto& c : cdf) {
    c /= acc;
  }
  return cdf;
}

std::size_t draw(Rng& rng, const std::vector<double>& cdf)
{
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), rng.uniform());
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

} // namespace

SynthCatalog synthesize(const SynthOptions& options)
{
  if (options.branching.empty()) {
    throw Error(ErrorCode::InvalidArgument, "synthetic taxonomy needs at least one level");
  }
  Rng rng(options.seed);
  SynthCatalog cat;
  cat.taxonomy = make_taxonomy(options.branching);
  cat.sources = SourceRegistry::defaults();
  const auto& tax = cat.taxonomy;

  std::vector<std::size_t> leaves;
  for (std::size_t n = 0; n < tax.size(); ++n) {
    if (tax.is_leaf(n)) {
      leaves.push_back(n);
    }
  }
  // Shuffle popularity ranks so the skew is not aligned with document order.
  std::vector<std::size_t> rank(leaves.size());
  for (std::size_t i = 0; i < rank.size(); ++i) {
    rank[i] = i;
  }
  for (std::size_t i = rank.size(); i > 1; --i) {
    std::swap(rank[i - 1], rank[rng.below(i)]);
  }
  const auto cdf = cumulative_popularity(leaves.size());
  auto top_of = [&](std::size_t node) {
    const auto path = tax.path(node);
    return path.size() > 1 ? path[1] : path[0];
  };

  static const char* const kSources[] = { "expert", "crowd", "curation", "rule" };
  static const double kSourceCdf[] = { 0.15, 0.55, 0.75, 1.0 };
  static const char* const kColors[] = { "red", "green", "blue", "black", "white" };

  FeatureColumn price("price", FeatureKind::numeric);
  FeatureColumn rating("rating", FeatureKind::numeric);
  FeatureColumn brand("brand", FeatureKind::categorical);
  FeatureColumn color("color", FeatureKind::categorical);

  cat.instances.reserve(options.instances);
  for (std::size_t i = 0; i < options.instances; ++i) {
    const auto leaf = leaves[rank[draw(rng, cdf)]];
    const double s = rng.uniform();
    std::size_t src = 0;
    while (s > kSourceCdf[src]) {
      ++src;
    }
    LabeledInstance inst;
    inst.item_id = padded("item-", i);
    inst.title = "Item " + std::to_string(i);
    inst.label = tax.node(leaf).id;
    inst.source = kSources[src];
    inst.decision = rng.uniform() < 0.9 ? Decision::positive : Decision::negative;
    if (i % 10 == 0) {
      char ts[32];
      std::snprintf(ts, sizeof ts, "2024-%02zu-%02zuT12:00:00Z", 1 + i % 12, 1 + i % 28);
      inst.timestamp = ts;
    }

    const auto top = top_of(leaf);
    const auto top_rank = static_cast<double>(
      std::find(tax.children(tax.root()).begin(), tax.children(tax.root()).end(), top) -
      tax.children(tax.root()).begin());
    price.add_numeric(inst.item_id, std::round((20.0 + 15.0 * top_rank + 8.0 * rng.normal()) * 100.0) / 100.0);
    rating.add_numeric(inst.item_id, std::round((3.5 + 0.8 * rng.normal()) * 10.0) / 10.0);
    // brand tracks the level-1 category 80% of the time
    const auto brand_id = rng.uniform() < 0.8 ? static_cast<std::size_t>(top_rank) : rng.below(8);
    brand.add_categorical(inst.item_id, "brand-" + std::to_string(brand_id));
    color.add_categorical(inst.item_id, kColors[rng.below(5)]);
    cat.instances.push_back(std::move(inst));
  }
  cat.features = { std::move(price), std::move(rating), std::move(brand), std::move(color) };

  // Per-leaf accuracy drifts linearly across runs.
  std::vector<double> base(leaves.size());
  std::vector<double> drift(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    base[i] = 0.7 + 0.25 * rng.uniform();
    drift[i] = -0.04 + 0.1 * rng.uniform();
  }
  std::vector<std::size_t> eval_leaf(options.eval_per_run);
  for (auto& l : eval_leaf) {
    l = draw(rng, cdf);
  }
  for (std::size_t r = 0; r < options.runs; ++r) {
    ModelRun run;
    run.model_id = "M" + std::to_string(r);
    run.ordinal = static_cast<long long>(r);
    run.records.reserve(options.eval_per_run);
    for (std::size_t e = 0; e < options.eval_per_run; ++e) {
      const auto li = rank[eval_leaf[e]];
      const auto leaf = leaves[li];
      const double acc = std::clamp(base[li] + drift[li] * static_cast<double>(r), 0.05, 0.99);
      std::size_t predicted = leaf;
      if (rng.uniform() >= acc) {
        const auto parent = *tax.parent(leaf);
        const auto& siblings = tax.children(parent);
        if (rng.uniform() < 0.75 && siblings.size() > 1) {
          do {
            predicted = siblings[rng.below(siblings.size())];
          } while (predicted == leaf);
        } else {
          do {
            predicted = leaves[rng.below(leaves.size())];
          } while (predicted == leaf && leaves.size() > 1);
        }
      }
      run.records.push_back({ padded("eval-", e), tax.node(leaf).id, tax.node(predicted).id });
    }
    cat.runs.push_back(std::move(run));
  }
  return cat;
}

void write_catalog(const SynthCatalog& catalog, const std::filesystem::path& dir)
{
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) {
      throw Error(ErrorCode::InvalidArgument, "cannot write " + (dir / name).string());
    }
    return out;
  };
  {
    auto out = open("taxonomy.jsonl");
    write_taxonomy(out, catalog.taxonomy);
  }
  {
    auto out = open("labels.jsonl");
    write_labels(out, catalog.instances);
  }
  {
    auto out = open("features.jsonl");
    write_features(out, catalog.features);
  }
  {
    auto out = open("evaluation.jsonl");
    write_evaluation(out, catalog.runs);
  }
  {
    auto out = open("sources.jsonl");
    write_sources(out, catalog.sources);
  }
}

} // namespace flowscope
