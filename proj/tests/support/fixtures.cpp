#include "fixtures.hpp"

#include "flowscope/ingest.hpp"
#include "flowscope/taxonomy.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

namespace fixture {

using nlohmann::json;

flowscope::FlowMatrix two_layer_example()
{
  return flowscope::FlowMatrix::from_counts({ "a", "b" }, { "x", "y", "z" },
                                            { 36, 18, 36, 0, 10, 0 });
}

namespace {

struct Leaf
{
  const char* id;
  const char* parent;
  int labels;
};

const std::vector<std::tuple<const char*, const char*, int>> kInner = {
  { "catalog", "", 0 },        { "electronics", "catalog", 1 }, { "cameras", "electronics", 2 },
  { "audio", "electronics", 2 }, { "apparel", "catalog", 1 },   { "tops", "apparel", 2 },
  { "bottoms", "apparel", 2 },  { "home", "catalog", 1 },       { "decor", "home", 2 },
  { "hardware", "home", 2 },
};

const std::vector<Leaf> kLeaves = {
  { "camcorders", "cameras", 40 }, { "lenses", "cameras", 36 },   { "tripods", "cameras", 4 },
  { "flash_memory", "cameras", 5 }, { "headphones", "audio", 20 }, { "speakers", "audio", 20 },
  { "knit_tops", "tops", 30 },     { "shirts", "tops", 25 },      { "tees", "tops", 25 },
  { "sweaters", "tops", 20 },      { "jeans", "bottoms", 25 },    { "shorts", "bottoms", 25 },
  { "wall_decor", "decor", 20 },   { "art_decor", "decor", 20 },  { "home_hardware", "hardware", 15 },
  { "tools", "hardware", 15 },
};

std::string top_of(const std::string& leaf_parent)
{
  if (leaf_parent == "cameras" || leaf_parent == "audio") {
    return "electronics";
  }
  if (leaf_parent == "tops" || leaf_parent == "bottoms") {
    return "apparel";
  }
  return "home";
}

} // namespace

CatalogFiles catalog_files()
{
  CatalogFiles f;
  std::ostringstream tax;
  for (const auto& [id, parent, level] : kInner) {
    json j{ { "id", id }, { "name", id }, { "level", level } };
    if (*parent) {
      j["parent_id"] = parent;
    }
    tax << j.dump() << '\n';
  }
  for (const auto& leaf : kLeaves) {
    tax << json{ { "id", leaf.id }, { "name", leaf.id }, { "parent_id", leaf.parent }, { "level", 3 } }.dump()
        << '\n';
  }
  f.taxonomy = tax.str();

  static const char* const kCycle[] = { "expert", "crowd", "curation", "rule" };
  std::ostringstream labels;
  std::ostringstream features;
  for (std::size_t li = 0; li < kLeaves.size(); ++li) {
    const auto& leaf = kLeaves[li];
    const std::string leaf_id = leaf.id;
    const auto top = top_of(leaf.parent);
    for (int k = 0; k < leaf.labels; ++k) {
      const std::string item = "p" + std::to_string(li) + "-" + std::to_string(k);
      std::string source;
      bool negative = k % 10 == 9;
      if (leaf_id == "camcorders") {
        source = k < 36 ? "rule" : "expert";
        negative = k < 6;
      } else if (leaf_id == "lenses") {
        source = kCycle[k % 3 == 2 ? 3 : k % 3]; // expert, crowd, rule evenly
        negative = k % 6 == 5 || k % 6 == 4;
      } else if (leaf_id == "tripods") {
        source = "expert";
        negative = false;
      } else if (leaf_id == "headphones") {
        source = "crowd";
      } else if (leaf_id == "speakers") {
        source = "expert";
      } else {
        source = kCycle[k % 4];
      }
      json l{ { "item_id", item },
              { "title", leaf_id + " item " + std::to_string(k) },
              { "label", leaf_id },
              { "source", source },
              { "decision", negative ? "negative" : "positive" } };
      if (k == 0) {
        l["timestamp"] = "2024-03-01T10:00:00Z";
      }
      labels << l.dump() << '\n';

      double price = 0.0;
      if (top == "electronics") {
        price = 200.0 + 3.0 * k + 11.0 * static_cast<double>(li);
      } else if (top == "apparel") {
        price = 30.0 + (k % 9) + 0.5 * static_cast<double>(li);
      } else {
        price = 60.0 + (k % 7) * 2.0;
      }
      features << json{ { "name", "price" }, { "kind", "numeric" }, { "item_id", item }, { "value", price } }.dump()
               << '\n';
      const std::string brand = k % 5 == 4 ? "generic"
                                : top == "electronics" ? "acme"
                                : top == "apparel"     ? "threadco"
                                                       : "homely";
      features << json{ { "name", "brand" }, { "kind", "categorical" }, { "item_id", item }, { "value", brand } }
                    .dump()
               << '\n';
    }
  }
  f.labels = labels.str();
  f.features = features.str();

  // Ten evaluation items per leaf. Mistakes go to the next sibling.
  auto sibling = [&](std::size_t li) {
    for (std::size_t j = 1; j < kLeaves.size(); ++j) {
      const auto& cand = kLeaves[(li + j) % kLeaves.size()];
      if (std::string(cand.parent) == kLeaves[li].parent) {
        return std::string(cand.id);
      }
    }
    return std::string(kLeaves[li].id);
  };
  auto run_lines = [&](const std::string& model, int ordinal) {
    std::ostringstream out;
    for (std::size_t li = 0; li < kLeaves.size(); ++li) {
      int correct = 8 + ordinal; // 0.8, 0.9, 1.0
      if (std::string(kLeaves[li].id) == "home_hardware") {
        correct = ordinal == 0 ? 8 : ordinal == 1 ? 7 : 5;
      }
      for (int k = 0; k < 10; ++k) {
        const std::string predicted = k < correct ? kLeaves[li].id : sibling(li);
        out << json{ { "model_id", model },
                     { "ordinal", ordinal },
                     { "item_id", "e" + std::to_string(li) + "-" + std::to_string(k) },
                     { "true_label", kLeaves[li].id },
                     { "predicted_label", predicted } }
                 .dump()
            << '\n';
      }
    }
    return out.str();
  };
  // deliberately out of ordinal order
  f.evaluation = run_lines("M1", 1) + run_lines("M0", 0) + run_lines("M2", 2);

  f.sources = "{\"source\":\"expert\",\"trust\":1}\n{\"source\":\"crowd\",\"trust\":2}\n"
              "{\"source\":\"curation\",\"trust\":3}\n{\"source\":\"rule\",\"trust\":4}\n";
  return f;
}

flowscope::SnapshotPtr catalog()
{
  const auto files = catalog_files();
  std::istringstream tin(files.taxonomy);
  auto taxonomy = flowscope::parse_taxonomy(tin);
  std::istringstream sin(files.sources);
  auto sources = flowscope::parse_sources(sin);
  std::vector<std::string> warnings;
  std::istringstream lin(files.labels);
  auto labels = flowscope::parse_labels(lin, taxonomy, sources, warnings);
  std::istringstream fin(files.features);
  auto features = flowscope::parse_features(fin);
  std::istringstream ein(files.evaluation);
  auto runs = flowscope::parse_evaluations(ein, taxonomy);
  return flowscope::build_snapshot(std::move(taxonomy), std::move(labels), std::move(features),
                                   std::move(runs), std::move(sources), { 1, 2 },
                                   flowscope::Instant(std::chrono::milliseconds(1700000000000)));
}

std::filesystem::path temp_dir(const std::string& tag)
{
  auto dir = std::filesystem::temp_directory_path() /
             ("flowscope-" + tag + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

flowscope::IngestPaths write_catalog_files(const std::filesystem::path& dir)
{
  const auto files = catalog_files();
  auto put = [&](const char* name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return dir / name;
  };
  flowscope::IngestPaths paths;
  paths.taxonomy = put("taxonomy.jsonl", files.taxonomy);
  paths.labels = put("labels.jsonl", files.labels);
  paths.features = put("features.jsonl", files.features);
  paths.evaluation = put("evaluation.jsonl", files.evaluation);
  paths.sources = put("sources.jsonl", files.sources);
  return paths;
}

flowscope::ModelRun random_run(std::mt19937_64& rng,
                               const std::string& id,
                               long long ordinal,
                               std::size_t records,
                               std::size_t categories,
                               double accuracy)
{
  std::uniform_int_distribution<std::size_t> cat(0, categories - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  flowscope::ModelRun run;
  run.model_id = id;
  run.ordinal = ordinal;
  for (std::size_t i = 0; i < records; ++i) {
    const auto t = cat(rng);
    auto p = t;
    if (u(rng) >= accuracy) {
      p = cat(rng);
    }
    run.records.push_back({ "i" + std::to_string(i), "c" + std::to_string(t), "c" + std::to_string(p) });
  }
  return run;
}

flowscope::ModelRun injected_diagnostics_run()
{
  flowscope::ModelRun run;
  run.model_id = "diag";
  run.ordinal = 0;
  std::size_t n = 0;
  auto add = [&](const std::string& t, const std::string& p, int count) {
    for (int k = 0; k < count; ++k) {
      run.records.push_back({ "d" + std::to_string(n++), t, p });
    }
  };
  const std::set<std::pair<std::string, std::string>> planted = {
    { "wall_decor", "art_decor" }, { "art_decor", "wall_decor" }, { "shirts", "knit_tops" },
    { "tees", "knit_tops" },       { "sweaters", "knit_tops" },   { "jeans", "knit_tops" },
    { "headphones", "jeans" },
  };
  for (const auto& [from, to] : planted) {
    const int count = from == "wall_decor" ? 20 : from == "art_decor" ? 15 : from == "headphones" ? 8 : 6;
    add(from, to, count);
  }
  for (std::size_t li = 0; li < kLeaves.size(); ++li) {
    const std::string leaf = kLeaves[li].id;
    add(leaf, leaf, 40);
    for (auto [step, count] : { std::pair{ 3, 2 }, std::pair{ 7, 1 } }) {
      const std::string other = kLeaves[(li + static_cast<std::size_t>(step)) % kLeaves.size()].id;
      if (!planted.count({ leaf, other })) {
        add(leaf, other, count);
      }
    }
  }
  return run;
}

} // namespace fixture
