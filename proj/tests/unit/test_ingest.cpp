#include "doctest.h"

#include "flowscope/error.hpp"
#include "flowscope/ingest.hpp"
#include "flowscope/snapshot.hpp"
#include "flowscope/taxonomy.hpp"

#include "../support/fixtures.hpp"

#include <sstream>

using namespace flowscope;

namespace {

Taxonomy taxonomy_from(const std::string& text)
{
  std::istringstream in(text);
  return parse_taxonomy(in);
}

// Runs `fn` and returns the flowscope error it raised.
template <typename Fn>
Error error_of(Fn&& fn)
{
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected a flowscope::Error");
  return Error(ErrorCode::Internal, "unreachable");
}

const char* const kSmallTree =
  R"({"id":"root","name":"Root","level":0}
{"id":"electronics","name":"Electronics","parent_id":"root","level":1}
{"id":"cameras","name":"Cameras","parent_id":"electronics","level":2}
)";

} // namespace

TEST_CASE("taxonomy: three-line chain gives levels 0, 1, 2")
{
  auto tax = taxonomy_from(kSmallTree);
  REQUIRE(tax.size() == 3);
  CHECK(tax.node(tax.root()).id == "root");
  CHECK(tax.node(tax.index_of("electronics")).level == 1);
  CHECK(tax.node(tax.index_of("cameras")).level == 2);
  CHECK(tax.max_level() == 2);
  CHECK(tax.is_leaf(tax.index_of("cameras")));
}

TEST_CASE("taxonomy: structural errors carry their code and line")
{
  auto self_parent = error_of([] {
    taxonomy_from(R"({"id":"root","name":"r","level":0}
{"id":"a","name":"a","parent_id":"a","level":1}
)");
  });
  CHECK(self_parent.code() == ErrorCode::CycleDetected);
  CHECK(self_parent.line() == 2u);

  auto dup = error_of([] {
    taxonomy_from(R"({"id":"root","name":"r","level":0}
{"id":"a","name":"a","parent_id":"root","level":1}
{"id":"a","name":"b","parent_id":"root","level":1}
)");
  });
  CHECK(dup.code() == ErrorCode::DuplicateId);
  CHECK(dup.line() == 3u);

  auto orphan = error_of([] {
    taxonomy_from(R"({"id":"root","name":"r","level":0}
{"id":"a","name":"a","parent_id":"nowhere","level":1}
)");
  });
  CHECK(orphan.code() == ErrorCode::UnknownParent);

  auto two_roots = error_of([] {
    taxonomy_from(R"({"id":"r1","name":"r","level":0}
{"id":"r2","name":"r","level":0}
)");
  });
  CHECK(two_roots.code() == ErrorCode::MultipleRoots);
  CHECK(two_roots.line() == 2u);

  auto loop = error_of([] {
    taxonomy_from(R"({"id":"root","name":"r","level":0}
{"id":"a","name":"a","parent_id":"b","level":1}
{"id":"b","name":"b","parent_id":"a","level":2}
)");
  });
  CHECK(loop.code() == ErrorCode::CycleDetected);

  auto bad_level = error_of([] {
    taxonomy_from(R"({"id":"root","name":"r","level":0}
{"id":"a","name":"a","parent_id":"root","level":2}
)");
  });
  CHECK(bad_level.code() == ErrorCode::MalformedRecord);
  CHECK(bad_level.line() == 2u);

  auto not_json = error_of([] { taxonomy_from("{\"id\":\"root\"\n"); });
  CHECK(not_json.code() == ErrorCode::MalformedRecord);
  CHECK(not_json.line() == 1u);

  CHECK(error_of([] { taxonomy_from(""); }).code() == ErrorCode::MalformedRecord);
}

TEST_CASE("taxonomy: three level-1 departments")
{
  auto tax = taxonomy_from(R"({"id":"root","name":"All","level":0}
{"id":"electronics","name":"Electronics","parent_id":"root","level":1}
{"id":"fashion","name":"Fashion","parent_id":"root","level":1}
{"id":"sports","name":"Sports","parent_id":"root","level":1}
{"id":"tv","name":"TV","parent_id":"electronics","level":2}
{"id":"cameras","name":"Cameras","parent_id":"electronics","level":2}
{"id":"shoes","name":"Shoes","parent_id":"fashion","level":2}
{"id":"bags","name":"Bags","parent_id":"fashion","level":2}
{"id":"camping","name":"Camping","parent_id":"sports","level":2}
{"id":"cycling","name":"Cycling","parent_id":"sports","level":2}
)");
  CHECK(tax.size() == 10);
  CHECK(tax.children(tax.root()).size() == 3);
  CHECK(tax.leaf_count(tax.root()) == 6);
  const auto lca = tax.lowest_common_ancestor(tax.index_of("tv"), tax.index_of("cameras"));
  CHECK(tax.node(lca).id == "electronics");
  CHECK(tax.lowest_common_ancestor(tax.index_of("tv"), tax.index_of("shoes")) == tax.root());
  CHECK(tax.subtree(tax.index_of("fashion")).size() == 3);
}

TEST_CASE("labels: accepted and rejected records")
{
  auto tax = taxonomy_from(R"({"id":"root","name":"r","level":0}
{"id":"camcorders_traditional","name":"Camcorders Traditional","parent_id":"root","level":1}
)");
  auto sources = SourceRegistry::defaults();
  std::vector<std::string> warnings;

  std::istringstream ok(
    R"({"item_id":"i1","title":"Handycam","label":"camcorders_traditional","source":"rule","decision":"positive","timestamp":"2024-01-02T03:04:05Z"})"
    "\n");
  auto labels = parse_labels(ok, tax, sources, warnings);
  REQUIRE(labels.size() == 1);
  CHECK(labels[0].source == "rule");
  CHECK(labels[0].decision == Decision::positive);
  CHECK(warnings.empty());

  std::istringstream maybe(
    "\n"
    R"({"item_id":"i1","title":"t","label":"camcorders_traditional","source":"rule","decision":"maybe"})"
    "\n");
  auto e = error_of([&] { parse_labels(maybe, tax, sources, warnings); });
  CHECK(e.code() == ErrorCode::InvalidDecision);
  CHECK(e.line() == 2u);

  std::istringstream unknown(
    R"({"item_id":"i1","title":"t","label":"nope","source":"rule","decision":"positive"})"
    "\n");
  CHECK(error_of([&] { parse_labels(unknown, tax, sources, warnings); }).code() ==
        ErrorCode::UnknownLabel);

  std::istringstream inner(
    R"({"item_id":"i1","title":"t","label":"root","source":"rule","decision":"positive"})"
    "\n");
  CHECK(error_of([&] { parse_labels(inner, tax, sources, warnings); }).code() ==
        ErrorCode::UnknownLabel);
  std::istringstream inner_ok(
    R"({"item_id":"i1","title":"t","label":"root","source":"rule","decision":"positive"})"
    "\n");
  CHECK(parse_labels(inner_ok, tax, sources, warnings, IngestOptions{ true }).size() == 1);

  std::istringstream bad_time(
    R"({"item_id":"i1","title":"t","label":"camcorders_traditional","source":"rule","decision":"positive","timestamp":"yesterday"})"
    "\n");
  CHECK(error_of([&] { parse_labels(bad_time, tax, sources, warnings); }).code() ==
        ErrorCode::MalformedRecord);

  std::istringstream new_source(
    R"({"item_id":"i1","title":"t","label":"camcorders_traditional","source":"vendor_feed","decision":"negative"})"
    "\n");
  parse_labels(new_source, tax, sources, warnings);
  CHECK(warnings.size() == 1);
  CHECK(sources.rank("vendor_feed") == sources.lowest_rank());
  CHECK(*sources.rank("vendor_feed") > *sources.rank("rule"));
}

TEST_CASE("evaluation: misclassification report rows")
{
  auto tax = taxonomy_from(R"({"id":"root","name":"r","level":0}
{"id":"workwear","name":"Workwear","parent_id":"root","level":1}
{"id":"sleepwear","name":"Sleepwear","parent_id":"root","level":1}
{"id":"mens_jumpsuit","name":"Men's Jumpsuit","parent_id":"root","level":1}
{"id":"movie","name":"Movie","parent_id":"root","level":1}
{"id":"tv_show","name":"TV Show","parent_id":"root","level":1}
)");
  std::istringstream rows(
    R"({"model_id":"M1","ordinal":1,"item_id":"A1","true_label":"workwear","predicted_label":"sleepwear"}
{"model_id":"M1","ordinal":1,"item_id":"B23","true_label":"workwear","predicted_label":"mens_jumpsuit"}
{"model_id":"M1","ordinal":1,"item_id":"C98","true_label":"movie","predicted_label":"tv_show"}
)");
  auto run = parse_evaluation(rows, tax, "M1", 1);
  CHECK(run.records.size() == 3);
  CHECK(run.records[1].predicted_label == "mens_jumpsuit");

  std::istringstream empty("");
  CHECK(parse_evaluation(empty, tax, "M2", 2).records.empty());

  std::istringstream dup(
    R"({"model_id":"M1","ordinal":1,"item_id":"A1","true_label":"workwear","predicted_label":"sleepwear"}
{"model_id":"M1","ordinal":1,"item_id":"A1","true_label":"movie","predicted_label":"movie"}
)");
  auto e = error_of([&] { parse_evaluation(dup, tax, "M1", 1); });
  CHECK(e.code() == ErrorCode::DuplicateItem);
  CHECK(e.line() == 2u);

  std::istringstream other_run(
    R"({"model_id":"M9","ordinal":9,"item_id":"A1","true_label":"workwear","predicted_label":"sleepwear"})"
    "\n");
  CHECK(error_of([&] { parse_evaluation(other_run, tax, "M1", 1); }).code() ==
        ErrorCode::MalformedRecord);
}

TEST_CASE("features: kinds and duplicates")
{
  std::istringstream in(R"({"name":"price","kind":"numeric","item_id":"a","value":3.5}
{"name":"brand","kind":"categorical","item_id":"a","value":"acme"}
{"name":"price","kind":"numeric","item_id":"b","value":4}
)");
  auto cols = parse_features(in);
  REQUIRE(cols.size() == 2);
  CHECK(cols[0].name() == "price");
  CHECK(cols[0].numeric_values() == std::vector<double>{ 3.5, 4.0 });
  CHECK(cols[1].categorical_values() == std::vector<std::string>{ "acme" });

  std::istringstream dup(R"({"name":"price","kind":"numeric","item_id":"a","value":3.5}
{"name":"price","kind":"numeric","item_id":"a","value":4}
)");
  auto e = error_of([&] { parse_features(dup); });
  CHECK(e.code() == ErrorCode::DuplicateItem);
  CHECK(e.line() == 2u);

  std::istringstream mixed(R"({"name":"price","kind":"numeric","item_id":"a","value":3.5}
{"name":"price","kind":"categorical","item_id":"b","value":"x"}
)");
  CHECK(error_of([&] { parse_features(mixed); }).code() == ErrorCode::MalformedRecord);
}

TEST_CASE("snapshot: cross references and run ordering")
{
  auto snap = fixture::catalog();
  REQUIRE(snap->runs().size() == 3);
  CHECK(snap->runs()[0].model_id == "M0");
  CHECK(snap->runs()[1].model_id == "M1");
  CHECK(snap->runs()[2].model_id == "M2");
  CHECK(snap->stats().instances == snap->instances().size());

  auto tax = snap->taxonomy();
  FeatureColumn stray("price", FeatureKind::numeric);
  stray.add_numeric("ghost-item", 1.0);
  auto e = error_of([&] {
    build_snapshot(tax, snap->instances(), { stray }, {}, snap->sources());
  });
  CHECK(e.code() == ErrorCode::CrossReferenceError);
  CHECK(std::string(e.what()).find("ghost-item") != std::string::npos);
  REQUIRE(e.details().size() == 1);

  ModelRun r2{ "late", 2, {} };
  ModelRun r1{ "early", 1, {} };
  auto sorted = build_snapshot(tax, {}, {}, { r2, r1 }, snap->sources());
  CHECK(sorted->runs()[0].model_id == "early");
  CHECK(sorted->runs()[1].model_id == "late");

  ModelRun clash{ "clash", 1, {} };
  CHECK(error_of([&] { build_snapshot(tax, {}, {}, { r1, clash }, snap->sources()); }).code() ==
        ErrorCode::CrossReferenceError);
  CHECK_THROWS_AS(snap->run("nope"), Error);
  CHECK(error_of([&] { snap->feature("nope"); }).code() == ErrorCode::UnknownFeature);
}

TEST_CASE("snapshot: parse-serialize identity")
{
  auto snap = fixture::catalog();

  std::ostringstream tax_out;
  write_taxonomy(tax_out, snap->taxonomy());
  std::istringstream tax_in(tax_out.str());
  auto tax = parse_taxonomy(tax_in);
  CHECK(tax == snap->taxonomy());

  std::ostringstream labels_out;
  write_labels(labels_out, snap->instances());
  auto sources = snap->sources();
  std::vector<std::string> warnings;
  std::istringstream labels_in(labels_out.str());
  CHECK(parse_labels(labels_in, tax, sources, warnings) == snap->instances());
  CHECK(warnings.empty());

  std::ostringstream features_out;
  write_features(features_out, snap->features());
  std::istringstream features_in(features_out.str());
  CHECK(parse_features(features_in) == snap->features());

  std::ostringstream eval_out;
  write_evaluation(eval_out, snap->runs());
  std::istringstream eval_in(eval_out.str());
  CHECK(parse_evaluations(eval_in, tax) == snap->runs());

  std::ostringstream sources_out;
  write_sources(sources_out, snap->sources());
  std::istringstream sources_in(sources_out.str());
  CHECK(parse_sources(sources_in) == snap->sources());

  const auto dir = fixture::temp_dir("roundtrip");
  save_snapshot(*snap, dir);
  auto loaded = load_snapshot(dir);
  CHECK(*loaded.snapshot == *snap);
  CHECK(loaded.snapshot->created_at() == snap->created_at());
  std::filesystem::remove_all(dir);
}

TEST_CASE("snapshot: empty runs survive a save/load cycle")
{
  auto snap = fixture::catalog();
  auto runs = snap->runs();
  runs.push_back({ "M9", 9, {} });
  auto with_empty = build_snapshot(snap->taxonomy(), snap->instances(), snap->features(), runs,
                                   snap->sources(), snap->trusted_ranks(), snap->created_at());
  const auto dir = fixture::temp_dir("emptyrun");
  save_snapshot(*with_empty, dir);
  auto loaded = load_snapshot(dir).snapshot;
  CHECK(*loaded == *with_empty);
  CHECK(loaded->run("M9").records.empty());
  std::filesystem::remove_all(dir);
}

TEST_CASE("ingest_files: reads every input and reports file problems")
{
  const auto dir = fixture::temp_dir("ingest");
  auto paths = fixture::write_catalog_files(dir);
  auto result = ingest_files(paths);
  auto expected = fixture::catalog();
  CHECK(result.snapshot->taxonomy() == expected->taxonomy());
  CHECK(result.snapshot->instances() == expected->instances());
  CHECK(result.snapshot->features() == expected->features());
  CHECK(result.snapshot->runs() == expected->runs());
  CHECK(result.snapshot->sources() == expected->sources());
  CHECK(result.warnings.empty());

  auto missing = paths;
  missing.labels = dir / "missing.jsonl";
  CHECK_THROWS_AS(ingest_files(missing), Error);

  CHECK(error_of([&] { load_snapshot(dir / "nowhere"); }).code() == ErrorCode::InvalidArgument);
  std::filesystem::remove_all(dir);
}
