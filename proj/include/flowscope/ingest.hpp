#pragma once

#include "flowscope/taxonomy.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace flowscope {

enum class Decision
{
  positive,
  negative
};

std::string_view to_string(Decision decision);

struct LabeledInstance
{
  std::string item_id;
  std::string title;
  std::string label; // taxonomy node id
  std::string source;
  Decision decision = Decision::positive;
  std::optional<std::string> timestamp; // ISO-8601

  bool operator==(const LabeledInstance&) const = default;
};

enum class FeatureKind
{
  numeric,
  categorical
};

std::string_view to_string(FeatureKind kind);

//! One feature column. Values are stored in document order; each item carries
//! at most one value per column.
class FeatureColumn
{
public:
  FeatureColumn() = default;
  FeatureColumn(std::string name, FeatureKind kind);

  const std::string& name() const { return name_; }
  FeatureKind kind() const { return kind_; }
  std::size_t size() const { return item_ids_.size(); }
  const std::vector<std::string>& item_ids() const { return item_ids_; }

  //! Throws DuplicateItem if the item already has a value.
  void add_numeric(std::string item_id, double value);
  void add_categorical(std::string item_id, std::string value);

  //! Valid only for the column's kind.
  const std::vector<double>& numeric_values() const { return numeric_; }
  const std::vector<std::string>& categorical_values() const { return categorical_; }

  std::optional<std::size_t> find(std::string_view item_id) const;

  bool operator==(const FeatureColumn& other) const;

private:
  void index_item(const std::string& item_id);

  std::string name_;
  FeatureKind kind_ = FeatureKind::numeric;
  std::vector<std::string> item_ids_;
  std::vector<double> numeric_;
  std::vector<std::string> categorical_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct EvaluationRecord
{
  std::string item_id;
  std::string true_label;
  std::string predicted_label;

  bool operator==(const EvaluationRecord&) const = default;
};

struct ModelRun
{
  std::string model_id;
  long long ordinal = 0;
  std::vector<EvaluationRecord> records;

  bool operator==(const ModelRun&) const = default;
};

//! Label provenance registry: source name -> trust rank (1 = most trusted).
class SourceRegistry
{
public:
  //! expert=1, crowd=2, curation=3, rule=4.
  static SourceRegistry defaults();

  void set(std::string source, int rank);
  std::optional<int> rank(std::string_view source) const;
  bool contains(std::string_view source) const { return rank(source).has_value(); }
  int lowest_rank() const;
  //! Registers `source` one rank below the current lowest; returns the rank.
  int register_unknown(std::string source);

  const std::vector<std::pair<std::string, int>>& entries() const { return entries_; }

  bool operator==(const SourceRegistry&) const = default;

private:
  std::vector<std::pair<std::string, int>> entries_;
};

struct IngestOptions
{
  //! Permit labels (and evaluation labels) on inner taxonomy nodes.
  bool allow_inner_labels = false;
};

//! {"item_id","title","label","source","decision","timestamp"?}. Unknown
//! sources are registered with the lowest trust and reported in `warnings`.
std::vector<LabeledInstance> parse_labels(std::istream& in,
                                          const Taxonomy& taxonomy,
                                          SourceRegistry& sources,
                                          std::vector<std::string>& warnings,
                                          const IngestOptions& options = {});

//! {"name","kind","item_id","value"}; returns columns in first-appearance order.
std::vector<FeatureColumn> parse_features(std::istream& in);

//! {"model_id","ordinal","item_id","true_label","predicted_label"}. Every
//! record must belong to `model_id` / `ordinal`.
ModelRun parse_evaluation(std::istream& in,
                          const Taxonomy& taxonomy,
                          const std::string& model_id,
                          long long ordinal,
                          const IngestOptions& options = {});

//! Same record format, any number of runs interleaved; runs are returned in
//! first-appearance order.
std::vector<ModelRun> parse_evaluations(std::istream& in,
                                        const Taxonomy& taxonomy,
                                        const IngestOptions& options = {});

//! {"source","trust"}.
SourceRegistry parse_sources(std::istream& in);

void write_labels(std::ostream& out, const std::vector<LabeledInstance>& instances);
void write_features(std::ostream& out, const std::vector<FeatureColumn>& features);
void write_evaluation(std::ostream& out, const std::vector<ModelRun>& runs);
void write_sources(std::ostream& out, const SourceRegistry& sources);

} // namespace flowscope
