#include "flowscope/ingest.hpp"

#include "jsonl.hpp"

#include <algorithm>
#include <ostream>
#include <regex>
#include <unordered_set>

namespace flowscope {

std::string_view to_string(Decision decision)
{
  return decision == Decision::positive ? "positive" : "negative";
}

std::string_view to_string(FeatureKind kind)
{
  return kind == FeatureKind::numeric ? "numeric" : "categorical";
}

FeatureColumn::FeatureColumn(std::string name, FeatureKind kind)
  : name_(std::move(name))
  , kind_(kind)
{}

void FeatureColumn::index_item(const std::string& item_id)
{
  auto [it, inserted] = index_.emplace(item_id, item_ids_.size());
  if (!inserted) {
    throw Error(ErrorCode::DuplicateItem,
                "feature '" + name_ + "' has two values for item '" + item_id +
                  "'");
  }
}

void FeatureColumn::add_numeric(std::string item_id, double value)
{
  if (kind_ != FeatureKind::numeric) {
    throw Error(ErrorCode::NotNumeric, "feature '" + name_ + "' is categorical");
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::MalformedRecord,
                "non-finite value in feature '" + name_ + "'");
  }
  index_item(item_id);
  item_ids_.push_back(std::move(item_id));
  numeric_.push_back(value);
}

void FeatureColumn::add_categorical(std::string item_id, std::string value)
{
  if (kind_ != FeatureKind::categorical) {
    throw Error(ErrorCode::NotCategorical, "feature '" + name_ + "' is numeric");
  }
  index_item(item_id);
  item_ids_.push_back(std::move(item_id));
  categorical_.push_back(std::move(value));
}

std::optional<std::size_t> FeatureColumn::find(std::string_view item_id) const
{
  auto it = index_.find(std::string(item_id));
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

bool FeatureColumn::operator==(const FeatureColumn& other) const
{
  return name_ == other.name_ && kind_ == other.kind_ &&
         item_ids_ == other.item_ids_ && numeric_ == other.numeric_ &&
         categorical_ == other.categorical_;
}

SourceRegistry SourceRegistry::defaults()
{
  SourceRegistry r;
  r.set("expert", 1);
  r.set("crowd", 2);
  r.set("curation", 3);
  r.set("rule", 4);
  return r;
}

void SourceRegistry::set(std::string source, int rank)
{
  if (rank < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "trust rank must be >= 1 for source '" + source + "'");
  }
  for (auto& [name, r] : entries_) {
    if (name == source) {
      r = rank;
      return;
    }
  }
  entries_.emplace_back(std::move(source), rank);
}

std::optional<int> SourceRegistry::rank(std::string_view source) const
{
  for (const auto& [name, r] : entries_) {
    if (name == source) {
      return r;
    }
  }
  return std::nullopt;
}

int SourceRegistry::lowest_rank() const
{
  int lowest = 0;
  for (const auto& entry : entries_) {
    lowest = std::max(lowest, entry.second);
  }
  return lowest;
}

int SourceRegistry::register_unknown(std::string source)
{
  int rank = lowest_rank() + 1;
  set(std::move(source), rank);
  return rank;
}

namespace {

// Date, optionally followed by a time with optional fraction and zone.
const std::regex& iso8601()
{
  static const std::regex re(
    R"(\d{4}-\d{2}-\d{2}([T ]\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?)?)");
  return re;
}

void check_label(const Taxonomy& taxonomy,
                 const std::string& label,
                 const IngestOptions& options,
                 const std::string& item_id,
                 std::size_t line)
{
  auto index = taxonomy.find(label);
  if (!index) {
    throw Error(ErrorCode::UnknownLabel,
                "item '" + item_id + "' has unknown label '" + label + "'",
                line);
  }
  if (!options.allow_inner_labels && !taxonomy.is_leaf(*index)) {
    throw Error(ErrorCode::UnknownLabel,
                "item '" + item_id + "' is labeled with inner node '" + label +
                  "'",
                line);
  }
}

} // namespace

std::vector<LabeledInstance> parse_labels(std::istream& in,
                                          const Taxonomy& taxonomy,
                                          SourceRegistry& sources,
                                          std::vector<std::string>& warnings,
                                          const IngestOptions& options)
{
  std::vector<LabeledInstance> out;
  detail::for_each_record(in, [&](const detail::json& rec, std::size_t line) {
    LabeledInstance inst;
    inst.item_id = detail::required_string(rec, "item_id", line);
    inst.title = detail::required_string(rec, "title", line);
    inst.label = detail::required_string(rec, "label", line);
    inst.source = detail::required_string(rec, "source", line);
    auto decision = detail::required_string(rec, "decision", line);
    if (decision == "positive") {
      inst.decision = Decision::positive;
    } else if (decision == "negative") {
      inst.decision = Decision::negative;
    } else {
      throw Error(ErrorCode::InvalidDecision,
                  "decision must be 'positive' or 'negative', got '" + decision +
                    "'",
                  line);
    }
    inst.timestamp = detail::optional_string(rec, "timestamp", line);
    if (inst.timestamp && !std::regex_match(*inst.timestamp, iso8601())) {
      throw Error(ErrorCode::MalformedRecord,
                  "timestamp '" + *inst.timestamp + "' is not ISO-8601",
                  line);
    }
    check_label(taxonomy, inst.label, options, inst.item_id, line);
    if (!sources.contains(inst.source)) {
      int rank = sources.register_unknown(inst.source);
      warnings.push_back("line " + std::to_string(line) + ": unknown source '" +
                         inst.source + "' registered with trust rank " +
                         std::to_string(rank));
    }
    out.push_back(std::move(inst));
  });
  return out;
}

std::vector<FeatureColumn> parse_features(std::istream& in)
{
  std::vector<FeatureColumn> columns;
  std::unordered_map<std::string, std::size_t> by_name;
  detail::for_each_record(in, [&](const detail::json& rec, std::size_t line) {
    auto name = detail::required_string(rec, "name", line);
    auto kind_text = detail::required_string(rec, "kind", line);
    auto item_id = detail::required_string(rec, "item_id", line);
    FeatureKind kind;
    if (kind_text == "numeric") {
      kind = FeatureKind::numeric;
    } else if (kind_text == "categorical") {
      kind = FeatureKind::categorical;
    } else {
      throw Error(ErrorCode::MalformedRecord,
                  "kind must be 'numeric' or 'categorical'",
                  line);
    }
    auto [it, inserted] = by_name.emplace(name, columns.size());
    if (inserted) {
      columns.emplace_back(name, kind);
    }
    auto& column = columns[it->second];
    if (column.kind() != kind) {
      throw Error(ErrorCode::MalformedRecord,
                  "feature '" + name + "' mixes numeric and categorical values",
                  line);
    }
    auto value = rec.find("value");
    if (value == rec.end()) {
      throw Error(ErrorCode::MalformedRecord, "missing field 'value'", line);
    }
    try {
      if (kind == FeatureKind::numeric) {
        if (!value->is_number()) {
          throw Error(ErrorCode::MalformedRecord,
                      "numeric feature value must be a number",
                      line);
        }
        auto v = value->get<double>();
        if (!std::isfinite(v)) {
          throw Error(ErrorCode::MalformedRecord, "non-finite value", line);
        }
        column.add_numeric(item_id, v);
      } else {
        if (!value->is_string()) {
          throw Error(ErrorCode::MalformedRecord,
                      "categorical feature value must be a string",
                      line);
        }
        column.add_categorical(item_id, value->get<std::string>());
      }
    } catch (const Error& e) {
      if (e.line()) {
        throw;
      }
      throw Error(e.code(), e.what(), line);
    }
  });
  return columns;
}

namespace {

struct RunBuilder
{
  ModelRun run;
  std::unordered_set<std::string> items;
};

void add_evaluation_record(RunBuilder& builder,
                           const detail::json& rec,
                           std::size_t line,
                           const Taxonomy& taxonomy,
                           const IngestOptions& options)
{
  EvaluationRecord r;
  r.item_id = detail::required_string(rec, "item_id", line);
  r.true_label = detail::required_string(rec, "true_label", line);
  r.predicted_label = detail::required_string(rec, "predicted_label", line);
  check_label(taxonomy, r.true_label, options, r.item_id, line);
  check_label(taxonomy, r.predicted_label, options, r.item_id, line);
  if (!builder.items.insert(r.item_id).second) {
    throw Error(ErrorCode::DuplicateItem,
                "item '" + r.item_id + "' appears twice in run '" +
                  builder.run.model_id + "'",
                line);
  }
  builder.run.records.push_back(std::move(r));
}

} // namespace

ModelRun parse_evaluation(std::istream& in,
                          const Taxonomy& taxonomy,
                          const std::string& model_id,
                          long long ordinal,
                          const IngestOptions& options)
{
  RunBuilder builder;
  builder.run.model_id = model_id;
  builder.run.ordinal = ordinal;
  detail::for_each_record(in, [&](const detail::json& rec, std::size_t line) {
    auto id = detail::required_string(rec, "model_id", line);
    auto ord = detail::required_integer(rec, "ordinal", line);
    if (id != model_id || ord != ordinal) {
      throw Error(ErrorCode::MalformedRecord,
                  "record belongs to run '" + id + "' (ordinal " +
                    std::to_string(ord) + "), expected '" + model_id + "'",
                  line);
    }
    add_evaluation_record(builder, rec, line, taxonomy, options);
  });
  return std::move(builder.run);
}

std::vector<ModelRun> parse_evaluations(std::istream& in,
                                        const Taxonomy& taxonomy,
                                        const IngestOptions& options)
{
  std::vector<RunBuilder> builders;
  std::unordered_map<std::string, std::size_t> by_model;
  detail::for_each_record(in, [&](const detail::json& rec, std::size_t line) {
    auto id = detail::required_string(rec, "model_id", line);
    auto ord = detail::required_integer(rec, "ordinal", line);
    auto [it, inserted] = by_model.emplace(id, builders.size());
    if (inserted) {
      for (const auto& b : builders) {
        if (b.run.ordinal == ord) {
          throw Error(ErrorCode::MalformedRecord,
                      "ordinal " + std::to_string(ord) +
                        " already used by run '" + b.run.model_id + "'",
                      line);
        }
      }
      RunBuilder b;
      b.run.model_id = id;
      b.run.ordinal = ord;
      builders.push_back(std::move(b));
    }
    auto& builder = builders[it->second];
    if (builder.run.ordinal != ord) {
      throw Error(ErrorCode::MalformedRecord,
                  "run '" + id + "' has inconsistent ordinals",
                  line);
    }
    add_evaluation_record(builder, rec, line, taxonomy, options);
  });
  std::vector<ModelRun> runs;
  runs.reserve(builders.size());
  for (auto& b : builders) {
    runs.push_back(std::move(b.run));
  }
  return runs;
}

SourceRegistry parse_sources(std::istream& in)
{
  SourceRegistry registry;
  detail::for_each_record(in, [&](const detail::json& rec, std::size_t line) {
    auto source = detail::required_string(rec, "source", line);
    auto trust = detail::required_integer(rec, "trust", line);
    if (trust < 1) {
      throw Error(ErrorCode::MalformedRecord, "trust rank must be >= 1", line);
    }
    if (registry.contains(source)) {
      throw Error(ErrorCode::DuplicateId,
                  "source '" + source + "' listed twice",
                  line);
    }
    registry.set(source, static_cast<int>(trust));
  });
  return registry;
}

void write_labels(std::ostream& out, const std::vector<LabeledInstance>& instances)
{
  for (const auto& inst : instances) {
    detail::json rec{ { "item_id", inst.item_id },
                      { "title", inst.title },
                      { "label", inst.label },
                      { "source", inst.source },
                      { "decision", std::string(to_string(inst.decision)) } };
    if (inst.timestamp) {
      rec["timestamp"] = *inst.timestamp;
    }
    out << rec.dump() << '\n';
  }
}

void write_features(std::ostream& out, const std::vector<FeatureColumn>& features)
{
  for (const auto& column : features) {
    for (std::size_t i = 0; i < column.size(); ++i) {
      detail::json rec{ { "name", column.name() },
                        { "kind", std::string(to_string(column.kind())) },
                        { "item_id", column.item_ids()[i] } };
      if (column.kind() == FeatureKind::numeric) {
        rec["value"] = column.numeric_values()[i];
      } else {
        rec["value"] = column.categorical_values()[i];
      }
      out << rec.dump() << '\n';
    }
  }
}

void write_evaluation(std::ostream& out, const std::vector<ModelRun>& runs)
{
  for (const auto& run : runs) {
    for (const auto& r : run.records) {
      detail::json rec{ { "model_id", run.model_id },
                        { "ordinal", run.ordinal },
                        { "item_id", r.item_id },
                        { "true_label", r.true_label },
                        { "predicted_label", r.predicted_label } };
      out << rec.dump() << '\n';
    }
  }
}

void write_sources(std::ostream& out, const SourceRegistry& sources)
{
  for (const auto& [source, rank] : sources.entries()) {
    detail::json rec{ { "source", source }, { "trust", rank } };
    out << rec.dump() << '\n';
  }
}

} // namespace flowscope
