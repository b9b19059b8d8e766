#include "flowscope/distributions.hpp"

#include "flowscope/error.hpp"

#include <unordered_map>

namespace flowscope {

double ConditionalDistribution::operator[](std::string_view category) const
{
  for (const auto& [label, p] : probabilities) {
    if (label == category) {
      return p;
    }
  }
  return 0.0;
}

ConditionalDistribution conditional(const FlowMatrix& matrix, std::string_view given)
{
  auto row = matrix.left_index(given);
  if (!row) {
    throw Error(ErrorCode::UnknownCategory,
                "'" + std::string(given) + "' is not a left category");
  }
  const auto total = matrix.row_total(*row);
  if (total == 0) {
    throw Error(ErrorCode::InsufficientData,
                "no flow leaves '" + std::string(given) + "'");
  }
  ConditionalDistribution out;
  out.given = std::string(given);
  out.probabilities.reserve(matrix.cols());
  for (std::size_t j = 0; j < matrix.cols(); ++j) {
    out.probabilities.emplace_back(matrix.right_labels()[j],
                                   static_cast<double>(matrix.at(*row, j)) /
                                     static_cast<double>(total));
  }
  return out;
}

QuantityReport quantity_report(const DatasetSnapshot& snapshot,
                               std::string_view parent,
                               double beta)
{
  if (!(beta >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "beta must be >= 0");
  }
  const auto& tax = snapshot.taxonomy();
  const auto node = tax.index_of(parent);
  const auto& kids = tax.children(node);
  if (kids.empty()) {
    throw Error(ErrorCode::NoChildren,
                "category '" + std::string(parent) + "' has no children");
  }

  QuantityReport report;
  report.parent = std::string(parent);
  report.beta = beta;
  report.threshold = beta / static_cast<double>(kids.size());
  for (auto c : kids) {
    QuantityShare s;
    s.child = tax.node(c).id;
    s.count = snapshot.label_counts(c).subtree_positive;
    report.total += s.count;
    report.children.push_back(std::move(s));
  }
  for (auto& s : report.children) {
    s.share = report.total > 0
                ? static_cast<double>(s.count) / static_cast<double>(report.total)
                : 0.0;
    s.flagged = s.share < report.threshold;
  }
  return report;
}

std::vector<FlowMatrix> multilevel_quantity(const DatasetSnapshot& snapshot,
                                            std::string_view root,
                                            int depth)
{
  if (depth < 1) {
    throw Error(ErrorCode::InvalidArgument, "depth must be >= 1");
  }
  const auto& tax = snapshot.taxonomy();
  std::vector<std::size_t> frontier{ tax.index_of(root) };
  std::vector<FlowMatrix> out;
  for (int level = 0; level < depth; ++level) {
    std::vector<std::string> left;
    std::vector<std::string> right;
    std::vector<std::size_t> inner;
    std::vector<std::size_t> next;
    for (auto n : frontier) {
      if (tax.is_leaf(n)) {
        continue;
      }
      inner.push_back(n);
      left.push_back(tax.node(n).id);
      for (auto c : tax.children(n)) {
        right.push_back(tax.node(c).id);
        next.push_back(c);
      }
    }
    if (inner.empty()) {
      break;
    }
    std::vector<std::int64_t> counts(left.size() * right.size(), 0);
    std::size_t col = 0;
    for (std::size_t row = 0; row < inner.size(); ++row) {
      for (auto c : tax.children(inner[row])) {
        counts[row * right.size() + col] = snapshot.label_counts(c).subtree_positive;
        ++col;
      }
    }
    out.push_back(
      FlowMatrix::from_counts(std::move(left), std::move(right), std::move(counts)));
    frontier = std::move(next);
  }
  return out;
}

QualityReport quality_report(const DatasetSnapshot& snapshot,
                             std::string_view category,
                             double trust_threshold)
{
  const auto node = snapshot.taxonomy().index_of(category);
  const auto indices = snapshot.instances_in_subtree(node);
  if (indices.empty()) {
    throw Error(ErrorCode::InsufficientData,
                "category '" + std::string(category) + "' has no labels");
  }

  std::vector<std::string> sources;
  std::unordered_map<std::string, std::size_t> row_of;
  std::vector<std::int64_t> pos;
  std::vector<std::int64_t> neg;
  QualityReport report;
  report.category = std::string(category);
  report.trust_threshold = trust_threshold;
  for (auto i : indices) {
    const auto& inst = snapshot.instances()[i];
    auto [it, inserted] = row_of.emplace(inst.source, sources.size());
    if (inserted) {
      sources.push_back(inst.source);
      pos.push_back(0);
      neg.push_back(0);
    }
    (inst.decision == Decision::positive ? pos : neg)[it->second] += 1;
    ++report.labels;
    if (snapshot.is_trusted(inst.source)) {
      ++report.trusted;
    }
  }
  std::vector<std::int64_t> counts;
  counts.reserve(sources.size() * 2);
  for (std::size_t r = 0; r < sources.size(); ++r) {
    counts.push_back(pos[r]);
    counts.push_back(neg[r]);
  }
  report.by_source_decision = FlowMatrix::from_counts(
    std::move(sources), { "positive", "negative" }, std::move(counts));
  report.trusted_share =
    static_cast<double>(report.trusted) / static_cast<double>(report.labels);
  report.flagged = report.trusted_share < trust_threshold;
  return report;
}

} // namespace flowscope
