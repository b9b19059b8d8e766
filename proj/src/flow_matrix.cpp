#include "flowscope/flow_matrix.hpp"

#include "flowscope/error.hpp"
#include "flowscope/kernels.hpp"

#include <unordered_set>

namespace flowscope {

void WeightedMultiset::add(std::string_view key, std::int64_t count)
{
  if (count < 0) {
    throw Error(ErrorCode::InvalidArgument, "multiset counts must be >= 0");
  }
  if (count == 0) {
    return;
  }
  auto [it, inserted] = index_.emplace(std::string(key), entries_.size());
  if (inserted) {
    entries_.emplace_back(std::string(key), count);
  } else {
    entries_[it->second].second += count;
  }
  total_ += count;
}

std::int64_t WeightedMultiset::count(std::string_view key) const
{
  auto it = index_.find(std::string(key));
  return it == index_.end() ? 0 : entries_[it->second].second;
}

bool WeightedMultiset::operator==(const WeightedMultiset& other) const
{
  if (total_ != other.total_ || entries_.size() != other.entries_.size()) {
    return false;
  }
  for (const auto& [key, n] : entries_) {
    if (other.count(key) != n) {
      return false;
    }
  }
  return true;
}

FlowMatrix FlowMatrix::from_counts(std::vector<std::string> left,
                                   std::vector<std::string> right,
                                   std::vector<std::int64_t> counts)
{
  if (counts.size() != left.size() * right.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "flow matrix counts do not match label dimensions");
  }
  {
    std::unordered_set<std::string> l(left.begin(), left.end());
    std::unordered_set<std::string> r(right.begin(), right.end());
    if (l.size() != left.size() || r.size() != right.size()) {
      throw Error(ErrorCode::InvalidArgument, "flow matrix labels must be distinct");
    }
  }
  FlowMatrix m;
  m.left_ = std::move(left);
  m.right_ = std::move(right);
  m.counts_ = std::move(counts);
  m.row_totals_.assign(m.left_.size(), 0);
  m.col_totals_.assign(m.right_.size(), 0);
  for (std::size_t i = 0; i < m.left_.size(); ++i) {
    for (std::size_t j = 0; j < m.right_.size(); ++j) {
      auto c = m.counts_[i * m.right_.size() + j];
      if (c < 0) {
        throw Error(ErrorCode::InvalidArgument, "flow counts must be >= 0");
      }
      m.row_totals_[i] += c;
      m.col_totals_[j] += c;
      m.total_ += c;
    }
  }
  return m;
}

std::optional<std::size_t> FlowMatrix::left_index(std::string_view label) const
{
  for (std::size_t i = 0; i < left_.size(); ++i) {
    if (left_[i] == label) {
      return i;
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> FlowMatrix::right_index(std::string_view label) const
{
  for (std::size_t j = 0; j < right_.size(); ++j) {
    if (right_[j] == label) {
      return j;
    }
  }
  return std::nullopt;
}

WeightedMultiset FlowMatrix::left_marginal() const
{
  WeightedMultiset m;
  for (std::size_t i = 0; i < left_.size(); ++i) {
    m.add(left_[i], row_totals_[i]);
  }
  return m;
}

WeightedMultiset FlowMatrix::right_marginal() const
{
  WeightedMultiset m;
  for (std::size_t j = 0; j < right_.size(); ++j) {
    m.add(right_[j], col_totals_[j]);
  }
  return m;
}

FlowMatrix FlowMatrix::transposed() const
{
  std::vector<std::int64_t> t(counts_.size());
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t j = 0; j < cols(); ++j) {
      t[j * rows() + i] = at(i, j);
    }
  }
  return from_counts(right_, left_, std::move(t));
}

void FlowBuilder::reserve(std::size_t pairs)
{
  left_ids_.reserve(pairs);
  right_ids_.reserve(pairs);
}

std::uint32_t FlowBuilder::intern(std::string_view label,
                                  std::vector<std::string>& labels,
                                  std::unordered_map<std::string, std::uint32_t>& index)
{
  auto [it, inserted] =
    index.emplace(std::string(label), static_cast<std::uint32_t>(labels.size()));
  if (inserted) {
    labels.emplace_back(label);
  }
  return it->second;
}

void FlowBuilder::add(std::string_view left, std::string_view right)
{
  left_ids_.push_back(intern(left, left_labels_, left_index_));
  right_ids_.push_back(intern(right, right_labels_, right_index_));
}

FlowMatrix FlowBuilder::build() const
{
  auto counts = kernels::tally_pairs(left_ids_, right_ids_, left_labels_.size(),
                                     right_labels_.size());
  return FlowMatrix::from_counts(left_labels_, right_labels_, std::move(counts));
}

FlowMatrix flow_matrix(std::span<const LabelPair> pairs)
{
  FlowBuilder builder;
  builder.reserve(pairs.size());
  for (const auto& [l, r] : pairs) {
    builder.add(l, r);
  }
  return builder.build();
}

} // namespace flowscope
