#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace flowscope {

//! Category -> count bag. Keys keep first-insertion order; zero counts are
//! never stored.
class WeightedMultiset
{
public:
  void add(std::string_view key, std::int64_t count = 1);
  std::int64_t count(std::string_view key) const;
  std::int64_t total() const { return total_; }
  std::size_t distinct() const { return entries_.size(); }
  const std::vector<std::pair<std::string, std::int64_t>>& entries() const
  {
    return entries_;
  }

  //! Order-insensitive.
  bool operator==(const WeightedMultiset& other) const;

private:
  std::vector<std::pair<std::string, std::int64_t>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::int64_t total_ = 0;
};

//! Count table n(s_i -> t_j) between two categorical multisets.
class FlowMatrix
{
public:
  FlowMatrix() = default;

  //! `counts` is row-major, left.size() x right.size(), all entries >= 0.
  static FlowMatrix from_counts(std::vector<std::string> left,
                                std::vector<std::string> right,
                                std::vector<std::int64_t> counts);

  std::size_t rows() const { return left_.size(); }
  std::size_t cols() const { return right_.size(); }
  bool empty() const { return total_ == 0; }

  const std::vector<std::string>& left_labels() const { return left_; }
  const std::vector<std::string>& right_labels() const { return right_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }

  std::int64_t at(std::size_t row, std::size_t col) const
  {
    return counts_[row * right_.size() + col];
  }
  std::int64_t row_total(std::size_t row) const { return row_totals_.at(row); }
  std::int64_t col_total(std::size_t col) const { return col_totals_.at(col); }
  std::int64_t total() const { return total_; }

  std::optional<std::size_t> left_index(std::string_view label) const;
  std::optional<std::size_t> right_index(std::string_view label) const;

  WeightedMultiset left_marginal() const;
  WeightedMultiset right_marginal() const;

  FlowMatrix transposed() const;

  bool operator==(const FlowMatrix& other) const
  {
    return left_ == other.left_ && right_ == other.right_ &&
           counts_ == other.counts_;
  }

private:
  std::vector<std::string> left_;
  std::vector<std::string> right_;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> row_totals_;
  std::vector<std::int64_t> col_totals_;
  std::int64_t total_ = 0;
};

//! Accumulates pairs, interning labels in first-appearance order, and tallies
//! them with the parallel kernel on build().
class FlowBuilder
{
public:
  void reserve(std::size_t pairs);
  void add(std::string_view left, std::string_view right);
  std::size_t size() const { return left_ids_.size(); }
  FlowMatrix build() const;

private:
  static std::uint32_t intern(std::string_view label,
                              std::vector<std::string>& labels,
                              std::unordered_map<std::string, std::uint32_t>& index);

  std::vector<std::string> left_labels_;
  std::vector<std::string> right_labels_;
  std::unordered_map<std::string, std::uint32_t> left_index_;
  std::unordered_map<std::string, std::uint32_t> right_index_;
  std::vector<std::uint32_t> left_ids_;
  std::vector<std::uint32_t> right_ids_;
};

using LabelPair = std::pair<std::string, std::string>;

//! Label order is first appearance on each side.
FlowMatrix flow_matrix(std::span<const LabelPair> pairs);

} // namespace flowscope
