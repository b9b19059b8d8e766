#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace flowscope {

struct TaxonomyNode
{
  std::string id;
  std::string name;
  std::optional<std::string> parent_id; // absent for the root
  int level = 0;

  bool operator==(const TaxonomyNode&) const = default;
};

//! Validated category tree. Nodes keep document order; children keep the order
//! in which they appear in the document.
class Taxonomy
{
public:
  Taxonomy() = default;

  //! Validates `nodes` and builds the tree. Throws DuplicateId, UnknownParent,
  //! CycleDetected, MultipleRoots or MalformedRecord (level mismatch).
  //! `lines` optionally maps node index to its source line for error messages.
  explicit Taxonomy(std::vector<TaxonomyNode> nodes,
                    const std::vector<std::size_t>& lines = {});

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const std::vector<TaxonomyNode>& nodes() const { return nodes_; }
  const TaxonomyNode& node(std::size_t index) const { return nodes_.at(index); }

  std::optional<std::size_t> find(std::string_view id) const;
  //! Like find() but throws UnknownCategory.
  std::size_t index_of(std::string_view id) const;

  std::size_t root() const { return root_; }
  std::optional<std::size_t> parent(std::size_t index) const;
  const std::vector<std::size_t>& children(std::size_t index) const
  {
    return children_.at(index);
  }
  bool is_leaf(std::size_t index) const { return children_.at(index).empty(); }
  std::size_t leaf_count(std::size_t index) const { return leaf_count_.at(index); }
  int max_level() const { return max_level_; }

  //! Indices from the root down to `index`, inclusive.
  std::vector<std::size_t> path(std::size_t index) const;
  std::size_t lowest_common_ancestor(std::size_t a, std::size_t b) const;
  bool in_subtree(std::size_t index, std::size_t subtree_root) const;
  //! Pre-order over the subtree rooted at `index`.
  std::vector<std::size_t> subtree(std::size_t index) const;

  bool operator==(const Taxonomy& other) const { return nodes_ == other.nodes_; }

private:
  std::vector<TaxonomyNode> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::optional<std::size_t>> parent_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> leaf_count_;
  std::size_t root_ = 0;
  int max_level_ = 0;
};

//! One JSON object per line: {"id", "name", "parent_id"?, "level"}.
Taxonomy parse_taxonomy(std::istream& in);
void write_taxonomy(std::ostream& out, const Taxonomy& taxonomy);

} // namespace flowscope
