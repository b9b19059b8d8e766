#include "flowscope/taxonomy.hpp"

#include "jsonl.hpp"

#include <algorithm>
#include <ostream>

namespace flowscope {

namespace {

std::size_t line_of(const std::vector<std::size_t>& lines, std::size_t index)
{
  return index < lines.size() ? lines[index] : index + 1;
}

} // namespace

Taxonomy::Taxonomy(std::vector<TaxonomyNode> nodes,
                   const std::vector<std::size_t>& lines)
  : nodes_(std::move(nodes))
{
  if (nodes_.empty()) {
    throw Error(ErrorCode::MalformedRecord, "taxonomy has no records");
  }

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto [it, inserted] = index_.emplace(nodes_[i].id, i);
    if (!inserted) {
      throw Error(ErrorCode::DuplicateId,
                  "duplicate node id '" + nodes_[i].id + "'",
                  line_of(lines, i));
    }
  }

  parent_.assign(nodes_.size(), std::nullopt);
  children_.assign(nodes_.size(), {});
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& parent_id = nodes_[i].parent_id;
    if (!parent_id) {
      roots.push_back(i);
      continue;
    }
    if (*parent_id == nodes_[i].id) {
      throw Error(ErrorCode::CycleDetected,
                  "node '" + nodes_[i].id + "' is its own parent",
                  line_of(lines, i));
    }
    auto it = index_.find(*parent_id);
    if (it == index_.end()) {
      throw Error(ErrorCode::UnknownParent,
                  "node '" + nodes_[i].id + "' has unknown parent '" +
                    *parent_id + "'",
                  line_of(lines, i));
    }
    parent_[i] = it->second;
    children_[it->second].push_back(i);
  }

  if (roots.size() > 1) {
    throw Error(ErrorCode::MultipleRoots,
                "second root '" + nodes_[roots[1]].id + "'",
                line_of(lines, roots[1]));
  }
  if (roots.empty()) {
    throw Error(ErrorCode::CycleDetected, "taxonomy has no root");
  }
  root_ = roots.front();

  // Every node must be reachable from the root; anything left over sits on a
  // parent cycle.
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::size_t> stack{ root_ };
  while (!stack.empty()) {
    auto n = stack.back();
    stack.pop_back();
    seen[n] = true;
    for (auto c : children_[n]) {
      stack.push_back(c);
    }
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!seen[i]) {
      throw Error(ErrorCode::CycleDetected,
                  "node '" + nodes_[i].id + "' is on a parent cycle",
                  line_of(lines, i));
    }
  }

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    int expected = parent_[i] ? nodes_[*parent_[i]].level + 1 : 0;
    if (nodes_[i].level != expected) {
      throw Error(ErrorCode::MalformedRecord,
                  "node '" + nodes_[i].id + "' has level " +
                    std::to_string(nodes_[i].level) + ", expected " +
                    std::to_string(expected),
                  line_of(lines, i));
    }
    max_level_ = std::max(max_level_, nodes_[i].level);
  }

  // Leaf counts bottom-up: deepest levels first.
  leaf_count_.assign(nodes_.size(), 0);
  std::vector<std::size_t> order(nodes_.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return nodes_[a].level > nodes_[b].level;
  });
  for (auto n : order) {
    if (children_[n].empty()) {
      leaf_count_[n] = 1;
    }
    if (parent_[n]) {
      leaf_count_[*parent_[n]] += leaf_count_[n];
    }
  }
}

std::optional<std::size_t> Taxonomy::find(std::string_view id) const
{
  auto it = index_.find(std::string(id));
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::size_t Taxonomy::index_of(std::string_view id) const
{
  if (auto found = find(id)) {
    return *found;
  }
  throw Error(ErrorCode::UnknownCategory,
              "unknown category '" + std::string(id) + "'");
}

std::optional<std::size_t> Taxonomy::parent(std::size_t index) const
{
  return parent_.at(index);
}

std::vector<std::size_t> Taxonomy::path(std::size_t index) const
{
  std::vector<std::size_t> out;
  std::optional<std::size_t> cur = index;
  while (cur) {
    out.push_back(*cur);
    cur = parent_[*cur];
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::size_t Taxonomy::lowest_common_ancestor(std::size_t a, std::size_t b) const
{
  auto pa = path(a);
  auto pb = path(b);
  std::size_t lca = root_;
  for (std::size_t i = 0; i < std::min(pa.size(), pb.size()); ++i) {
    if (pa[i] != pb[i]) {
      break;
    }
    lca = pa[i];
  }
  return lca;
}

bool Taxonomy::in_subtree(std::size_t index, std::size_t subtree_root) const
{
  std::optional<std::size_t> cur = index;
  while (cur) {
    if (*cur == subtree_root) {
      return true;
    }
    cur = parent_[*cur];
  }
  return false;
}

std::vector<std::size_t> Taxonomy::subtree(std::size_t index) const
{
  std::vector<std::size_t> out;
  std::vector<std::size_t> stack{ index };
  while (!stack.empty()) {
    auto n = stack.back();
    stack.pop_back();
    out.push_back(n);
    const auto& kids = children_[n];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      stack.push_back(*it);
    }
  }
  return out;
}

Taxonomy parse_taxonomy(std::istream& in)
{
  std::vector<TaxonomyNode> nodes;
  std::vector<std::size_t> lines;
  detail::for_each_record(in, [&](const detail::json& rec, std::size_t line) {
    TaxonomyNode node;
    node.id = detail::required_string(rec, "id", line);
    node.name = detail::required_string(rec, "name", line);
    node.parent_id = detail::optional_string(rec, "parent_id", line);
    auto level = detail::required_integer(rec, "level", line);
    if (level < 0) {
      throw Error(ErrorCode::MalformedRecord, "negative level", line);
    }
    node.level = static_cast<int>(level);
    if (node.id.empty()) {
      throw Error(ErrorCode::MalformedRecord, "empty id", line);
    }
    nodes.push_back(std::move(node));
    lines.push_back(line);
  });
  return Taxonomy(std::move(nodes), lines);
}

void write_taxonomy(std::ostream& out, const Taxonomy& taxonomy)
{
  for (const auto& node : taxonomy.nodes()) {
    detail::json rec{ { "id", node.id }, { "name", node.name } };
    if (node.parent_id) {
      rec["parent_id"] = *node.parent_id;
    }
    rec["level"] = node.level;
    out << rec.dump() << '\n';
  }
}

} // namespace flowscope
