#pragma once

#include "flowscope/flow_matrix.hpp"
#include "flowscope/snapshot.hpp"

#include <string>
#include <utility>
#include <vector>

namespace flowscope {

struct ConditionalDistribution
{
  std::string given;
  //! One entry per right label of the source matrix, in matrix order.
  std::vector<std::pair<std::string, double>> probabilities;

  double operator[](std::string_view category) const;
};

//! P(right | left = given). Throws UnknownCategory if `given` is not a left
//! label and InsufficientData if its row is empty.
ConditionalDistribution conditional(const FlowMatrix& matrix, std::string_view given);

struct QuantityShare
{
  std::string child;
  std::int64_t count = 0;
  double share = 0.0;
  bool flagged = false;
};

struct QuantityReport
{
  std::string parent;
  double beta = 0.5;
  double threshold = 0.0; // beta / K
  std::int64_t total = 0;
  std::vector<QuantityShare> children; // taxonomy order
};

//! Share of positive labels among the children of `parent`; a child is flagged
//! when its share falls below beta / K. With no labels at all every child is
//! flagged and all shares are 0.
QuantityReport quantity_report(const DatasetSnapshot& snapshot,
                               std::string_view parent,
                               double beta = 0.5);

//! One matrix per adjacent level pair below `root`, `depth` levels deep (fewer
//! when the tree is shallower). Matrix l maps the inner nodes at relative
//! level l to their children, weighted by positive subtree label counts.
std::vector<FlowMatrix> multilevel_quantity(const DatasetSnapshot& snapshot,
                                            std::string_view root,
                                            int depth);

struct QualityReport
{
  std::string category;
  FlowMatrix by_source_decision; // sources (first appearance) x {positive, negative}
  std::int64_t labels = 0;
  std::int64_t trusted = 0;
  double trusted_share = 0.0;
  double trust_threshold = 0.5;
  bool flagged = false;
};

//! Source/decision breakdown of every label in the subtree of `category`.
QualityReport quality_report(const DatasetSnapshot& snapshot,
                             std::string_view category,
                             double trust_threshold = 0.5);

} // namespace flowscope
