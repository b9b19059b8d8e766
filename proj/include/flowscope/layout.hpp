#pragma once

#include "flowscope/evaluation.hpp"
#include "flowscope/features.hpp"
#include "flowscope/flow_matrix.hpp"
#include "flowscope/taxonomy.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flowscope {

// All geometry is in normalized [0, 1] coordinates; renderers scale it.

struct SankeyNode
{
  std::string label;
  int layer = 0;
  double y = 0.0;      // top edge
  double height = 0.0;
  int color_index = 0; // rank of the label among all labels in the layout
  std::int64_t value = 0;

  bool operator==(const SankeyNode&) const = default;
};

struct SankeyLink
{
  std::size_t source = 0; // index into SankeyLayout::nodes
  std::size_t target = 0;
  double thickness = 0.0;
  double source_offset = 0.0; // from the source node's top edge
  double target_offset = 0.0; // from the target node's top edge
  std::int64_t value = 0;

  bool operator==(const SankeyLink&) const = default;
};

//! Nodes are listed by layer, then top to bottom; links by (source, target).
struct SankeyLayout
{
  std::vector<SankeyNode> nodes;
  std::vector<SankeyLink> links;
  int layer_count = 0;
  std::int64_t crossings = 0;

  bool operator==(const SankeyLayout&) const = default;
};

struct SankeyOptions
{
  double gap = 0.01;
  //! Nodes below this share of their layer total merge into "Other"; 0 disables.
  double min_share = 0.005;
  //! Barycenter reordering; when false nodes keep first-appearance order.
  bool reorder = true;
  int max_sweeps = 4;
};

inline constexpr const char* kOtherLabel = "Other";

//! Lays out a chain of flow matrices (the right labels of matrix l feed the
//! left labels of matrix l + 1). Throws EmptyFlow when no flow is present.
SankeyLayout layout_sankey(std::span<const FlowMatrix> chain, const SankeyOptions& options = {});
SankeyLayout layout_sankey(const FlowMatrix& matrix, const SankeyOptions& options = {});
SankeyLayout layout_sankey(const LayeredFlow& flow, const SankeyOptions& options = {});

//! Pairs of links in the same layer gap whose endpoint orders invert.
std::int64_t count_crossings(const SankeyLayout& layout);

struct RadialPlacement
{
  std::string id;
  std::optional<std::string> parent;
  int level = 0;
  double radius = 0.0;       // level / max level
  double angle = 0.0;        // sector center in [0, 2pi)
  double sector_start = 0.0; // unnormalized; may be negative
  double sector_span = 0.0;
  std::optional<double> weight;
};

//! Placements in taxonomy document order. Sector spans are proportional to
//! leaf counts; the first level-1 sector is centered on angle 0.
struct RadialLayout
{
  std::vector<RadialPlacement> placements;
};

RadialLayout layout_radial(const Taxonomy& taxonomy,
                           const std::map<std::string, double>* weights = nullptr);

struct Point
{
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

//! Mirrored density outline. `x` is the horizontal offset from the violin
//! axis, `y` the feature value. The polygon is closed (last == first).
struct ViolinOutline
{
  std::string category;
  double width = 0.0;
  std::vector<Point> points;
  std::array<double, 3> quartiles{};
};

ViolinOutline layout_violin(const ViolinSummary& summary, double width);

struct TrendCell
{
  std::string category;
  int row = 0;
  int col = 0;
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  TrendColor color = TrendColor::light_blue;
  std::vector<Point> polyline; // absolute normalized coordinates
};

//! Small-multiple grid; `columns` = 0 picks ceil(sqrt(n)).
std::vector<TrendCell> layout_trend_grid(const std::vector<TrendClass>& trends, int columns = 0);

} // namespace flowscope
