#include "flowscope/layout.hpp"

#include "flowscope/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <unordered_map>

namespace flowscope {

namespace {

struct Edge
{
  std::size_t from; // node id
  std::size_t to;
  std::int64_t value;
};

struct Graph
{
  std::vector<std::string> labels;
  std::vector<int> layer;
  std::vector<std::int64_t> value;
  std::vector<std::vector<std::size_t>> order; // node ids per layer, top first
  std::vector<Edge> edges;
};

Graph build_graph(std::span<const FlowMatrix> chain)
{
  Graph g;
  const int layers = static_cast<int>(chain.size()) + 1;
  g.order.resize(layers);
  std::vector<std::unordered_map<std::string, std::size_t>> ids(layers);
  auto node = [&](int layer, const std::string& label) {
    auto [it, inserted] = ids[layer].emplace(label, g.labels.size());
    if (inserted) {
      g.labels.push_back(label);
      g.layer.push_back(layer);
      g.order[layer].push_back(it->second);
    }
    return it->second;
  };
  for (std::size_t l = 0; l < chain.size(); ++l) {
    const auto& m = chain[l];
    const int left = static_cast<int>(l);
    if (l == 0) {
      for (const auto& label : m.left_labels()) {
        node(left, label);
      }
    }
    for (const auto& label : m.right_labels()) {
      node(left + 1, label);
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (auto c = m.at(i, j); c > 0) {
          g.edges.push_back({ node(left, m.left_labels()[i]),
                              node(left + 1, m.right_labels()[j]), c });
        }
      }
    }
  }
  std::vector<std::int64_t> in(g.labels.size(), 0);
  std::vector<std::int64_t> out(g.labels.size(), 0);
  for (const auto& e : g.edges) {
    out[e.from] += e.value;
    in[e.to] += e.value;
  }
  g.value.resize(g.labels.size());
  for (std::size_t n = 0; n < g.labels.size(); ++n) {
    g.value[n] = std::max(in[n], out[n]);
  }
  for (auto& ids_in_layer : g.order) {
    std::erase_if(ids_in_layer, [&](std::size_t n) { return g.value[n] == 0; });
  }
  return g;
}

// Folds nodes below `min_share` of their layer total into one synthetic node
// per layer. The merged node's value is the sum of the folded values, so
// layer totals are unchanged.
void merge_small(Graph& g, double min_share)
{
  if (min_share <= 0.0) {
    return;
  }
  std::vector<std::size_t> redirect(g.labels.size());
  std::iota(redirect.begin(), redirect.end(), std::size_t{ 0 });
  bool merged_any = false;
  for (int l = 0; l < static_cast<int>(g.order.size()); ++l) {
    auto& ids = g.order[l];
    std::int64_t total = 0;
    for (auto n : ids) {
      total += g.value[n];
    }
    const double cutoff = min_share * static_cast<double>(total);
    std::vector<std::size_t> small;
    for (auto n : ids) {
      if (static_cast<double>(g.value[n]) < cutoff) {
        small.push_back(n);
      }
    }
    if (small.empty()) {
      continue;
    }
    std::string label = kOtherLabel;
    for (auto n : ids) {
      if (g.labels[n] == label &&
          std::find(small.begin(), small.end(), n) == small.end()) {
        label += " (merged)";
        break;
      }
    }
    const std::size_t other = g.labels.size();
    g.labels.push_back(label);
    g.layer.push_back(l);
    std::int64_t value = 0;
    for (auto n : small) {
      value += g.value[n];
      redirect[n] = other;
    }
    g.value.push_back(value);
    redirect.push_back(other);
    std::erase_if(ids, [&](std::size_t n) { return redirect[n] != n; });
    ids.push_back(other);
    merged_any = true;
  }
  if (!merged_any) {
    return;
  }
  std::map<std::pair<std::size_t, std::size_t>, std::int64_t> combined;
  for (const auto& e : g.edges) {
    combined[{ redirect[e.from], redirect[e.to] }] += e.value;
  }
  // Keep the original edge order for first-appearance determinism.
  std::vector<Edge> edges;
  std::set<std::pair<std::size_t, std::size_t>> emitted;
  for (const auto& e : g.edges) {
    std::pair key{ redirect[e.from], redirect[e.to] };
    if (emitted.insert(key).second) {
      edges.push_back({ key.first, key.second, combined[key] });
    }
  }
  g.edges = std::move(edges);
}

// Fenwick tree over target positions; counts link pairs (a, b) with
// src(a) < src(b) and tgt(a) > tgt(b).
std::int64_t gap_crossings(std::vector<std::pair<std::size_t, std::size_t>> links,
                           std::size_t targets)
{
  if (links.size() < 2) {
    return 0;
  }
  std::sort(links.begin(), links.end());
  std::vector<std::int64_t> tree(targets + 1, 0);
  std::int64_t inserted = 0;
  auto prefix = [&](std::size_t pos) { // count of inserted targets <= pos
    std::int64_t s = 0;
    for (std::size_t i = pos + 1; i > 0; i -= i & (~i + 1)) {
      s += tree[i];
    }
    return s;
  };
  std::int64_t crossings = 0;
  std::size_t i = 0;
  while (i < links.size()) {
    std::size_t j = i;
    while (j < links.size() && links[j].first == links[i].first) {
      ++j;
    }
    for (std::size_t k = i; k < j; ++k) {
      crossings += inserted - prefix(links[k].second);
    }
    for (std::size_t k = i; k < j; ++k) {
      for (std::size_t p = links[k].second + 1; p <= targets; p += p & (~p + 1)) {
        ++tree[p];
      }
      ++inserted;
    }
    i = j;
  }
  return crossings;
}

std::int64_t graph_crossings(const Graph& g, const std::vector<std::size_t>& position)
{
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> per_gap(
    g.order.empty() ? 0 : g.order.size() - 1);
  for (const auto& e : g.edges) {
    per_gap[g.layer[e.from]].emplace_back(position[e.from], position[e.to]);
  }
  std::int64_t total = 0;
  for (std::size_t l = 0; l < per_gap.size(); ++l) {
    total += gap_crossings(std::move(per_gap[l]), g.order[l + 1].size());
  }
  return total;
}

void refresh_positions(const Graph& g, std::vector<std::size_t>& position)
{
  for (const auto& ids : g.order) {
    for (std::size_t p = 0; p < ids.size(); ++p) {
      position[ids[p]] = p;
    }
  }
}

// Reorders `layer` by the flow-weighted mean position of its neighbors on the
// adjacent layer (`downward`: predecessors). Nodes without such neighbors keep
// their current position as key; ties fall back to the label.
void barycenter_pass(Graph& g,
                     std::vector<std::size_t>& position,
                     int layer,
                     bool downward)
{
  auto& ids = g.order[layer];
  std::unordered_map<std::size_t, std::pair<double, double>> acc; // sum, weight
  for (const auto& e : g.edges) {
    const auto self = downward ? e.to : e.from;
    const auto other = downward ? e.from : e.to;
    if (g.layer[self] != layer) {
      continue;
    }
    auto& a = acc[self];
    a.first += static_cast<double>(position[other]) * static_cast<double>(e.value);
    a.second += static_cast<double>(e.value);
  }
  std::vector<std::pair<double, std::size_t>> keyed;
  keyed.reserve(ids.size());
  for (auto n : ids) {
    auto it = acc.find(n);
    double key = (it != acc.end() && it->second.second > 0.0)
                   ? it->second.first / it->second.second
                   : static_cast<double>(position[n]);
    keyed.emplace_back(key, n);
  }
  std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) {
      return a.first < b.first;
    }
    return g.labels[a.second] < g.labels[b.second];
  });
  for (std::size_t p = 0; p < keyed.size(); ++p) {
    ids[p] = keyed[p].second;
    position[keyed[p].second] = p;
  }
}

void order_layers(Graph& g, int max_sweeps)
{
  std::vector<std::size_t> position(g.labels.size(), 0);
  refresh_positions(g, position);
  auto best = g.order;
  auto best_crossings = graph_crossings(g, position);
  const int layers = static_cast<int>(g.order.size());
  for (int sweep = 0; sweep < max_sweeps && best_crossings > 0; ++sweep) {
    for (int l = 1; l < layers; ++l) {
      barycenter_pass(g, position, l, true);
    }
    for (int l = layers - 2; l >= 0; --l) {
      barycenter_pass(g, position, l, false);
    }
    auto c = graph_crossings(g, position);
    if (c >= best_crossings) {
      break;
    }
    best = g.order;
    best_crossings = c;
  }
  g.order = std::move(best);
}

SankeyLayout place(const Graph& g, double gap)
{
  SankeyLayout out;
  out.layer_count = static_cast<int>(g.order.size());

  // One scale for every layer so a link has the same thickness at both ends.
  std::vector<double> gaps(g.order.size(), 0.0);
  double scale = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < g.order.size(); ++l) {
    const auto k = g.order[l].size();
    if (k == 0) {
      continue;
    }
    gaps[l] = k > 1 ? std::min(gap, 0.5 / static_cast<double>(k - 1)) : 0.0;
    std::int64_t total = 0;
    for (auto n : g.order[l]) {
      total += g.value[n];
    }
    const double usable = 1.0 - gaps[l] * static_cast<double>(k - 1);
    scale = std::min(scale, usable / static_cast<double>(total));
  }

  std::set<std::string> distinct(g.labels.begin(), g.labels.end());
  std::unordered_map<std::string, int> color;
  int next_color = 0;
  for (const auto& label : distinct) {
    color.emplace(label, next_color++);
  }

  std::vector<std::size_t> index_of(g.labels.size(), 0);
  std::vector<std::size_t> position(g.labels.size(), 0);
  for (std::size_t l = 0; l < g.order.size(); ++l) {
    double y = 0.0;
    for (std::size_t p = 0; p < g.order[l].size(); ++p) {
      const auto n = g.order[l][p];
      SankeyNode node;
      node.label = g.labels[n];
      node.layer = static_cast<int>(l);
      node.y = y;
      node.height = static_cast<double>(g.value[n]) * scale;
      node.color_index = color[node.label];
      node.value = g.value[n];
      y += node.height + gaps[l];
      index_of[n] = out.nodes.size();
      position[n] = p;
      out.nodes.push_back(std::move(node));
    }
  }

  for (const auto& e : g.edges) {
    SankeyLink link;
    link.source = index_of[e.from];
    link.target = index_of[e.to];
    link.value = e.value;
    link.thickness = static_cast<double>(e.value) * scale;
    out.links.push_back(link);
  }
  std::sort(out.links.begin(), out.links.end(), [](const auto& a, const auto& b) {
    return std::pair(a.source, a.target) < std::pair(b.source, b.target);
  });

  // Outgoing links stack in target order; node indices follow layer order.
  std::vector<double> cursor(out.nodes.size(), 0.0);
  for (auto& link : out.links) {
    link.source_offset = cursor[link.source];
    cursor[link.source] += link.thickness;
  }
  std::vector<std::size_t> incoming(out.links.size());
  std::iota(incoming.begin(), incoming.end(), std::size_t{ 0 });
  std::stable_sort(incoming.begin(), incoming.end(), [&](auto a, auto b) {
    return std::pair(out.links[a].target, out.links[a].source) <
           std::pair(out.links[b].target, out.links[b].source);
  });
  std::fill(cursor.begin(), cursor.end(), 0.0);
  for (auto i : incoming) {
    auto& link = out.links[i];
    link.target_offset = cursor[link.target];
    cursor[link.target] += link.thickness;
  }

  out.crossings = count_crossings(out);
  return out;
}

} // namespace

SankeyLayout layout_sankey(std::span<const FlowMatrix> chain, const SankeyOptions& options)
{
  if (!(options.gap >= 0.0) || !(options.min_share >= 0.0) || options.min_share >= 1.0) {
    throw Error(ErrorCode::InvalidArgument, "gap must be >= 0 and min_share in [0, 1)");
  }
  std::int64_t total = 0;
  for (const auto& m : chain) {
    total += m.total();
  }
  if (chain.empty() || total == 0) {
    throw Error(ErrorCode::EmptyFlow, "nothing to lay out: the flow is empty");
  }
  auto g = build_graph(chain);
  merge_small(g, options.min_share);
  if (options.reorder) {
    order_layers(g, options.max_sweeps);
  }
  return place(g, options.gap);
}

SankeyLayout layout_sankey(const FlowMatrix& matrix, const SankeyOptions& options)
{
  return layout_sankey(std::span<const FlowMatrix>(&matrix, 1), options);
}

SankeyLayout layout_sankey(const LayeredFlow& flow, const SankeyOptions& options)
{
  return layout_sankey(std::span<const FlowMatrix>(flow.matrices), options);
}

std::int64_t count_crossings(const SankeyLayout& layout)
{
  // Rank nodes top-down within each layer.
  std::vector<std::vector<std::size_t>> layers(static_cast<std::size_t>(std::max(layout.layer_count, 0)));
  for (std::size_t n = 0; n < layout.nodes.size(); ++n) {
    const auto l = static_cast<std::size_t>(layout.nodes[n].layer);
    if (l >= layers.size()) {
      layers.resize(l + 1);
    }
    layers[l].push_back(n);
  }
  std::vector<std::size_t> position(layout.nodes.size(), 0);
  for (auto& ids : layers) {
    std::stable_sort(ids.begin(), ids.end(), [&](auto a, auto b) {
      return layout.nodes[a].y < layout.nodes[b].y;
    });
    for (std::size_t p = 0; p < ids.size(); ++p) {
      position[ids[p]] = p;
    }
  }
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> per_gap(layers.size());
  for (const auto& link : layout.links) {
    const auto l = static_cast<std::size_t>(layout.nodes.at(link.source).layer);
    per_gap[l].emplace_back(position[link.source], position.at(link.target));
  }
  std::int64_t total = 0;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    total += gap_crossings(std::move(per_gap[l]), layers[l + 1].size());
  }
  return total;
}

RadialLayout layout_radial(const Taxonomy& taxonomy, const std::map<std::string, double>* weights)
{
  RadialLayout out;
  if (taxonomy.empty()) {
    return out;
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  out.placements.resize(taxonomy.size());
  const int max_level = taxonomy.max_level();

  auto normalize = [&](double a) {
    a = std::fmod(a, two_pi);
    if (a < 0.0) {
      a += two_pi;
    }
    return a >= two_pi ? 0.0 : a;
  };

  const auto root = taxonomy.root();
  double start = 0.0;
  if (!taxonomy.is_leaf(root)) {
    const auto first = taxonomy.children(root).front();
    start = -0.5 * two_pi * static_cast<double>(taxonomy.leaf_count(first)) /
            static_cast<double>(taxonomy.leaf_count(root));
  }
  std::vector<std::pair<std::size_t, double>> stack{ { root, start } };
  std::vector<double> span(taxonomy.size(), 0.0);
  span[root] = two_pi;
  while (!stack.empty()) {
    auto [n, sector_start] = stack.back();
    stack.pop_back();
    const auto& node = taxonomy.node(n);
    auto& p = out.placements[n];
    p.id = node.id;
    p.parent = node.parent_id;
    p.level = node.level;
    p.radius = max_level > 0 ? static_cast<double>(node.level) / max_level : 0.0;
    p.sector_start = sector_start;
    p.sector_span = span[n];
    p.angle = n == root ? 0.0 : normalize(sector_start + 0.5 * span[n]);
    if (weights) {
      if (auto it = weights->find(node.id); it != weights->end()) {
        p.weight = it->second;
      }
    }
    double cursor = sector_start;
    for (auto c : taxonomy.children(n)) {
      span[c] = span[n] * static_cast<double>(taxonomy.leaf_count(c)) /
                static_cast<double>(taxonomy.leaf_count(n));
      stack.emplace_back(c, cursor);
      cursor += span[c];
    }
  }
  return out;
}

ViolinOutline layout_violin(const ViolinSummary& summary, double width)
{
  if (summary.grid.size() != summary.density.size() || summary.grid.empty()) {
    throw Error(ErrorCode::InvalidArgument, "violin summary grid and density differ");
  }
  ViolinOutline out;
  out.category = summary.category;
  out.width = width;
  out.quartiles = summary.quartiles;
  const double peak = *std::max_element(summary.density.begin(), summary.density.end());
  const double half = 0.5 * width;
  auto offset = [&](double d) { return peak > 0.0 ? half * d / peak : 0.0; };
  const auto g = summary.grid.size();
  out.points.reserve(2 * g + 1);
  for (std::size_t i = 0; i < g; ++i) {
    out.points.push_back({ offset(summary.density[i]), summary.grid[i] });
  }
  for (std::size_t i = g; i-- > 0;) {
    out.points.push_back({ -offset(summary.density[i]), summary.grid[i] });
  }
  out.points.push_back(out.points.front());
  return out;
}

std::vector<TrendCell> layout_trend_grid(const std::vector<TrendClass>& trends, int columns)
{
  std::vector<TrendCell> out;
  if (trends.empty()) {
    return out;
  }
  const int n = static_cast<int>(trends.size());
  if (columns <= 0) {
    columns = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  }
  const int rows = (n + columns - 1) / columns;
  const double w = 1.0 / columns;
  const double h = 1.0 / rows;
  constexpr double pad = 0.1;
  for (int i = 0; i < n; ++i) {
    const auto& t = trends[static_cast<std::size_t>(i)];
    TrendCell cell;
    cell.category = t.category;
    cell.row = i / columns;
    cell.col = i % columns;
    cell.x = cell.col * w;
    cell.y = cell.row * h;
    cell.w = w;
    cell.h = h;
    cell.color = t.color;
    const auto points = t.series.size();
    for (std::size_t k = 0; k < points; ++k) {
      const double fx = points > 1 ? static_cast<double>(k) / static_cast<double>(points - 1) : 0.5;
      const double fy = 1.0 - std::clamp(t.series[k], 0.0, 1.0);
      cell.polyline.push_back({ cell.x + w * (pad + (1.0 - 2 * pad) * fx),
                                cell.y + h * (pad + (1.0 - 2 * pad) * fy) });
    }
    out.push_back(std::move(cell));
  }
  return out;
}

} // namespace flowscope
