#include "flowscope/serialize.hpp"

#include "flowscope/error.hpp"

#include <cmath>

namespace flowscope {

void to_json(json& j, const WeightedMultiset& m)
{
  j = json::array();
  for (const auto& [key, n] : m.entries()) {
    j.push_back({ { "label", key }, { "count", n } });
  }
}

void to_json(json& j, const FlowMatrix& m)
{
  json counts = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) {
      row.push_back(m.at(i, k));
    }
    counts.push_back(std::move(row));
  }
  json left_totals = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    left_totals.push_back(m.row_total(i));
  }
  json right_totals = json::array();
  for (std::size_t k = 0; k < m.cols(); ++k) {
    right_totals.push_back(m.col_total(k));
  }
  j = json{ { "left", m.left_labels() },   { "right", m.right_labels() },
            { "counts", std::move(counts) }, { "leftTotals", std::move(left_totals) },
            { "rightTotals", std::move(right_totals) }, { "total", m.total() } };
}

void to_json(json& j, const ConditionalDistribution& d)
{
  json probs = json::array();
  for (const auto& [label, p] : d.probabilities) {
    probs.push_back({ { "label", label }, { "p", p } });
  }
  j = json{ { "given", d.given }, { "probabilities", std::move(probs) } };
}

void to_json(json& j, const QuantityReport& r)
{
  json children = json::array();
  for (const auto& c : r.children) {
    children.push_back({ { "child", c.child },
                         { "count", c.count },
                         { "share", c.share },
                         { "flagged", c.flagged } });
  }
  j = json{ { "parent", r.parent },     { "beta", r.beta },
            { "threshold", r.threshold }, { "total", r.total },
            { "children", std::move(children) } };
}

void to_json(json& j, const QualityReport& r)
{
  j = json{ { "category", r.category },
            { "bySourceDecision", r.by_source_decision },
            { "labels", r.labels },
            { "trusted", r.trusted },
            { "trustedShare", r.trusted_share },
            { "trustThreshold", r.trust_threshold },
            { "flagged", r.flagged } };
}

void to_json(json& j, const ImportanceScore& s)
{
  j = json{ { "feature", s.feature },
            { "score", s.score },
            { "normalized", s.normalized },
            { "featureEntropy", s.feature_entropy },
            { "labelEntropy", s.label_entropy },
            { "perValueConditionals", s.per_value_conditionals } };
}

void to_json(json& j, const WelchResult& r)
{
  j = json{ { "feature", r.feature }, { "classA", r.class_a }, { "classB", r.class_b },
            { "meanA", r.mean_a },    { "meanB", r.mean_b },     { "varA", r.var_a },
            { "varB", r.var_b },      { "nA", r.n_a },           { "nB", r.n_b },
            { "degenerate", r.degenerate } };
  if (std::isinf(r.t_statistic)) {
    j["t"] = nullptr;
    j["tSentinel"] = r.t_statistic > 0 ? "+inf" : "-inf";
  } else {
    j["t"] = r.t_statistic;
  }
}

void to_json(json& j, const ViolinSummary& v)
{
  j = json{ { "category", v.category },   { "n", v.n },
            { "bandwidth", v.bandwidth }, { "min", v.min },
            { "max", v.max },             { "quartiles", v.quartiles },
            { "grid", v.grid },           { "density", v.density } };
}

void to_json(json& j, const AccuracyRow& r)
{
  j = json{ { "category", r.category },
            { "sampleSize", r.sample_size },
            { "correct", r.correct },
            { "accuracy", r.accuracy } };
}

void to_json(json& j, const DiagnosticFinding& f)
{
  json flows = json::array();
  for (const auto& e : f.flows) {
    flows.push_back({ { "from", e.from }, { "to", e.to }, { "count", e.count } });
  }
  json values = json::object();
  for (const auto& [k, v] : f.values) {
    values[k] = v;
  }
  j = json{ { "kind", std::string(to_string(f.kind)) },
            { "subjects", f.subjects },
            { "evidence", { { "flows", std::move(flows) }, { "values", std::move(values) } } },
            { "severity", f.severity } };
}

void to_json(json& j, const LayeredFlow& f)
{
  j = json{ { "layers", f.layers }, { "matrices", f.matrices } };
  if (f.item_paths) {
    j["itemPaths"] = *f.item_paths;
  }
}

void to_json(json& j, const TrendClass& t)
{
  j = json{ { "category", t.category },
            { "series", t.series },
            { "class", std::string(to_string(t.trend)) },
            { "color", std::string(to_string(t.color)) } };
}

void to_json(json& j, const SankeyLayout& l)
{
  json nodes = json::array();
  for (const auto& n : l.nodes) {
    nodes.push_back({ { "label", n.label },
                      { "layer", n.layer },
                      { "y", n.y },
                      { "h", n.height },
                      { "colorIndex", n.color_index },
                      { "value", n.value } });
  }
  json links = json::array();
  for (const auto& k : l.links) {
    links.push_back({ { "s", k.source },
                      { "t", k.target },
                      { "w", k.thickness },
                      { "so", k.source_offset },
                      { "to", k.target_offset },
                      { "value", k.value } });
  }
  j = json{ { "nodes", std::move(nodes) },
            { "links", std::move(links) },
            { "layerCount", l.layer_count },
            { "crossings", l.crossings } };
}

void to_json(json& j, const RadialLayout& l)
{
  json placements = json::array();
  for (const auto& p : l.placements) {
    json e{ { "id", p.id },
            { "parent", p.parent ? json(*p.parent) : json(nullptr) },
            { "level", p.level },
            { "radius", p.radius },
            { "angle", p.angle },
            { "sectorStart", p.sector_start },
            { "sectorSpan", p.sector_span } };
    if (p.weight) {
      e["weight"] = *p.weight;
    }
    placements.push_back(std::move(e));
  }
  j = json{ { "placements", std::move(placements) } };
}

void to_json(json& j, const ViolinOutline& v)
{
  json points = json::array();
  for (const auto& p : v.points) {
    points.push_back({ p.x, p.y });
  }
  j = json{ { "category", v.category },
            { "width", v.width },
            { "quartiles", v.quartiles },
            { "polygon", std::move(points) } };
}

void to_json(json& j, const TrendCell& c)
{
  json line = json::array();
  for (const auto& p : c.polyline) {
    line.push_back({ p.x, p.y });
  }
  j = json{ { "category", c.category }, { "row", c.row }, { "col", c.col },
            { "x", c.x },               { "y", c.y },     { "w", c.w },
            { "h", c.h },               { "color", std::string(to_string(c.color)) },
            { "polyline", std::move(line) } };
}

namespace {

template <typename Fn>
auto parse_shape(const char* what, Fn&& fn)
{
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("invalid ") + what + " JSON: " + e.what());
  }
}

} // namespace

SankeyLayout sankey_layout_from_json(const json& j)
{
  return parse_shape("sankey layout", [&] {
    SankeyLayout l;
    for (const auto& n : j.at("nodes")) {
      SankeyNode node;
      node.label = n.at("label").get<std::string>();
      node.layer = n.at("layer").get<int>();
      node.y = n.at("y").get<double>();
      node.height = n.at("h").get<double>();
      node.color_index = n.value("colorIndex", 0);
      node.value = n.value("value", std::int64_t{ 0 });
      l.nodes.push_back(std::move(node));
    }
    for (const auto& k : j.at("links")) {
      SankeyLink link;
      link.source = k.at("s").get<std::size_t>();
      link.target = k.at("t").get<std::size_t>();
      link.thickness = k.at("w").get<double>();
      link.source_offset = k.at("so").get<double>();
      link.target_offset = k.at("to").get<double>();
      link.value = k.value("value", std::int64_t{ 0 });
      if (link.source >= l.nodes.size() || link.target >= l.nodes.size()) {
        throw Error(ErrorCode::MalformedRecord, "link references a missing node");
      }
      l.links.push_back(link);
    }
    int layers = 0;
    for (const auto& n : l.nodes) {
      layers = std::max(layers, n.layer + 1);
    }
    l.layer_count = j.value("layerCount", layers);
    l.crossings = j.value("crossings", std::int64_t{ 0 });
    return l;
  });
}

RadialLayout radial_layout_from_json(const json& j)
{
  return parse_shape("radial layout", [&] {
    RadialLayout l;
    for (const auto& e : j.at("placements")) {
      RadialPlacement p;
      p.id = e.at("id").get<std::string>();
      if (e.contains("parent") && !e["parent"].is_null()) {
        p.parent = e["parent"].get<std::string>();
      }
      p.level = e.at("level").get<int>();
      p.radius = e.at("radius").get<double>();
      p.angle = e.at("angle").get<double>();
      p.sector_start = e.value("sectorStart", 0.0);
      p.sector_span = e.value("sectorSpan", 0.0);
      if (e.contains("weight")) {
        p.weight = e["weight"].get<double>();
      }
      l.placements.push_back(std::move(p));
    }
    return l;
  });
}

ViolinOutline violin_outline_from_json(const json& j)
{
  return parse_shape("violin outline", [&] {
    ViolinOutline v;
    v.category = j.value("category", std::string{});
    v.width = j.value("width", 0.0);
    if (j.contains("quartiles")) {
      v.quartiles = j["quartiles"].get<std::array<double, 3>>();
    }
    for (const auto& p : j.at("polygon")) {
      v.points.push_back({ p.at(0).get<double>(), p.at(1).get<double>() });
    }
    return v;
  });
}

json taxonomy_json(const DatasetSnapshot& snapshot)
{
  const auto& tax = snapshot.taxonomy();
  json nodes = json::array();
  for (std::size_t n = 0; n < tax.size(); ++n) {
    const auto& node = tax.node(n);
    const auto& c = snapshot.label_counts(n);
    nodes.push_back({ { "id", node.id },
                      { "name", node.name },
                      { "parentId", node.parent_id ? json(*node.parent_id) : json(nullptr) },
                      { "level", node.level },
                      { "leaf", tax.is_leaf(n) },
                      { "labelCount", c.subtree_total },
                      { "positiveCount", c.subtree_positive } });
  }
  return json{ { "root", tax.node(tax.root()).id }, { "nodes", std::move(nodes) } };
}

} // namespace flowscope
