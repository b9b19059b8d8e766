#pragma once

// JSON projections of every analysis result. The HTTP service and the CLI
// both emit exactly these shapes.

#include "flowscope/distributions.hpp"
#include "flowscope/evaluation.hpp"
#include "flowscope/features.hpp"
#include "flowscope/flow_matrix.hpp"
#include "flowscope/layout.hpp"
#include "flowscope/snapshot.hpp"

#include <json.hpp>

namespace flowscope {

using nlohmann::json;

void to_json(json& j, const WeightedMultiset& m);
void to_json(json& j, const FlowMatrix& m);
void to_json(json& j, const ConditionalDistribution& d);
void to_json(json& j, const QuantityReport& r);
void to_json(json& j, const QualityReport& r);
void to_json(json& j, const ImportanceScore& s);
void to_json(json& j, const WelchResult& r);
void to_json(json& j, const ViolinSummary& v);
void to_json(json& j, const AccuracyRow& r);
void to_json(json& j, const DiagnosticFinding& f);
void to_json(json& j, const LayeredFlow& f);
void to_json(json& j, const TrendClass& t);
void to_json(json& j, const SankeyLayout& l);
void to_json(json& j, const RadialLayout& l);
void to_json(json& j, const ViolinOutline& v);
void to_json(json& j, const TrendCell& c);

//! Inverse of the layout projections, for rendering stored layout files.
//! Throws MalformedRecord on shape errors.
SankeyLayout sankey_layout_from_json(const json& j);
RadialLayout radial_layout_from_json(const json& j);
ViolinOutline violin_outline_from_json(const json& j);

//! Taxonomy with per-node label counts.
json taxonomy_json(const DatasetSnapshot& snapshot);

} // namespace flowscope
