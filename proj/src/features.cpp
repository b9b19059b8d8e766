#include "flowscope/features.hpp"

#include "flowscope/error.hpp"
#include "flowscope/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

namespace flowscope {

namespace {

const FeatureColumn& categorical_column(const DatasetSnapshot& snapshot,
                                        std::string_view feature)
{
  const auto& column = snapshot.feature(feature);
  if (column.kind() != FeatureKind::categorical) {
    throw Error(ErrorCode::NotCategorical,
                "feature '" + std::string(feature) + "' is numeric");
  }
  return column;
}

const FeatureColumn& numeric_column(const DatasetSnapshot& snapshot,
                                    std::string_view feature)
{
  const auto& column = snapshot.feature(feature);
  if (column.kind() != FeatureKind::numeric) {
    throw Error(ErrorCode::NotNumeric,
                "feature '" + std::string(feature) + "' is categorical");
  }
  return column;
}

double entropy_of(const std::vector<std::int64_t>& counts, std::int64_t total)
{
  if (total <= 0) {
    return 0.0;
  }
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (auto c : counts) {
    if (c > 0) {
      const double p = static_cast<double>(c) / n;
      h -= p * std::log2(p);
    }
  }
  return h;
}

} // namespace

FlowMatrix feature_label_flow(const DatasetSnapshot& snapshot, std::string_view feature)
{
  const auto& column = categorical_column(snapshot, feature);
  const auto& values = column.categorical_values();
  FlowBuilder builder;
  for (const auto& inst : snapshot.instances()) {
    if (inst.decision != Decision::positive) {
      continue;
    }
    if (auto at = column.find(inst.item_id)) {
      builder.add(values[*at], inst.label);
    }
  }
  return builder.build();
}

double row_entropy(const FlowMatrix& matrix)
{
  std::vector<std::int64_t> rows(matrix.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i] = matrix.row_total(i);
  }
  return entropy_of(rows, matrix.total());
}

double column_entropy(const FlowMatrix& matrix)
{
  std::vector<std::int64_t> cols(matrix.cols());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    cols[j] = matrix.col_total(j);
  }
  return entropy_of(cols, matrix.total());
}

double mutual_information(const FlowMatrix& matrix)
{
  if (matrix.total() == 0) {
    return 0.0;
  }
  const double n = static_cast<double>(matrix.total());
  double mi = 0.0;
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    const double ri = static_cast<double>(matrix.row_total(i));
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
      const auto c = matrix.at(i, j);
      if (c == 0) {
        continue;
      }
      const double cij = static_cast<double>(c);
      const double cj = static_cast<double>(matrix.col_total(j));
      mi += (cij / n) * std::log2((cij * n) / (ri * cj));
    }
  }
  // Rounding can leave a tiny negative residue for independent tables.
  return std::max(mi, 0.0);
}

ImportanceScore importance(const DatasetSnapshot& snapshot, std::string_view feature)
{
  auto flow = feature_label_flow(snapshot, feature);
  if (flow.total() == 0) {
    throw Error(ErrorCode::InsufficientData,
                "feature '" + std::string(feature) + "' has no labeled values");
  }
  ImportanceScore out;
  out.feature = std::string(feature);
  out.score = mutual_information(flow);
  out.feature_entropy = row_entropy(flow);
  out.label_entropy = column_entropy(flow);
  out.normalized = out.label_entropy > 0.0 ? out.score / out.label_entropy : 0.0;
  for (const auto& value : flow.left_labels()) {
    out.per_value_conditionals.push_back(conditional(flow, value));
  }
  return out;
}

std::vector<ImportanceScore> rank_features(const DatasetSnapshot& snapshot)
{
  std::vector<ImportanceScore> out;
  for (const auto& column : snapshot.features()) {
    if (column.kind() != FeatureKind::categorical) {
      continue;
    }
    try {
      out.push_back(importance(snapshot, column.name()));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientData) {
        throw;
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) {
      return a.score > b.score;
    }
    return a.feature < b.feature;
  });
  return out;
}

WelchResult welch_statistic(std::span<const double> a, std::span<const double> b)
{
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::InsufficientData,
                "Welch's statistic needs at least two samples per class");
  }
  auto moments = [](std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) {
      ss += (v - mean) * (v - mean);
    }
    return std::pair{ mean, ss / (n - 1.0) };
  };
  WelchResult r;
  std::tie(r.mean_a, r.var_a) = moments(a);
  std::tie(r.mean_b, r.var_b) = moments(b);
  r.n_a = a.size();
  r.n_b = b.size();
  const double diff = r.mean_a - r.mean_b;
  if (r.var_a == 0.0 && r.var_b == 0.0) {
    r.degenerate = true;
    if (diff == 0.0) {
      r.t_statistic = 0.0;
    } else {
      r.t_statistic = diff > 0.0 ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity();
    }
    return r;
  }
  const double se = std::sqrt(r.var_a / static_cast<double>(r.n_a) +
                              r.var_b / static_cast<double>(r.n_b));
  r.t_statistic = diff / se;
  return r;
}

std::vector<double> class_samples(const DatasetSnapshot& snapshot,
                                  const FeatureColumn& column,
                                  std::string_view category)
{
  const auto node = snapshot.taxonomy().index_of(category);
  std::vector<double> out;
  std::unordered_set<std::string_view> seen;
  for (auto i : snapshot.instances_in_subtree(node)) {
    const auto& inst = snapshot.instances()[i];
    if (inst.decision != Decision::positive) {
      continue;
    }
    if (!seen.insert(inst.item_id).second) {
      continue;
    }
    if (auto at = column.find(inst.item_id)) {
      out.push_back(column.numeric_values()[*at]);
    }
  }
  return out;
}

WelchResult welch(const DatasetSnapshot& snapshot,
                  std::string_view feature,
                  std::string_view class_a,
                  std::string_view class_b)
{
  const auto& column = numeric_column(snapshot, feature);
  auto a = class_samples(snapshot, column, class_a);
  auto b = class_samples(snapshot, column, class_b);
  auto r = welch_statistic(a, b);
  r.feature = std::string(feature);
  r.class_a = std::string(class_a);
  r.class_b = std::string(class_b);
  return r;
}

double quantile_sorted(std::span<const double> sorted, double p)
{
  if (sorted.empty()) {
    throw Error(ErrorCode::InsufficientData, "quantile of an empty sample");
  }
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= sorted.size()) {
    return sorted.back();
  }
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double silverman_bandwidth(std::span<const double> sorted)
{
  const auto n = sorted.size();
  if (n < 2) {
    throw Error(ErrorCode::InsufficientData, "bandwidth needs at least two samples");
  }
  const double mean =
    std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : sorted) {
    ss += (v - mean) * (v - mean);
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const double iqr = (quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25)) / 1.34;
  double spread = std::min(sd, iqr);
  if (spread <= 0.0) {
    spread = std::max(sd, iqr);
  }
  if (spread <= 0.0) {
    // Constant sample: a narrow spike around the value.
    return 1e-3 * std::max(1.0, std::abs(sorted.front()));
  }
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

ViolinSummary violin_from_samples(std::vector<double> samples,
                                  std::string category,
                                  std::size_t grid_points)
{
  if (samples.size() < 2) {
    throw Error(ErrorCode::InsufficientData,
                "violin for '" + category + "' needs at least two samples");
  }
  if (grid_points < 2) {
    throw Error(ErrorCode::InvalidArgument, "violin grid needs at least two points");
  }
  std::sort(samples.begin(), samples.end());
  ViolinSummary out;
  out.category = std::move(category);
  out.n = samples.size();
  out.min = samples.front();
  out.max = samples.back();
  out.quartiles = { quantile_sorted(samples, 0.25), quantile_sorted(samples, 0.5),
                    quantile_sorted(samples, 0.75) };
  out.bandwidth = silverman_bandwidth(samples);

  const double lo = out.min - out.bandwidth;
  const double hi = out.max + out.bandwidth;
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  out.grid.resize(grid_points);
  for (std::size_t g = 0; g < grid_points; ++g) {
    out.grid[g] = lo + step * static_cast<double>(g);
  }
  out.grid.back() = hi;

  out.density = kernels::gaussian_kde(samples, out.grid, out.bandwidth);
  double area = 0.0;
  for (std::size_t g = 1; g < grid_points; ++g) {
    area += 0.5 * (out.density[g] + out.density[g - 1]) * (out.grid[g] - out.grid[g - 1]);
  }
  if (area > 0.0) {
    for (auto& d : out.density) {
      d /= area;
    }
  }
  return out;
}

ViolinSummary violin(const DatasetSnapshot& snapshot,
                     std::string_view feature,
                     std::string_view category,
                     std::size_t grid_points)
{
  const auto& column = numeric_column(snapshot, feature);
  return violin_from_samples(class_samples(snapshot, column, category),
                             std::string(category), grid_points);
}

} // namespace flowscope
