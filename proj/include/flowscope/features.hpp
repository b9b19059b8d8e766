#pragma once

#include "flowscope/distributions.hpp"
#include "flowscope/flow_matrix.hpp"
#include "flowscope/snapshot.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace flowscope {

//! Feature value -> label flow over positive labels of the items carrying a
//! value. Throws UnknownFeature or NotCategorical.
FlowMatrix feature_label_flow(const DatasetSnapshot& snapshot, std::string_view feature);

//! Shannon entropy (bits) of the row and column marginals.
double row_entropy(const FlowMatrix& matrix);
double column_entropy(const FlowMatrix& matrix);

//! I(rows; columns) in bits. Zero for an empty matrix.
double mutual_information(const FlowMatrix& matrix);

struct ImportanceScore
{
  std::string feature;
  double score = 0.0;      // I(F;Y), bits
  double normalized = 0.0; // score / H(Y), 0 when H(Y) = 0
  double feature_entropy = 0.0;
  double label_entropy = 0.0;
  std::vector<ConditionalDistribution> per_value_conditionals;
};

ImportanceScore importance(const DatasetSnapshot& snapshot, std::string_view feature);

//! Importance of every categorical feature, highest first, ties by name.
std::vector<ImportanceScore> rank_features(const DatasetSnapshot& snapshot);

struct WelchResult
{
  std::string feature;
  std::string class_a;
  std::string class_b;
  double t_statistic = 0.0; // +/-infinity when both variances vanish
  double mean_a = 0.0;
  double mean_b = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  bool degenerate = false; // both variances zero
};

//! Welch's unequal-variance t statistic on raw samples.
WelchResult welch_statistic(std::span<const double> a, std::span<const double> b);

//! Numeric feature values of items with a positive label in the subtree of
//! `category`, one value per item.
std::vector<double> class_samples(const DatasetSnapshot& snapshot,
                                  const FeatureColumn& column,
                                  std::string_view category);

WelchResult welch(const DatasetSnapshot& snapshot,
                  std::string_view feature,
                  std::string_view class_a,
                  std::string_view class_b);

struct ViolinSummary
{
  std::string category;
  std::vector<double> grid;
  std::vector<double> density;
  std::array<double, 3> quartiles{}; // q1, median, q3
  std::size_t n = 0;
  double bandwidth = 0.0;
  double min = 0.0;
  double max = 0.0;
};

//! Inclusive linear-interpolation quantile of sorted data, p in [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

//! 0.9 * min(sd, IQR / 1.34) * n^(-1/5); falls back to whichever spread is
//! positive, and to a small width around the value for constant samples.
double silverman_bandwidth(std::span<const double> sorted);

//! Gaussian KDE over [min - h, max + h], renormalized to unit trapezoid area.
ViolinSummary violin_from_samples(std::vector<double> samples,
                                  std::string category,
                                  std::size_t grid_points = 64);

ViolinSummary violin(const DatasetSnapshot& snapshot,
                     std::string_view feature,
                     std::string_view category,
                     std::size_t grid_points = 64);

} // namespace flowscope
