#include "doctest.h"

#include "flowscope/error.hpp"
#include "flowscope/features.hpp"

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"

#include <random>
#include <sstream>

using namespace flowscope;

namespace {

// Labels y0..y(k-1) under one root; item (i, j, n) carries feature value f_i
// and label y_j. Adds a constant-valued categorical feature "constant".
SnapshotPtr feature_snapshot(const std::vector<std::vector<double>>& counts)
{
  std::vector<TaxonomyNode> nodes{ { "root", "root", std::nullopt, 0 } };
  for (std::size_t j = 0; j < counts.front().size(); ++j) {
    nodes.push_back({ "y" + std::to_string(j), "y", std::string("root"), 1 });
  }
  std::vector<LabeledInstance> labels;
  FeatureColumn f("f", FeatureKind::categorical);
  FeatureColumn constant("constant", FeatureKind::categorical);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      for (int n = 0; n < static_cast<int>(counts[i][j]); ++n) {
        const auto item = "it" + std::to_string(i) + "-" + std::to_string(j) + "-" + std::to_string(n);
        labels.push_back({ item, "t", "y" + std::to_string(j), "expert", Decision::positive, std::nullopt });
        f.add_categorical(item, "f" + std::to_string(i));
        constant.add_categorical(item, "same");
      }
    }
  }
  return build_snapshot(Taxonomy(nodes), labels, { f, constant }, {}, SourceRegistry::defaults());
}

} // namespace

TEST_CASE("importance: independence, determinism and a direct MI sum")
{
  auto independent = importance(*feature_snapshot({ { 25, 25 }, { 25, 25 } }), "f");
  CHECK(independent.score == 0.0);
  CHECK(independent.normalized == 0.0);

  auto diagonal = importance(*feature_snapshot({ { 50, 0 }, { 0, 50 } }), "f");
  CHECK(diagonal.score == 1.0);
  CHECK(diagonal.label_entropy == 1.0);
  CHECK(diagonal.normalized == 1.0);

  const std::vector<std::vector<double>> mixed{ { 30, 10 }, { 10, 30 } };
  auto s = importance(*feature_snapshot(mixed), "f");
  CHECK(s.score == doctest::Approx(oracle::mutual_information(mixed)).epsilon(1e-12));
  CHECK(s.score == doctest::Approx(1.0 - oracle::entropy({ 30, 10 })).epsilon(1e-12));
  REQUIRE(s.per_value_conditionals.size() == 2);
  CHECK(s.per_value_conditionals[0]["y0"] == 0.75);
}

TEST_CASE("importance: bounds and symmetry on random tables")
{
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    const auto c = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    std::vector<std::int64_t> counts(r * c);
    std::vector<std::string> left;
    std::vector<std::string> right;
    for (auto& n : counts) {
      n = std::uniform_int_distribution<std::int64_t>(0, 30)(rng);
    }
    counts[0] += 1;
    for (std::size_t i = 0; i < r; ++i) {
      left.push_back("f" + std::to_string(i));
    }
    for (std::size_t j = 0; j < c; ++j) {
      right.push_back("y" + std::to_string(j));
    }
    auto m = FlowMatrix::from_counts(left, right, counts);
    const double mi = mutual_information(m);
    CHECK(mi >= 0.0);
    CHECK(mi <= std::min(row_entropy(m), column_entropy(m)) + 1e-12);
    CHECK(mutual_information(m.transposed()) == doctest::Approx(mi).epsilon(1e-9));
  }
}

TEST_CASE("importance: a constant feature scores zero and ranks last")
{
  auto snap = feature_snapshot({ { 30, 10 }, { 10, 30 } });
  auto flow = feature_label_flow(*snap, "constant");
  CHECK(flow.rows() == 1);
  CHECK(flow.right_marginal() == feature_label_flow(*snap, "f").right_marginal());
  auto ranking = rank_features(*snap);
  REQUIRE(ranking.size() == 2);
  CHECK(ranking[0].feature == "f");
  CHECK(ranking[1].feature == "constant");
  CHECK(ranking[1].score == 0.0);
}

TEST_CASE("features: kind and lookup errors")
{
  auto snap = fixture::catalog();
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Internal;
  };
  CHECK(code_of([&] { feature_label_flow(*snap, "price"); }) == ErrorCode::NotCategorical);
  CHECK(code_of([&] { importance(*snap, "nope"); }) == ErrorCode::UnknownFeature);
  CHECK(code_of([&] { welch(*snap, "brand", "cameras", "audio"); }) == ErrorCode::NotNumeric);
  CHECK(code_of([&] { violin(*snap, "price", "nope"); }) == ErrorCode::UnknownCategory);
  CHECK(code_of([&] { welch_statistic(std::vector<double>{ 1.0 }, std::vector<double>{ 1.0, 2.0 }); }) ==
        ErrorCode::InsufficientData);
}

TEST_CASE("welch: formula, antisymmetry and degenerate variances")
{
  const std::vector<double> a{ 1, 2, 3 };
  const std::vector<double> b{ 4, 5, 6 };
  auto r = welch_statistic(a, b);
  CHECK(r.t_statistic == doctest::Approx(oracle::welch_t(a, b)).epsilon(1e-12));
  CHECK(std::abs(r.t_statistic - -3.6742346141747673) <= 1e-12);
  CHECK(r.var_a == 1.0);
  CHECK(r.n_b == 3);

  CHECK(welch_statistic(a, a).t_statistic == 0.0);

  std::mt19937_64 rng(29);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> x(2 + trial);
    std::vector<double> y(3 + trial % 5);
    for (auto& v : x) {
      v = n(rng);
    }
    for (auto& v : y) {
      v = 2.0 * n(rng) + 1.0;
    }
    CHECK(welch_statistic(x, y).t_statistic == -welch_statistic(y, x).t_statistic);
  }

  auto flat = welch_statistic(std::vector<double>{ 2, 2 }, std::vector<double>{ 1, 1, 1 });
  CHECK(flat.degenerate);
  CHECK(std::isinf(flat.t_statistic));
  CHECK(flat.t_statistic > 0);
  CHECK(welch_statistic(std::vector<double>{ 1, 1 }, std::vector<double>{ 1, 1 }).t_statistic == 0.0);
}

TEST_CASE("welch: catalog classes")
{
  auto snap = fixture::catalog();
  auto r = welch(*snap, "price", "electronics", "apparel");
  CHECK(r.t_statistic > 10.0);
  CHECK(welch(*snap, "price", "apparel", "electronics").t_statistic == -r.t_statistic);
  const auto& col = snap->feature("price");
  CHECK(r.n_a == class_samples(*snap, col, "electronics").size());
}

namespace {

double trapezoid(const ViolinSummary& v)
{
  double area = 0.0;
  for (std::size_t g = 1; g < v.grid.size(); ++g) {
    area += 0.5 * (v.density[g] + v.density[g - 1]) * (v.grid[g] - v.grid[g - 1]);
  }
  return area;
}

} // namespace

TEST_CASE("violin: uniform 1..100")
{
  std::vector<double> s;
  for (int i = 1; i <= 100; ++i) {
    s.push_back(i);
  }
  auto v = violin_from_samples(s, "u");
  CHECK(v.quartiles[0] == doctest::Approx(oracle::quantile(s, 0.25)));
  CHECK(v.quartiles[0] == doctest::Approx(25.75));
  CHECK(v.quartiles[1] == doctest::Approx(50.5));
  CHECK(v.quartiles[2] == doctest::Approx(75.25));
  CHECK(v.grid.size() == 64);
  CHECK(trapezoid(v) == doctest::Approx(1.0).epsilon(1e-6));
  // roughly flat across the middle half of the range
  double lo = 1e300;
  double hi = 0.0;
  for (std::size_t g = 0; g < v.grid.size(); ++g) {
    if (v.grid[g] >= 25 && v.grid[g] <= 75) {
      lo = std::min(lo, v.density[g]);
      hi = std::max(hi, v.density[g]);
    }
  }
  CHECK(hi / lo < 1.1);
  CHECK(hi == doctest::Approx(0.01).epsilon(0.1));

  // the Silverman rule, evaluated by hand
  const double sd = std::sqrt(841.6666666666666);
  const double iqr = (75.25 - 25.75) / 1.34;
  CHECK(v.bandwidth == doctest::Approx(0.9 * std::min(sd, iqr) * std::pow(100.0, -0.2)));
}

TEST_CASE("violin: point mass and bimodal samples")
{
  auto spike = violin_from_samples(std::vector<double>(10, 4.0), "p");
  CHECK(spike.quartiles == std::array<double, 3>{ 4.0, 4.0, 4.0 });
  CHECK(spike.max - spike.min == 0.0);
  CHECK(spike.grid.front() < 4.0);
  CHECK(spike.grid.back() > 4.0);
  CHECK(spike.grid.back() - spike.grid.front() < 0.01);
  CHECK(trapezoid(spike) == doctest::Approx(1.0).epsilon(1e-6));

  std::mt19937_64 rng(31);
  std::normal_distribution<double> left(-3.0, 0.6);
  std::normal_distribution<double> right(3.0, 0.6);
  std::vector<double> s;
  for (int i = 0; i < 600; ++i) {
    s.push_back(i % 2 ? left(rng) : right(rng));
  }
  auto v = violin_from_samples(s, "bimodal", 128);
  CHECK(trapezoid(v) == doctest::Approx(1.0).epsilon(1e-6));
  std::vector<double> peaks;
  for (std::size_t g = 1; g + 1 < v.grid.size(); ++g) {
    if (v.density[g] > v.density[g - 1] && v.density[g] >= v.density[g + 1]) {
      peaks.push_back(v.grid[g]);
    }
  }
  REQUIRE(peaks.size() == 2);
  // histogram of the same samples puts one mode in each cluster
  auto modes = oracle::histogram_modes(s, -6.0, 6.0, 12);
  CHECK(peaks[0] < 0.0);
  CHECK(peaks[1] > 0.0);
  CHECK(std::any_of(modes.begin(), modes.end(), [&](double m) { return std::abs(m - peaks[0]) < 1.0; }));
  CHECK(std::any_of(modes.begin(), modes.end(), [&](double m) { return std::abs(m - peaks[1]) < 1.0; }));
  for (double d : v.density) {
    CHECK(d >= 0.0);
  }
}

TEST_CASE("violin: snapshot classes")
{
  auto snap = fixture::catalog();
  auto v = violin(*snap, "price", "tops");
  CHECK(v.category == "tops");
  CHECK(v.n == class_samples(*snap, snap->feature("price"), "tops").size());
  CHECK(v.quartiles[0] <= v.quartiles[1]);
  CHECK(v.quartiles[1] <= v.quartiles[2]);
  CHECK_THROWS_AS(violin_from_samples({ 1.0 }, "x"), Error);
}
