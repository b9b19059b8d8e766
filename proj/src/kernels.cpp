#include "flowscope/kernels.hpp"

#include "flowscope/error.hpp"

#include <cmath>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace flowscope::kernels {

namespace {

constexpr std::size_t kSerialCutoff = 4096;

void check_pairs(std::span<const std::uint32_t> left,
                 std::span<const std::uint32_t> right)
{
  if (left.size() != right.size()) {
    throw Error(ErrorCode::InvalidArgument, "pair arrays differ in length");
  }
}

double kde_at(std::span<const double> samples, double x, double bandwidth)
{
  const double norm =
    1.0 / (static_cast<double>(samples.size()) * bandwidth *
           std::sqrt(2.0 * std::numbers::pi));
  double sum = 0.0;
  for (double s : samples) {
    const double u = (x - s) / bandwidth;
    sum += std::exp(-0.5 * u * u);
  }
  return sum * norm;
}

} // namespace

int max_threads()
{
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<std::int64_t> tally_pairs_serial(std::span<const std::uint32_t> left,
                                             std::span<const std::uint32_t> right,
                                             std::size_t rows,
                                             std::size_t cols)
{
  check_pairs(left, right);
  std::vector<std::int64_t> counts(rows * cols, 0);
  for (std::size_t i = 0; i < left.size(); ++i) {
    ++counts[static_cast<std::size_t>(left[i]) * cols + right[i]];
  }
  return counts;
}

std::vector<std::int64_t> tally_pairs(std::span<const std::uint32_t> left,
                                      std::span<const std::uint32_t> right,
                                      std::size_t rows,
                                      std::size_t cols)
{
  check_pairs(left, right);
  const std::size_t cells = rows * cols;
  // Per-thread tables only pay off when the pair stream dwarfs the table.
  if (left.size() < kSerialCutoff || cells > left.size() || max_threads() == 1) {
    return tally_pairs_serial(left, right, rows, cols);
  }
  std::vector<std::int64_t> counts(cells, 0);
  const auto n = static_cast<std::ptrdiff_t>(left.size());
#ifdef _OPENMP
#pragma omp parallel
#endif
  {
    std::vector<std::int64_t> local(cells, 0);
#ifdef _OPENMP
#pragma omp for schedule(static) nowait
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      ++local[static_cast<std::size_t>(left[i]) * cols + right[i]];
    }
#ifdef _OPENMP
#pragma omp critical(flowscope_tally_merge)
#endif
    for (std::size_t c = 0; c < cells; ++c) {
      counts[c] += local[c];
    }
  }
  return counts;
}

std::vector<double> gaussian_kde_serial(std::span<const double> samples,
                                        std::span<const double> grid,
                                        double bandwidth)
{
  std::vector<double> density(grid.size(), 0.0);
  if (samples.empty()) {
    return density;
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    density[g] = kde_at(samples, grid[g], bandwidth);
  }
  return density;
}

std::vector<double> gaussian_kde(std::span<const double> samples,
                                 std::span<const double> grid,
                                 double bandwidth)
{
  std::vector<double> density(grid.size(), 0.0);
  if (samples.empty()) {
    return density;
  }
  const auto points = static_cast<std::ptrdiff_t>(grid.size());
  // Each grid point is summed in sample order by one thread, so the result
  // matches the serial kernel exactly.
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (samples.size() * grid.size() > 65536)
#endif
  for (std::ptrdiff_t g = 0; g < points; ++g) {
    density[static_cast<std::size_t>(g)] =
      kde_at(samples, grid[static_cast<std::size_t>(g)], bandwidth);
  }
  return density;
}

} // namespace flowscope::kernels
