#pragma once

// Data-parallel inner loops. Every kernel has an OpenMP version used by the
// library and a plain serial version kept as the reference for tests and the
// benchmark. Both produce bit-identical results.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace flowscope::kernels {

//! Row-major `rows x cols` count table of (left[i], right[i]) pairs.
std::vector<std::int64_t> tally_pairs(std::span<const std::uint32_t> left,
                                      std::span<const std::uint32_t> right,
                                      std::size_t rows,
                                      std::size_t cols);

std::vector<std::int64_t> tally_pairs_serial(std::span<const std::uint32_t> left,
                                             std::span<const std::uint32_t> right,
                                             std::size_t rows,
                                             std::size_t cols);

//! Unnormalized Gaussian kernel density (1/(n h)) sum phi((x - x_i) / h) at
//! each grid point.
std::vector<double> gaussian_kde(std::span<const double> samples,
                                 std::span<const double> grid,
                                 double bandwidth);

std::vector<double> gaussian_kde_serial(std::span<const double> samples,
                                        std::span<const double> grid,
                                        double bandwidth);

//! Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();

} // namespace flowscope::kernels
