#pragma once

// OpenMP reductions over phase-space points.
//
// Items are split into a fixed number of contiguous blocks independent of the
// thread count; each block is summed in item order and the block partials are
// combined by a fixed pairwise tree. Results are therefore bit-identical for
// any OMP_NUM_THREADS. The serial_* twins are plain left-to-right loops kept as
// the reference the parallel kernels are tested against.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace cvtele {

inline constexpr std::size_t kReductionBlocks = 64;

namespace detail {

inline std::size_t block_begin(std::size_t block, std::size_t count) {
  return block * count / kReductionBlocks;
}

template <class T>
T pairwise_combine(std::vector<T>& parts) {
  std::size_t n = parts.size();
  while (n > 1) {
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) parts[i] = parts[2 * i] + parts[2 * i + 1];
    if (n % 2 == 1) parts[half] = parts[n - 1];
    n = half + n % 2;
  }
  return parts[0];
}

}  // namespace detail

/// Sum of term(i) for i < count.
template <class Term>
double parallel_sum(std::size_t count, Term&& term) {
  std::vector<double> parts(kReductionBlocks, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(kReductionBlocks); ++b) {
    double acc = 0.0;
    const std::size_t end = detail::block_begin(b + 1, count);
    for (std::size_t i = detail::block_begin(b, count); i < end; ++i) acc += term(i);
    parts[b] = acc;
  }
  return detail::pairwise_combine(parts);
}

template <class Term>
double serial_sum(std::size_t count, Term&& term) {
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) acc += term(i);
  return acc;
}

/// Sum of matrix contributions; accumulate(i, acc) adds item i into acc.
template <class MatrixT, class Accumulate>
MatrixT parallel_matrix_sum(std::size_t count, Eigen::Index rows, Eigen::Index cols,
                            Accumulate&& accumulate) {
  std::vector<MatrixT> parts(kReductionBlocks);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(kReductionBlocks); ++b) {
    MatrixT acc = MatrixT::Zero(rows, cols);
    const std::size_t end = detail::block_begin(b + 1, count);
    for (std::size_t i = detail::block_begin(b, count); i < end; ++i) accumulate(i, acc);
    parts[b] = std::move(acc);
  }
  return detail::pairwise_combine(parts);
}

template <class MatrixT, class Accumulate>
MatrixT serial_matrix_sum(std::size_t count, Eigen::Index rows, Eigen::Index cols,
                          Accumulate&& accumulate) {
  MatrixT acc = MatrixT::Zero(rows, cols);
  for (std::size_t i = 0; i < count; ++i) accumulate(i, acc);
  return acc;
}

/// Number of OpenMP threads a parallel region would use.
int worker_threads();

}  // namespace cvtele
