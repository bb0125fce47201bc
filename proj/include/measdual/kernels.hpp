// Copyright 2026 The measdual Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Data-parallel inner loops: tabulating functions over point sets, the slack
// scan of the separation oracle, and quadrature sums.
//
// Every kernel exists twice. The serial_ versions are the reference; the
// parallel_ versions use OpenMP and must return bit-identical results (sums
// are accumulated in fixed-size blocks combined in block order, argmin ties
// go to the lowest index). Tests compare the two; bench/ times them.

#ifndef MEASDUAL_KERNELS_HPP_
#define MEASDUAL_KERNELS_HPP_

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "measdual/result.hpp"

namespace measdual::kernels {

enum class Exec { kSerial, kParallel };

inline constexpr std::size_t kSumBlock = 1024;

struct IndexedError {
  std::size_t index = 0;
  Error error;
};

struct ArgMin {
  std::size_t index = static_cast<std::size_t>(-1);
  double value = std::numeric_limits<double>::infinity();
};

// out[i] = f(i) for i < out.size(); f returns Result<double>. On failure the
// error of the lowest failing index is returned and `out` is unspecified.
template <class F>
std::optional<IndexedError> serial_tabulate(F&& f, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto v = f(i);
    if (!v) return IndexedError{i, v.error()};
    out[i] = *v;
  }
  return std::nullopt;
}

template <class F>
std::optional<IndexedError> parallel_tabulate(F&& f, std::span<double> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
  std::size_t first_bad = static_cast<std::size_t>(-1);
#pragma omp parallel for schedule(static) reduction(min : first_bad)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    auto v = f(k);
    if (v) {
      out[k] = *v;
    } else if (k < first_bad) {
      first_bad = k;
    }
  }
  if (first_bad == static_cast<std::size_t>(-1)) return std::nullopt;
  auto v = f(first_bad);
  return IndexedError{first_bad, v.error()};
}

template <class F>
std::optional<IndexedError> tabulate(F&& f, std::span<double> out, Exec exec) {
  return exec == Exec::kParallel ? parallel_tabulate(f, out)
                                 : serial_tabulate(f, out);
}

// Index and value of the smallest entry; ties go to the lowest index.
ArgMin serial_argmin(std::span<const double> values);
ArgMin parallel_argmin(std::span<const double> values);
ArgMin argmin(std::span<const double> values, Exec exec);

// out[i] = sum_k coeffs[k] * columns[k][i] - offset[i].
void serial_combine(std::span<const std::span<const double>> columns,
                    std::span<const double> coeffs,
                    std::span<const double> offset, std::span<double> out);
void parallel_combine(std::span<const std::span<const double>> columns,
                      std::span<const double> coeffs,
                      std::span<const double> offset, std::span<double> out);
void combine(std::span<const std::span<const double>> columns,
             std::span<const double> coeffs, std::span<const double> offset,
             std::span<double> out, Exec exec);

// combine() followed by argmin() without materializing the slack vector.
ArgMin serial_combine_argmin(std::span<const std::span<const double>> columns,
                             std::span<const double> coeffs,
                             std::span<const double> offset);
ArgMin parallel_combine_argmin(std::span<const std::span<const double>> columns,
                               std::span<const double> coeffs,
                               std::span<const double> offset);
ArgMin combine_argmin(std::span<const std::span<const double>> columns,
                      std::span<const double> coeffs,
                      std::span<const double> offset, Exec exec);

// Blocked summation; the block layout is independent of the thread count.
double serial_sum(std::span<const double> values);
double parallel_sum(std::span<const double> values);
double sum(std::span<const double> values, Exec exec);

// sum_i |values[i]|^p, blocked like sum().
double serial_power_sum(std::span<const double> values, double p);
double parallel_power_sum(std::span<const double> values, double p);
double power_sum(std::span<const double> values, double p, Exec exec);

// Dense matrix-vector product y = M v with M row-major (rows x v.size()).
void serial_matvec(std::span<const double> matrix, std::span<const double> v,
                   std::span<double> y);
void parallel_matvec(std::span<const double> matrix, std::span<const double> v,
                     std::span<double> y);
void matvec(std::span<const double> matrix, std::span<const double> v,
            std::span<double> y, Exec exec);

int max_threads();

}  // namespace measdual::kernels

#endif  // MEASDUAL_KERNELS_HPP_
