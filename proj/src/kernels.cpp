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

#include "measdual/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace measdual::kernels {

namespace {

std::size_t num_blocks(std::size_t n) { return (n + kSumBlock - 1) / kSumBlock; }

inline bool better(double v, std::size_t i, const ArgMin& cur) {
  return v < cur.value || (v == cur.value && i < cur.index);
}

inline double combined(std::span<const std::span<const double>> columns,
                       std::span<const double> coeffs,
                       std::span<const double> offset, std::size_t i) {
  double s = 0.0;
  for (std::size_t k = 0; k < columns.size(); ++k) s += coeffs[k] * columns[k][i];
  return s - offset[i];
}

template <class Term>
double blocked_serial(std::size_t n, Term term) {
  double total = 0.0;
  for (std::size_t b = 0; b < num_blocks(n); ++b) {
    double part = 0.0;
    const std::size_t end = std::min(n, (b + 1) * kSumBlock);
    for (std::size_t i = b * kSumBlock; i < end; ++i) part += term(i);
    total += part;
  }
  return total;
}

template <class Term>
double blocked_parallel(std::size_t n, Term term) {
  const std::size_t blocks = num_blocks(n);
  std::vector<double> parts(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t bb = 0; bb < static_cast<std::ptrdiff_t>(blocks); ++bb) {
    const auto b = static_cast<std::size_t>(bb);
    double part = 0.0;
    const std::size_t end = std::min(n, (b + 1) * kSumBlock);
    for (std::size_t i = b * kSumBlock; i < end; ++i) part += term(i);
    parts[b] = part;
  }
  double total = 0.0;
  for (const double p : parts) total += p;
  return total;
}

template <class Value>
ArgMin argmin_parallel_impl(std::size_t n, Value value) {
  ArgMin best;
#pragma omp parallel
  {
    ArgMin local;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      const double v = value(i);
      if (better(v, i, local)) local = {i, v};
    }
#pragma omp critical(measdual_argmin)
    {
      if (local.index != static_cast<std::size_t>(-1) &&
          better(local.value, local.index, best)) {
        best = local;
      }
    }
  }
  return best;
}

template <class Value>
ArgMin argmin_serial_impl(std::size_t n, Value value) {
  ArgMin best;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = value(i);
    if (better(v, i, best)) best = {i, v};
  }
  return best;
}

}  // namespace

ArgMin serial_argmin(std::span<const double> values) {
  return argmin_serial_impl(values.size(), [&](std::size_t i) { return values[i]; });
}

ArgMin parallel_argmin(std::span<const double> values) {
  return argmin_parallel_impl(values.size(),
                              [&](std::size_t i) { return values[i]; });
}

ArgMin argmin(std::span<const double> values, Exec exec) {
  return exec == Exec::kParallel ? parallel_argmin(values) : serial_argmin(values);
}

void serial_combine(std::span<const std::span<const double>> columns,
                    std::span<const double> coeffs,
                    std::span<const double> offset, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = combined(columns, coeffs, offset, i);
  }
}

void parallel_combine(std::span<const std::span<const double>> columns,
                      std::span<const double> coeffs,
                      std::span<const double> offset, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        combined(columns, coeffs, offset, static_cast<std::size_t>(i));
  }
}

void combine(std::span<const std::span<const double>> columns,
             std::span<const double> coeffs, std::span<const double> offset,
             std::span<double> out, Exec exec) {
  if (exec == Exec::kParallel) {
    parallel_combine(columns, coeffs, offset, out);
  } else {
    serial_combine(columns, coeffs, offset, out);
  }
}

ArgMin serial_combine_argmin(std::span<const std::span<const double>> columns,
                             std::span<const double> coeffs,
                             std::span<const double> offset) {
  return argmin_serial_impl(offset.size(), [&](std::size_t i) {
    return combined(columns, coeffs, offset, i);
  });
}

ArgMin parallel_combine_argmin(std::span<const std::span<const double>> columns,
                               std::span<const double> coeffs,
                               std::span<const double> offset) {
  return argmin_parallel_impl(offset.size(), [&](std::size_t i) {
    return combined(columns, coeffs, offset, i);
  });
}

ArgMin combine_argmin(std::span<const std::span<const double>> columns,
                      std::span<const double> coeffs,
                      std::span<const double> offset, Exec exec) {
  return exec == Exec::kParallel
             ? parallel_combine_argmin(columns, coeffs, offset)
             : serial_combine_argmin(columns, coeffs, offset);
}

double serial_sum(std::span<const double> values) {
  return blocked_serial(values.size(), [&](std::size_t i) { return values[i]; });
}

double parallel_sum(std::span<const double> values) {
  return blocked_parallel(values.size(), [&](std::size_t i) { return values[i]; });
}

double sum(std::span<const double> values, Exec exec) {
  return exec == Exec::kParallel ? parallel_sum(values) : serial_sum(values);
}

double serial_power_sum(std::span<const double> values, double p) {
  return blocked_serial(values.size(), [&](std::size_t i) {
    return std::pow(std::fabs(values[i]), p);
  });
}

double parallel_power_sum(std::span<const double> values, double p) {
  return blocked_parallel(values.size(), [&](std::size_t i) {
    return std::pow(std::fabs(values[i]), p);
  });
}

double power_sum(std::span<const double> values, double p, Exec exec) {
  return exec == Exec::kParallel ? parallel_power_sum(values, p)
                                 : serial_power_sum(values, p);
}

void serial_matvec(std::span<const double> matrix, std::span<const double> v,
                   std::span<double> y) {
  const std::size_t cols = v.size();
  for (std::size_t r = 0; r < y.size(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += matrix[r * cols + c] * v[c];
    y[r] = s;
  }
}

void parallel_matvec(std::span<const double> matrix, std::span<const double> v,
                     std::span<double> y) {
  const std::size_t cols = v.size();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t rr = 0; rr < static_cast<std::ptrdiff_t>(y.size()); ++rr) {
    const auto r = static_cast<std::size_t>(rr);
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += matrix[r * cols + c] * v[c];
    y[r] = s;
  }
}

void matvec(std::span<const double> matrix, std::span<const double> v,
            std::span<double> y, Exec exec) {
  if (exec == Exec::kParallel) {
    parallel_matvec(matrix, v, y);
  } else {
    serial_matvec(matrix, v, y);
  }
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace measdual::kernels
