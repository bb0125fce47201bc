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

#include "measdual/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace measdual {

namespace {

Error dimension_error(std::size_t got, std::size_t want) {
  return make_error(ErrorCode::kDimensionMismatch,
                    "got " + std::to_string(got) + " coordinates, expected " +
                        std::to_string(want));
}

double radical_inverse(std::size_t index, std::size_t base) {
  double result = 0.0;
  double f = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= static_cast<double>(base);
  }
  return result;
}

std::size_t nth_prime(std::size_t n) {
  std::size_t count = 0;
  for (std::size_t c = 2;; ++c) {
    bool prime = true;
    for (std::size_t d = 2; d * d <= c; ++d) {
      if (c % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime && count++ == n) return c;
  }
}

}  // namespace

Result<Box> Box::make(std::vector<double> lower, std::vector<double> upper) {
  if (lower.empty()) {
    return make_error(ErrorCode::kInvalidArgument, "box must have dimension >= 1");
  }
  if (lower.size() != upper.size()) {
    return dimension_error(upper.size(), lower.size());
  }
  for (std::size_t j = 0; j < lower.size(); ++j) {
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]) ||
        !(lower[j] < upper[j])) {
      return make_error(ErrorCode::kInvalidArgument,
                        "box needs finite lower < upper on axis " +
                            std::to_string(j + 1));
    }
  }
  return Box(std::move(lower), std::move(upper));
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t j = 0; j < dim(); ++j) v *= upper_[j] - lower_[j];
  return v;
}

std::vector<double> Box::center() const {
  std::vector<double> c(dim());
  for (std::size_t j = 0; j < dim(); ++j) c[j] = 0.5 * (lower_[j] + upper_[j]);
  return c;
}

std::vector<std::vector<double>> Box::corners() const {
  const std::size_t n = dim();
  std::vector<std::vector<double>> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<double> c(n);
    for (std::size_t j = 0; j < n; ++j) {
      const bool hi = (mask >> (n - 1 - j)) & 1U;
      c[j] = hi ? upper_[j] : lower_[j];
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::string Box::describe() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t j = 0; j < dim(); ++j) {
    if (j > 0) os << "x";
    os << "[" << lower_[j] << "," << upper_[j] << ")";
  }
  return os.str();
}

Result<bool> contains(const Box& b, std::span<const double> x) {
  if (x.size() != b.dim()) return dimension_error(x.size(), b.dim());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(b.lower()[j] <= x[j] && x[j] < b.upper()[j])) return false;
  }
  return true;
}

bool closure_contains(const Box& b, std::span<const double> x) {
  if (x.size() != b.dim()) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(b.lower()[j] <= x[j] && x[j] <= b.upper()[j])) return false;
  }
  return true;
}

UnitTransform::UnitTransform(Box source) : source_(std::move(source)) {
  scale_.resize(source_.dim());
  for (std::size_t j = 0; j < source_.dim(); ++j) {
    scale_[j] = source_.upper()[j] - source_.lower()[j];
  }
}

Result<std::vector<double>> UnitTransform::to_unit(
    std::span<const double> x) const {
  if (x.size() != source_.dim()) return dimension_error(x.size(), source_.dim());
  std::vector<double> u(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    u[j] = (x[j] - source_.lower()[j]) / scale_[j];
  }
  return u;
}

Result<std::vector<double>> UnitTransform::from_unit(
    std::span<const double> u) const {
  if (u.size() != source_.dim()) return dimension_error(u.size(), source_.dim());
  std::vector<double> x(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    x[j] = source_.lower()[j] + scale_[j] * u[j];
  }
  return x;
}

std::optional<std::size_t> grid_size(std::span<const std::size_t> resolution) {
  std::size_t total = 1;
  for (const std::size_t r : resolution) {
    if (r == 0 || total > kMaxGridPoints / r) return std::nullopt;
    total *= r;
  }
  return total;
}

namespace {

// Shared tensor-product walker; `coordinate(j, i)` gives the i-th value on
// axis j.
template <class Coordinate>
PointSet tensor(std::size_t dim, std::span<const std::size_t> resolution,
                std::size_t total, Coordinate coordinate) {
  PointSet out;
  out.dim = dim;
  out.coords.resize(total * dim);
  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t p = 0; p < total; ++p) {
    for (std::size_t j = 0; j < dim; ++j) {
      out.coords[p * dim + j] = coordinate(j, idx[j]);
    }
    for (std::size_t j = dim; j-- > 0;) {
      if (++idx[j] < resolution[j]) break;
      idx[j] = 0;
    }
  }
  return out;
}

}  // namespace

Result<PointSet> grid_points(const Box& b,
                             std::span<const std::size_t> resolution) {
  if (resolution.size() != b.dim()) {
    return dimension_error(resolution.size(), b.dim());
  }
  for (const std::size_t r : resolution) {
    if (r < 2) {
      return make_error(ErrorCode::kInvalidArgument,
                        "grid resolution must be >= 2 per axis");
    }
  }
  const auto total = grid_size(resolution);
  if (!total) {
    return make_error(ErrorCode::kTooLarge, "grid exceeds 1e8 points");
  }
  return tensor(b.dim(), resolution, *total, [&](std::size_t j, std::size_t i) {
    if (i + 1 == resolution[j]) return b.upper()[j];
    const double t =
        static_cast<double>(i) / static_cast<double>(resolution[j] - 1);
    return b.lower()[j] + (b.upper()[j] - b.lower()[j]) * t;
  });
}

Result<PointSet> grid_points(const Box& b, std::size_t resolution) {
  const std::vector<std::size_t> res(b.dim(), resolution);
  return grid_points(b, res);
}

Result<PointSet> cell_midpoints(const Box& b,
                                std::span<const std::size_t> resolution) {
  if (resolution.size() != b.dim()) {
    return dimension_error(resolution.size(), b.dim());
  }
  const auto total = grid_size(resolution);
  if (!total) {
    return make_error(ErrorCode::kTooLarge,
                      "cell grid is empty or exceeds 1e8 cells");
  }
  return tensor(b.dim(), resolution, *total, [&](std::size_t j, std::size_t i) {
    const double h =
        (b.upper()[j] - b.lower()[j]) / static_cast<double>(resolution[j]);
    return b.lower()[j] + (static_cast<double>(i) + 0.5) * h;
  });
}

double cell_volume(const Box& b, std::span<const std::size_t> resolution) {
  double v = 1.0;
  for (std::size_t j = 0; j < b.dim(); ++j) {
    v *= (b.upper()[j] - b.lower()[j]) / static_cast<double>(resolution[j]);
  }
  return v;
}

PointSet halton_points(const Box& b, std::size_t count, std::size_t skip) {
  PointSet out;
  out.dim = b.dim();
  out.coords.resize(count * b.dim());
  std::vector<std::size_t> bases(b.dim());
  for (std::size_t j = 0; j < b.dim(); ++j) bases[j] = nth_prime(j);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < b.dim(); ++j) {
      const double u = radical_inverse(i + skip, bases[j]);
      out.coords[i * b.dim() + j] =
          b.lower()[j] + (b.upper()[j] - b.lower()[j]) * u;
    }
  }
  return out;
}

std::optional<std::size_t> Partition::locate(std::span<const double> x) const {
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto in = contains(boxes[i], x);
    if (in.ok() && *in) return i;
  }
  return std::nullopt;
}

std::vector<std::string> PartitionReport::diagnostics() const {
  std::vector<std::string> out;
  std::ostringstream os;
  os.precision(17);
  for (const auto& o : overlaps) {
    os.str("");
    os << "boxes " << o.first + 1 << " and " << o.second + 1
       << " overlap on ";
    for (std::size_t j = 0; j < o.lower.size(); ++j) {
      if (j > 0) os << "x";
      os << "[" << o.lower[j] << "," << o.upper[j] << ")";
    }
    out.push_back(os.str());
  }
  for (const std::size_t i : outside_hull) {
    out.push_back("box " + std::to_string(i + 1) + " extends outside the hull");
  }
  if (!volume_ok) {
    os.str("");
    os << "volume " << (volume_sum < hull_volume ? "deficit" : "excess")
       << ": boxes sum to " << volume_sum << ", hull has " << hull_volume;
    out.push_back(os.str());
  }
  if (!coverage_ok) {
    out.push_back("coverage: " + std::to_string(uncovered) + " of " +
                  std::to_string(samples) + " samples uncovered, " +
                  std::to_string(multiply_covered) + " covered more than once");
  }
  return out;
}

Result<PartitionReport> validate_partition(const Partition& p,
                                           const Box& hull) {
  if (p.boxes.empty()) {
    return make_error(ErrorCode::kPartition, "partition has no boxes");
  }
  for (const auto& b : p.boxes) {
    if (b.dim() != hull.dim()) return dimension_error(b.dim(), hull.dim());
  }
  PartitionReport r;
  const std::size_t n = hull.dim();

  for (std::size_t i = 0; i < p.boxes.size(); ++i) {
    for (std::size_t k = i + 1; k < p.boxes.size(); ++k) {
      BoxOverlap o{i, k, std::vector<double>(n), std::vector<double>(n)};
      bool overlap = true;
      for (std::size_t j = 0; j < n && overlap; ++j) {
        o.lower[j] = std::max(p.boxes[i].lower()[j], p.boxes[k].lower()[j]);
        o.upper[j] = std::min(p.boxes[i].upper()[j], p.boxes[k].upper()[j]);
        overlap = o.lower[j] < o.upper[j];
      }
      if (overlap) {
        r.disjoint = false;
        r.overlaps.push_back(std::move(o));
      }
    }
  }

  for (std::size_t i = 0; i < p.boxes.size(); ++i) {
    const auto& b = p.boxes[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (b.lower()[j] < hull.lower()[j] || b.upper()[j] > hull.upper()[j]) {
        r.contained = false;
        r.outside_hull.push_back(i);
        break;
      }
    }
  }

  for (const auto& b : p.boxes) r.volume_sum += b.volume();
  r.hull_volume = hull.volume();
  r.volume_ok =
      std::fabs(r.volume_sum - r.hull_volume) <= 1e-12 * r.hull_volume;

  const PointSet samples =
      halton_points(hull, kCoverageSamples, kCoverageHaltonSkip);
  r.samples = samples.size();
  for (std::size_t s = 0; s < samples.size(); ++s) {
    std::size_t hits = 0;
    for (const auto& b : p.boxes) {
      const auto in = contains(b, samples[s]);
      if (in.ok() && *in) ++hits;
    }
    if (hits == 0) ++r.uncovered;
    if (hits > 1) ++r.multiply_covered;
  }
  r.coverage_ok = r.uncovered == 0 && r.multiply_covered == 0;
  return r;
}

}  // namespace measdual
