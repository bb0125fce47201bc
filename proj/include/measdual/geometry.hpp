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

#ifndef MEASDUAL_GEOMETRY_HPP_
#define MEASDUAL_GEOMETRY_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "measdual/result.hpp"

namespace measdual {

// Axis-aligned half-open box {x : lower_j <= x_j < upper_j}.
class Box {
 public:
  static Result<Box> make(std::vector<double> lower, std::vector<double> upper);

  std::size_t dim() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double volume() const;
  std::vector<double> center() const;
  // All 2^n vertices of the closure, lexicographic (last axis fastest,
  // lower before upper).
  std::vector<std::vector<double>> corners() const;
  std::string describe() const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  Box(std::vector<double> lower, std::vector<double> upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {}
  std::vector<double> lower_;
  std::vector<double> upper_;
};

Result<bool> contains(const Box& b, std::span<const double> x);

// Closure membership: lower_j <= x_j <= upper_j.
bool closure_contains(const Box& b, std::span<const double> x);

// Affine bijection from a box onto the unit box [0,1)^n.
class UnitTransform {
 public:
  explicit UnitTransform(Box source);

  const Box& source() const { return source_; }
  const std::vector<double>& scale() const { return scale_; }
  const std::vector<double>& offset() const { return source_.lower(); }

  Result<std::vector<double>> to_unit(std::span<const double> x) const;
  Result<std::vector<double>> from_unit(std::span<const double> u) const;

 private:
  Box source_;
  std::vector<double> scale_;
};

// Dense row-major list of points of one dimension.
struct PointSet {
  std::size_t dim = 0;
  std::vector<double> coords;

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const double> operator[](std::size_t i) const {
    return {coords.data() + i * dim, dim};
  }
};

inline constexpr std::size_t kMaxGridPoints = 100'000'000;

// Tensor grid over the closed box, resolution[j] equally spaced values per
// axis with both endpoints included; last axis varies fastest.
Result<PointSet> grid_points(const Box& b,
                             std::span<const std::size_t> resolution);
Result<PointSet> grid_points(const Box& b, std::size_t resolution);

// Midpoints of the resolution[j]-per-axis cell subdivision of the box.
Result<PointSet> cell_midpoints(const Box& b,
                                std::span<const std::size_t> resolution);
double cell_volume(const Box& b, std::span<const std::size_t> resolution);

// Number of points a tensor grid with this resolution would have, or nullopt
// when it exceeds kMaxGridPoints.
std::optional<std::size_t> grid_size(std::span<const std::size_t> resolution);

// Halton points mapped into the box, starting at sequence index `skip`.
PointSet halton_points(const Box& b, std::size_t count, std::size_t skip);

struct Partition {
  std::vector<Box> boxes;

  std::size_t dim() const { return boxes.empty() ? 0 : boxes.front().dim(); }
  // Index of the unique box containing x under half-open membership.
  std::optional<std::size_t> locate(std::span<const double> x) const;
};

struct BoxOverlap {
  std::size_t first = 0;
  std::size_t second = 0;
  std::vector<double> lower;  // overlap region
  std::vector<double> upper;
};

struct PartitionReport {
  bool disjoint = true;
  bool contained = true;     // every box lies inside the hull
  bool volume_ok = true;
  bool coverage_ok = true;
  std::vector<BoxOverlap> overlaps;
  std::vector<std::size_t> outside_hull;
  double volume_sum = 0.0;
  double hull_volume = 0.0;
  std::size_t samples = 0;
  std::size_t uncovered = 0;
  std::size_t multiply_covered = 0;

  bool valid() const { return disjoint && contained && volume_ok && coverage_ok; }
  std::vector<std::string> diagnostics() const;
};

inline constexpr std::size_t kCoverageSamples = 10'000;
// Coverage samples are Halton points with indices starting here.
inline constexpr std::size_t kCoverageHaltonSkip = 17;

Result<PartitionReport> validate_partition(const Partition& p,
                                           const Box& hull);

}  // namespace measdual

#endif  // MEASDUAL_GEOMETRY_HPP_
