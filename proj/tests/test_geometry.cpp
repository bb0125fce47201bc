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

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "measdual/geometry.hpp"

using namespace measdual;

namespace {

Box box(std::vector<double> lo, std::vector<double> hi) {
  auto b = Box::make(std::move(lo), std::move(hi));
  REQUIRE(b.ok());
  return *b;
}

bool in(const Box& b, std::vector<double> x) {
  auto r = contains(b, x);
  REQUIRE(r.ok());
  return *r;
}

// Splits every box into 2^n halves `levels` times, but only the boxes whose
// index parity the rng picks, so the result is an irregular dyadic mesh.
std::vector<Box> dyadic(const Box& root, int levels, std::mt19937_64& rng) {
  std::vector<Box> boxes{root};
  std::bernoulli_distribution split(0.6);
  for (int l = 0; l < levels; ++l) {
    std::vector<Box> next;
    for (const auto& b : boxes) {
      if (!split(rng)) {
        next.push_back(b);
        continue;
      }
      const std::size_t n = b.dim();
      for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<double> lo(n), hi(n);
        for (std::size_t j = 0; j < n; ++j) {
          const double mid = 0.5 * (b.lower()[j] + b.upper()[j]);
          const bool upper_half = (mask >> j) & 1U;
          lo[j] = upper_half ? mid : b.lower()[j];
          hi[j] = upper_half ? b.upper()[j] : mid;
        }
        next.push_back(box(lo, hi));
      }
    }
    boxes = std::move(next);
  }
  return boxes;
}

}  // namespace

TEST_CASE("box construction") {
  CHECK_FALSE(Box::make({0.0}, {0.0}).ok());
  CHECK_FALSE(Box::make({1.0}, {0.0}).ok());
  CHECK_FALSE(Box::make({0.0, 0.0}, {1.0}).ok());
  CHECK_FALSE(Box::make({}, {}).ok());
  CHECK_FALSE(Box::make({0.0}, {INFINITY}).ok());
  const Box b = box({0, 0}, {2, 3});
  CHECK(b.volume() == 6.0);
  CHECK(b.center() == std::vector<double>{1.0, 1.5});
  const auto c = b.corners();
  REQUIRE(c.size() == 4);
  CHECK(c[0] == std::vector<double>{0, 0});
  CHECK(c[1] == std::vector<double>{0, 3});
  CHECK(c[3] == std::vector<double>{2, 3});
}

TEST_CASE("half-open membership") {
  const Box b = box({0, 0}, {1, 1});
  CHECK(in(b, {0, 0}));
  CHECK_FALSE(in(b, {1, 0}));
  CHECK(in(b, {0.5, 0.999}));
  CHECK_FALSE(in(b, {-1e-300, 0.5}));
  CHECK(closure_contains(b, std::vector<double>{1, 1}));
  CHECK_FALSE(closure_contains(b, std::vector<double>{1.0000001, 1}));
  auto bad = contains(b, std::vector<double>{0.5});
  REQUIRE_FALSE(bad.ok());
  CHECK(bad.error().code == ErrorCode::kDimensionMismatch);
}

TEST_CASE("unit transform examples") {
  UnitTransform t(box({2, 0}, {4, 1}));
  CHECK(*t.to_unit(std::vector<double>{3, 0.5}) == std::vector<double>{0.5, 0.5});
  CHECK(*t.from_unit(std::vector<double>{0.5, 0.5}) == std::vector<double>{3, 0.5});
  CHECK(*t.from_unit(std::vector<double>{0, 0}) == std::vector<double>{2, 0});
  UnitTransform id(box({0, 0, 0}, {1, 1, 1}));
  const std::vector<double> x{0.1, 0.7, 0.33};
  CHECK(*id.to_unit(x) == x);
  UnitTransform sym(box({-1}, {1}));
  CHECK(*sym.to_unit(std::vector<double>{-1}) == std::vector<double>{0});
  UnitTransform ten(box({0}, {10}));
  CHECK(*ten.from_unit(std::vector<double>{0.25}) == std::vector<double>{2.5});
  CHECK_FALSE(t.to_unit(std::vector<double>{1}).ok());
  CHECK_FALSE(t.from_unit(std::vector<double>{1, 2, 3}).ok());
}

TEST_CASE("unit transform round trip on random boxes") {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> lo(-1e3, 1e3), width(1e-3, 1e3), unit(0, 1);
  std::uniform_int_distribution<std::size_t> dim(1, 4);
  double worst = 0.0;
  for (int t = 0; t < 100'000; ++t) {
    const std::size_t n = dim(rng);
    std::vector<double> l(n), u(n), x(n);
    for (std::size_t j = 0; j < n; ++j) {
      l[j] = lo(rng);
      u[j] = l[j] + width(rng);
      x[j] = l[j] + unit(rng) * (u[j] - l[j]);
    }
    UnitTransform tr(box(l, u));
    const auto back = *tr.from_unit(*tr.to_unit(x));
    for (std::size_t j = 0; j < n; ++j) {
      const double scale = std::max({std::fabs(x[j]), std::fabs(l[j]), std::fabs(u[j])});
      worst = std::max(worst, std::fabs(back[j] - x[j]) / scale);
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("grid examples") {
  auto g = grid_points(box({0}, {1}), 5);
  REQUIRE(g.ok());
  CHECK(g->coords == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  auto h = grid_points(box({2}, {4}), 3);
  CHECK(h->coords == std::vector<double>{2, 3, 4});
  const std::vector<std::size_t> res{2, 3};
  auto p = grid_points(box({0, 0}, {1, 2}), res);
  REQUIRE(p->size() == 6);
  CHECK(p->coords == std::vector<double>{0, 0, 0, 1, 0, 2, 1, 0, 1, 1, 1, 2});
  CHECK_FALSE(grid_points(box({0}, {1}), 1).ok());
  const std::vector<std::size_t> huge{100'000, 100'000};
  auto big = grid_points(box({0, 0}, {1, 1}), huge);
  REQUIRE_FALSE(big.ok());
  CHECK(big.error().code == ErrorCode::kTooLarge);
}

TEST_CASE("grids commute with unit transforms") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lo(-50, 50), width(0.01, 20);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + t % 3;
    std::vector<double> l(n), u(n), zeros(n, 0.0), ones(n, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      l[j] = lo(rng);
      u[j] = l[j] + width(rng);
    }
    const Box b = box(l, u);
    const std::size_t r = 2 + static_cast<std::size_t>(t % 7);
    const auto unit_grid = *grid_points(box(zeros, ones), r);
    const auto grid = *grid_points(b, r);
    REQUIRE(unit_grid.size() == grid.size());
    UnitTransform tr(b);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto mapped = *tr.from_unit(unit_grid[i]);
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(std::fabs(mapped[j] - grid[i][j]) <= 1e-12 * (1.0 + std::fabs(grid[i][j])));
      }
    }
  }
}

TEST_CASE("cell midpoints") {
  const std::vector<std::size_t> res{4};
  auto m = cell_midpoints(box({0}, {1}), res);
  CHECK(m->coords == std::vector<double>{0.125, 0.375, 0.625, 0.875});
  CHECK(cell_volume(box({0, 0}, {1, 2}), std::vector<std::size_t>{4, 2}) == 0.25);
}

TEST_CASE("partition examples") {
  const Box hull = box({0}, {2});
  auto ok = validate_partition({{box({0}, {1}), box({1}, {2})}}, hull);
  REQUIRE(ok.ok());
  CHECK(ok->valid());
  CHECK(ok->diagnostics().empty());

  auto overlap = validate_partition({{box({0}, {1.5}), box({1}, {2})}}, hull);
  REQUIRE(overlap.ok());
  CHECK_FALSE(overlap->valid());
  CHECK_FALSE(overlap->disjoint);
  REQUIRE(overlap->overlaps.size() == 1);
  CHECK(overlap->overlaps[0].lower == std::vector<double>{1});
  CHECK(overlap->overlaps[0].upper == std::vector<double>{1.5});
  CHECK(overlap->diagnostics().front() == "boxes 1 and 2 overlap on [1,1.5)");

  auto deficit = validate_partition({{box({0}, {1})}}, hull);
  REQUIRE(deficit.ok());
  CHECK_FALSE(deficit->volume_ok);
  CHECK_FALSE(deficit->coverage_ok);
  CHECK(deficit->diagnostics().front() == "volume deficit: boxes sum to 1, hull has 2");

  auto outside = validate_partition({{box({0}, {1}), box({1}, {3})}}, hull);
  CHECK_FALSE(outside->contained);
  CHECK(outside->diagnostics().front() == "box 2 extends outside the hull");

  CHECK_FALSE(validate_partition({}, hull).ok());
  CHECK_FALSE(validate_partition({{box({0, 0}, {1, 1})}}, hull).ok());
}

TEST_CASE("dyadic subdivisions validate and single removals do not") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 12; ++t) {
    const std::size_t n = 1 + t % 3;
    std::vector<double> l(n, -1.0), u(n, 3.0);
    const Box hull = box(l, u);
    const auto boxes = dyadic(hull, 3, rng);
    Partition p{boxes};
    auto r = validate_partition(p, hull);
    REQUIRE(r.ok());
    CHECK(r->valid());
    CHECK(r->uncovered == 0);
    CHECK(r->multiply_covered == 0);
    if (boxes.size() < 2) continue;
    for (std::size_t drop = 0; drop < boxes.size(); drop += 1 + boxes.size() / 8) {
      Partition q;
      for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (i != drop) q.boxes.push_back(boxes[i]);
      }
      auto s = validate_partition(q, hull);
      REQUIRE(s.ok());
      CHECK_FALSE(s->valid());
      CHECK_FALSE(s->volume_ok);
    }
  }
}

TEST_CASE("locate uses half-open membership") {
  Partition p{{box({0}, {1}), box({1}, {2})}};
  CHECK(*p.locate(std::vector<double>{1.0}) == 1);
  CHECK(*p.locate(std::vector<double>{0.0}) == 0);
  CHECK_FALSE(p.locate(std::vector<double>{2.0}).has_value());
}
