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

#include "measdual/lp.hpp"
#include "oracles.hpp"

using namespace measdual;

namespace {

LPOutcome solve(const FiniteLP& lp) {
  auto r = solve_lp(lp);
  REQUIRE(r.ok());
  return *r;
}

// The dual of a boxed LP written out as its own LP. Variables are the row
// multipliers y followed by the bound multipliers v (upper) and w (lower).
//   max c.x  ->  min b.y + u.v - l.w  s.t.  A^T y + v - w = c
//   min c.x  ->  max b.y + l.w - u.v  s.t.  A^T y + w - v = c
// Sign of y_i follows the sensitivity convention of solve_lp.
FiniteLP explicit_dual(const FiniteLP& p) {
  const bool max = p.sense == Sense::kMaximize;
  FiniteLP d;
  d.sense = max ? Sense::kMinimize : Sense::kMaximize;
  const std::size_t m = p.num_rows(), n = p.num_vars();
  for (std::size_t i = 0; i < m; ++i) {
    double lo = -kInf, hi = kInf;
    const bool le = p.rows[i].type == RowType::kLessEqual;
    const bool ge = p.rows[i].type == RowType::kGreaterEqual;
    if ((le && max) || (ge && !max)) lo = 0.0;
    if ((ge && max) || (le && !max)) hi = 0.0;
    d.add_variable(p.rows[i].rhs, lo, hi);
  }
  for (std::size_t j = 0; j < n; ++j) d.add_variable(max ? p.upper[j] : -p.upper[j]);
  for (std::size_t j = 0; j < n; ++j) d.add_variable(max ? -p.lower[j] : p.lower[j]);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> row(m + 2 * n, 0.0);
    for (std::size_t i = 0; i < m; ++i) row[i] = p.rows[i].coeffs[j];
    row[m + j] = max ? 1.0 : -1.0;
    row[m + n + j] = max ? -1.0 : 1.0;
    d.add_row(std::move(row), RowType::kEqual, p.objective[j]);
  }
  return d;
}

// Completes the reported row multipliers into a point of explicit_dual.
std::vector<double> dual_point(const FiniteLP& p, const LPOutcome& out) {
  const bool max = p.sense == Sense::kMaximize;
  const std::size_t m = p.num_rows(), n = p.num_vars();
  std::vector<double> z(out.dual);
  z.resize(m + 2 * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double r = p.objective[j];
    for (std::size_t i = 0; i < m; ++i) r -= p.rows[i].coeffs[j] * out.dual[i];
    const double up = max ? std::max(r, 0.0) : std::max(-r, 0.0);
    const double down = max ? std::max(-r, 0.0) : std::max(r, 0.0);
    z[m + j] = up;
    z[m + n + j] = down;
  }
  return z;
}

double max_residual(const FiniteLP& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    worst = std::max({worst, lp.lower[j] - x[j], x[j] - lp.upper[j]});
  }
  for (const auto& r : lp.rows) {
    double s = 0.0;
    for (std::size_t j = 0; j < lp.num_vars(); ++j) s += r.coeffs[j] * x[j];
    const double v = s - r.rhs;
    if (r.type == RowType::kLessEqual) worst = std::max(worst, v);
    if (r.type == RowType::kGreaterEqual) worst = std::max(worst, -v);
    if (r.type == RowType::kEqual) worst = std::max(worst, std::fabs(v));
  }
  return worst;
}

}  // namespace

TEST_CASE("simplex examples") {
  FiniteLP a;
  a.sense = Sense::kMaximize;
  a.add_variable(1.0);
  a.add_row({1.0}, RowType::kLessEqual, 1.0);
  auto oa = solve(a);
  CHECK(oa.status == LpStatus::kOptimal);
  CHECK(oa.value == 1.0);
  CHECK(oa.x == std::vector<double>{1.0});
  CHECK(oa.dual[0] == 1.0);

  FiniteLP b;
  b.sense = Sense::kMaximize;
  b.add_variable(1.0);
  CHECK(solve(b).status == LpStatus::kUnbounded);

  FiniteLP c;
  c.add_variable(0.0);
  c.add_row({1.0}, RowType::kLessEqual, -1.0);
  CHECK(solve(c).status == LpStatus::kInfeasible);
}

TEST_CASE("invalid programs are rejected") {
  FiniteLP lp;
  lp.add_variable(NAN);
  CHECK_FALSE(solve_lp(lp).ok());
  FiniteLP ragged;
  ragged.add_variable(1.0);
  ragged.rows.push_back({{1.0, 2.0}, RowType::kLessEqual, 1.0});
  CHECK_FALSE(solve_lp(ragged).ok());
  FiniteLP crossed;
  crossed.add_variable(1.0, 2.0, 1.0);
  CHECK(solve(crossed).status == LpStatus::kInfeasible);
}

TEST_CASE("degenerate cycling example terminates") {
  // Beale's example cycles under the textbook rule without anti-cycling.
  FiniteLP lp;
  lp.sense = Sense::kMinimize;
  for (double c : {-0.75, 150.0, -0.02, 6.0}) lp.add_variable(c);
  lp.add_row({0.25, -60.0, -0.04, 9.0}, RowType::kLessEqual, 0.0);
  lp.add_row({0.5, -90.0, -0.02, 3.0}, RowType::kLessEqual, 0.0);
  lp.add_row({0.0, 0.0, 1.0, 0.0}, RowType::kLessEqual, 1.0);
  auto out = solve(lp);
  CHECK(out.status == LpStatus::kOptimal);
  CHECK(out.value == doctest::Approx(-0.05).epsilon(1e-12));
}

TEST_CASE("standard form examples") {
  FiniteLP lp;
  lp.sense = Sense::kMaximize;
  lp.add_variable(2.0);                 // x >= 0
  lp.add_variable(-1.0, -kInf, kInf);   // free
  lp.add_variable(1.0, -kInf, 3.0);     // upper bounded only
  lp.add_row({1.0, 1.0, 0.0}, RowType::kLessEqual, 4.0);
  lp.add_row({0.0, 1.0, 1.0}, RowType::kEqual, 1.0);
  const StandardForm sf = standardize(lp);
  CHECK(sf.lp.sense == Sense::kMinimize);
  CHECK(sf.objective_sign == -1.0);
  for (const auto& r : sf.lp.rows) CHECK(r.type == RowType::kEqual);
  for (double l : sf.lp.lower) CHECK(l == 0.0);
  CHECK(sf.vars[1].kind == StandardForm::VarKind::kSplit);
  CHECK(sf.vars[2].kind == StandardForm::VarKind::kReflected);
  REQUIRE(sf.slack_col[0] != static_cast<std::size_t>(-1));
  CHECK(sf.slack_sign[0] == 1.0);
  CHECK(sf.lp.rows[0].coeffs[sf.slack_col[0]] == 1.0);
  CHECK(sf.recover_value(-5.0) == doctest::Approx(sf.objective_offset + 5.0));

  auto orig = solve(lp);
  auto std_out = solve(sf.lp);
  REQUIRE(orig.status == LpStatus::kOptimal);
  REQUIRE(std_out.status == LpStatus::kOptimal);
  CHECK(sf.recover_value(std_out.value) == doctest::Approx(orig.value).epsilon(1e-12));
  const auto x = sf.recover_primal(std_out.x);
  CHECK(max_residual(lp, x) <= 1e-9);
  const auto y = sf.recover_duals(std_out.dual);
  REQUIRE(y.size() == 2);
  CHECK(y[0] == doctest::Approx(orig.dual[0]).epsilon(1e-9));
  CHECK(y[1] == doctest::Approx(orig.dual[1]).epsilon(1e-9));
}

TEST_CASE("random programs agree with vertex enumeration") {
  std::mt19937_64 rng(424242);
  int optimal = 0, infeasible = 0;
  for (int t = 0; t < 500; ++t) {
    const FiniteLP lp = oracle::random_bounded_lp(rng);
    const auto ref = oracle::vertex_enumeration(lp);
    const auto out = solve(lp);
    CAPTURE(t);
    if (!ref.feasible) {
      CHECK(out.status == LpStatus::kInfeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(out.status == LpStatus::kOptimal);
    ++optimal;
    CHECK(std::fabs(out.value - ref.value) <= 1e-9 * (1.0 + std::fabs(ref.value)));
    double rhs_norm = 0.0;
    for (const auto& r : lp.rows) rhs_norm = std::max(rhs_norm, std::fabs(r.rhs));
    CHECK(max_residual(lp, out.x) <= 1e-9 * (1.0 + rhs_norm));
    const auto cert = check_certificate(lp, out);
    CHECK(cert.complementarity <= 1e-8);
    CHECK(cert.dual_infeasibility <= 1e-8);
    CHECK(cert.duality_gap <= 1e-8 * (1.0 + std::fabs(out.value)));
  }
  CHECK(optimal > 150);
  CHECK(infeasible > 10);
}

TEST_CASE("multipliers solve the explicit dual program") {
  std::mt19937_64 rng(77);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    const FiniteLP lp = oracle::random_bounded_lp(rng);
    const auto out = solve(lp);
    if (out.status != LpStatus::kOptimal) continue;
    const FiniteLP d = explicit_dual(lp);
    const auto z = dual_point(lp, out);
    CHECK(max_residual(d, z) <= 1e-8);
    double obj = 0.0;
    for (std::size_t j = 0; j < d.num_vars(); ++j) obj += d.objective[j] * z[j];
    CHECK(std::fabs(obj - out.value) <= 1e-8 * (1.0 + std::fabs(out.value)));
    const auto dout = solve(d);
    REQUIRE(dout.status == LpStatus::kOptimal);
    CHECK(std::fabs(dout.value - out.value) <= 1e-8 * (1.0 + std::fabs(out.value)));
    ++checked;
  }
  CHECK(checked > 80);
}

TEST_CASE("status is invariant under objective scaling") {
  std::mt19937_64 rng(31337);
  for (int t = 0; t < 500; ++t) {
    FiniteLP lp = oracle::random_bounded_lp(rng);
    // Free one variable now and then so unbounded programs appear too.
    if (t % 5 == 0) lp.upper[0] = kInf;
    const auto base = solve(lp).status;
    for (double s : {1e-6, 1e6}) {
      FiniteLP scaled = lp;
      for (auto& c : scaled.objective) c *= s;
      CHECK(solve(scaled).status == base);
    }
  }
}

TEST_CASE("solves are deterministic") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    const FiniteLP lp = oracle::random_bounded_lp(rng);
    const auto a = solve(lp);
    const auto b = solve(lp);
    CHECK(a.status == b.status);
    CHECK(a.x == b.x);
    CHECK(a.dual == b.dual);
  }
}

TEST_CASE("matrix rank") {
  CHECK(matrix_rank({{1, 2}, {2, 4}}) == 1);
  CHECK(matrix_rank({{1, 0}, {0, 1}, {1, 1}}) == 2);
  CHECK(matrix_rank({}) == 0);
  CHECK(matrix_rank({{0, 0}}) == 0);
}
