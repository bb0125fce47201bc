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
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "measdual/lp_density.hpp"
#include "oracles.hpp"

using namespace measdual;

namespace {

struct Family {
  std::vector<double> lower, upper;
  std::string kernel, bound;
};

Expression expr(const std::string& src, std::vector<VariableGroup> groups) {
  auto e = parse_expression(src, groups);
  REQUIRE_MESSAGE(e.ok(), src);
  return *e;
}

std::optional<KernelConstraint> family(const std::optional<Family>& f, Kernel k,
                                       std::size_t n) {
  if (!f) return std::nullopt;
  auto dom = Box::make(f->lower, f->upper);
  REQUIRE(dom.ok());
  const auto groups = kernel_groups(k, dom->dim(), n);
  return KernelConstraint{*dom, expr(f->kernel, groups), expr(f->bound, {groups[0]})};
}

LpDensityProblem density(const std::string& c, std::optional<Family> a,
                         std::optional<Family> b = std::nullopt, double p = 2.0) {
  auto phi = Box::make({0.0}, {1.0});
  auto pb = LpDensityProblem::make(*phi, expr(c, {{'x', 1}}), family(a, Kernel::kA, 1),
                                   family(b, Kernel::kB, 1), p, "test");
  REQUIRE_MESSAGE(pb.ok(), pb.error().describe());
  return *pb;
}

Family unit_family(std::string kernel, std::string bound) {
  return {{0.0}, {1.0}, std::move(kernel), std::move(bound)};
}

struct PairValues {
  LPOutcome primal, dual;
};

PairValues solve_pair(const LpDensityProblem& pb, std::size_t r) {
  auto d = discretize_lp_density(pb, {r, r, r});
  REQUIRE(d.ok());
  auto p = solve_lp(d->primal);
  auto q = solve_lp(d->dual);
  REQUIRE(p.ok());
  REQUIRE(q.ok());
  return {*p, *q};
}

}  // namespace

TEST_CASE("kernel norms") {
  const auto yx = density("1", unit_family("y1 * x1", "1"));
  const double ref = std::sqrt(oracle::midpoint_integral([](double y) { return y * y; }, 0, 1));
  CHECK(ref == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  auto tau = kernel_tau(yx, Kernel::kA, std::vector<double>{1.0}, 256);
  auto rho = kernel_rho(yx, Kernel::kA, std::vector<double>{1.0}, 256);
  REQUIRE(tau.ok());
  REQUIRE(rho.ok());
  CHECK(std::fabs(*tau - ref) <= 1e-4);
  CHECK(std::fabs(*rho - ref) <= 1e-4);

  const auto zero = density("1", unit_family("0", "1"));
  CHECK(*kernel_tau(zero, Kernel::kA, std::vector<double>{0.3}, 64) == 0.0);
  CHECK(*kernel_rho(zero, Kernel::kA, std::vector<double>{0.3}, 64) == 0.0);

  for (double p : {1.5, 2.0, 3.0, 7.0}) {
    const auto one = density("1", unit_family("1", "1"), std::nullopt, p);
    CHECK(*kernel_tau(one, Kernel::kA, std::vector<double>{0.2}, 32) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(*kernel_rho(one, Kernel::kA, std::vector<double>{0.2}, 32) == doctest::Approx(1.0).epsilon(1e-14));
  }

  // A smooth kernel with p = 3 against the refinement oracle.
  const auto ex = density("1", unit_family("exp(y1 * x1)", "1"), std::nullopt, 3.0);
  const double x = 0.37;
  const double tref = std::cbrt(oracle::midpoint_integral(
      [x](double y) { return std::exp(3.0 * y * x); }, 0, 1));
  CHECK(std::fabs(*kernel_tau(ex, Kernel::kA, std::vector<double>{x}, 512) - tref) <= 1e-5);
  const double q = 1.5;
  const double rref = std::pow(oracle::midpoint_integral(
      [x, q](double t) { return std::exp(q * x * t); }, 0, 1), 1.0 / q);
  CHECK(std::fabs(*kernel_rho(ex, Kernel::kA, std::vector<double>{x}, 512) - rref) <= 1e-5);

  CHECK_FALSE(kernel_tau(yx, Kernel::kB, std::vector<double>{0.5}, 64).ok());
}

TEST_CASE("operator bound checks") {
  const auto yx = density("1", unit_family("y1 * x1", "1"));
  auto r = operator_bound_check(yx, Kernel::kA, 100, 256);
  REQUIRE(r.ok());
  CHECK(r->passed());
  CHECK(r->trials.size() == 100);
  CHECK(std::fabs(r->tau_norm - 1.0 / 3.0) <= 1e-4);
  // M is the largest rho over the y-cell midpoints, the last one at 1 - 1/512,
  // each rho itself a 256-point midpoint sum over x.
  double msq = 0.0;
  for (int i = 0; i < 256; ++i) msq += std::pow((i + 0.5) / 256.0, 2) / 256.0;
  CHECK(r->rho_max == doctest::Approx((1.0 - 1.0 / 512.0) * std::sqrt(msq)).epsilon(1e-12));
  CHECK(std::fabs(r->rho_max - 1.0 / std::sqrt(3.0)) <= 2e-3);
  CHECK(r->rho_bounded);
  for (const auto& t : r->trials) {
    CHECK(t.chain_ok);
    CHECK(t.continuity_ok);
    CHECK(t.image_norm <= t.weighted_tau + r->epsilon);
    CHECK(t.weighted_tau <= t.holder_bound + r->epsilon);
    CHECK(t.diff_image_norm <= t.lipschitz_bound + r->epsilon);
  }

  const auto zero = density("1", unit_family("0", "1"));
  auto z = operator_bound_check(zero, Kernel::kA, 5, 64);
  REQUIRE(z.ok());
  for (const auto& t : z->trials) {
    CHECK(t.image_norm == 0.0);
    CHECK(t.diff_image_norm == 0.0);
  }

  auto again = operator_bound_check(yx, Kernel::kA, 100, 256);
  CHECK(again->trials[7].image_norm == r->trials[7].image_norm);
  auto serial = operator_bound_check(yx, Kernel::kA, 10, 128, kDefaultDensitySeed,
                                     kernels::Exec::kSerial);
  auto parallel = operator_bound_check(yx, Kernel::kA, 10, 128, kDefaultDensitySeed,
                                       kernels::Exec::kParallel);
  CHECK(serial->trials[3].holder_bound == parallel->trials[3].holder_bound);

  CHECK_FALSE(operator_bound_check(yx, Kernel::kA, 0, 64).ok());
}

TEST_CASE("operator checks on p different from 2") {
  for (double p : {1.5, 4.0}) {
    const auto pb = density("1", unit_family("1 + y1 * x1^2", "1"), std::nullopt, p);
    auto r = operator_bound_check(pb, Kernel::kA, 30, 128);
    REQUIRE(r.ok());
    CHECK(r->passed());
  }
}

TEST_CASE("unit instance has value one at every resolution") {
  const auto pb = density("1", unit_family("1", "1"));
  for (std::size_t r = 2; r <= 64; r *= 2) {
    const auto v = solve_pair(pb, r);
    REQUIRE(v.primal.status == LpStatus::kOptimal);
    REQUIRE(v.dual.status == LpStatus::kOptimal);
    CHECK(v.primal.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v.dual.value == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (std::size_t r : {3, 5, 17}) {
    CHECK(solve_pair(pb, r).primal.value == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("negative objective keeps the zero density") {
  const auto pb = density("-1", unit_family("1", "1"));
  const auto v = solve_pair(pb, 8);
  CHECK(v.primal.value == 0.0);
  for (double f : v.primal.x) CHECK(f == 0.0);
}

TEST_CASE("mass concentrates in the last cell") {
  const Family mass{{0.0}, {0.001}, "1", "1"};
  const auto pb = density("x1", std::nullopt, mass);
  for (std::size_t r : {4, 8, 16, 64}) {
    auto d = discretize_lp_density(pb, {r, 2, 2});
    REQUIRE(d.ok());
    auto p = solve_lp(d->primal);
    REQUIRE(p.ok());
    CHECK(p->value == doctest::Approx(1.0 - 0.5 / static_cast<double>(r)).epsilon(1e-12));
    CHECK(p->x.back() == doctest::Approx(static_cast<double>(r)).epsilon(1e-12));
  }
  LpDensityConfig cfg;
  cfg.resolution = {16, 2, 2};
  cfg.quad_resolution = 64;
  cfg.trials = 10;
  auto rep = lp_density_report(pb, cfg);
  REQUIRE(rep.ok());
  CHECK(rep->escapes);
  CHECK(rep->escape_label == kEscapeLabel);
  CHECK(rep->primal_value == doctest::Approx(1.0 - 1.0 / 32.0).epsilon(1e-12));
  REQUIRE(rep->refinement.size() == 3);
  CHECK(rep->refinement[2].density_norm > rep->refinement[0].density_norm);
}

TEST_CASE("collocation programs form an exact dual pair") {
  std::mt19937_64 rng(8080);
  for (int t = 0; t < 20; ++t) {
    const auto pb = oracle::random_density_problem(rng);
    for (std::size_t r : {8, 16, 32}) {
      const auto v = solve_pair(pb, r);
      REQUIRE(v.primal.status == LpStatus::kOptimal);
      REQUIRE(v.dual.status == LpStatus::kOptimal);
      CHECK(std::fabs(v.primal.value - v.dual.value) <= 1e-8 * (1.0 + std::fabs(v.primal.value)));
    }
  }
}

TEST_CASE("raising the bound never lowers the value") {
  std::mt19937_64 rng(9090);
  for (int t = 0; t < 20; ++t) {
    const auto pb = oracle::random_density_problem(rng);
    const auto& a = *pb.inequality();
    const auto groups = kernel_groups(Kernel::kA, 1, 1);
    KernelConstraint raised{a.domain, a.kernel, expr("(" + a.bound.source() + ") + 1", {groups[0]})};
    auto looser = LpDensityProblem::make(pb.phi(), pb.objective(), raised, pb.equality(), pb.p());
    REQUIRE(looser.ok());
    for (std::size_t r : {8, 16}) {
      const double before = solve_pair(pb, r).primal.value;
      const double after = solve_pair(*looser, r).primal.value;
      CHECK(after >= before - 1e-9 * (1.0 + std::fabs(before)));
    }
  }
}

TEST_CASE("Slater margins") {
  auto two = check_lp_slater(density("5", unit_family("1", "2")), {16, 16, 16});
  REQUIRE(two.ok());
  CHECK(two->status == LpStatus::kOptimal);
  CHECK(two->margin == doctest::Approx(1.0).epsilon(1e-9));

  auto zero = check_lp_slater(density("1", unit_family("1", "0")), {16, 16, 16});
  REQUIRE(zero.ok());
  CHECK(std::fabs(zero->margin) <= 1e-12);

  // Two z-cells of a constant kernel give identical rows.
  const Family dup{{0.0}, {1.0}, "1", "0.5"};
  auto d = check_lp_slater(density("1", std::nullopt, dup), {8, 8, 4});
  REQUIRE(d.ok());
  CHECK(d->b_rows == 4);
  CHECK(d->b_rank == 1);
  CHECK(d->rank_deficient());

  const Family varying{{0.0}, {1.0}, "1 + z1 * x1", "0.5 + 0.25 * z1"};
  auto full = check_lp_slater(density("1", std::nullopt, varying), {8, 8, 2});
  REQUIRE(full.ok());
  CHECK_FALSE(full->rank_deficient());

  const Family impossible{{0.0}, {1.0}, "1", "-1"};
  auto inf = check_lp_slater(density("1", std::nullopt, impossible), {8, 8, 2});
  REQUIRE(inf.ok());
  CHECK(inf->status == LpStatus::kInfeasible);
  CHECK(inf->margin == -kInf);
}

TEST_CASE("report on the unit instance") {
  LpDensityConfig cfg;
  cfg.resolution = {16, 16, 16};
  cfg.quad_resolution = 64;
  cfg.trials = 20;
  auto rep = lp_density_report(density("1", unit_family("1", "1")), cfg);
  REQUIRE(rep.ok());
  CHECK(rep->status == ReportStatus::kStrongDualityNumerically);
  CHECK(rep->primal_value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep->dual_value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep->slater_margin == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_FALSE(rep->escapes);
  REQUIRE(rep->operator_checks.size() == 1);
  CHECK(rep->operator_checks[0].passed());
  CHECK(rep->q == 2.0);
}

TEST_CASE("problem validation") {
  auto phi = Box::make({0.0}, {1.0});
  CHECK_FALSE(LpDensityProblem::make(*phi, expr("1", {{'x', 1}}), std::nullopt, std::nullopt, 1.0).ok());
  CHECK_FALSE(LpDensityProblem::make(*phi, expr("1", {{'x', 1}}), std::nullopt, std::nullopt, INFINITY).ok());
  auto pb = density("1", unit_family("1", "1"));
  CHECK_FALSE(discretize_lp_density(pb, {1, 4, 4}).ok());
}
