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

// Linear problems over L^p densities on a box Phi:
//
//   sup  int c(x) f(x) dx
//   s.t. int A(y,x) f(x) dx <= a(y)   for y in Gamma
//        int B(z,x) f(x) dx  = b(z)   for z in Sigma
//        f >= 0,  f in L^p(Phi)
//
// with dual variables g >= 0 on Gamma and s on Sigma:
//
//   inf  int a g dy + int b s dz
//   s.t. int A(y,x) g(y) dy + int B(z,x) s(z) dz >= c(x).
//
// Both sides are discretized by piecewise-constant functions on cell grids
// with constraints collocated at cell midpoints, which yields an exact
// finite LP dual pair.

#ifndef MEASDUAL_LP_DENSITY_HPP_
#define MEASDUAL_LP_DENSITY_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "measdual/expr.hpp"
#include "measdual/geometry.hpp"
#include "measdual/kernels.hpp"
#include "measdual/lp.hpp"
#include "measdual/result.hpp"
#include "measdual/sip.hpp"

namespace measdual {

// A family of integral constraints indexed by points of `domain`. The kernel
// is written over variables (y1..ym, x1..xn) for the inequality family and
// (z1..zk, x1..xn) for the equality family; the bound over y or z only.
struct KernelConstraint {
  Box domain;
  Expression kernel;
  Expression bound;
};

enum class Kernel { kA, kB };
const char* to_string(Kernel k);

class LpDensityProblem {
 public:
  static Result<LpDensityProblem> make(Box phi, Expression objective,
                                       std::optional<KernelConstraint> ineq,
                                       std::optional<KernelConstraint> eq,
                                       double p, std::string name = {});

  const std::string& name() const { return name_; }
  const Box& phi() const { return phi_; }
  const Expression& objective() const { return c_; }
  const std::optional<KernelConstraint>& inequality() const { return ineq_; }
  const std::optional<KernelConstraint>& equality() const { return eq_; }
  const std::optional<KernelConstraint>& constraint(Kernel k) const {
    return k == Kernel::kA ? ineq_ : eq_;
  }
  double p() const { return p_; }
  double q() const { return p_ / (p_ - 1.0); }

 private:
  LpDensityProblem(Box phi, Expression c) : phi_(std::move(phi)), c_(std::move(c)) {}

  std::string name_;
  Box phi_;
  Expression c_;
  std::optional<KernelConstraint> ineq_;
  std::optional<KernelConstraint> eq_;
  double p_ = 2.0;
};

// Variable layouts used when parsing the problem's expressions.
std::vector<VariableGroup> kernel_groups(Kernel k, std::size_t outer_dim,
                                         std::size_t x_dim);

// ||K(., x)||_p over the constraint domain by the composite midpoint rule.
Result<double> kernel_tau(const LpDensityProblem& pb, Kernel k,
                          std::span<const double> x, std::size_t quad_resolution);
// ||K(y, .)||_q over Phi by the composite midpoint rule.
Result<double> kernel_rho(const LpDensityProblem& pb, Kernel k,
                          std::span<const double> y, std::size_t quad_resolution);

// Largest matrix K(y_j, x_i) the bound check will tabulate.
inline constexpr std::size_t kMaxKernelEntries = std::size_t{1} << 24;

struct OperatorTrial {
  double image_norm = 0.0;     // ||K f||_p
  double weighted_tau = 0.0;   // int |f| tau
  double holder_bound = 0.0;   // ||f||_p ||tau||_q
  bool chain_ok = false;
  double diff_image_norm = 0.0;  // ||K f1 - K f2||_p
  double lipschitz_bound = 0.0;  // M vol^(1/p) ||f1 - f2||_p
  bool continuity_ok = false;
};

struct OperatorBoundReport {
  Kernel kernel = Kernel::kA;
  std::size_t resolution = 0;  // per axis, after size capping
  double tau_norm = 0.0;       // ||tau||_q
  double rho_max = 0.0;        // M
  double epsilon = 0.0;        // 10 x refinement delta
  double refinement_delta = 0.0;
  double refinement_ratio = 0.0;  // delta(r/2 vs r/4) / delta(r vs r/2)
  bool rho_bounded = true;
  std::vector<OperatorTrial> trials;
  std::size_t failures = 0;
  bool passed() const { return failures == 0; }
};

inline constexpr std::uint64_t kDefaultDensitySeed = 0x5eed2026;

Result<OperatorBoundReport> operator_bound_check(
    const LpDensityProblem& pb, Kernel k, std::size_t trials,
    std::size_t quad_resolution, std::uint64_t seed = kDefaultDensitySeed,
    kernels::Exec exec = kernels::Exec::kParallel);

struct DensityResolution {
  std::size_t x = 64;
  std::size_t y = 64;
  std::size_t z = 64;
};

struct DiscretizedLpDensity {
  FiniteLP primal;  // variables f_i per x-cell
  FiniteLP dual;    // variables g_j per y-cell, then s_l per z-cell
  PointSet x_mid, y_mid, z_mid;
  double dx = 0.0, dy = 0.0, dz = 0.0;
};

Result<DiscretizedLpDensity> discretize_lp_density(
    const LpDensityProblem& pb, const DensityResolution& res,
    kernels::Exec exec = kernels::Exec::kParallel);

struct LpSlaterResult {
  LpStatus status = LpStatus::kNumericalFailure;
  double margin = 0.0;  // -inf when infeasible
  bool capped = false;
  std::size_t b_rows = 0;
  std::size_t b_rank = 0;
  bool rank_deficient() const { return b_rank < b_rows; }
};

Result<LpSlaterResult> check_lp_slater(const LpDensityProblem& pb,
                                       const DensityResolution& res);

struct LpDensityConfig {
  DensityResolution resolution;
  std::size_t quad_resolution = 256;
  std::size_t trials = 100;
  std::uint64_t seed = kDefaultDensitySeed;
  kernels::Exec exec = kernels::Exec::kParallel;
};

inline constexpr const char* kEscapeLabel =
    "value approached, optimizer escapes the density class";

struct RefinementStep {
  std::size_t x_resolution = 0;
  double value = 0.0;
  double density_norm = 0.0;  // ||f||_p of the discrete optimizer
};

struct LpDensityReport {
  std::string problem;
  LpDensityConfig config;
  double p = 2.0;
  double q = 2.0;
  ReportStatus status = ReportStatus::kNotConverged;
  std::string primal_status;
  double primal_value = 0.0;
  std::string dual_status;
  double dual_value = 0.0;
  double gap = 0.0;  // dual_value - primal_value
  std::vector<double> density;  // primal optimizer per x-cell
  std::vector<RefinementStep> refinement;
  bool escapes = false;
  std::string escape_label;
  std::string slater_status;
  double slater_margin = 0.0;
  bool slater_capped = false;
  std::size_t b_rows = 0;
  std::size_t b_rank = 0;
  std::vector<OperatorBoundReport> operator_checks;
  std::vector<std::string> notes;
  Timings timings;
};

Result<LpDensityReport> lp_density_report(const LpDensityProblem& pb,
                                          const LpDensityConfig& config = {});

}  // namespace measdual

#endif  // MEASDUAL_LP_DENSITY_HPP_
