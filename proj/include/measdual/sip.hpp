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

// Solvers for the moment problem pair in moment.hpp.
//
// The primal is restricted to atomic measures on a tensor grid of every box
// and solved as a finite LP, so its value is a lower bound. The dual is
// solved by an exchange (cutting-plane) loop: a finite LP over a growing set
// of cut points alternates with a scan-based separation oracle.

#ifndef MEASDUAL_SIP_HPP_
#define MEASDUAL_SIP_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "measdual/kernels.hpp"
#include "measdual/lp.hpp"
#include "measdual/moment.hpp"
#include "measdual/result.hpp"

namespace measdual {

// Value reported in place of +infinity for unbounded Slater margins.
inline constexpr double kMarginCap = 1e6;
// Total scan points allowed per box; per-axis resolution is reduced to fit.
inline constexpr std::size_t kMaxScanPointsPerBox = std::size_t{1} << 22;

// --- grid primal --------------------------------------------------------------

// LP over atom weights on a fixed support: one variable per support point.
struct SupportPrimal {
  FiniteLP lp;
  std::vector<SupportPoint> support;
};

Result<SupportPrimal> assemble_support_primal(
    const MomentProblem& mp, std::vector<SupportPoint> support,
    kernels::Exec exec = kernels::Exec::kParallel);

// Support = grid_points of every box at `resolution` points per axis.
Result<SupportPrimal> assemble_grid_primal(
    const MomentProblem& mp, std::size_t resolution,
    kernels::Exec exec = kernels::Exec::kParallel);

std::vector<SupportPoint> grid_support(const MomentProblem& mp,
                                       std::size_t resolution);

struct PrimalSolution {
  LpStatus status = LpStatus::kNumericalFailure;
  double value = 0.0;
  AtomicMeasure measure;  // atoms with positive weight
  LPOutcome lp;
};

Result<PrimalSolution> solve_support_primal(const SupportPrimal& sp);
Result<PrimalSolution> solve_grid_primal(const MomentProblem& mp,
                                         std::size_t resolution);

// --- separation ---------------------------------------------------------------

struct SeparationResult {
  std::vector<double> point;
  std::size_t box = 0;
  double slack = 0.0;       // at the refined point
  double scan_slack = 0.0;  // best value on the scan grid
};

// Function tables on per-box scan grids. Built once per problem; each
// separation call is then a linear combination plus an argmin.
class SlackScanner {
 public:
  static Result<SlackScanner> build(const MomentProblem& mp,
                                    std::size_t resolution,
                                    kernels::Exec exec = kernels::Exec::kParallel);

  std::size_t resolution() const { return resolution_; }
  std::size_t num_points() const;

  // Minimum slack over the scan grid only.
  SeparationResult scan(const DualPoint& d) const;
  // Scan followed by coordinate-wise golden-section refinement.
  Result<SeparationResult> separate(const DualPoint& d,
                                    std::size_t refine_steps) const;

 private:
  struct BoxTable {
    PointSet points;
    std::vector<std::vector<double>> columns;  // phi_1..phi_M, psi_1..psi_N
    std::vector<double> h;
    double spacing_factor = 0.0;
  };

  const MomentProblem* mp_ = nullptr;
  std::size_t resolution_ = 0;
  std::vector<std::size_t> axis_resolution_;
  std::vector<BoxTable> boxes_;
  kernels::Exec exec_ = kernels::Exec::kParallel;
};

// The scanner keeps a pointer to `mp`, which must outlive it.
Result<SeparationResult> separation_oracle(const MomentProblem& mp,
                                           const DualPoint& d,
                                           std::size_t scan_resolution,
                                           std::size_t refine_steps);

// Golden-section refinement of a starting point inside the closure of `box`,
// bracketing each coordinate by +-`radius[j]`.
Result<SeparationResult> refine_minimum(const MomentProblem& mp,
                                        const DualPoint& d, std::size_t box,
                                        std::vector<double> start,
                                        std::span<const double> radius,
                                        std::size_t refine_steps);

// Per-axis resolution actually used for a box scan of the given dimension.
std::size_t effective_scan_resolution(std::size_t requested, std::size_t dim);

// --- exchange dual --------------------------------------------------------------

struct ExchangeOptions {
  double tol = 1e-6;
  std::size_t max_iters = 200;
  std::size_t scan_resolution = 1024;
  std::size_t refine_steps = 40;
  // Added to the initial cut set (box corners and centers).
  std::vector<SupportPoint> extra_cuts;
  // Box on the multipliers used to obtain a trial point while the restricted
  // dual is unbounded.
  double stabilization_bound = 1e6;
  kernels::Exec exec = kernels::Exec::kParallel;
};

enum class ExchangeStatus { kConverged, kNotConverged, kDualUnbounded, kInternalError };
const char* to_string(ExchangeStatus s);

struct ExchangeIteration {
  double value = 0.0;      // restricted dual value; -inf while unbounded
  bool bounded = true;
  std::size_t num_cuts = 0;  // cuts[0:num_cuts] defined this restricted LP
  double worst_slack = 0.0;
  DualPoint dual;
};

struct ExchangeResult {
  ExchangeStatus status = ExchangeStatus::kInternalError;
  DualPoint dual;
  double value = 0.0;
  std::vector<SupportPoint> cuts;
  std::size_t iterations = 0;
  std::vector<ExchangeIteration> history;
  // Row multipliers of the final restricted dual: a measure on the cuts.
  AtomicMeasure measure;
  double final_slack = 0.0;
  std::string message;
};

std::vector<SupportPoint> initial_cuts(const MomentProblem& mp);

// Restricted dual over the given cut points: variables (y, z).
Result<FiniteLP> restricted_dual_lp(const MomentProblem& mp,
                                    std::span<const SupportPoint> cuts);

Result<ExchangeResult> exchange_solve(const MomentProblem& mp,
                                      const ExchangeOptions& opts = {});

// --- Slater diagnostics -----------------------------------------------------------

struct DualSlaterResult {
  double margin = 0.0;  // certified minimum slack on the scan mesh, capped
  bool capped = false;
  DualPoint multipliers;
  ExchangeStatus status = ExchangeStatus::kInternalError;
  std::size_t iterations = 0;
};

Result<DualSlaterResult> check_dual_slater(const MomentProblem& mp,
                                           const ExchangeOptions& opts = {});

struct PrimalSlaterResult {
  LpStatus status = LpStatus::kNumericalFailure;
  double margin = 0.0;  // -inf when infeasible
  bool capped = false;
  std::size_t equality_rows = 0;
  std::size_t equality_rank = 0;
  bool rank_deficient() const { return equality_rank < equality_rows; }
};

Result<PrimalSlaterResult> check_primal_slater(const MomentProblem& mp,
                                               std::size_t resolution);

// --- report -----------------------------------------------------------------------

struct SolverConfig {
  std::size_t grid = 1025;
  std::size_t scan = 1024;
  std::size_t refine_steps = 40;
  double tol = 1e-6;
  std::size_t max_iters = 200;
  double gap_tol_factor = 1e-3;
  std::size_t verify_factor = 4;
  bool run_slater = true;
  kernels::Exec exec = kernels::Exec::kParallel;
};

enum class ReportStatus {
  kStrongDualityNumerically,
  kGapRemains,
  kPrimalInfeasible,
  kPrimalUnbounded,
  kDualUnboundedBelow,
  kNotConverged,
};
const char* to_string(ReportStatus s);

struct Timings {
  double primal_seconds = 0.0;
  double dual_seconds = 0.0;
  double slater_seconds = 0.0;
  double total_seconds = 0.0;
};

struct DualityReport {
  std::string problem;
  SolverConfig config;
  ReportStatus status = ReportStatus::kNotConverged;

  std::string primal_status;
  double primal_value = 0.0;
  std::string dual_status;
  double exchange_value = 0.0;  // restricted dual LP value
  double dual_value = 0.0;      // value of the reported (certified) dual point
  double gap = 0.0;             // dual_value - primal_value
  double gap_tolerance = 0.0;
  double max_dual_violation = 0.0;  // on the verification mesh
  std::size_t iterations = 0;
  AtomicMeasure primal_measure;
  DualPoint dual_point;

  std::string primal_slater_status;
  double primal_slater_margin = 0.0;
  bool primal_slater_capped = false;
  std::size_t equality_rows = 0;
  std::size_t equality_rank = 0;
  double dual_slater_margin = 0.0;
  bool dual_slater_capped = false;

  bool mass_bound_available = false;
  double mass_bound = 0.0;
  double weak_duality_residual = 0.0;
  bool weak_duality_ok = true;
  std::vector<std::string> notes;
  Timings timings;
};

Result<DualityReport> duality_report(const MomentProblem& mp,
                                     const SolverConfig& config = {});

// Equivalent problem on translated unit boxes: box i becomes
// [i, i+1) x [0,1)^(n-1) and every piece is composed with the inverse of
// the affine map onto it.
Result<MomentProblem> apply_unit_normalization(const MomentProblem& mp);

}  // namespace measdual

#endif  // MEASDUAL_SIP_HPP_
