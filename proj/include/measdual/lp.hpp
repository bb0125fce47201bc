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

// Dense two-phase primal simplex for desk-scale linear programs.
//
// Dual multipliers are reported as sensitivities of the optimal value with
// respect to the right-hand side: dual[i] = d(value)/d(rhs[i]). For a
// maximization that makes <= rows nonnegative and >= rows nonpositive; for a
// minimization the signs flip. Reduced costs are objective - A^T dual.

#ifndef MEASDUAL_LP_HPP_
#define MEASDUAL_LP_HPP_

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "measdual/result.hpp"

namespace measdual {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { kMinimize, kMaximize };
enum class RowType { kLessEqual, kEqual, kGreaterEqual };

struct LpRow {
  std::vector<double> coeffs;
  RowType type = RowType::kLessEqual;
  double rhs = 0.0;
};

struct FiniteLP {
  Sense sense = Sense::kMinimize;
  std::vector<double> objective;
  std::vector<LpRow> rows;
  std::vector<double> lower;  // may be -kInf
  std::vector<double> upper;  // may be +kInf

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return rows.size(); }

  // Appends a variable with the given bounds and objective coefficient,
  // extending every existing row with a zero. Returns its index.
  std::size_t add_variable(double cost, double lo = 0.0, double hi = kInf);
  void add_row(std::vector<double> coeffs, RowType type, double rhs);
};

Status validate(const FiniteLP& lp);

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };
const char* to_string(LpStatus s);

struct LPOutcome {
  LpStatus status = LpStatus::kNumericalFailure;
  double value = 0.0;
  std::vector<double> x;
  std::vector<double> dual;           // one per row
  std::vector<double> reduced_costs;  // one per variable
  std::size_t iterations = 0;
  std::string message;
};

struct SimplexOptions {
  double pivot_tolerance = 1e-10;
  double feasibility_tolerance = 1e-9;
  double optimality_tolerance = 1e-9;
  // Degenerate pivots allowed per phase before switching to Bland's rule,
  // as a multiple of (rows + columns).
  std::size_t bland_after_factor = 5;
  std::size_t max_iterations = 0;  // 0 = automatic
};

Result<LPOutcome> solve_lp(const FiniteLP& lp, const SimplexOptions& opts = {});

// Computational standard form: minimize c^T x subject to A x = b, x >= 0.
struct StandardForm {
  enum class VarKind {
    kShifted,   // x = lower + col
    kReflected, // x = upper - col
    kSplit,     // x = col - col2
  };
  struct VarMap {
    VarKind kind = VarKind::kShifted;
    std::size_t col = 0;
    std::size_t col2 = 0;
    double anchor = 0.0;  // lower or upper bound used
  };

  FiniteLP lp;  // sense kMinimize, all rows kEqual, bounds [0, inf)
  std::vector<VarMap> vars;
  // For each standard row, the slack column with coefficient +1 (<= rows),
  // -1 (>= rows), or npos for equalities.
  std::vector<std::size_t> slack_col;
  std::vector<double> slack_sign;
  std::size_t original_rows = 0;  // bound rows follow the original rows
  double objective_sign = 1.0;    // -1 when the original maximizes
  double objective_offset = 0.0;  // original value = offset + sign * std value

  std::vector<double> recover_primal(const std::vector<double>& x_std) const;
  double recover_value(double std_value) const;
  // Multipliers of the original rows from the standard-form row duals.
  std::vector<double> recover_duals(const std::vector<double>& dual_std) const;
};

StandardForm standardize(const FiniteLP& lp);

// Residuals of an optimal outcome's primal/dual certificate.
struct CertificateCheck {
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;  // sign violations of row duals / reduced costs
  double complementarity = 0.0;
  double duality_gap = 0.0;  // |primal value - dual objective|
  double dual_objective = 0.0;
};

CertificateCheck check_certificate(const FiniteLP& lp, const LPOutcome& out);

// Numerical rank by Gaussian elimination with partial pivoting.
std::size_t matrix_rank(std::vector<std::vector<double>> rows,
                        double relative_tolerance = 1e-10);

}  // namespace measdual

#endif  // MEASDUAL_LP_HPP_
