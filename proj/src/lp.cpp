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

#include "measdual/lp.hpp"

#include <algorithm>
#include <cmath>

namespace measdual {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

}  // namespace

std::size_t FiniteLP::add_variable(double cost, double lo, double hi) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  for (auto& r : rows) r.coeffs.push_back(0.0);
  return objective.size() - 1;
}

void FiniteLP::add_row(std::vector<double> coeffs, RowType type, double rhs) {
  rows.push_back(LpRow{std::move(coeffs), type, rhs});
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "Optimal";
    case LpStatus::kInfeasible: return "Infeasible";
    case LpStatus::kUnbounded: return "Unbounded";
    case LpStatus::kNumericalFailure: return "NumericalFailure";
  }
  return "?";
}

Status validate(const FiniteLP& lp) {
  const std::size_t n = lp.num_vars();
  if (lp.lower.size() != n || lp.upper.size() != n) {
    return make_error(ErrorCode::kDimensionMismatch,
                      "bounds must have one entry per variable");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(lp.objective[j])) {
      return make_error(ErrorCode::kInvalidArgument,
                        "objective coefficient " + std::to_string(j) +
                            " is not finite");
    }
    if (std::isnan(lp.lower[j]) || std::isnan(lp.upper[j]) ||
        lp.lower[j] == kInf || lp.upper[j] == -kInf) {
      return make_error(ErrorCode::kInvalidArgument,
                        "invalid bounds on variable " + std::to_string(j));
    }
  }
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const auto& r = lp.rows[i];
    if (r.coeffs.size() != n) {
      return make_error(ErrorCode::kDimensionMismatch,
                        "row " + std::to_string(i) + " has " +
                            std::to_string(r.coeffs.size()) +
                            " coefficients, expected " + std::to_string(n));
    }
    if (!std::isfinite(r.rhs)) {
      return make_error(ErrorCode::kInvalidArgument,
                        "rhs of row " + std::to_string(i) + " is not finite");
    }
    for (const double a : r.coeffs) {
      if (!std::isfinite(a)) {
        return make_error(ErrorCode::kInvalidArgument,
                          "row " + std::to_string(i) +
                              " has a non-finite coefficient");
      }
    }
  }
  return {};
}

// --- standard form ----------------------------------------------------------

StandardForm standardize(const FiniteLP& lp) {
  StandardForm sf;
  const std::size_t n = lp.num_vars();
  sf.objective_sign = lp.sense == Sense::kMaximize ? -1.0 : 1.0;
  sf.original_rows = lp.num_rows();

  std::size_t cols = 0;
  std::vector<std::size_t> bound_rows;  // shifted vars with finite upper
  sf.vars.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto& v = sf.vars[j];
    if (std::isfinite(lp.lower[j])) {
      v.kind = StandardForm::VarKind::kShifted;
      v.anchor = lp.lower[j];
      v.col = cols++;
      if (std::isfinite(lp.upper[j])) bound_rows.push_back(j);
    } else if (std::isfinite(lp.upper[j])) {
      v.kind = StandardForm::VarKind::kReflected;
      v.anchor = lp.upper[j];
      v.col = cols++;
    } else {
      v.kind = StandardForm::VarKind::kSplit;
      v.col = cols++;
      v.col2 = cols++;
    }
  }

  const std::size_t m = lp.num_rows() + bound_rows.size();
  std::vector<RowType> types;
  types.reserve(m);
  for (const auto& r : lp.rows) types.push_back(r.type);
  types.insert(types.end(), bound_rows.size(), RowType::kLessEqual);
  sf.slack_col.assign(m, kNone);
  sf.slack_sign.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (types[i] == RowType::kEqual) continue;
    sf.slack_col[i] = cols++;
    sf.slack_sign[i] = types[i] == RowType::kLessEqual ? 1.0 : -1.0;
  }

  sf.lp.sense = Sense::kMinimize;
  sf.lp.objective.assign(cols, 0.0);
  sf.lp.lower.assign(cols, 0.0);
  sf.lp.upper.assign(cols, kInf);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& v = sf.vars[j];
    const double c = sf.objective_sign * lp.objective[j];
    switch (v.kind) {
      case StandardForm::VarKind::kShifted:
        sf.lp.objective[v.col] = c;
        break;
      case StandardForm::VarKind::kReflected:
        sf.lp.objective[v.col] = -c;
        break;
      case StandardForm::VarKind::kSplit:
        sf.lp.objective[v.col] = c;
        sf.lp.objective[v.col2] = -c;
        break;
    }
    sf.objective_offset += lp.objective[j] * v.anchor;
  }

  sf.lp.rows.reserve(m);
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const auto& r = lp.rows[i];
    LpRow row{std::vector<double>(cols, 0.0), RowType::kEqual, r.rhs};
    for (std::size_t j = 0; j < n; ++j) {
      const double a = r.coeffs[j];
      if (a == 0.0) continue;
      const auto& v = sf.vars[j];
      switch (v.kind) {
        case StandardForm::VarKind::kShifted:
          row.coeffs[v.col] = a;
          break;
        case StandardForm::VarKind::kReflected:
          row.coeffs[v.col] = -a;
          break;
        case StandardForm::VarKind::kSplit:
          row.coeffs[v.col] = a;
          row.coeffs[v.col2] = -a;
          break;
      }
      row.rhs -= a * v.anchor;
    }
    sf.lp.rows.push_back(std::move(row));
  }
  for (const std::size_t j : bound_rows) {
    LpRow row{std::vector<double>(cols, 0.0), RowType::kEqual,
              lp.upper[j] - lp.lower[j]};
    row.coeffs[sf.vars[j].col] = 1.0;
    sf.lp.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (sf.slack_col[i] != kNone) {
      sf.lp.rows[i].coeffs[sf.slack_col[i]] = sf.slack_sign[i];
    }
  }
  return sf;
}

std::vector<double> StandardForm::recover_primal(
    const std::vector<double>& x_std) const {
  std::vector<double> x(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const auto& v = vars[j];
    switch (v.kind) {
      case VarKind::kShifted: x[j] = v.anchor + x_std[v.col]; break;
      case VarKind::kReflected: x[j] = v.anchor - x_std[v.col]; break;
      case VarKind::kSplit: x[j] = x_std[v.col] - x_std[v.col2]; break;
    }
  }
  return x;
}

double StandardForm::recover_value(double std_value) const {
  return objective_offset + objective_sign * std_value;
}

std::vector<double> StandardForm::recover_duals(
    const std::vector<double>& dual_std) const {
  std::vector<double> y(original_rows);
  for (std::size_t i = 0; i < original_rows; ++i) {
    y[i] = objective_sign * dual_std[i];
  }
  return y;
}

// --- simplex core -----------------------------------------------------------

namespace {

struct CoreResult {
  LpStatus status = LpStatus::kNumericalFailure;
  std::vector<double> x;     // standard-form primal
  std::vector<double> dual;  // standard-form row duals (min sense)
  std::size_t iterations = 0;
  std::string message;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), cols_(cols), width_(cols + 1),
        t_((rows + 1) * (cols + 1), 0.0), basis_(rows, kNone) {}

  double& at(std::size_t i, std::size_t j) { return t_[i * width_ + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * width_ + j]; }
  double& rhs(std::size_t i) { return t_[i * width_ + cols_]; }
  double rhs(std::size_t i) const { return t_[i * width_ + cols_]; }
  double& cost(std::size_t j) { return t_[m_ * width_ + j]; }
  double cost(std::size_t j) const { return t_[m_ * width_ + j]; }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t e) {
    double* pr = &t_[r * width_];
    const double inv = 1.0 / pr[e];
    for (std::size_t j = 0; j < width_; ++j) pr[j] *= inv;
    pr[e] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double* pi = &t_[i * width_];
      const double f = pi[e];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) pi[j] -= f * pr[j];
      pi[e] = 0.0;
    }
    basis_[r] = e;
  }

 private:
  std::size_t m_;
  std::size_t cols_;
  std::size_t width_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

enum class PhaseOutcome { kOptimal, kUnbounded, kIterationLimit };

PhaseOutcome run_phase(Tableau& t, const std::vector<bool>& eligible,
                       const SimplexOptions& opts, std::size_t max_iters,
                       std::size_t& iterations) {
  const std::size_t m = t.rows();
  const std::size_t cols = t.cols();
  const std::size_t bland_after = opts.bland_after_factor * (m + cols);
  std::size_t degenerate = 0;
  bool bland = false;
  std::vector<bool> in_basis(cols, false);
  for (const std::size_t b : t.basis()) {
    if (b != kNone) in_basis[b] = true;
  }
  for (;;) {
    std::size_t enter = kNone;
    double best = -opts.optimality_tolerance;
    for (std::size_t j = 0; j < cols; ++j) {
      if (!eligible[j] || in_basis[j]) continue;
      const double d = t.cost(j);
      if (bland) {
        if (d < -opts.optimality_tolerance) {
          enter = j;
          break;
        }
      } else if (d < best) {
        best = d;
        enter = j;
      }
    }
    if (enter == kNone) return PhaseOutcome::kOptimal;
    if (iterations >= max_iters) return PhaseOutcome::kIterationLimit;

    std::size_t leave = kNone;
    double best_ratio = kInf;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = t.at(i, enter);
      if (a <= opts.pivot_tolerance) continue;
      const double ratio = std::max(t.rhs(i), 0.0) / a;
      if (leave == kNone) {
        leave = i;
        best_ratio = ratio;
        continue;
      }
      const double slack = 1e-12 * std::max(1.0, best_ratio);
      if (ratio < best_ratio - slack) {
        leave = i;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + slack) {
        const bool take = bland ? t.basis()[i] < t.basis()[leave]
                                : a > t.at(leave, enter);
        if (take) {
          leave = i;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
    }
    if (leave == kNone) return PhaseOutcome::kUnbounded;

    if (best_ratio <= opts.feasibility_tolerance) {
      if (++degenerate > bland_after) bland = true;
    }
    in_basis[t.basis()[leave]] = false;
    t.pivot(leave, enter);
    in_basis[enter] = true;
    for (std::size_t i = 0; i < m; ++i) {
      if (t.rhs(i) < 0.0 && t.rhs(i) > -opts.feasibility_tolerance) {
        t.rhs(i) = 0.0;
      }
    }
    ++iterations;
  }
}

CoreResult simplex_core(const FiniteLP& sf, const SimplexOptions& opts) {
  CoreResult res;
  const std::size_t m = sf.num_rows();
  const std::size_t n = sf.num_vars();

  std::vector<double> flip(m, 1.0);
  double bnorm = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (sf.rows[i].rhs < 0.0) flip[i] = -1.0;
    bnorm = std::max(bnorm, std::fabs(sf.rows[i].rhs));
  }

  // Initial basis: a column equal to +e_i after the flip, else an artificial.
  std::vector<std::size_t> init_col(m, kNone);
  {
    std::vector<std::size_t> nonzeros(n, 0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (sf.rows[i].coeffs[j] != 0.0) ++nonzeros[j];
      }
    }
    std::vector<bool> used(n, false);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = n; j-- > 0;) {
        if (!used[j] && nonzeros[j] == 1 &&
            flip[i] * sf.rows[i].coeffs[j] == 1.0 &&
            sf.objective[j] == 0.0) {
          init_col[i] = j;
          used[j] = true;
          break;
        }
      }
    }
  }
  std::size_t artificials = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (init_col[i] == kNone) init_col[i] = n + artificials++;
  }
  const std::size_t cols = n + artificials;

  Tableau t(m, cols);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = flip[i] * sf.rows[i].coeffs[j];
    if (init_col[i] >= n) t.at(i, init_col[i]) = 1.0;
    t.rhs(i) = flip[i] * sf.rows[i].rhs;
    t.basis()[i] = init_col[i];
  }

  const std::size_t max_iters =
      opts.max_iterations > 0 ? opts.max_iterations : 50 * (m + cols) + 10000;

  // Phase 1: minimize the sum of artificials.
  std::vector<bool> eligible(cols, true);
  if (artificials > 0) {
    for (std::size_t j = 0; j <= cols; ++j) {
      double d = j < cols && j >= n ? 1.0 : 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (init_col[i] >= n) d -= (j < cols ? t.at(i, j) : t.rhs(i));
      }
      if (j < cols) {
        t.cost(j) = d;
      } else {
        t.rhs(m) = d;  // -(phase-1 objective)
      }
    }
    // Basic artificial columns have zero reduced cost.
    for (std::size_t i = 0; i < m; ++i) {
      if (init_col[i] >= n) t.cost(init_col[i]) = 0.0;
    }
    const auto out = run_phase(t, eligible, opts, max_iters, res.iterations);
    if (out == PhaseOutcome::kIterationLimit) {
      res.message = "iteration limit in phase 1";
      return res;
    }
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis()[i] >= n) infeasibility += std::max(t.rhs(i), 0.0);
    }
    if (infeasibility > opts.feasibility_tolerance * (1.0 + bnorm)) {
      res.status = LpStatus::kInfeasible;
      return res;
    }
    // Pivot remaining artificials out of the basis where possible; rows
    // without an eligible pivot are redundant and keep their artificial at 0.
    std::vector<bool> basic(cols, false);
    for (const std::size_t b : t.basis()) basic[b] = true;
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis()[i] < n) continue;
      t.rhs(i) = 0.0;
      std::size_t best = kNone;
      double best_abs = opts.pivot_tolerance;
      for (std::size_t j = 0; j < n; ++j) {
        if (basic[j]) continue;
        if (std::fabs(t.at(i, j)) > best_abs) {
          best_abs = std::fabs(t.at(i, j));
          best = j;
        }
      }
      if (best != kNone) {
        basic[t.basis()[i]] = false;
        t.pivot(i, best);
        basic[best] = true;
      }
    }
    for (std::size_t j = n; j < cols; ++j) eligible[j] = false;
  }

  // Phase 2 on the normalized objective.
  double cscale = 0.0;
  for (const double c : sf.objective) cscale = std::max(cscale, std::fabs(c));
  if (cscale == 0.0) cscale = 1.0;
  for (std::size_t j = 0; j <= cols; ++j) {
    double d = (j < n) ? sf.objective[j] / cscale : 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t b = t.basis()[i];
      const double cb = b < n ? sf.objective[b] / cscale : 0.0;
      if (cb == 0.0) continue;
      d -= cb * (j < cols ? t.at(i, j) : t.rhs(i));
    }
    if (j < cols) {
      t.cost(j) = d;
    } else {
      t.rhs(m) = d;
    }
  }
  for (std::size_t i = 0; i < m; ++i) t.cost(t.basis()[i]) = 0.0;

  const auto out = run_phase(t, eligible, opts, max_iters, res.iterations);
  if (out == PhaseOutcome::kIterationLimit) {
    res.message = "iteration limit in phase 2";
    return res;
  }
  if (out == PhaseOutcome::kUnbounded) {
    res.status = LpStatus::kUnbounded;
    return res;
  }

  res.status = LpStatus::kOptimal;
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis()[i] < n) res.x[t.basis()[i]] = std::max(t.rhs(i), 0.0);
  }
  res.dual.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    // Initial columns carry zero cost in phase 2, so d = -pi^T e_i.
    const double c0 = init_col[i] < n ? sf.objective[init_col[i]] / cscale : 0.0;
    res.dual[i] = flip[i] * (c0 - t.cost(init_col[i])) * cscale;
  }
  return res;
}

LPOutcome make_outcome(LpStatus status, std::size_t n, std::size_t m) {
  LPOutcome out;
  out.status = status;
  out.x.assign(n, 0.0);
  out.dual.assign(m, 0.0);
  out.reduced_costs.assign(n, 0.0);
  return out;
}

}  // namespace

Result<LPOutcome> solve_lp(const FiniteLP& lp, const SimplexOptions& opts) {
  if (auto st = validate(lp); !st) return st.error();
  const std::size_t n = lp.num_vars();
  const std::size_t m = lp.num_rows();
  const double sign = lp.sense == Sense::kMaximize ? -1.0 : 1.0;

  for (std::size_t j = 0; j < n; ++j) {
    if (lp.lower[j] > lp.upper[j]) {
      auto out = make_outcome(LpStatus::kInfeasible, n, m);
      out.message = "variable " + std::to_string(j) + " has lower > upper";
      return out;
    }
  }

  // Presolve: drop empty rows, fix empty columns at their best bound.
  std::vector<std::size_t> kept_rows;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& r = lp.rows[i];
    const bool empty = std::all_of(r.coeffs.begin(), r.coeffs.end(),
                                   [](double a) { return a == 0.0; });
    if (!empty) {
      kept_rows.push_back(i);
      continue;
    }
    const double tol = opts.feasibility_tolerance * (1.0 + std::fabs(r.rhs));
    const bool ok = (r.type == RowType::kLessEqual && 0.0 <= r.rhs + tol) ||
                    (r.type == RowType::kGreaterEqual && 0.0 >= r.rhs - tol) ||
                    (r.type == RowType::kEqual && std::fabs(r.rhs) <= tol);
    if (!ok) {
      auto out = make_outcome(LpStatus::kInfeasible, n, m);
      out.message = "empty row " + std::to_string(i) + " is unsatisfiable";
      return out;
    }
  }
  std::vector<std::size_t> kept_cols;
  std::vector<double> fixed(n, 0.0);
  std::vector<bool> is_fixed(n, false);
  bool ray = false;
  for (std::size_t j = 0; j < n; ++j) {
    const bool empty = std::all_of(kept_rows.begin(), kept_rows.end(),
                                   [&](std::size_t i) {
                                     return lp.rows[i].coeffs[j] == 0.0;
                                   });
    if (!empty) {
      kept_cols.push_back(j);
      continue;
    }
    is_fixed[j] = true;
    const double c = sign * lp.objective[j];  // minimize c * x_j
    if (c > 0.0) {
      if (std::isfinite(lp.lower[j])) fixed[j] = lp.lower[j]; else ray = true;
    } else if (c < 0.0) {
      if (std::isfinite(lp.upper[j])) fixed[j] = lp.upper[j]; else ray = true;
    } else if (std::isfinite(lp.lower[j])) {
      fixed[j] = lp.lower[j];
    } else if (std::isfinite(lp.upper[j])) {
      fixed[j] = lp.upper[j];
    }
  }

  FiniteLP reduced;
  reduced.sense = lp.sense;
  for (const std::size_t j : kept_cols) {
    reduced.objective.push_back(lp.objective[j]);
    reduced.lower.push_back(lp.lower[j]);
    reduced.upper.push_back(lp.upper[j]);
  }
  for (const std::size_t i : kept_rows) {
    LpRow row{{}, lp.rows[i].type, lp.rows[i].rhs};
    row.coeffs.reserve(kept_cols.size());
    for (const std::size_t j : kept_cols) row.coeffs.push_back(lp.rows[i].coeffs[j]);
    reduced.rows.push_back(std::move(row));
  }

  const StandardForm sf = standardize(reduced);
  const CoreResult core = simplex_core(sf.lp, opts);

  LPOutcome out = make_outcome(core.status, n, m);
  out.iterations = core.iterations;
  out.message = core.message;
  if (core.status != LpStatus::kOptimal) return out;
  if (ray) {
    out.status = LpStatus::kUnbounded;
    return out;
  }

  const std::vector<double> xr = sf.recover_primal(core.x);
  const std::vector<double> yr = sf.recover_duals(core.dual);
  for (std::size_t k = 0; k < kept_cols.size(); ++k) out.x[kept_cols[k]] = xr[k];
  for (std::size_t j = 0; j < n; ++j) {
    if (is_fixed[j]) out.x[j] = fixed[j];
  }
  for (std::size_t k = 0; k < kept_rows.size(); ++k) out.dual[kept_rows[k]] = yr[k];

  out.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) out.value += lp.objective[j] * out.x[j];
  for (std::size_t j = 0; j < n; ++j) {
    double r = lp.objective[j];
    for (std::size_t i = 0; i < m; ++i) r -= lp.rows[i].coeffs[j] * out.dual[i];
    out.reduced_costs[j] = r;
  }
  return out;
}

CertificateCheck check_certificate(const FiniteLP& lp, const LPOutcome& out) {
  CertificateCheck c;
  const std::size_t n = lp.num_vars();
  const double sigma = lp.sense == Sense::kMaximize ? -1.0 : 1.0;

  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const auto& r = lp.rows[i];
    double ax = 0.0;
    for (std::size_t j = 0; j < n; ++j) ax += r.coeffs[j] * out.x[j];
    const double slack = r.rhs - ax;
    double viol = 0.0;
    if (r.type == RowType::kLessEqual) viol = std::max(0.0, -slack);
    if (r.type == RowType::kGreaterEqual) viol = std::max(0.0, slack);
    if (r.type == RowType::kEqual) viol = std::fabs(slack);
    c.primal_infeasibility = std::max(c.primal_infeasibility, viol);

    const double y = sigma * out.dual[i];
    double dual_viol = 0.0;
    if (r.type == RowType::kLessEqual) dual_viol = std::max(0.0, y);
    if (r.type == RowType::kGreaterEqual) dual_viol = std::max(0.0, -y);
    c.dual_infeasibility = std::max(c.dual_infeasibility, dual_viol);
    if (r.type != RowType::kEqual) {
      c.complementarity =
          std::max(c.complementarity, std::fabs(out.dual[i] * slack));
    }
    c.dual_objective += r.rhs * out.dual[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double x = out.x[j];
    c.primal_infeasibility =
        std::max({c.primal_infeasibility, lp.lower[j] - x, x - lp.upper[j]});
    const double r = out.reduced_costs[j];
    const double sr = sigma * r;
    if (sr > 0.0) {
      if (std::isfinite(lp.lower[j])) {
        c.dual_objective += lp.lower[j] * r;
        c.complementarity = std::max(c.complementarity, std::fabs(r * (x - lp.lower[j])));
      } else {
        c.dual_infeasibility = std::max(c.dual_infeasibility, sr);
      }
    } else if (sr < 0.0) {
      if (std::isfinite(lp.upper[j])) {
        c.dual_objective += lp.upper[j] * r;
        c.complementarity = std::max(c.complementarity, std::fabs(r * (lp.upper[j] - x)));
      } else {
        c.dual_infeasibility = std::max(c.dual_infeasibility, -sr);
      }
    }
  }
  c.duality_gap = std::fabs(out.value - c.dual_objective);
  return c;
}

std::size_t matrix_rank(std::vector<std::vector<double>> rows,
                        double relative_tolerance) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  double scale = 0.0;
  for (const auto& r : rows) {
    for (const double a : r) scale = std::max(scale, std::fabs(a));
  }
  if (scale == 0.0) return 0;
  const double tol = relative_tolerance * scale;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    for (std::size_t i = rank + 1; i < rows.size(); ++i) {
      if (std::fabs(rows[i][col]) > std::fabs(rows[piv][col])) piv = i;
    }
    if (std::fabs(rows[piv][col]) <= tol) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t i = rank + 1; i < rows.size(); ++i) {
      const double f = rows[i][col] / rows[rank][col];
      if (f == 0.0) continue;
      for (std::size_t j = col; j < cols; ++j) rows[i][j] -= f * rows[rank][j];
    }
    ++rank;
  }
  return rank;
}

}  // namespace measdual
