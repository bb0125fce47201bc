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

#include "measdual/sip.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace measdual {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string point_text(std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (std::size_t j = 0; j < x.size(); ++j) os << (j ? ", " : "") << x[j];
  os << ")";
  return os.str();
}

Error at_point(const Error& e, std::size_t box, std::span<const double> x) {
  Error out = e;
  out.message += " at " + point_text(x) + " in box " + std::to_string(box + 1);
  return out;
}

DualPoint split_multipliers(const MomentProblem& mp,
                            std::span<const double> x) {
  DualPoint d;
  d.y.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mp.num_inequalities()));
  d.z.assign(x.begin() + static_cast<std::ptrdiff_t>(mp.num_inequalities()),
             x.begin() + static_cast<std::ptrdiff_t>(mp.num_multipliers()));
  for (double& y : d.y) y = std::max(y, 0.0);
  return d;
}

// Every function of the problem as one list: phi..., psi..., h last.
std::vector<const PiecewiseFunction*> all_functions(const MomentProblem& mp) {
  std::vector<const PiecewiseFunction*> fs;
  for (const auto& c : mp.inequalities()) fs.push_back(&c.function);
  for (const auto& c : mp.equalities()) fs.push_back(&c.function);
  fs.push_back(&mp.objective());
  return fs;
}

}  // namespace

// --- grid primal --------------------------------------------------------------

std::vector<SupportPoint> grid_support(const MomentProblem& mp,
                                       std::size_t resolution) {
  std::vector<SupportPoint> out;
  for (std::size_t b = 0; b < mp.num_boxes(); ++b) {
    auto pts = grid_points(mp.domain().boxes[b], resolution);
    if (!pts) return {};
    for (std::size_t i = 0; i < pts->size(); ++i) {
      const auto p = (*pts)[i];
      out.push_back({{p.begin(), p.end()}, b});
    }
  }
  return out;
}

Result<SupportPrimal> assemble_support_primal(const MomentProblem& mp,
                                              std::vector<SupportPoint> support,
                                              kernels::Exec exec) {
  const std::size_t g = support.size();
  const auto fs = all_functions(mp);
  std::vector<std::vector<double>> table(fs.size(), std::vector<double>(g));
  for (std::size_t k = 0; k < fs.size(); ++k) {
    const PiecewiseFunction& f = *fs[k];
    auto bad = kernels::tabulate(
        [&](std::size_t i) {
          return f.evaluate(support[i].box, support[i].point);
        },
        std::span<double>(table[k]), exec);
    if (bad) {
      const auto& sp = support[bad->index];
      return at_point(bad->error, sp.box, sp.point);
    }
  }
  SupportPrimal out;
  out.lp.sense = Sense::kMaximize;
  out.lp.objective = std::move(table.back());
  out.lp.lower.assign(g, 0.0);
  out.lp.upper.assign(g, kInf);
  for (std::size_t s = 0; s < mp.num_inequalities(); ++s) {
    out.lp.add_row(std::move(table[s]), RowType::kLessEqual,
                   mp.inequalities()[s].bound);
  }
  for (std::size_t t = 0; t < mp.num_equalities(); ++t) {
    out.lp.add_row(std::move(table[mp.num_inequalities() + t]), RowType::kEqual,
                   mp.equalities()[t].bound);
  }
  out.support = std::move(support);
  return out;
}

Result<SupportPrimal> assemble_grid_primal(const MomentProblem& mp,
                                           std::size_t resolution,
                                           kernels::Exec exec) {
  const std::vector<std::size_t> res(mp.dim(), resolution);
  for (const auto& b : mp.domain().boxes) {
    auto pts = grid_points(b, res);  // validates resolution and size
    if (!pts) return pts.error();
  }
  const auto per_box = grid_size(res);
  if (!per_box || *per_box > kMaxGridPoints / mp.num_boxes()) {
    return make_error(ErrorCode::kTooLarge, "primal grid exceeds 1e8 points");
  }
  return assemble_support_primal(mp, grid_support(mp, resolution), exec);
}

Result<PrimalSolution> solve_support_primal(const SupportPrimal& sp) {
  auto out = solve_lp(sp.lp);
  if (!out) return out.error();
  PrimalSolution sol;
  sol.status = out->status;
  if (out->status == LpStatus::kOptimal) {
    sol.value = out->value;
    for (std::size_t i = 0; i < sp.support.size(); ++i) {
      if (out->x[i] > 0.0) {
        sol.measure.atoms.push_back(
            {sp.support[i].point, sp.support[i].box, out->x[i]});
      }
    }
  } else if (out->status == LpStatus::kInfeasible) {
    sol.value = -kInf;
  } else if (out->status == LpStatus::kUnbounded) {
    sol.value = kInf;
  }
  sol.lp = std::move(*out);
  return sol;
}

Result<PrimalSolution> solve_grid_primal(const MomentProblem& mp,
                                         std::size_t resolution) {
  auto sp = assemble_grid_primal(mp, resolution);
  if (!sp) return sp.error();
  return solve_support_primal(*sp);
}

// --- separation ---------------------------------------------------------------

std::size_t effective_scan_resolution(std::size_t requested, std::size_t dim) {
  std::size_t r = std::max<std::size_t>(requested, 2);
  const double limit =
      std::floor(std::pow(static_cast<double>(kMaxScanPointsPerBox),
                          1.0 / static_cast<double>(dim)) + 1e-9);
  if (static_cast<double>(r) > limit) r = static_cast<std::size_t>(limit);
  return std::max<std::size_t>(r, 2);
}

Result<SlackScanner> SlackScanner::build(const MomentProblem& mp,
                                         std::size_t resolution,
                                         kernels::Exec exec) {
  SlackScanner sc;
  sc.mp_ = &mp;
  sc.exec_ = exec;
  sc.resolution_ = effective_scan_resolution(resolution, mp.dim());
  sc.axis_resolution_.assign(mp.dim(), sc.resolution_);
  const auto fs = all_functions(mp);
  for (std::size_t b = 0; b < mp.num_boxes(); ++b) {
    BoxTable table;
    auto pts = grid_points(mp.domain().boxes[b], sc.axis_resolution_);
    if (!pts) return pts.error();
    table.points = std::move(*pts);
    const std::size_t n = table.points.size();
    table.columns.resize(fs.size() - 1);
    for (std::size_t k = 0; k < fs.size(); ++k) {
      std::vector<double>& col = k + 1 < fs.size() ? table.columns[k] : table.h;
      col.resize(n);
      const PiecewiseFunction& f = *fs[k];
      auto bad = kernels::tabulate(
          [&](std::size_t i) { return f.evaluate(b, table.points[i]); },
          std::span<double>(col), exec);
      if (bad) return at_point(bad->error, b, table.points[bad->index]);
    }
    sc.boxes_.push_back(std::move(table));
  }
  return sc;
}

std::size_t SlackScanner::num_points() const {
  std::size_t n = 0;
  for (const auto& b : boxes_) n += b.points.size();
  return n;
}

SeparationResult SlackScanner::scan(const DualPoint& d) const {
  std::vector<double> coeffs = d.y;
  coeffs.insert(coeffs.end(), d.z.begin(), d.z.end());
  SeparationResult best;
  best.slack = kInf;
  for (std::size_t b = 0; b < boxes_.size(); ++b) {
    const auto& table = boxes_[b];
    std::vector<std::span<const double>> cols;
    cols.reserve(table.columns.size());
    for (const auto& c : table.columns) cols.emplace_back(c);
    const auto am = kernels::combine_argmin(cols, coeffs, table.h, exec_);
    if (am.index == static_cast<std::size_t>(-1)) continue;
    if (am.value < best.slack) {
      const auto p = table.points[am.index];
      best.point.assign(p.begin(), p.end());
      best.box = b;
      best.slack = am.value;
    }
  }
  best.scan_slack = best.slack;
  return best;
}

Result<SeparationResult> SlackScanner::separate(const DualPoint& d,
                                                std::size_t refine_steps) const {
  SeparationResult best = scan(d);
  if (refine_steps == 0) return best;
  const Box& box = mp_->domain().boxes[best.box];
  std::vector<double> radius(box.dim());
  for (std::size_t j = 0; j < box.dim(); ++j) {
    radius[j] = (box.upper()[j] - box.lower()[j]) /
                static_cast<double>(axis_resolution_[j] - 1);
  }
  auto refined =
      refine_minimum(*mp_, d, best.box, best.point, radius, refine_steps);
  if (!refined) return refined.error();
  refined->scan_slack = best.scan_slack;
  if (refined->slack > best.slack) return best;
  return refined;
}

Result<SeparationResult> refine_minimum(const MomentProblem& mp,
                                        const DualPoint& d, std::size_t box,
                                        std::vector<double> start,
                                        std::span<const double> radius,
                                        std::size_t refine_steps) {
  const Box& b = mp.domain().boxes[box];
  auto start_value = slack(mp, d, box, start);
  if (!start_value) return at_point(start_value.error(), box, start);

  SeparationResult best;
  best.box = box;
  best.point = start;
  best.slack = *start_value;
  best.scan_slack = *start_value;

  constexpr double kInvPhi = 0.6180339887498949;
  const std::size_t sweeps = b.dim() > 1 ? 2 : 1;
  std::vector<double> x = std::move(start);
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t j = 0; j < b.dim(); ++j) {
      double lo = std::max(b.lower()[j], x[j] - radius[j]);
      double hi = std::min(b.upper()[j], x[j] + radius[j]);
      if (!(lo < hi)) continue;
      std::optional<Error> failure;
      auto f = [&](double t) {
        std::vector<double> p = x;
        p[j] = t;
        auto v = slack(mp, d, box, p);
        if (!v) {
          if (!failure) failure = at_point(v.error(), box, p);
          return kInf;
        }
        if (*v < best.slack) {
          best.slack = *v;
          best.point = p;
        }
        return *v;
      };
      f(lo);
      f(hi);
      double c = hi - kInvPhi * (hi - lo);
      double e = lo + kInvPhi * (hi - lo);
      double fc = f(c);
      double fe = f(e);
      for (std::size_t k = 0; k < refine_steps; ++k) {
        if (fc < fe) {
          hi = e;
          e = c;
          fe = fc;
          c = hi - kInvPhi * (hi - lo);
          fc = f(c);
        } else {
          lo = c;
          c = e;
          fc = fe;
          e = lo + kInvPhi * (hi - lo);
          fe = f(e);
        }
      }
      if (failure) return *failure;
      x = best.point;
    }
  }
  return best;
}

Result<SeparationResult> separation_oracle(const MomentProblem& mp,
                                           const DualPoint& d,
                                           std::size_t scan_resolution,
                                           std::size_t refine_steps) {
  if (d.y.size() != mp.num_inequalities() || d.z.size() != mp.num_equalities()) {
    return make_error(ErrorCode::kDimensionMismatch,
                      "dual point does not match the constraint counts");
  }
  auto sc = SlackScanner::build(mp, scan_resolution);
  if (!sc) return sc.error();
  return sc->separate(d, refine_steps);
}

// --- exchange dual --------------------------------------------------------------

const char* to_string(ExchangeStatus s) {
  switch (s) {
    case ExchangeStatus::kConverged: return "Converged";
    case ExchangeStatus::kNotConverged: return "NotConverged";
    case ExchangeStatus::kDualUnbounded: return "DualUnbounded";
    case ExchangeStatus::kInternalError: return "InternalError";
  }
  return "?";
}

std::vector<SupportPoint> initial_cuts(const MomentProblem& mp) {
  std::vector<SupportPoint> cuts;
  for (std::size_t b = 0; b < mp.num_boxes(); ++b) {
    const Box& box = mp.domain().boxes[b];
    for (auto& c : box.corners()) cuts.push_back({std::move(c), b});
    cuts.push_back({box.center(), b});
  }
  return cuts;
}

namespace {

// Restricted dual LP rows from pre-evaluated cut values. `with_margin` adds a
// trailing free variable t entering every row with coefficient -1.
FiniteLP build_cut_lp(const MomentProblem& mp,
                      std::span<const FunctionValues> values,
                      bool with_margin) {
  const std::size_t m = mp.num_inequalities();
  const std::size_t k = mp.num_multipliers();
  FiniteLP lp;
  lp.sense = with_margin ? Sense::kMaximize : Sense::kMinimize;
  for (std::size_t s = 0; s < m; ++s) {
    lp.add_variable(with_margin ? 0.0 : mp.inequalities()[s].bound, 0.0, kInf);
  }
  for (std::size_t t = 0; t < mp.num_equalities(); ++t) {
    lp.add_variable(with_margin ? 0.0 : mp.equalities()[t].bound, -kInf, kInf);
  }
  if (with_margin) lp.add_variable(1.0, -kInf, kInf);
  for (const auto& v : values) {
    std::vector<double> row(lp.num_vars(), 0.0);
    for (std::size_t s = 0; s < m; ++s) row[s] = v.phi[s];
    for (std::size_t t = 0; t < v.psi.size(); ++t) row[m + t] = v.psi[t];
    if (with_margin) row[k] = -1.0;
    lp.add_row(std::move(row), RowType::kGreaterEqual, v.h);
  }
  return lp;
}

void box_multipliers(FiniteLP& lp, std::size_t count, double bound) {
  for (std::size_t j = 0; j < count; ++j) {
    lp.lower[j] = std::max(lp.lower[j], -bound);
    lp.upper[j] = std::min(lp.upper[j], bound);
  }
}

Result<FunctionValues> cut_values(const MomentProblem& mp,
                                  const SupportPoint& c) {
  auto v = evaluate_all(mp, c.box, c.point);
  if (!v) return at_point(v.error(), c.box, c.point);
  return v;
}

}  // namespace

Result<FiniteLP> restricted_dual_lp(const MomentProblem& mp,
                                    std::span<const SupportPoint> cuts) {
  std::vector<FunctionValues> values;
  values.reserve(cuts.size());
  for (const auto& c : cuts) {
    auto v = cut_values(mp, c);
    if (!v) return v.error();
    values.push_back(std::move(*v));
  }
  return build_cut_lp(mp, values, false);
}

Result<ExchangeResult> exchange_solve(const MomentProblem& mp,
                                      const ExchangeOptions& opts) {
  if (!(opts.tol > 0.0) || opts.max_iters < 1) {
    return make_error(ErrorCode::kInvalidArgument,
                      "exchange needs tol > 0 and max_iters >= 1");
  }
  auto scanner = SlackScanner::build(mp, opts.scan_resolution, opts.exec);
  if (!scanner) return scanner.error();

  ExchangeResult res;
  res.cuts = initial_cuts(mp);
  res.cuts.insert(res.cuts.end(), opts.extra_cuts.begin(), opts.extra_cuts.end());
  std::vector<FunctionValues> values;
  for (const auto& c : res.cuts) {
    auto v = cut_values(mp, c);
    if (!v) return v.error();
    values.push_back(std::move(*v));
  }

  res.status = ExchangeStatus::kNotConverged;
  const std::size_t k = mp.num_multipliers();
  for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
    FiniteLP lp = build_cut_lp(mp, values, false);
    auto out = solve_lp(lp);
    if (!out) return out.error();
    res.iterations = iter + 1;

    ExchangeIteration rec;
    rec.num_cuts = res.cuts.size();
    if (out->status == LpStatus::kUnbounded) {
      box_multipliers(lp, k, opts.stabilization_bound);
      out = solve_lp(lp);
      if (!out) return out.error();
      if (out->status != LpStatus::kOptimal) {
        res.status = ExchangeStatus::kInternalError;
        res.message = std::string("stabilized restricted dual is ") +
                      to_string(out->status);
        return res;
      }
      rec.bounded = false;
      rec.value = -kInf;
    } else if (out->status != LpStatus::kOptimal) {
      res.status = ExchangeStatus::kInternalError;
      res.message = std::string("restricted dual is ") + to_string(out->status);
      return res;
    } else {
      rec.value = out->value;
    }
    rec.dual = split_multipliers(mp, out->x);

    auto sep = scanner->separate(rec.dual, opts.refine_steps);
    if (!sep) return sep.error();
    rec.worst_slack = sep->slack;
    res.history.push_back(rec);
    res.dual = rec.dual;
    res.value = rec.value;
    res.final_slack = sep->slack;
    res.measure.atoms.clear();
    if (rec.bounded) {
      for (std::size_t i = 0; i < res.cuts.size(); ++i) {
        if (out->dual[i] > 0.0) {
          res.measure.atoms.push_back(
              {res.cuts[i].point, res.cuts[i].box, out->dual[i]});
        }
      }
    }

    if (sep->slack >= -opts.tol) {
      if (rec.bounded) {
        res.status = ExchangeStatus::kConverged;
      } else {
        res.status = ExchangeStatus::kDualUnbounded;
        res.message =
            "dual value -inf so far; primal likely infeasible or needs more cuts";
      }
      return res;
    }
    SupportPoint cut{sep->point, sep->box};
    auto v = cut_values(mp, cut);
    if (!v) return v.error();
    res.cuts.push_back(std::move(cut));
    values.push_back(std::move(*v));
  }
  if (!res.history.empty() && !res.history.back().bounded) {
    res.status = ExchangeStatus::kDualUnbounded;
    res.message =
        "dual value -inf so far; primal likely infeasible or needs more cuts";
  }
  return res;
}

// --- Slater diagnostics -----------------------------------------------------------

Result<DualSlaterResult> check_dual_slater(const MomentProblem& mp,
                                           const ExchangeOptions& opts) {
  auto scanner = SlackScanner::build(mp, opts.scan_resolution, opts.exec);
  if (!scanner) return scanner.error();
  std::vector<SupportPoint> cuts = initial_cuts(mp);
  cuts.insert(cuts.end(), opts.extra_cuts.begin(), opts.extra_cuts.end());
  std::vector<FunctionValues> values;
  for (const auto& c : cuts) {
    auto v = cut_values(mp, c);
    if (!v) return v.error();
    values.push_back(std::move(*v));
  }
  const std::size_t k = mp.num_multipliers();
  DualSlaterResult res;
  res.status = ExchangeStatus::kNotConverged;
  for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
    FiniteLP lp = build_cut_lp(mp, values, true);
    box_multipliers(lp, k, kMarginCap);
    auto out = solve_lp(lp);
    if (!out) return out.error();
    res.iterations = iter + 1;
    if (out->status != LpStatus::kOptimal) {
      res.status = ExchangeStatus::kInternalError;
      return res;
    }
    const double t = out->x[k];
    res.multipliers = split_multipliers(mp, out->x);
    auto sep = scanner->separate(res.multipliers, opts.refine_steps);
    if (!sep) return sep.error();
    res.margin = sep->slack;
    if (sep->slack >= t - opts.tol) {
      res.status = ExchangeStatus::kConverged;
      break;
    }
    SupportPoint cut{sep->point, sep->box};
    auto v = cut_values(mp, cut);
    if (!v) return v.error();
    cuts.push_back(std::move(cut));
    values.push_back(std::move(*v));
  }
  for (const double y : res.multipliers.y) {
    res.capped = res.capped || y >= kMarginCap * (1.0 - 1e-9);
  }
  for (const double z : res.multipliers.z) {
    res.capped = res.capped || std::fabs(z) >= kMarginCap * (1.0 - 1e-9);
  }
  if (res.margin >= kMarginCap) {
    res.margin = kMarginCap;
    res.capped = true;
  }
  return res;
}

Result<PrimalSlaterResult> check_primal_slater(const MomentProblem& mp,
                                               std::size_t resolution) {
  auto sp = assemble_grid_primal(mp, resolution);
  if (!sp) return sp.error();
  FiniteLP& lp = sp->lp;
  const std::size_t g = lp.num_vars();
  std::fill(lp.objective.begin(), lp.objective.end(), 0.0);
  const std::size_t delta = lp.add_variable(1.0, -kInf, kMarginCap);
  for (std::size_t s = 0; s < mp.num_inequalities(); ++s) {
    lp.rows[s].coeffs[delta] = 1.0;
  }

  PrimalSlaterResult res;
  res.equality_rows = mp.num_equalities();
  std::vector<std::vector<double>> eq;
  for (std::size_t t = 0; t < mp.num_equalities(); ++t) {
    const auto& c = lp.rows[mp.num_inequalities() + t].coeffs;
    eq.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(g));
  }
  res.equality_rank = matrix_rank(std::move(eq));

  auto out = solve_lp(lp);
  if (!out) return out.error();
  res.status = out->status;
  if (out->status == LpStatus::kOptimal) {
    res.margin = out->x[delta];
    res.capped = res.margin >= kMarginCap * (1.0 - 1e-9);
  } else if (out->status == LpStatus::kInfeasible) {
    res.margin = -kInf;
  }
  return res;
}

// --- report -----------------------------------------------------------------------

const char* to_string(ReportStatus s) {
  switch (s) {
    case ReportStatus::kStrongDualityNumerically: return "StrongDualityNumerically";
    case ReportStatus::kGapRemains: return "GapRemains";
    case ReportStatus::kPrimalInfeasible: return "PrimalInfeasible";
    case ReportStatus::kPrimalUnbounded: return "PrimalUnbounded";
    case ReportStatus::kDualUnboundedBelow: return "DualUnboundedBelow";
    case ReportStatus::kNotConverged: return "NotConverged";
  }
  return "?";
}

Result<DualityReport> duality_report(const MomentProblem& mp,
                                     const SolverConfig& config) {
  const auto t_start = Clock::now();
  DualityReport r;
  r.problem = mp.name();
  r.config = config;

  auto t0 = Clock::now();
  auto sp = assemble_grid_primal(mp, config.grid, config.exec);
  if (!sp) return sp.error();
  auto primal = solve_support_primal(*sp);
  if (!primal) return primal.error();
  r.primal_status = to_string(primal->status);
  r.primal_value = primal->value;
  r.primal_measure = primal->measure;
  r.timings.primal_seconds = seconds_since(t0);

  t0 = Clock::now();
  ExchangeOptions xo;
  xo.tol = config.tol;
  xo.max_iters = config.max_iters;
  xo.scan_resolution = config.scan;
  xo.refine_steps = config.refine_steps;
  xo.exec = config.exec;
  auto ex = exchange_solve(mp, xo);
  if (!ex) return ex.error();
  r.dual_status = to_string(ex->status);
  r.iterations = ex->iterations;
  r.exchange_value = ex->value;
  r.dual_point = ex->dual;

  // Dual feasibility on a finer mesh and on the primal grid itself.
  const std::size_t verify_res = config.scan * std::max<std::size_t>(config.verify_factor, 1);
  auto verifier = SlackScanner::build(mp, verify_res, config.exec);
  if (!verifier) return verifier.error();
  const auto mass_bound = mp.mass_bound();
  r.mass_bound_available = mass_bound.has_value();
  r.mass_bound = mass_bound.value_or(0.0);

  auto grid_slacks = [&](const DualPoint& d) {
    std::vector<double> coeffs = d.y;
    coeffs.insert(coeffs.end(), d.z.begin(), d.z.end());
    std::vector<std::span<const double>> cols;
    for (const auto& row : sp->lp.rows) cols.emplace_back(row.coeffs);
    std::vector<double> out(sp->lp.num_vars());
    kernels::combine(cols, coeffs, sp->lp.objective, out, config.exec);
    return out;
  };

  if (ex->status == ExchangeStatus::kConverged ||
      ex->status == ExchangeStatus::kNotConverged) {
    auto vsep = verifier->separate(ex->dual, config.refine_steps);
    if (!vsep) return vsep.error();
    const auto gs = grid_slacks(ex->dual);
    const double grid_min =
        gs.empty() ? kInf : kernels::argmin(gs, config.exec).value;
    const double worst = std::min(vsep->slack, grid_min);
    r.max_dual_violation = std::max(0.0, -worst);

    // Lift the multiplier of a constant positive constraint so the reported
    // point is feasible on every sampled point.
    if (r.max_dual_violation > 0.0 && mass_bound) {
      const std::size_t m = mp.num_inequalities();
      std::optional<std::size_t> slot;
      double unit = 0.0;
      double best = kInf;
      for (std::size_t i = 0; i < mp.num_multipliers(); ++i) {
        const auto& c = i < m ? mp.inequalities()[i] : mp.equalities()[i - m];
        const auto v = c.function.constant_value();
        if (!v || *v <= 0.0) continue;
        const double mass = std::max(0.0, c.bound / *v);
        if (mass < best) {
          best = mass;
          slot = i;
          unit = *v;
        }
      }
      const double lift = r.max_dual_violation / unit;
      if (*slot < m) {
        r.dual_point.y[*slot] += lift;
      } else {
        r.dual_point.z[*slot - m] += lift;
      }
      std::ostringstream note;
      note.precision(3);
      note << "dual point lifted by " << lift
           << " along a constant constraint to remove a residual violation";
      r.notes.push_back(note.str());
    }
    r.dual_value = dual_objective(mp, r.dual_point);
  } else {
    r.dual_value = ex->status == ExchangeStatus::kDualUnbounded ? -kInf : ex->value;
    if (!ex->message.empty()) r.notes.push_back(ex->message);
  }
  r.timings.dual_seconds = seconds_since(t0);
  if (!r.mass_bound_available) {
    r.notes.push_back(
        "no constant mass constraint: dual tolerance cannot be converted into "
        "a bound on the value; max_dual_violation is raw slack");
  }

  r.gap = r.dual_value - r.primal_value;
  r.gap_tolerance = config.gap_tol_factor * (1.0 + std::fabs(r.dual_value));

  // Weak duality: for the feasible grid measure w,
  // primal = dual - sum_s y_s (a_s - int phi_s dw) - int slack dw.
  const bool both_finite = std::isfinite(r.primal_value) && std::isfinite(r.dual_value);
  if (primal->status == LpStatus::kOptimal && both_finite) {
    const auto gs = grid_slacks(r.dual_point);
    double weighted = 0.0;
    for (std::size_t i = 0; i < gs.size(); ++i) weighted += primal->lp.x[i] * gs[i];
    r.weak_duality_residual = r.primal_value - r.dual_value + weighted;
    const double tol = 1e-8 * (1.0 + std::fabs(r.dual_value));
    r.weak_duality_ok = r.weak_duality_residual <= tol;
    if (ex->status == ExchangeStatus::kConverged && r.gap < -tol) {
      r.weak_duality_ok = false;
    }
    if (!r.weak_duality_ok) r.notes.push_back("weak duality check failed");
  }

  if (config.run_slater) {
    t0 = Clock::now();
    auto ps = check_primal_slater(mp, config.grid);
    if (!ps) return ps.error();
    r.primal_slater_status = to_string(ps->status);
    r.primal_slater_margin = ps->margin;
    r.primal_slater_capped = ps->capped;
    r.equality_rows = ps->equality_rows;
    r.equality_rank = ps->equality_rank;
    if (ps->rank_deficient()) {
      r.notes.push_back("equality constraint matrix is rank deficient on the grid");
    }
    auto ds = check_dual_slater(mp, xo);
    if (!ds) return ds.error();
    r.dual_slater_margin = ds->margin;
    r.dual_slater_capped = ds->capped;
    r.timings.slater_seconds = seconds_since(t0);
  }

  if (primal->status == LpStatus::kInfeasible) {
    r.status = ReportStatus::kPrimalInfeasible;
  } else if (primal->status == LpStatus::kUnbounded) {
    r.status = ReportStatus::kPrimalUnbounded;
  } else if (primal->status != LpStatus::kOptimal) {
    r.status = ReportStatus::kNotConverged;
  } else if (ex->status == ExchangeStatus::kDualUnbounded) {
    r.status = ReportStatus::kDualUnboundedBelow;
  } else if (ex->status != ExchangeStatus::kConverged) {
    r.status = ReportStatus::kNotConverged;
  } else if (r.gap <= r.gap_tolerance) {
    r.status = ReportStatus::kStrongDualityNumerically;
  } else {
    r.status = ReportStatus::kGapRemains;
  }
  r.timings.total_seconds = seconds_since(t_start);
  return r;
}

Result<MomentProblem> apply_unit_normalization(const MomentProblem& mp) {
  const std::size_t n = mp.dim();
  const std::size_t k = mp.num_boxes();
  Partition unit;
  std::vector<std::vector<double>> scale(k), shift(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> lo(n, 0.0), hi(n, 1.0);
    lo[0] = static_cast<double>(i);
    hi[0] = static_cast<double>(i + 1);
    auto b = Box::make(lo, hi);
    if (!b) return b.error();
    unit.boxes.push_back(std::move(*b));
    const UnitTransform tr(mp.domain().boxes[i]);
    scale[i] = tr.scale();
    shift[i] = tr.offset();
    // x = lower + scale * (v - i e_0)
    shift[i][0] -= scale[i][0] * static_cast<double>(i);
  }
  std::vector<double> hull_hi(n, 1.0);
  hull_hi[0] = static_cast<double>(k);
  auto hull = Box::make(std::vector<double>(n, 0.0), hull_hi);
  if (!hull) return hull.error();

  auto compose = [&](const PiecewiseFunction& f) -> Result<PiecewiseFunction> {
    std::vector<Expression> pieces;
    for (std::size_t i = 0; i < k; ++i) {
      auto e = substitute_affine(f.piece(i), scale[i], shift[i]);
      if (!e) return e.error();
      pieces.push_back(std::move(*e));
    }
    return PiecewiseFunction(std::move(pieces));
  };
  auto objective = compose(mp.objective());
  if (!objective) return objective.error();
  std::vector<MomentConstraint> ineq, eq;
  for (const auto& c : mp.inequalities()) {
    auto f = compose(c.function);
    if (!f) return f.error();
    ineq.push_back({std::move(*f), c.bound});
  }
  for (const auto& c : mp.equalities()) {
    auto f = compose(c.function);
    if (!f) return f.error();
    eq.push_back({std::move(*f), c.bound});
  }
  return MomentProblem::make(std::move(unit), std::move(*hull),
                             std::move(*objective), std::move(ineq),
                             std::move(eq), mp.name());
}

}  // namespace measdual
