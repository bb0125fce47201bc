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

#include "measdual/lp_density.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace measdual {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Status check_arity(const Expression& e, std::size_t arity,
                   const std::string& what) {
  if (e.arity() != arity) {
    return make_error(ErrorCode::kArity, what + " '" + e.source() + "' has arity " +
                                             std::to_string(e.arity()) +
                                             ", expected " + std::to_string(arity));
  }
  return {};
}

std::vector<std::size_t> uniform(std::size_t dim, std::size_t r) {
  return std::vector<std::size_t>(dim, r);
}

// K(y_j, x_i) row-major, rows over the constraint domain.
Result<std::vector<double>> kernel_matrix(const Expression& kernel,
                                          const PointSet& outer,
                                          const PointSet& xs,
                                          kernels::Exec exec) {
  const std::size_t rows = outer.size();
  const std::size_t cols = xs.size();
  if (cols != 0 && rows > kMaxKernelEntries / cols) {
    return make_error(ErrorCode::kTooLarge, "kernel matrix exceeds 2^24 entries");
  }
  std::vector<double> k(rows * cols);
  const std::size_t od = outer.dim;
  const std::size_t xd = xs.dim;
  auto bad = kernels::tabulate(
      [&](std::size_t idx) {
        double buf[16];
        std::vector<double> heap;
        double* pt = buf;
        if (od + xd > 16) {
          heap.resize(od + xd);
          pt = heap.data();
        }
        const auto y = outer[idx / cols];
        const auto x = xs[idx % cols];
        std::copy(y.begin(), y.end(), pt);
        std::copy(x.begin(), x.end(), pt + od);
        return kernel.evaluate(std::span<const double>(pt, od + xd));
      },
      std::span<double>(k), exec);
  if (bad) return bad->error;
  return k;
}

Result<std::vector<double>> tabulate_on(const Expression& e, const PointSet& pts,
                                        kernels::Exec exec) {
  std::vector<double> v(pts.size());
  auto bad = kernels::tabulate([&](std::size_t i) { return e.evaluate(pts[i]); },
                               std::span<double>(v), exec);
  if (bad) return bad->error;
  return v;
}

double lp_norm(std::span<const double> v, double p, double cell,
               kernels::Exec exec) {
  return std::pow(kernels::power_sum(v, p, exec) * cell, 1.0 / p);
}

}  // namespace

const char* to_string(Kernel k) { return k == Kernel::kA ? "A" : "B"; }

std::vector<VariableGroup> kernel_groups(Kernel k, std::size_t outer_dim,
                                         std::size_t x_dim) {
  return {{k == Kernel::kA ? 'y' : 'z', outer_dim}, {'x', x_dim}};
}

Result<LpDensityProblem> LpDensityProblem::make(
    Box phi, Expression objective, std::optional<KernelConstraint> ineq,
    std::optional<KernelConstraint> eq, double p, std::string name) {
  if (!std::isfinite(p) || !(p > 1.0)) {
    return make_error(ErrorCode::kInvalidArgument,
                      "exponent p must satisfy 1 < p < infinity");
  }
  const std::size_t n = phi.dim();
  if (auto st = check_arity(objective, n, "objective"); !st) return st.error();
  for (const auto* c : {&ineq, &eq}) {
    if (!*c) continue;
    const std::string tag = c == &ineq ? "A" : "B";
    const std::size_t m = (*c)->domain.dim();
    if (auto st = check_arity((*c)->kernel, m + n, "kernel " + tag); !st) {
      return st.error();
    }
    if (auto st = check_arity((*c)->bound, m, "bound " + tag); !st) {
      return st.error();
    }
  }
  LpDensityProblem pb(std::move(phi), std::move(objective));
  pb.ineq_ = std::move(ineq);
  pb.eq_ = std::move(eq);
  pb.p_ = p;
  pb.name_ = std::move(name);
  return pb;
}

Result<double> kernel_tau(const LpDensityProblem& pb, Kernel k,
                          std::span<const double> x,
                          std::size_t quad_resolution) {
  const auto& c = pb.constraint(k);
  if (!c) {
    return make_error(ErrorCode::kInvalidArgument,
                      std::string("problem has no kernel ") + to_string(k));
  }
  if (x.size() != pb.phi().dim()) {
    return make_error(ErrorCode::kDimensionMismatch, "x has the wrong dimension");
  }
  const auto res = uniform(c->domain.dim(), quad_resolution);
  auto ys = cell_midpoints(c->domain, res);
  if (!ys) return ys.error();
  PointSet xs{x.size(), {x.begin(), x.end()}};
  auto col = kernel_matrix(c->kernel, *ys, xs, kernels::Exec::kSerial);
  if (!col) return col.error();
  return lp_norm(*col, pb.p(), cell_volume(c->domain, res), kernels::Exec::kSerial);
}

Result<double> kernel_rho(const LpDensityProblem& pb, Kernel k,
                          std::span<const double> y,
                          std::size_t quad_resolution) {
  const auto& c = pb.constraint(k);
  if (!c) {
    return make_error(ErrorCode::kInvalidArgument,
                      std::string("problem has no kernel ") + to_string(k));
  }
  if (y.size() != c->domain.dim()) {
    return make_error(ErrorCode::kDimensionMismatch, "y has the wrong dimension");
  }
  const auto res = uniform(pb.phi().dim(), quad_resolution);
  auto xs = cell_midpoints(pb.phi(), res);
  if (!xs) return xs.error();
  PointSet ys{y.size(), {y.begin(), y.end()}};
  auto row = kernel_matrix(c->kernel, ys, *xs, kernels::Exec::kSerial);
  if (!row) return row.error();
  return lp_norm(*row, pb.q(), cell_volume(pb.phi(), res), kernels::Exec::kSerial);
}

namespace {

struct NormTables {
  std::vector<double> k;    // rows: constraint domain cells, cols: Phi cells
  std::vector<double> tau;  // per Phi cell
  double tau_norm = 0.0;
  double rho_max = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

Result<NormTables> norm_tables(const LpDensityProblem& pb,
                               const KernelConstraint& c, std::size_t r,
                               kernels::Exec exec) {
  const auto yres = uniform(c.domain.dim(), r);
  const auto xres = uniform(pb.phi().dim(), r);
  auto ys = cell_midpoints(c.domain, yres);
  if (!ys) return ys.error();
  auto xs = cell_midpoints(pb.phi(), xres);
  if (!xs) return xs.error();
  NormTables t;
  auto k = kernel_matrix(c.kernel, *ys, *xs, exec);
  if (!k) return k.error();
  t.k = std::move(*k);
  t.rows = ys->size();
  t.cols = xs->size();
  t.dx = cell_volume(pb.phi(), xres);
  t.dy = cell_volume(c.domain, yres);
  const double p = pb.p();
  const double q = pb.q();
  std::vector<double> column(t.rows);
  t.tau.resize(t.cols);
  for (std::size_t i = 0; i < t.cols; ++i) {
    for (std::size_t j = 0; j < t.rows; ++j) column[j] = t.k[j * t.cols + i];
    t.tau[i] = lp_norm(column, p, t.dy, exec);
  }
  t.tau_norm = lp_norm(t.tau, q, t.dx, exec);
  for (std::size_t j = 0; j < t.rows; ++j) {
    const std::span<const double> row(t.k.data() + j * t.cols, t.cols);
    t.rho_max = std::max(t.rho_max, lp_norm(row, q, t.dx, exec));
  }
  return t;
}

}  // namespace

Result<OperatorBoundReport> operator_bound_check(const LpDensityProblem& pb,
                                                 Kernel k, std::size_t trials,
                                                 std::size_t quad_resolution,
                                                 std::uint64_t seed,
                                                 kernels::Exec exec) {
  const auto& c = pb.constraint(k);
  if (!c) {
    return make_error(ErrorCode::kInvalidArgument,
                      std::string("problem has no kernel ") + to_string(k));
  }
  if (trials < 1 || quad_resolution < 4) {
    return make_error(ErrorCode::kInvalidArgument,
                      "bound check needs trials >= 1 and quad_resolution >= 4");
  }
  const std::size_t dims = c->domain.dim() + pb.phi().dim();
  std::size_t r = quad_resolution;
  while (r > 4 && std::pow(static_cast<double>(r), static_cast<double>(dims)) >
                      static_cast<double>(kMaxKernelEntries)) {
    --r;
  }
  auto fine = norm_tables(pb, *c, r, exec);
  if (!fine) return fine.error();
  auto half = norm_tables(pb, *c, r / 2, exec);
  if (!half) return half.error();
  auto quarter = norm_tables(pb, *c, r / 4, exec);
  if (!quarter) return quarter.error();

  OperatorBoundReport rep;
  rep.kernel = k;
  rep.resolution = r;
  rep.tau_norm = fine->tau_norm;
  rep.rho_max = fine->rho_max;
  rep.refinement_delta = std::fabs(fine->tau_norm - half->tau_norm) +
                         std::fabs(fine->rho_max - half->rho_max);
  const double coarse_delta = std::fabs(half->tau_norm - quarter->tau_norm) +
                              std::fabs(half->rho_max - quarter->rho_max);
  rep.refinement_ratio =
      rep.refinement_delta > 0.0 ? coarse_delta / rep.refinement_delta : 0.0;
  rep.epsilon = 10.0 * rep.refinement_delta;
  rep.rho_bounded = std::isfinite(fine->rho_max) &&
                    fine->rho_max <= 1.5 * half->rho_max + 1e-12;

  const NormTables& t = *fine;
  const double p = pb.p();
  const double vol_factor = std::pow(c->domain.volume(), 1.0 / p);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> f1(t.cols), f2(t.cols), diff(t.cols), image(t.rows),
      weighted(t.cols);
  auto image_norm = [&](const std::vector<double>& f) {
    kernels::matvec(t.k, f, image, exec);
    for (double& v : image) v *= t.dx;
    return lp_norm(image, p, t.dy, exec);
  };
  for (std::size_t trial = 0; trial < trials; ++trial) {
    for (auto& v : f1) v = unit(rng);
    for (auto& v : f2) v = unit(rng);
    OperatorTrial tr;
    tr.image_norm = image_norm(f1);
    for (std::size_t i = 0; i < t.cols; ++i) weighted[i] = std::fabs(f1[i]) * t.tau[i];
    tr.weighted_tau = kernels::sum(weighted, exec) * t.dx;
    tr.holder_bound = lp_norm(f1, p, t.dx, exec) * t.tau_norm;
    const double slack = rep.epsilon + 1e-12 * (1.0 + tr.holder_bound);
    tr.chain_ok = tr.image_norm <= tr.weighted_tau + slack &&
                  tr.weighted_tau <= tr.holder_bound + slack;

    for (std::size_t i = 0; i < t.cols; ++i) diff[i] = f1[i] - f2[i];
    tr.diff_image_norm = image_norm(diff);
    tr.lipschitz_bound = t.rho_max * vol_factor * lp_norm(diff, p, t.dx, exec);
    tr.continuity_ok = tr.diff_image_norm <=
                       tr.lipschitz_bound + rep.epsilon +
                           1e-12 * (1.0 + tr.lipschitz_bound);
    if (!tr.chain_ok || !tr.continuity_ok) ++rep.failures;
    rep.trials.push_back(tr);
  }
  return rep;
}

Result<DiscretizedLpDensity> discretize_lp_density(const LpDensityProblem& pb,
                                                   const DensityResolution& res,
                                                   kernels::Exec exec) {
  if (res.x < 2 || res.y < 2 || res.z < 2) {
    return make_error(ErrorCode::kInvalidArgument, "resolutions must be >= 2");
  }
  DiscretizedLpDensity d;
  const auto xres = uniform(pb.phi().dim(), res.x);
  auto xs = cell_midpoints(pb.phi(), xres);
  if (!xs) return xs.error();
  d.x_mid = std::move(*xs);
  d.dx = cell_volume(pb.phi(), xres);
  const std::size_t nx = d.x_mid.size();

  auto cvals = tabulate_on(pb.objective(), d.x_mid, exec);
  if (!cvals) return cvals.error();

  std::vector<double> amat, bmat, avals, bvals;
  std::size_t ny = 0, nz = 0;
  if (const auto& c = pb.inequality()) {
    const auto yres = uniform(c->domain.dim(), res.y);
    auto ys = cell_midpoints(c->domain, yres);
    if (!ys) return ys.error();
    d.y_mid = std::move(*ys);
    d.dy = cell_volume(c->domain, yres);
    ny = d.y_mid.size();
    auto k = kernel_matrix(c->kernel, d.y_mid, d.x_mid, exec);
    if (!k) return k.error();
    amat = std::move(*k);
    auto a = tabulate_on(c->bound, d.y_mid, exec);
    if (!a) return a.error();
    avals = std::move(*a);
  }
  if (const auto& c = pb.equality()) {
    const auto zres = uniform(c->domain.dim(), res.z);
    auto zs = cell_midpoints(c->domain, zres);
    if (!zs) return zs.error();
    d.z_mid = std::move(*zs);
    d.dz = cell_volume(c->domain, zres);
    nz = d.z_mid.size();
    auto k = kernel_matrix(c->kernel, d.z_mid, d.x_mid, exec);
    if (!k) return k.error();
    bmat = std::move(*k);
    auto b = tabulate_on(c->bound, d.z_mid, exec);
    if (!b) return b.error();
    bvals = std::move(*b);
  }

  d.primal.sense = Sense::kMaximize;
  for (std::size_t i = 0; i < nx; ++i) d.primal.add_variable((*cvals)[i] * d.dx);
  for (std::size_t j = 0; j < ny; ++j) {
    std::vector<double> row(nx);
    for (std::size_t i = 0; i < nx; ++i) row[i] = amat[j * nx + i] * d.dx;
    d.primal.add_row(std::move(row), RowType::kLessEqual, avals[j]);
  }
  for (std::size_t l = 0; l < nz; ++l) {
    std::vector<double> row(nx);
    for (std::size_t i = 0; i < nx; ++i) row[i] = bmat[l * nx + i] * d.dx;
    d.primal.add_row(std::move(row), RowType::kEqual, bvals[l]);
  }

  d.dual.sense = Sense::kMinimize;
  for (std::size_t j = 0; j < ny; ++j) d.dual.add_variable(avals[j] * d.dy);
  for (std::size_t l = 0; l < nz; ++l) {
    d.dual.add_variable(bvals[l] * d.dz, -kInf, kInf);
  }
  for (std::size_t i = 0; i < nx; ++i) {
    std::vector<double> row(ny + nz);
    for (std::size_t j = 0; j < ny; ++j) row[j] = amat[j * nx + i] * d.dy;
    for (std::size_t l = 0; l < nz; ++l) row[ny + l] = bmat[l * nx + i] * d.dz;
    d.dual.add_row(std::move(row), RowType::kGreaterEqual, (*cvals)[i]);
  }
  return d;
}

Result<LpSlaterResult> check_lp_slater(const LpDensityProblem& pb,
                                       const DensityResolution& res) {
  auto d = discretize_lp_density(pb, res);
  if (!d) return d.error();
  FiniteLP lp = std::move(d->primal);
  const std::size_t nx = lp.num_vars();
  std::fill(lp.objective.begin(), lp.objective.end(), 0.0);
  std::fill(lp.lower.begin(), lp.lower.end(), -kInf);
  const std::size_t delta = lp.add_variable(1.0, -kInf, kMarginCap);

  LpSlaterResult out;
  std::vector<std::vector<double>> brows;
  for (auto& row : lp.rows) {
    if (row.type == RowType::kLessEqual) {
      row.coeffs[delta] = 1.0;
    } else {
      brows.emplace_back(row.coeffs.begin(),
                         row.coeffs.begin() + static_cast<std::ptrdiff_t>(nx));
    }
  }
  out.b_rows = brows.size();
  out.b_rank = matrix_rank(std::move(brows));
  for (std::size_t i = 0; i < nx; ++i) {
    std::vector<double> row(lp.num_vars(), 0.0);
    row[i] = 1.0;
    row[delta] = -1.0;
    lp.add_row(std::move(row), RowType::kGreaterEqual, 0.0);
  }
  auto sol = solve_lp(lp);
  if (!sol) return sol.error();
  out.status = sol->status;
  if (sol->status == LpStatus::kOptimal && sol->x[delta] < -1e-9) {
    // Every feasible f has a negative cell, so no density f >= 0 is feasible.
    out.status = LpStatus::kInfeasible;
    out.margin = -kInf;
  } else if (sol->status == LpStatus::kOptimal) {
    out.margin = std::max(sol->x[delta], 0.0);
    out.capped = out.margin >= kMarginCap * (1.0 - 1e-9);
  } else if (sol->status == LpStatus::kInfeasible) {
    out.margin = -kInf;
  }
  return out;
}

Result<LpDensityReport> lp_density_report(const LpDensityProblem& pb,
                                          const LpDensityConfig& config) {
  const auto t_start = Clock::now();
  LpDensityReport r;
  r.problem = pb.name();
  r.config = config;
  r.p = pb.p();
  r.q = pb.q();

  auto t0 = Clock::now();
  auto d = discretize_lp_density(pb, config.resolution, config.exec);
  if (!d) return d.error();
  auto primal = solve_lp(d->primal);
  if (!primal) return primal.error();
  r.timings.primal_seconds = seconds_since(t0);
  t0 = Clock::now();
  auto dual = solve_lp(d->dual);
  if (!dual) return dual.error();
  r.timings.dual_seconds = seconds_since(t0);

  r.primal_status = to_string(primal->status);
  r.dual_status = to_string(dual->status);
  r.primal_value = primal->status == LpStatus::kOptimal     ? primal->value
                   : primal->status == LpStatus::kInfeasible ? -kInf
                   : primal->status == LpStatus::kUnbounded  ? kInf
                                                             : 0.0;
  r.dual_value = dual->status == LpStatus::kOptimal     ? dual->value
                 : dual->status == LpStatus::kInfeasible ? kInf
                 : dual->status == LpStatus::kUnbounded  ? -kInf
                                                         : 0.0;
  r.gap = r.dual_value - r.primal_value;
  if (primal->status == LpStatus::kOptimal) r.density = primal->x;

  if (primal->status == LpStatus::kInfeasible) {
    r.status = ReportStatus::kPrimalInfeasible;
  } else if (primal->status == LpStatus::kUnbounded) {
    r.status = ReportStatus::kPrimalUnbounded;
  } else if (primal->status != LpStatus::kOptimal ||
             dual->status != LpStatus::kOptimal) {
    r.status = ReportStatus::kNotConverged;
  } else if (std::fabs(r.gap) <= 1e-8 * (1.0 + std::fabs(r.primal_value))) {
    r.status = ReportStatus::kStrongDualityNumerically;
  } else {
    r.status = ReportStatus::kGapRemains;
  }

  // Refine the density grid to see whether the optimizer stays in L^p.
  if (primal->status == LpStatus::kOptimal) {
    for (std::size_t factor : {1, 2, 4}) {
      DensityResolution res = config.resolution;
      res.x *= factor;
      auto dd = discretize_lp_density(pb, res, config.exec);
      if (!dd) return dd.error();
      auto sol = solve_lp(dd->primal);
      if (!sol) return sol.error();
      if (sol->status != LpStatus::kOptimal) break;
      r.refinement.push_back(
          {res.x, sol->value, lp_norm(sol->x, pb.p(), dd->dx, config.exec)});
    }
    if (r.refinement.size() == 3) {
      bool increasing = true;
      bool growing = true;
      for (std::size_t i = 1; i < 3; ++i) {
        const auto& a = r.refinement[i - 1];
        const auto& b = r.refinement[i];
        increasing = increasing &&
                     b.value > a.value + 1e-9 * (1.0 + std::fabs(a.value));
        growing = growing && b.density_norm >= 1.2 * a.density_norm;
      }
      r.escapes = increasing && growing;
      if (r.escapes) r.escape_label = kEscapeLabel;
    }
  }

  t0 = Clock::now();
  auto slater = check_lp_slater(pb, config.resolution);
  if (!slater) return slater.error();
  r.slater_status = to_string(slater->status);
  r.slater_margin = slater->margin;
  r.slater_capped = slater->capped;
  r.b_rows = slater->b_rows;
  r.b_rank = slater->b_rank;
  if (slater->rank_deficient()) {
    r.notes.push_back("discretized B operator is rank deficient");
  }
  r.timings.slater_seconds = seconds_since(t0);

  for (Kernel k : {Kernel::kA, Kernel::kB}) {
    if (!pb.constraint(k)) continue;
    auto chk = operator_bound_check(pb, k, config.trials, config.quad_resolution,
                                    config.seed, config.exec);
    if (!chk) return chk.error();
    if (!chk->rho_bounded) {
      r.notes.push_back(std::string("uniform bound on rho not confirmed for kernel ") +
                        to_string(k));
    }
    if (!chk->passed()) {
      r.notes.push_back(std::string("operator bound check failed for kernel ") +
                        to_string(k));
    }
    r.operator_checks.push_back(std::move(*chk));
  }
  r.timings.total_seconds = seconds_since(t_start);
  return r;
}

}  // namespace measdual
