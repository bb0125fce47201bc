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

#include "measdual/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "measdual/io.hpp"

namespace measdual {

namespace {

std::string fmt(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt_vector(const std::vector<double>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + ")";
}

int exit_for(ReportStatus s) {
  switch (s) {
    case ReportStatus::kStrongDualityNumerically: return kExitOk;
    case ReportStatus::kGapRemains:
    case ReportStatus::kNotConverged: return kExitNotConverged;
    case ReportStatus::kPrimalInfeasible:
    case ReportStatus::kPrimalUnbounded:
    case ReportStatus::kDualUnboundedBelow: return kExitInfeasible;
  }
  return kExitNotConverged;
}

int exit_for(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return kExitOk;
    case LpStatus::kInfeasible:
    case LpStatus::kUnbounded: return kExitInfeasible;
    case LpStatus::kNumericalFailure: return kExitNotConverged;
  }
  return kExitNotConverged;
}

int fail(std::ostream& err, const Error& e) {
  err << "error: " << e.describe() << "\n";
  return kExitInputError;
}

struct Overrides {
  std::optional<std::size_t> grid;
  std::optional<double> tol;
  std::optional<std::size_t> max_iters;
  std::string report;
};

void apply(const Overrides& o, SolverConfig& c) {
  if (o.grid) c.grid = *o.grid;
  if (o.tol) c.tol = *o.tol;
  if (o.max_iters) c.max_iters = *o.max_iters;
}

void apply(const Overrides& o, LpDensityConfig& c) {
  if (o.grid) c.resolution.x = *o.grid;
}

void print_report(const DualityReport& r, std::ostream& out) {
  out << "problem:        " << (r.problem.empty() ? "(unnamed)" : r.problem) << "\n"
      << "status:         " << to_string(r.status) << "\n"
      << "primal (grid):  " << fmt(r.primal_value) << "  [" << r.primal_status
      << ", " << r.primal_measure.atoms.size() << " atoms]\n"
      << "dual:           " << fmt(r.dual_value) << "  [" << r.dual_status << ", "
      << r.iterations << " iterations]\n"
      << "gap:            " << fmt(r.gap) << "  (tolerance " << fmt(r.gap_tolerance)
      << ")\n"
      << "dual violation: " << fmt(r.max_dual_violation) << "\n"
      << "dual point:     y=" << fmt_vector(r.dual_point.y)
      << " z=" << fmt_vector(r.dual_point.z) << "\n";
  if (r.config.run_slater) {
    out << "primal Slater:  " << fmt(r.primal_slater_margin)
        << (r.primal_slater_capped ? " (capped)" : "") << "  [" << r.primal_slater_status
        << ", equality rank " << r.equality_rank << "/" << r.equality_rows << "]\n"
        << "dual Slater:    " << fmt(r.dual_slater_margin)
        << (r.dual_slater_capped ? " (capped)" : "") << "\n";
  }
  out << "weak duality:   " << (r.weak_duality_ok ? "ok" : "VIOLATED") << "\n";
  for (const auto& n : r.notes) out << "note: " << n << "\n";
}

void print_report(const LpDensityReport& r, std::ostream& out) {
  out << "problem:        " << (r.problem.empty() ? "(unnamed)" : r.problem) << "\n"
      << "status:         " << to_string(r.status) << "\n"
      << "primal:         " << fmt(r.primal_value) << "  [" << r.primal_status << "]\n"
      << "dual:           " << fmt(r.dual_value) << "  [" << r.dual_status << "]\n"
      << "gap:            " << fmt(r.gap) << "\n"
      << "Slater:         " << fmt(r.slater_margin) << (r.slater_capped ? " (capped)" : "")
      << "  [" << r.slater_status << ", B rank " << r.b_rank << "/" << r.b_rows << "]\n";
  for (const auto& c : r.operator_checks) {
    out << "kernel " << to_string(c.kernel) << ":       ||tau||_q=" << fmt(c.tau_norm)
        << " M=" << fmt(c.rho_max) << " trials " << c.trials.size() - c.failures << "/"
        << c.trials.size() << " passed\n";
  }
  if (r.escapes) out << "note: " << r.escape_label << "\n";
  for (const auto& n : r.notes) out << "note: " << n << "\n";
}

template <class Report>
int finish(const Report& r, const Overrides& o, std::ostream& out,
           std::ostream& err) {
  print_report(r, out);
  if (!o.report.empty()) {
    if (auto st = write_report(r, o.report); !st) return fail(err, st.error());
  }
  return exit_for(r.status);
}

int cmd_solve(const std::string& path, const Overrides& o, std::ostream& out,
              std::ostream& err) {
  auto file = load_problem(path);
  if (!file) return fail(err, file.error());
  if (auto* m = std::get_if<MomentFile>(&*file)) {
    apply(o, m->config);
    auto r = duality_report(m->problem, m->config);
    if (!r) return fail(err, r.error());
    return finish(*r, o, out, err);
  }
  auto& f = std::get<LpDensityFile>(*file);
  apply(o, f.config);
  auto r = lp_density_report(f.problem, f.config);
  if (!r) return fail(err, r.error());
  return finish(*r, o, out, err);
}

int cmd_primal(const std::string& path, const Overrides& o, std::ostream& out,
               std::ostream& err) {
  auto file = load_problem(path);
  if (!file) return fail(err, file.error());
  if (auto* m = std::get_if<MomentFile>(&*file)) {
    apply(o, m->config);
    auto sol = solve_grid_primal(m->problem, m->config.grid);
    if (!sol) return fail(err, sol.error());
    out << "primal (grid " << m->config.grid << "): " << fmt(sol->value) << "  ["
        << to_string(sol->status) << "]\n";
    for (const auto& a : sol->measure.atoms) {
      out << "  atom " << fmt_vector(a.point) << " box " << a.box + 1 << " weight "
          << fmt(a.weight) << "\n";
    }
    return exit_for(sol->status);
  }
  auto& f = std::get<LpDensityFile>(*file);
  apply(o, f.config);
  auto d = discretize_lp_density(f.problem, f.config.resolution);
  if (!d) return fail(err, d.error());
  auto sol = solve_lp(d->primal);
  if (!sol) return fail(err, sol.error());
  out << "primal (x resolution " << f.config.resolution.x << "): " << fmt(sol->value)
      << "  [" << to_string(sol->status) << "]\n";
  return exit_for(sol->status);
}

int cmd_dual(const std::string& path, const Overrides& o, std::ostream& out,
             std::ostream& err) {
  auto file = load_problem(path);
  if (!file) return fail(err, file.error());
  if (auto* m = std::get_if<MomentFile>(&*file)) {
    apply(o, m->config);
    ExchangeOptions xo;
    xo.tol = m->config.tol;
    xo.max_iters = m->config.max_iters;
    xo.scan_resolution = m->config.scan;
    xo.refine_steps = m->config.refine_steps;
    auto ex = exchange_solve(m->problem, xo);
    if (!ex) return fail(err, ex.error());
    out << "dual: " << fmt(ex->value) << "  [" << to_string(ex->status) << ", "
        << ex->iterations << " iterations, " << ex->cuts.size() << " cuts]\n"
        << "dual point: y=" << fmt_vector(ex->dual.y) << " z=" << fmt_vector(ex->dual.z)
        << "\n"
        << "worst slack: " << fmt(ex->final_slack) << "\n";
    if (!ex->message.empty()) out << "note: " << ex->message << "\n";
    switch (ex->status) {
      case ExchangeStatus::kConverged: return kExitOk;
      case ExchangeStatus::kDualUnbounded: return kExitInfeasible;
      default: return kExitNotConverged;
    }
  }
  auto& f = std::get<LpDensityFile>(*file);
  apply(o, f.config);
  auto d = discretize_lp_density(f.problem, f.config.resolution);
  if (!d) return fail(err, d.error());
  auto sol = solve_lp(d->dual);
  if (!sol) return fail(err, sol.error());
  out << "dual: " << fmt(sol->value) << "  [" << to_string(sol->status) << "]\n";
  return exit_for(sol->status);
}

int cmd_slater(const std::string& path, const Overrides& o, std::ostream& out,
               std::ostream& err) {
  auto file = load_problem(path);
  if (!file) return fail(err, file.error());
  if (auto* m = std::get_if<MomentFile>(&*file)) {
    apply(o, m->config);
    auto ps = check_primal_slater(m->problem, m->config.grid);
    if (!ps) return fail(err, ps.error());
    ExchangeOptions xo;
    xo.tol = m->config.tol;
    xo.max_iters = m->config.max_iters;
    xo.scan_resolution = m->config.scan;
    xo.refine_steps = m->config.refine_steps;
    auto ds = check_dual_slater(m->problem, xo);
    if (!ds) return fail(err, ds.error());
    out << "primal Slater margin: " << fmt(ps->margin) << (ps->capped ? " (capped)" : "")
        << "  [" << to_string(ps->status) << "]\n"
        << "equality rank: " << ps->equality_rank << "/" << ps->equality_rows
        << (ps->rank_deficient() ? "  (rank deficient)" : "") << "\n"
        << "dual Slater margin: " << fmt(ds->margin) << (ds->capped ? " (capped)" : "")
        << "  y=" << fmt_vector(ds->multipliers.y)
        << " z=" << fmt_vector(ds->multipliers.z) << "\n";
    return ps->status == LpStatus::kOptimal ? kExitOk : exit_for(ps->status);
  }
  auto& f = std::get<LpDensityFile>(*file);
  apply(o, f.config);
  auto s = check_lp_slater(f.problem, f.config.resolution);
  if (!s) return fail(err, s.error());
  out << "Slater margin: " << fmt(s->margin) << (s->capped ? " (capped)" : "") << "  ["
      << to_string(s->status) << "]\n"
      << "B rank: " << s->b_rank << "/" << s->b_rows
      << (s->rank_deficient() ? "  (rank deficient)" : "") << "\n";
  return s->status == LpStatus::kOptimal ? kExitOk : exit_for(s->status);
}

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  auto file = load_problem(path);
  if (!file) return fail(err, file.error());
  if (const auto* m = std::get_if<MomentFile>(&*file)) {
    const auto& mp = m->problem;
    out << "valid moment problem '" << mp.name() << "': dimension " << mp.dim() << ", "
        << mp.num_boxes() << " boxes, " << mp.num_inequalities() << " inequalities, "
        << mp.num_equalities() << " equalities\n";
  } else {
    const auto& pb = std::get<LpDensityFile>(*file).problem;
    out << "valid lp_density problem '" << pb.name() << "': dimension "
        << pb.phi().dim() << ", p = " << fmt(pb.p()) << "\n";
  }
  return kExitOk;
}

struct OptionArgs {
  std::vector<double> domain;
  double forward = 0.0;
  std::vector<std::pair<double, double>> quotes;
  std::string payoff;
  std::string direction = "sup";
};

int cmd_option_bound(const OptionArgs& a, const Overrides& o, std::ostream& out,
                     std::ostream& err) {
  auto dom = Box::make({a.domain[0]}, {a.domain[1]});
  if (!dom) return fail(err, dom.error());
  std::vector<OptionQuote> quotes;
  for (const auto& [k, p] : a.quotes) quotes.push_back({k, p});
  const Direction dir = a.direction == "inf" ? Direction::kInf : Direction::kSup;
  auto ob = build_option_bound_problem(*dom, a.forward, quotes, a.payoff, dir);
  if (!ob) return fail(err, ob.error());
  SolverConfig cfg;
  apply(o, cfg);
  auto r = duality_report(ob->problem, cfg);
  if (!r) return fail(err, r.error());
  out << a.direction << " bound: " << fmt(ob->sign * r->dual_value) << "\n"
      << "grid value: " << fmt(ob->sign * r->primal_value) << "\n";
  for (const auto& atom : r->primal_measure.atoms) {
    out << "  atom " << fmt(atom.point[0]) << " weight " << fmt(atom.weight) << "\n";
  }
  out << "status: " << to_string(r->status) << "\n";
  for (const auto& n : r->notes) out << "note: " << n << "\n";
  if (!o.report.empty()) {
    if (auto st = write_report(*r, o.report); !st) return fail(err, st.error());
  }
  return exit_for(r->status);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Primal and dual solvers for linear problems over measures", "measdual"};
  app.require_subcommand(1);

  std::string path;
  Overrides o;
  auto add_file = [&](CLI::App* sub) {
    sub->add_option("problem", path, "problem file (JSON)")->required();
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--grid", o.grid, "grid points per axis (x cells for lp_density)")
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
  };
  auto add_tol = [&](CLI::App* sub) {
    sub->add_option("--tol", o.tol, "dual feasibility tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--max-iters", o.max_iters, "exchange iteration limit")
        ->check(CLI::PositiveNumber);
  };
  auto add_report = [&](CLI::App* sub) {
    sub->add_option("--report", o.report, "write a JSON report here");
  };

  auto* solve = app.add_subcommand("solve", "primal, dual, Slater checks and gap");
  add_file(solve);
  add_grid(solve);
  add_tol(solve);
  add_report(solve);

  auto* primal = app.add_subcommand("primal", "grid primal only");
  add_file(primal);
  add_grid(primal);

  auto* dual = app.add_subcommand("dual", "exchange dual only");
  add_file(dual);
  add_tol(dual);

  auto* slater = app.add_subcommand("slater", "Slater diagnostics");
  add_file(slater);
  add_grid(slater);

  auto* validate = app.add_subcommand("validate", "load and validate a problem file");
  add_file(validate);

  OptionArgs oa;
  auto* option = app.add_subcommand("option-bound", "model-free bound on an option price");
  option->add_option("--domain", oa.domain, "spot domain LO HI")->expected(2)->required();
  option->add_option("--forward", oa.forward, "forward price")->required();
  option->add_option("--quote", oa.quotes, "call quote: strike price (repeatable)");
  option->add_option("--payoff", oa.payoff, "payoff expression in x1")->required();
  option->add_option("--direction", oa.direction, "sup or inf")
      ->check(CLI::IsMember({"sup", "inf"}));
  add_grid(option);
  add_report(option);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (*solve) return cmd_solve(path, o, out, err);
  if (*primal) return cmd_primal(path, o, out, err);
  if (*dual) return cmd_dual(path, o, out, err);
  if (*slater) return cmd_slater(path, o, out, err);
  if (*validate) return cmd_validate(path, out, err);
  return cmd_option_bound(oa, o, out, err);
}

}  // namespace measdual
