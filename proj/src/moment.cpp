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

#include "measdual/moment.hpp"

#include <algorithm>
#include <cmath>

namespace measdual {

std::optional<double> PiecewiseFunction::constant_value() const {
  if (pieces_.empty()) return std::nullopt;
  std::optional<double> common;
  for (const auto& e : pieces_) {
    if (!e.is_constant()) return std::nullopt;
    const std::vector<double> origin(e.arity(), 0.0);
    const auto v = e.evaluate(origin);
    if (!v) return std::nullopt;
    if (common && *common != *v) return std::nullopt;
    common = *v;
  }
  return common;
}

namespace {

Status check_function(const PiecewiseFunction& f, std::size_t boxes,
                      std::size_t dim, const std::string& what) {
  if (f.size() != boxes) {
    return make_error(ErrorCode::kInvalidArgument,
                      what + " has " + std::to_string(f.size()) +
                          " pieces for " + std::to_string(boxes) + " boxes");
  }
  for (const auto& e : f.pieces()) {
    if (e.arity() != dim) {
      return make_error(ErrorCode::kArity,
                        what + " piece '" + e.source() + "' has arity " +
                            std::to_string(e.arity()) + ", domain has " +
                            std::to_string(dim));
    }
  }
  return {};
}

}  // namespace

Result<MomentProblem> MomentProblem::make(
    Partition domain, Box hull, PiecewiseFunction objective,
    std::vector<MomentConstraint> inequalities,
    std::vector<MomentConstraint> equalities, std::string name) {
  if (inequalities.empty() && equalities.empty()) {
    return make_error(ErrorCode::kInvalidArgument,
                      "a moment problem needs at least one constraint");
  }
  auto report = validate_partition(domain, hull);
  if (!report) return report.error();
  if (!report->valid()) {
    std::string msg;
    for (const auto& d : report->diagnostics()) {
      if (!msg.empty()) msg += "; ";
      msg += d;
    }
    return make_error(ErrorCode::kPartition, msg);
  }
  const std::size_t k = domain.boxes.size();
  const std::size_t n = hull.dim();
  if (auto st = check_function(objective, k, n, "objective"); !st) {
    return st.error();
  }
  for (std::size_t s = 0; s < inequalities.size(); ++s) {
    const std::string what = "inequality " + std::to_string(s + 1);
    if (auto st = check_function(inequalities[s].function, k, n, what); !st) {
      return st.error();
    }
    if (!std::isfinite(inequalities[s].bound)) {
      return make_error(ErrorCode::kInvalidArgument, what + " bound is not finite");
    }
  }
  for (std::size_t t = 0; t < equalities.size(); ++t) {
    const std::string what = "equality " + std::to_string(t + 1);
    if (auto st = check_function(equalities[t].function, k, n, what); !st) {
      return st.error();
    }
    if (!std::isfinite(equalities[t].bound)) {
      return make_error(ErrorCode::kInvalidArgument, what + " bound is not finite");
    }
  }
  MomentProblem mp(std::move(domain), std::move(hull));
  mp.name_ = std::move(name);
  mp.objective_ = std::move(objective);
  mp.ineq_ = std::move(inequalities);
  mp.eq_ = std::move(equalities);
  return mp;
}

std::optional<double> MomentProblem::mass_bound() const {
  std::optional<double> best;
  auto consider = [&](const MomentConstraint& c) {
    const auto v = c.function.constant_value();
    if (!v || *v <= 0.0) return;
    const double m = std::max(0.0, c.bound / *v);
    if (!best || m < *best) best = m;
  };
  for (const auto& c : ineq_) consider(c);
  for (const auto& c : eq_) consider(c);
  return best;
}

double AtomicMeasure::mass() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.weight;
  return m;
}

Result<FunctionValues> evaluate_all(const MomentProblem& mp, std::size_t box,
                                    std::span<const double> x) {
  FunctionValues v;
  auto h = mp.objective().evaluate(box, x);
  if (!h) return h.error();
  v.h = *h;
  v.phi.reserve(mp.num_inequalities());
  for (const auto& c : mp.inequalities()) {
    auto r = c.function.evaluate(box, x);
    if (!r) return r.error();
    v.phi.push_back(*r);
  }
  v.psi.reserve(mp.num_equalities());
  for (const auto& c : mp.equalities()) {
    auto r = c.function.evaluate(box, x);
    if (!r) return r.error();
    v.psi.push_back(*r);
  }
  return v;
}

double slack(const FunctionValues& v, const DualPoint& d) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.phi.size(); ++i) s += d.y[i] * v.phi[i];
  for (std::size_t i = 0; i < v.psi.size(); ++i) s += d.z[i] * v.psi[i];
  return s - v.h;
}

Result<double> slack(const MomentProblem& mp, const DualPoint& d,
                     std::size_t box, std::span<const double> x) {
  auto v = evaluate_all(mp, box, x);
  if (!v) return v.error();
  return slack(*v, d);
}

double dual_objective(const MomentProblem& mp, const DualPoint& d) {
  double v = 0.0;
  for (std::size_t s = 0; s < mp.num_inequalities(); ++s) {
    v += mp.inequalities()[s].bound * d.y[s];
  }
  for (std::size_t t = 0; t < mp.num_equalities(); ++t) {
    v += mp.equalities()[t].bound * d.z[t];
  }
  return v;
}

}  // namespace measdual
