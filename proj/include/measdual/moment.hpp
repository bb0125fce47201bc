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

// Moment problems over nonnegative measures on a box-partitioned domain:
//
//   sup  int h dF
//   s.t. int phi_s dF <= a_s   (s = 1..M)
//        int psi_t dF  = b_t   (t = 1..N)
//        F >= 0
//
// and the matching semi-infinite dual
//
//   inf  sum a_s y_s + sum b_t z_t
//   s.t. sum y_s phi_s(x) + sum z_t psi_t(x) - h(x) >= 0  for all x,  y >= 0.

#ifndef MEASDUAL_MOMENT_HPP_
#define MEASDUAL_MOMENT_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "measdual/expr.hpp"
#include "measdual/geometry.hpp"
#include "measdual/result.hpp"

namespace measdual {

// One expression per partition box. Each piece is evaluated on the closure of
// its own box, so a point on a shared face has one value per adjacent box.
class PiecewiseFunction {
 public:
  PiecewiseFunction() = default;
  explicit PiecewiseFunction(std::vector<Expression> pieces)
      : pieces_(std::move(pieces)) {}

  std::size_t size() const { return pieces_.size(); }
  const Expression& piece(std::size_t box) const { return pieces_[box]; }
  const std::vector<Expression>& pieces() const { return pieces_; }

  Result<double> evaluate(std::size_t box, std::span<const double> x) const {
    return pieces_[box].evaluate(x);
  }

  // The common value when every piece is the same constant.
  std::optional<double> constant_value() const;

 private:
  std::vector<Expression> pieces_;
};

struct MomentConstraint {
  PiecewiseFunction function;
  double bound = 0.0;
};

class MomentProblem {
 public:
  static Result<MomentProblem> make(Partition domain, Box hull,
                                    PiecewiseFunction objective,
                                    std::vector<MomentConstraint> inequalities,
                                    std::vector<MomentConstraint> equalities,
                                    std::string name = {});

  const std::string& name() const { return name_; }
  const Partition& domain() const { return domain_; }
  const Box& hull() const { return hull_; }
  const PiecewiseFunction& objective() const { return objective_; }
  const std::vector<MomentConstraint>& inequalities() const { return ineq_; }
  const std::vector<MomentConstraint>& equalities() const { return eq_; }

  std::size_t dim() const { return hull_.dim(); }
  std::size_t num_boxes() const { return domain_.boxes.size(); }
  std::size_t num_inequalities() const { return ineq_.size(); }
  std::size_t num_equalities() const { return eq_.size(); }
  // Multipliers: y (inequalities) followed by z (equalities).
  std::size_t num_multipliers() const { return ineq_.size() + eq_.size(); }

  // Upper bound on the total mass implied by a constraint whose function is
  // a positive constant on every box, if there is one.
  std::optional<double> mass_bound() const;

 private:
  MomentProblem(Partition domain, Box hull)
      : domain_(std::move(domain)), hull_(std::move(hull)) {}

  std::string name_;
  Partition domain_;
  Box hull_;
  PiecewiseFunction objective_;
  std::vector<MomentConstraint> ineq_;
  std::vector<MomentConstraint> eq_;
};

// A point tagged with the box whose closure it was sampled from.
struct SupportPoint {
  std::vector<double> point;
  std::size_t box = 0;
};

struct Atom {
  std::vector<double> point;
  std::size_t box = 0;
  double weight = 0.0;
};

struct AtomicMeasure {
  std::vector<Atom> atoms;
  double mass() const;
};

struct DualPoint {
  std::vector<double> y;  // >= 0, one per inequality
  std::vector<double> z;  // free, one per equality
};

// h, phi_1..phi_M, psi_1..psi_N at one point.
struct FunctionValues {
  double h = 0.0;
  std::vector<double> phi;
  std::vector<double> psi;
};

Result<FunctionValues> evaluate_all(const MomentProblem& mp, std::size_t box,
                                    std::span<const double> x);

// sum y_s phi_s(x) + sum z_t psi_t(x) - h(x).
double slack(const FunctionValues& v, const DualPoint& d);
Result<double> slack(const MomentProblem& mp, const DualPoint& d,
                     std::size_t box, std::span<const double> x);

double dual_objective(const MomentProblem& mp, const DualPoint& d);

}  // namespace measdual

#endif  // MEASDUAL_MOMENT_HPP_
