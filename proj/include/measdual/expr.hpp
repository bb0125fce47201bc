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

// Scalar expressions used to write every problem function.
//
// Grammar (whitespace is insignificant):
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := ['-'] power
//   power  := atom ['^' factor]
//   atom   := number | variable | '(' expr ')' | ident '(' expr {',' expr} ')'
//
// '^' is right-associative and binds tighter than unary minus, so "-2^2" is
// -4 and "2^3^2" is 512. Numbers follow the usual floating-point syntax,
// exponent form included. Variables are a one-letter prefix followed by a
// 1-based index ("x1", "y2"). Functions: min and max (two arguments), abs,
// exp, log, sqrt (one argument).
//
// An Expression is immutable once parsed. Copies share the same compiled
// program, and evaluate() may be called concurrently from any number of
// threads.

#ifndef MEASDUAL_EXPR_HPP_
#define MEASDUAL_EXPR_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "measdual/result.hpp"

namespace measdual {

// A block of consecutive variables sharing a prefix. Points passed to
// evaluate() are the concatenation of all groups in declaration order, so
// with groups {y:2, x:1} the point is (y1, y2, x1).
struct VariableGroup {
  char prefix = 'x';
  std::size_t count = 0;
};

enum class Op : std::uint8_t {
  kConst,
  kVar,
  kNeg,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPow,
  kMin,
  kMax,
  kAbs,
  kExp,
  kLog,
  kSqrt,
};

class Expression {
 public:
  struct Node {
    Op op = Op::kConst;
    double value = 0.0;      // kConst
    std::size_t slot = 0;    // kVar, 0-based flat index into the point
    int lhs = -1;
    int rhs = -1;
  };

  // Total number of variable slots (sum of group counts).
  std::size_t arity() const;
  const std::vector<VariableGroup>& groups() const;

  // Text this expression was parsed from; for synthesized expressions, the
  // canonical printed form.
  const std::string& source() const;

  Result<double> evaluate(std::span<const double> point) const;

  // Fully parenthesized text that parses back to an expression with
  // bit-identical values.
  std::string print() const;

  // 1-based flat slot indices of all variables that occur.
  std::set<std::size_t> free_variables() const;
  bool is_constant() const { return free_variables().empty(); }

  const std::vector<Node>& nodes() const;
  int root() const;

  // Builds from an explicit node list. Used by the parser and by rewriting
  // helpers; `root` indexes into `nodes`.
  static Expression from_nodes(std::vector<Node> nodes, int root,
                               std::vector<VariableGroup> groups,
                               std::string source);

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

Result<Expression> parse_expression(std::string_view source,
                                    std::span<const VariableGroup> groups);

// Single group of `arity` variables named x1..xn.
Result<Expression> parse_expression(std::string_view source,
                                    std::size_t arity);

// Convenience forms mirroring the member functions.
Result<double> evaluate(const Expression& e, std::span<const double> point);
std::set<std::size_t> free_variables(const Expression& e);

// Replaces every variable x_j by shift[j] + scale[j] * x_j. When every scale
// is 1 and every shift is 0 the expression is returned unchanged.
Result<Expression> substitute_affine(const Expression& e,
                                     std::span<const double> scale,
                                     std::span<const double> shift);

// Constant expression over the given variable layout.
Expression constant_expression(double value,
                               std::vector<VariableGroup> groups);

}  // namespace measdual

#endif  // MEASDUAL_EXPR_HPP_
