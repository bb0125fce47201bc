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

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "measdual/expr.hpp"

using measdual::ErrorCode;
using measdual::Expression;
using measdual::parse_expression;

namespace {

double eval(const std::string& src, std::vector<double> x, std::size_t arity = 1) {
  auto e = parse_expression(src, arity);
  REQUIRE_MESSAGE(e.ok(), src);
  auto v = e->evaluate(x);
  REQUIRE_MESSAGE(v.ok(), src);
  return *v;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

// Random expression text over x1..x3 drawn from the whole grammar.
std::string random_source(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 12);
  std::uniform_real_distribution<double> lit(-3.0, 3.0);
  std::uniform_int_distribution<int> var(1, 3);
  switch (pick(rng)) {
    case 0: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.6g", std::fabs(lit(rng)));
      return buf;
    }
    case 1:
    case 2: return "x" + std::to_string(var(rng));
    case 3: return "(" + random_source(rng, depth - 1) + " + " + random_source(rng, depth - 1) + ")";
    case 4: return random_source(rng, depth - 1) + " - " + random_source(rng, depth - 1);
    case 5: return random_source(rng, depth - 1) + " * " + random_source(rng, depth - 1);
    case 6: return "(" + random_source(rng, depth - 1) + ") / (" + random_source(rng, depth - 1) + ")";
    case 7: return "-(" + random_source(rng, depth - 1) + ")";
    case 8: return "(" + random_source(rng, depth - 1) + ")^2";
    case 9: return "min(" + random_source(rng, depth - 1) + ", " + random_source(rng, depth - 1) + ")";
    case 10: return "max(" + random_source(rng, depth - 1) + "," + random_source(rng, depth - 1) + ")";
    case 11: return "exp(" + random_source(rng, depth - 1) + " / 10)";
    default: return "sqrt(abs(" + random_source(rng, depth - 1) + "))";
  }
}

}  // namespace

TEST_CASE("parse and evaluate basic forms") {
  CHECK(eval("x1^2 + 1", {2}) == 5.0);
  CHECK(eval("max(x1-1,0)", {3}) == 2.0);
  CHECK(eval("max(x1-1,0)", {0.5}) == 0.0);
  CHECK(eval("x1*x2", {0.5, 4}, 2) == 2.0);
  CHECK(eval("min(x1, 1-x1)", {0.25}) == 0.25);
  CHECK(eval("abs(-3) + exp(0) + log(1) + sqrt(16)", {0}) == 8.0);
  CHECK(eval("1.5e1 + .5 + 2E-1", {0}) == doctest::Approx(15.7));
}

TEST_CASE("precedence and associativity") {
  CHECK(eval("2+3*4", {0}) == 14.0);
  CHECK(eval("2^3^2", {0}) == 512.0);
  CHECK(eval("-2^2", {0}) == -4.0);
  CHECK(eval("(-2)^2", {0}) == 4.0);
  CHECK(eval("8/4/2", {0}) == 1.0);
  CHECK(eval("10-4-3", {0}) == 3.0);
  CHECK(eval("2^-1", {0}) == 0.5);
  CHECK(eval("-x1*3", {2}) == -6.0);
}

TEST_CASE("parse errors carry kind and offset") {
  auto e = parse_expression("x1 +", 1);
  REQUIRE_FALSE(e.ok());
  CHECK(e.error().code == ErrorCode::kSyntax);
  REQUIRE(e.error().offset.has_value());
  CHECK(*e.error().offset == 4);

  auto empty = parse_expression("   ", 1);
  REQUIRE_FALSE(empty.ok());
  CHECK(empty.error().code == ErrorCode::kEmptyInput);

  auto unknown = parse_expression("sin(x1)", 1);
  REQUIRE_FALSE(unknown.ok());
  CHECK(unknown.error().code == ErrorCode::kUnknownFunction);
  CHECK(*unknown.error().offset == 0);

  auto arity = parse_expression("x1 + x3", 2);
  REQUIRE_FALSE(arity.ok());
  CHECK(arity.error().code == ErrorCode::kArity);
  CHECK(*arity.error().offset == 5);

  auto zero = parse_expression("x0", 2);
  REQUIRE_FALSE(zero.ok());
  CHECK(zero.error().code == ErrorCode::kArity);

  CHECK_FALSE(parse_expression("min(x1)", 1).ok());
  CHECK_FALSE(parse_expression("abs(x1, 2)", 1).ok());
  CHECK_FALSE(parse_expression("(x1", 1).ok());
  CHECK_FALSE(parse_expression("x1 x1", 1).ok());
  CHECK_FALSE(parse_expression("y1", 1).ok());
  CHECK_FALSE(parse_expression("--x1", 1).ok());
}

TEST_CASE("domain errors are values") {
  auto log0 = parse_expression("log(x1)", 1);
  REQUIRE(log0.ok());
  auto v = log0->evaluate(std::vector<double>{0.0});
  REQUIRE_FALSE(v.ok());
  CHECK(v.error().code == ErrorCode::kDomain);
  CHECK(v.error().message.find("log") != std::string::npos);

  auto sq = parse_expression("1 + sqrt(x1 - 2)", 1);
  auto s = sq->evaluate(std::vector<double>{1.0});
  REQUIRE_FALSE(s.ok());
  CHECK(s.error().message.find("sqrt") != std::string::npos);

  auto div = parse_expression("1/(x1-1)", 1);
  CHECK_FALSE(div->evaluate(std::vector<double>{1.0}).ok());

  auto over = parse_expression("exp(x1)", 1);
  CHECK_FALSE(over->evaluate(std::vector<double>{1000.0}).ok());

  auto mismatch = parse_expression("x1", 1);
  auto m = mismatch->evaluate(std::vector<double>{1.0, 2.0});
  REQUIRE_FALSE(m.ok());
  CHECK(m.error().code == ErrorCode::kDimensionMismatch);
}

TEST_CASE("free variables") {
  CHECK(parse_expression("x1 + x3", 3)->free_variables() == std::set<std::size_t>{1, 3});
  CHECK(parse_expression("2.5", 1)->free_variables().empty());
  CHECK(parse_expression("max(x2, x2)", 2)->free_variables() == std::set<std::size_t>{2});
  CHECK(parse_expression("2.5", 1)->is_constant());
}

TEST_CASE("variable groups concatenate") {
  const std::vector<measdual::VariableGroup> groups{{'y', 2}, {'x', 1}};
  auto e = parse_expression("y2 * x1 + y1", groups);
  REQUIRE(e.ok());
  CHECK(e->arity() == 3);
  CHECK(*e->evaluate(std::vector<double>{1.0, 2.0, 3.0}) == 7.0);
  CHECK(e->free_variables() == std::set<std::size_t>{1, 2, 3});
  CHECK_FALSE(parse_expression("z1", groups).ok());
}

TEST_CASE("print round trip is bit exact on random expressions") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  int compared = 0;
  for (int t = 0; t < 500; ++t) {
    const std::string src = random_source(rng, 4);
    auto e = parse_expression(src, 3);
    REQUIRE_MESSAGE(e.ok(), src);
    const std::string printed = e->print();
    auto back = parse_expression(printed, 3);
    REQUIRE_MESSAGE(back.ok(), printed);
    CHECK(back->print() == printed);
    for (int k = 0; k < 20; ++k) {
      const std::vector<double> x{coord(rng), coord(rng), coord(rng)};
      auto a = e->evaluate(x);
      auto b = back->evaluate(x);
      REQUIRE(a.ok() == b.ok());
      if (a.ok()) {
        CHECK_MESSAGE(same_bits(*a, *b), printed);
        ++compared;
      }
    }
  }
  CHECK(compared > 5000);
}

TEST_CASE("evaluation is pure over a million points") {
  auto e = parse_expression("max(x1*x2 - 1, 0) + sqrt(abs(x1)) - exp(x2/3)", 2);
  REQUIRE(e.ok());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  std::vector<double> pts(2'000'000);
  for (auto& p : pts) p = coord(rng);
  double first = 0.0, second = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pts.size(); i += 2) {
      acc += *e->evaluate(std::span<const double>(pts.data() + i, 2));
    }
    (pass == 0 ? first : second) = acc;
  }
  CHECK(same_bits(first, second));
}

TEST_CASE("deep expressions evaluate beyond the inline stack") {
  std::string src = "x1";
  for (int i = 0; i < 200; ++i) src = "(1 + " + src + ")";
  // Right-nested sums need a deep operand stack.
  std::string right = "x1";
  for (int i = 0; i < 200; ++i) right = "x1 + (" + right + ")";
  CHECK(eval(src, {1.0}) == 201.0);
  CHECK(eval(right, {1.0}) == 201.0);
}

TEST_CASE("affine substitution") {
  auto e = parse_expression("x1", 1);
  const std::vector<double> scale{2.0}, shift{2.0};
  auto s = measdual::substitute_affine(*e, scale, shift);
  REQUIRE(s.ok());
  CHECK(*s->evaluate(std::vector<double>{0.5}) == 3.0);
  const std::vector<double> one{1.0}, zero{0.0};
  auto same = measdual::substitute_affine(*e, one, zero);
  CHECK(same->source() == e->source());
  auto c = measdual::constant_expression(2.5, {{'x', 2}});
  CHECK(c.arity() == 2);
  CHECK(*c.evaluate(std::vector<double>{9.0, 9.0}) == 2.5);
}
