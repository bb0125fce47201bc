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

#include "measdual/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <utility>

namespace measdual {

namespace {

struct Instr {
  Op op;
  double value;
  std::size_t slot;
  int node;
};

constexpr std::size_t kInlineStack = 64;

}  // namespace

struct Expression::Impl {
  std::vector<Node> nodes;
  int root = -1;
  std::vector<VariableGroup> groups;
  std::size_t arity = 0;
  std::string source;
  std::vector<Instr> program;
  std::size_t max_depth = 0;
};

namespace {

const char* function_name(Op op) {
  switch (op) {
    case Op::kMin: return "min";
    case Op::kMax: return "max";
    case Op::kAbs: return "abs";
    case Op::kExp: return "exp";
    case Op::kLog: return "log";
    case Op::kSqrt: return "sqrt";
    default: return nullptr;
  }
}

char binary_symbol(Op op) {
  switch (op) {
    case Op::kAdd: return '+';
    case Op::kSub: return '-';
    case Op::kMul: return '*';
    case Op::kDiv: return '/';
    case Op::kPow: return '^';
    default: return '?';
  }
}

std::string format_number(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

std::string variable_name(const std::vector<VariableGroup>& groups,
                          std::size_t slot) {
  std::size_t base = 0;
  for (const auto& g : groups) {
    if (slot < base + g.count) {
      return std::string(1, g.prefix) + std::to_string(slot - base + 1);
    }
    base += g.count;
  }
  return "?" + std::to_string(slot + 1);
}

void print_node(const std::vector<Expression::Node>& nodes,
                const std::vector<VariableGroup>& groups, int id,
                std::string& out) {
  const auto& n = nodes[static_cast<std::size_t>(id)];
  switch (n.op) {
    case Op::kConst:
      if (std::signbit(n.value)) {
        out += "(-" + format_number(-n.value) + ")";
      } else {
        out += format_number(n.value);
      }
      return;
    case Op::kVar:
      out += variable_name(groups, n.slot);
      return;
    case Op::kNeg:
      out += "(-";
      print_node(nodes, groups, n.lhs, out);
      out += ")";
      return;
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul:
    case Op::kDiv:
    case Op::kPow:
      out += "(";
      print_node(nodes, groups, n.lhs, out);
      out += ' ';
      out += binary_symbol(n.op);
      out += ' ';
      print_node(nodes, groups, n.rhs, out);
      out += ")";
      return;
    default:
      out += function_name(n.op);
      out += "(";
      print_node(nodes, groups, n.lhs, out);
      if (n.rhs >= 0) {
        out += ", ";
        print_node(nodes, groups, n.rhs, out);
      }
      out += ")";
      return;
  }
}

// Post-order emission; returns the stack depth needed for the subtree.
std::size_t emit(const std::vector<Expression::Node>& nodes, int id,
                 std::vector<Instr>& program) {
  const auto& n = nodes[static_cast<std::size_t>(id)];
  std::size_t depth = 1;
  if (n.lhs >= 0) {
    const std::size_t left = emit(nodes, n.lhs, program);
    depth = left;
    if (n.rhs >= 0) {
      const std::size_t right = emit(nodes, n.rhs, program);
      depth = std::max(left, right + 1);
    }
  }
  program.push_back(Instr{n.op, n.value, n.slot, id});
  return depth;
}

// --- parser -----------------------------------------------------------------

class Parser {
 public:
  Parser(std::string_view src, const std::vector<VariableGroup>& groups)
      : src_(src), groups_(groups) {}

  Result<int> parse_all() {
    skip_ws();
    if (pos_ >= src_.size()) {
      return Error{ErrorCode::kEmptyInput, "expression is empty", 0};
    }
    auto root = parse_expr();
    if (!root) return root;
    skip_ws();
    if (pos_ < src_.size()) {
      return syntax("unexpected '" + std::string(1, src_[pos_]) + "'");
    }
    return root;
  }

  std::vector<Expression::Node>& nodes() { return nodes_; }

 private:
  Error syntax(std::string msg) const {
    return Error{ErrorCode::kSyntax, std::move(msg), pos_};
  }

  void skip_ws() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
            src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int add(Expression::Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size() - 1);
  }

  Result<int> parse_expr() {
    auto lhs = parse_term();
    if (!lhs) return lhs;
    int acc = *lhs;
    for (;;) {
      Op op;
      if (accept('+')) {
        op = Op::kAdd;
      } else if (accept('-')) {
        op = Op::kSub;
      } else {
        return acc;
      }
      auto rhs = parse_term();
      if (!rhs) return rhs;
      acc = add({op, 0.0, 0, acc, *rhs});
    }
  }

  Result<int> parse_term() {
    auto lhs = parse_factor();
    if (!lhs) return lhs;
    int acc = *lhs;
    for (;;) {
      Op op;
      if (accept('*')) {
        op = Op::kMul;
      } else if (accept('/')) {
        op = Op::kDiv;
      } else {
        return acc;
      }
      auto rhs = parse_factor();
      if (!rhs) return rhs;
      acc = add({op, 0.0, 0, acc, *rhs});
    }
  }

  Result<int> parse_factor() {
    const bool negate = accept('-');
    auto inner = parse_power();
    if (!inner || !negate) return inner;
    return add({Op::kNeg, 0.0, 0, *inner, -1});
  }

  Result<int> parse_power() {
    auto base = parse_atom();
    if (!base) return base;
    if (!accept('^')) return base;
    auto exponent = parse_factor();
    if (!exponent) return exponent;
    return add({Op::kPow, 0.0, 0, *base, *exponent});
  }

  Result<int> parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) return syntax("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = parse_expr();
      if (!inner) return inner;
      if (!accept(')')) return syntax("expected ')'");
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return parse_identifier();
    }
    return syntax("unexpected '" + std::string(1, c) + "'");
  }

  Result<int> parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) {
      pos_ = start;
      return syntax("malformed number");
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
        ++pos_;
      }
      if (digits() == 0) {
        pos_ = mark;
        return syntax("malformed exponent");
      }
    }
    double value = 0.0;
    const auto res =
        std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_ ||
        !std::isfinite(value)) {
      const std::size_t end = pos_;
      pos_ = start;
      return syntax("number out of range: '" +
                    std::string(src_.substr(start, end - start)) + "'");
    }
    return add({Op::kConst, value, 0, -1, -1});
  }

  Result<int> parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = src_.substr(start, pos_ - start);
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') return parse_call(name, start);
    return variable(name, start);
  }

  Result<int> parse_call(std::string_view name, std::size_t at) {
    Op op;
    std::size_t expected = 1;
    if (name == "min") {
      op = Op::kMin;
      expected = 2;
    } else if (name == "max") {
      op = Op::kMax;
      expected = 2;
    } else if (name == "abs") {
      op = Op::kAbs;
    } else if (name == "exp") {
      op = Op::kExp;
    } else if (name == "log") {
      op = Op::kLog;
    } else if (name == "sqrt") {
      op = Op::kSqrt;
    } else {
      return Error{ErrorCode::kUnknownFunction,
                   "unknown function '" + std::string(name) + "'", at};
    }
    ++pos_;  // '('
    std::vector<int> args;
    do {
      auto arg = parse_expr();
      if (!arg) return arg;
      args.push_back(*arg);
    } while (accept(','));
    if (!accept(')')) return syntax("expected ')' or ','");
    if (args.size() != expected) {
      return Error{ErrorCode::kSyntax,
                   std::string(name) + " takes " + std::to_string(expected) +
                       " argument(s), got " + std::to_string(args.size()),
                   at};
    }
    return add({op, 0.0, 0, args[0], expected == 2 ? args[1] : -1});
  }

  Result<int> variable(std::string_view name, std::size_t at) {
    std::size_t base = 0;
    for (const auto& g : groups_) {
      if (name.size() >= 2 && name[0] == g.prefix) {
        std::size_t index = 0;
        const auto res =
            std::from_chars(name.data() + 1, name.data() + name.size(), index);
        if (res.ec == std::errc() && res.ptr == name.data() + name.size()) {
          if (index < 1 || index > g.count) {
            return Error{ErrorCode::kArity,
                         "variable '" + std::string(name) +
                             "' outside declared arity " +
                             std::to_string(g.count),
                         at};
          }
          return add({Op::kVar, 0.0, base + index - 1, -1, -1});
        }
      }
      base += g.count;
    }
    return Error{ErrorCode::kUnknownIdentifier,
                 "unknown identifier '" + std::string(name) + "'", at};
  }

  std::string_view src_;
  const std::vector<VariableGroup>& groups_;
  std::size_t pos_ = 0;
  std::vector<Expression::Node> nodes_;
};

std::string subexpression(const std::vector<Expression::Node>& nodes,
                          const std::vector<VariableGroup>& groups, int node) {
  std::string out;
  print_node(nodes, groups, node, out);
  return out;
}

}  // namespace

std::size_t Expression::arity() const { return impl_->arity; }
const std::vector<VariableGroup>& Expression::groups() const {
  return impl_->groups;
}
const std::string& Expression::source() const { return impl_->source; }
const std::vector<Expression::Node>& Expression::nodes() const {
  return impl_->nodes;
}
int Expression::root() const { return impl_->root; }

Expression Expression::from_nodes(std::vector<Node> nodes, int root,
                                  std::vector<VariableGroup> groups,
                                  std::string source) {
  auto impl = std::make_shared<Impl>();
  impl->nodes = std::move(nodes);
  impl->root = root;
  impl->groups = std::move(groups);
  for (const auto& g : impl->groups) impl->arity += g.count;
  impl->max_depth = emit(impl->nodes, impl->root, impl->program);
  if (source.empty()) {
    print_node(impl->nodes, impl->groups, impl->root, source);
  }
  impl->source = std::move(source);
  Expression e;
  e.impl_ = std::move(impl);
  return e;
}

Result<double> Expression::evaluate(std::span<const double> point) const {
  const Impl& impl = *impl_;
  if (point.size() != impl.arity) {
    return make_error(ErrorCode::kDimensionMismatch,
                      "point has " + std::to_string(point.size()) +
                          " coordinates, expression expects " +
                          std::to_string(impl.arity));
  }
  std::array<double, kInlineStack> inline_stack;
  std::vector<double> heap_stack;
  double* stack = inline_stack.data();
  if (impl.max_depth > kInlineStack) {
    heap_stack.resize(impl.max_depth);
    stack = heap_stack.data();
  }
  std::size_t top = 0;
  auto fail = [&](int node, const char* what) {
    return Error{ErrorCode::kDomain,
                 std::string(what) + " in '" + subexpression(impl.nodes, impl.groups, node) + "'",
                 std::nullopt};
  };
  for (const Instr& in : impl.program) {
    double r;
    switch (in.op) {
      case Op::kConst:
        stack[top++] = in.value;
        continue;
      case Op::kVar:
        stack[top++] = point[in.slot];
        continue;
      case Op::kNeg:
        stack[top - 1] = -stack[top - 1];
        continue;
      case Op::kAbs:
        stack[top - 1] = std::fabs(stack[top - 1]);
        continue;
      case Op::kExp:
        r = std::exp(stack[top - 1]);
        if (!std::isfinite(r)) return fail(in.node, "overflow");
        stack[top - 1] = r;
        continue;
      case Op::kLog:
        if (!(stack[top - 1] > 0.0)) {
          return fail(in.node, "log of non-positive argument");
        }
        stack[top - 1] = std::log(stack[top - 1]);
        continue;
      case Op::kSqrt:
        if (stack[top - 1] < 0.0) {
          return fail(in.node, "sqrt of negative argument");
        }
        stack[top - 1] = std::sqrt(stack[top - 1]);
        continue;
      default:
        break;
    }
    const double b = stack[--top];
    const double a = stack[top - 1];
    switch (in.op) {
      case Op::kAdd: r = a + b; break;
      case Op::kSub: r = a - b; break;
      case Op::kMul: r = a * b; break;
      case Op::kDiv:
        if (b == 0.0) return fail(in.node, "division by zero");
        r = a / b;
        break;
      case Op::kPow: r = std::pow(a, b); break;
      case Op::kMin: r = std::min(a, b); break;
      case Op::kMax: r = std::max(a, b); break;
      default: r = 0.0; break;
    }
    if (!std::isfinite(r)) return fail(in.node, "non-finite result");
    stack[top - 1] = r;
  }
  return stack[0];
}

std::string Expression::print() const {
  std::string out;
  print_node(impl_->nodes, impl_->groups, impl_->root, out);
  return out;
}

std::set<std::size_t> Expression::free_variables() const {
  std::set<std::size_t> out;
  for (const auto& n : impl_->nodes) {
    if (n.op == Op::kVar) out.insert(n.slot + 1);
  }
  return out;
}

Result<Expression> parse_expression(std::string_view source,
                                    std::span<const VariableGroup> groups) {
  std::vector<VariableGroup> layout(groups.begin(), groups.end());
  Parser parser(source, layout);
  auto root = parser.parse_all();
  if (!root) return root.error();
  return Expression::from_nodes(std::move(parser.nodes()), *root,
                                std::move(layout), std::string(source));
}

Result<Expression> parse_expression(std::string_view source,
                                    std::size_t arity) {
  const VariableGroup g{'x', arity};
  return parse_expression(source, std::span<const VariableGroup>(&g, 1));
}

Result<double> evaluate(const Expression& e, std::span<const double> point) {
  return e.evaluate(point);
}

std::set<std::size_t> free_variables(const Expression& e) {
  return e.free_variables();
}

Result<Expression> substitute_affine(const Expression& e,
                                     std::span<const double> scale,
                                     std::span<const double> shift) {
  if (scale.size() != e.arity() || shift.size() != e.arity()) {
    return make_error(ErrorCode::kDimensionMismatch,
                      "affine map dimension does not match expression arity");
  }
  bool identity = true;
  for (std::size_t j = 0; j < scale.size(); ++j) {
    if (!std::isfinite(scale[j]) || !std::isfinite(shift[j])) {
      return make_error(ErrorCode::kInvalidArgument,
                        "affine map must be finite");
    }
    identity = identity && scale[j] == 1.0 && shift[j] == 0.0;
  }
  if (identity) return e;
  std::vector<Expression::Node> nodes = e.nodes();
  const std::size_t original = nodes.size();
  for (std::size_t i = 0; i < original; ++i) {
    if (nodes[i].op != Op::kVar) continue;
    const std::size_t slot = nodes[i].slot;
    const int var = static_cast<int>(nodes.size());
    nodes.push_back({Op::kVar, 0.0, slot, -1, -1});
    const int s = static_cast<int>(nodes.size());
    nodes.push_back({Op::kConst, scale[slot], 0, -1, -1});
    const int mul = static_cast<int>(nodes.size());
    nodes.push_back({Op::kMul, 0.0, 0, s, var});
    const int o = static_cast<int>(nodes.size());
    nodes.push_back({Op::kConst, shift[slot], 0, -1, -1});
    nodes[i] = {Op::kAdd, 0.0, 0, o, mul};
  }
  return Expression::from_nodes(std::move(nodes), e.root(), e.groups(), "");
}

Expression constant_expression(double value,
                               std::vector<VariableGroup> groups) {
  return Expression::from_nodes({{Op::kConst, value, 0, -1, -1}}, 0,
                                std::move(groups), "");
}

}  // namespace measdual
