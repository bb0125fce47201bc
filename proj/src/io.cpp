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

#include "measdual/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace measdual {

using nlohmann::json;

namespace {

Error at(const std::string& path, Error e) {
  e.message = path + ": " + e.message;
  return e;
}

Error schema(const std::string& path, const std::string& msg) {
  return make_error(ErrorCode::kSchema, path + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

Status check_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) return schema(path.empty() ? "$" : path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) return schema(join(path, key), "unknown field");
  }
  return {};
}

Result<double> number_at(const json& obj, const std::string& path,
                         const char* key) {
  const std::string p = join(path, key);
  if (!obj.contains(key)) return schema(p, "missing field");
  const json& v = obj.at(key);
  if (!v.is_number()) return schema(p, "expected a number");
  return v.get<double>();
}

Result<std::size_t> count_at(const json& obj, const std::string& path,
                             const char* key) {
  const std::string p = join(path, key);
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    return schema(p, "expected a positive integer");
  }
  return static_cast<std::size_t>(v.get<long long>());
}

Result<std::string> string_at(const json& v, const std::string& path) {
  if (!v.is_string()) return schema(path, "expected a string");
  return v.get<std::string>();
}

Result<std::vector<double>> vector_at(const json& v, const std::string& path) {
  if (!v.is_array()) return schema(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) return schema(index(path, i), "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

Result<Box> box_at(const json& v, const std::string& path, std::size_t dim) {
  if (auto st = check_keys(v, path, {"lower", "upper"}); !st) return st.error();
  if (!v.contains("lower")) return schema(join(path, "lower"), "missing field");
  if (!v.contains("upper")) return schema(join(path, "upper"), "missing field");
  auto lo = vector_at(v.at("lower"), join(path, "lower"));
  if (!lo) return lo.error();
  auto hi = vector_at(v.at("upper"), join(path, "upper"));
  if (!hi) return hi.error();
  if (dim != 0 && (lo->size() != dim || hi->size() != dim)) {
    return schema(path, "box dimension differs from declared dimension " +
                            std::to_string(dim));
  }
  auto b = Box::make(std::move(*lo), std::move(*hi));
  if (!b) return at(path, b.error());
  return b;
}

json box_json(const Box& b) {
  return {{"lower", b.lower()}, {"upper", b.upper()}};
}

Result<Expression> expression_at(const json& v, const std::string& path,
                                 std::span<const VariableGroup> groups) {
  auto s = string_at(v, path);
  if (!s) return s.error();
  auto e = parse_expression(*s, groups);
  if (!e) return at(path, e.error());
  return e;
}

Result<PiecewiseFunction> piecewise_at(const json& v, const std::string& path,
                                       std::size_t boxes, std::size_t dim) {
  const std::vector<VariableGroup> groups{{'x', dim}};
  std::vector<Expression> pieces;
  if (v.is_string()) {
    auto e = expression_at(v, path, groups);
    if (!e) return e.error();
    pieces.assign(boxes, *e);
  } else if (v.is_array()) {
    if (v.size() != boxes) {
      return schema(path, "expected " + std::to_string(boxes) +
                              " expressions, one per box, got " +
                              std::to_string(v.size()));
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      auto e = expression_at(v[i], index(path, i), groups);
      if (!e) return e.error();
      pieces.push_back(std::move(*e));
    }
  } else {
    return schema(path, "expected an expression string or an array of them");
  }
  return PiecewiseFunction(std::move(pieces));
}

Result<std::vector<MomentConstraint>> constraints_at(const json& doc,
                                                     const char* key,
                                                     std::size_t boxes,
                                                     std::size_t dim) {
  std::vector<MomentConstraint> out;
  if (!doc.contains(key)) return out;
  const json& arr = doc.at(key);
  if (!arr.is_array()) return schema(key, "expected an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = index(key, i);
    if (auto st = check_keys(arr[i], p, {"function", "bound"}); !st) {
      return st.error();
    }
    if (!arr[i].contains("function")) return schema(join(p, "function"), "missing field");
    auto f = piecewise_at(arr[i].at("function"), join(p, "function"), boxes, dim);
    if (!f) return f.error();
    auto b = number_at(arr[i], p, "bound");
    if (!b) return b.error();
    out.push_back({std::move(*f), *b});
  }
  return out;
}

Result<ProblemFile> parse_moment(const json& doc) {
  if (auto st = check_keys(doc, "",
                           {"format_version", "kind", "name", "dimension", "hull",
                            "boxes", "objective", "inequalities", "equalities",
                            "solver"});
      !st) {
    return st.error();
  }
  std::size_t dim = 0;
  if (doc.contains("dimension")) {
    auto d = count_at(doc, "", "dimension");
    if (!d) return d.error();
    dim = *d;
  }
  if (!doc.contains("boxes")) return schema("boxes", "missing field");
  const json& jb = doc.at("boxes");
  if (!jb.is_array() || jb.empty()) return schema("boxes", "expected a nonempty array");
  Partition part;
  for (std::size_t i = 0; i < jb.size(); ++i) {
    auto b = box_at(jb[i], index("boxes", i), dim);
    if (!b) return b.error();
    if (dim == 0) dim = b->dim();
    part.boxes.push_back(std::move(*b));
  }
  std::optional<Box> hull;
  if (doc.contains("hull")) {
    auto h = box_at(doc.at("hull"), "hull", dim);
    if (!h) return h.error();
    hull = std::move(*h);
  } else {
    std::vector<double> lo = part.boxes[0].lower(), hi = part.boxes[0].upper();
    for (const auto& b : part.boxes) {
      for (std::size_t j = 0; j < dim; ++j) {
        lo[j] = std::min(lo[j], b.lower()[j]);
        hi[j] = std::max(hi[j], b.upper()[j]);
      }
    }
    auto h = Box::make(lo, hi);
    if (!h) return h.error();
    hull = std::move(*h);
  }
  const std::size_t k = part.boxes.size();
  if (!doc.contains("objective")) return schema("objective", "missing field");
  auto obj = piecewise_at(doc.at("objective"), "objective", k, dim);
  if (!obj) return obj.error();
  auto ineq = constraints_at(doc, "inequalities", k, dim);
  if (!ineq) return ineq.error();
  auto eq = constraints_at(doc, "equalities", k, dim);
  if (!eq) return eq.error();

  SolverConfig cfg;
  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    if (auto st = check_keys(s, "solver",
                             {"grid", "scan", "refine_steps", "tol", "max_iters"});
        !st) {
      return st.error();
    }
    for (auto [key, slot] : {std::pair{"grid", &cfg.grid}, {"scan", &cfg.scan},
                             {"max_iters", &cfg.max_iters}}) {
      if (!s.contains(key)) continue;
      auto v = count_at(s, "solver", key);
      if (!v) return v.error();
      *slot = *v;
    }
    if (s.contains("refine_steps")) {
      const json& v = s.at("refine_steps");
      if (!v.is_number_integer() || v.get<long long>() < 0) {
        return schema("solver.refine_steps", "expected a nonnegative integer");
      }
      cfg.refine_steps = v.get<std::size_t>();
    }
    if (s.contains("tol")) {
      auto v = number_at(s, "solver", "tol");
      if (!v) return v.error();
      if (!(*v > 0.0)) return schema("solver.tol", "expected a positive number");
      cfg.tol = *v;
    }
  }
  std::string name = doc.value("name", std::string());
  auto mp = MomentProblem::make(std::move(part), std::move(*hull), std::move(*obj),
                                std::move(*ineq), std::move(*eq), std::move(name));
  if (!mp) return mp.error();
  return ProblemFile(MomentFile{std::move(*mp), cfg});
}

Result<std::optional<KernelConstraint>> kernel_at(const json& doc,
                                                  const char* domain_key,
                                                  const char* kernel_key,
                                                  const char* bound_key,
                                                  Kernel kind,
                                                  std::size_t x_dim) {
  const bool any = doc.contains(domain_key) || doc.contains(kernel_key) ||
                   doc.contains(bound_key);
  if (!any) return std::optional<KernelConstraint>();
  for (const char* key : {domain_key, kernel_key, bound_key}) {
    if (!doc.contains(key)) {
      return schema(key, std::string("missing field (required with ") +
                             kernel_key + ")");
    }
  }
  auto dom = box_at(doc.at(domain_key), domain_key, 0);
  if (!dom) return dom.error();
  const auto groups = kernel_groups(kind, dom->dim(), x_dim);
  auto kern = expression_at(doc.at(kernel_key), kernel_key, groups);
  if (!kern) return kern.error();
  const std::vector<VariableGroup> outer{groups[0]};
  auto bound = expression_at(doc.at(bound_key), bound_key, outer);
  if (!bound) return bound.error();
  return std::optional<KernelConstraint>(
      KernelConstraint{std::move(*dom), std::move(*kern), std::move(*bound)});
}

Result<ProblemFile> parse_lp_density(const json& doc) {
  if (auto st = check_keys(doc, "",
                           {"format_version", "kind", "name", "p", "phi", "gamma",
                            "sigma", "c", "A", "a", "B", "b", "solver"});
      !st) {
    return st.error();
  }
  if (!doc.contains("phi")) return schema("phi", "missing field");
  auto phi = box_at(doc.at("phi"), "phi", 0);
  if (!phi) return phi.error();
  const std::size_t n = phi->dim();
  if (!doc.contains("c")) return schema("c", "missing field");
  const std::vector<VariableGroup> xg{{'x', n}};
  auto c = expression_at(doc.at("c"), "c", xg);
  if (!c) return c.error();
  auto ineq = kernel_at(doc, "gamma", "A", "a", Kernel::kA, n);
  if (!ineq) return ineq.error();
  auto eq = kernel_at(doc, "sigma", "B", "b", Kernel::kB, n);
  if (!eq) return eq.error();
  double p = 2.0;
  if (doc.contains("p")) {
    auto v = number_at(doc, "", "p");
    if (!v) return v.error();
    p = *v;
  }
  LpDensityConfig cfg;
  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    if (auto st = check_keys(s, "solver",
                             {"x_resolution", "y_resolution", "z_resolution",
                              "quad_resolution", "trials", "seed"});
        !st) {
      return st.error();
    }
    for (auto [key, slot] :
         {std::pair{"x_resolution", &cfg.resolution.x},
          {"y_resolution", &cfg.resolution.y}, {"z_resolution", &cfg.resolution.z},
          {"quad_resolution", &cfg.quad_resolution}, {"trials", &cfg.trials}}) {
      if (!s.contains(key)) continue;
      auto v = count_at(s, "solver", key);
      if (!v) return v.error();
      *slot = *v;
    }
    if (s.contains("seed")) {
      if (!s.at("seed").is_number_unsigned()) {
        return schema("solver.seed", "expected a nonnegative integer");
      }
      cfg.seed = s.at("seed").get<std::uint64_t>();
    }
  }
  auto pb = LpDensityProblem::make(std::move(*phi), std::move(*c), std::move(*ineq),
                                   std::move(*eq), p, doc.value("name", std::string()));
  if (!pb) return pb.error();
  return ProblemFile(LpDensityFile{std::move(*pb), cfg});
}

void write_value(const json& v, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + json(key).dump() + ": ";
        write_value(item, indent + 1, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        write_value(v[i], indent + 1, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float: {
      const double d = v.get<double>();
      if (std::isnan(d)) {
        out += "\"NaN\"";
      } else if (std::isinf(d)) {
        out += d > 0 ? "\"Infinity\"" : "\"-Infinity\"";
      } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", d);
        out += buf;
      }
      return;
    }
    default:
      out += v.dump();
  }
}

std::vector<std::string> piece_sources(const PiecewiseFunction& f) {
  std::vector<std::string> out;
  for (const auto& e : f.pieces()) out.push_back(e.source());
  return out;
}

}  // namespace

Result<ProblemFile> parse_problem(const json& doc) {
  if (!doc.is_object()) return schema("$", "expected an object");
  if (!doc.contains("format_version")) return schema("format_version", "missing field");
  if (doc.at("format_version") != kFormatVersion) {
    return schema("format_version", "unsupported version (expected \"1\")");
  }
  if (doc.contains("name") && !doc.at("name").is_string()) {
    return schema("name", "expected a string");
  }
  const std::string kind = doc.value("kind", std::string("moment"));
  if (kind == "moment") return parse_moment(doc);
  if (kind == "lp_density") return parse_lp_density(doc);
  return schema("kind", "expected \"moment\" or \"lp_density\"");
}

Result<ProblemFile> parse_problem_text(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) return make_error(ErrorCode::kSchema, "not valid JSON");
  return parse_problem(doc);
}

Result<ProblemFile> load_problem(const std::string& path) {
  auto text = read_text(path);
  if (!text) return text.error();
  return parse_problem_text(*text);
}

json problem_to_json(const ProblemFile& file) {
  json doc;
  doc["format_version"] = kFormatVersion;
  if (const auto* m = std::get_if<MomentFile>(&file)) {
    const MomentProblem& mp = m->problem;
    doc["kind"] = "moment";
    doc["name"] = mp.name();
    doc["dimension"] = mp.dim();
    doc["hull"] = box_json(mp.hull());
    doc["boxes"] = json::array();
    for (const auto& b : mp.domain().boxes) doc["boxes"].push_back(box_json(b));
    doc["objective"] = piece_sources(mp.objective());
    for (auto [key, list] : {std::pair{"inequalities", &mp.inequalities()},
                             {"equalities", &mp.equalities()}}) {
      doc[key] = json::array();
      for (const auto& c : *list) {
        doc[key].push_back({{"function", piece_sources(c.function)}, {"bound", c.bound}});
      }
    }
    doc["solver"] = {{"grid", m->config.grid},
                     {"scan", m->config.scan},
                     {"refine_steps", m->config.refine_steps},
                     {"tol", m->config.tol},
                     {"max_iters", m->config.max_iters}};
  } else {
    const auto& f = std::get<LpDensityFile>(file);
    const LpDensityProblem& pb = f.problem;
    doc["kind"] = "lp_density";
    doc["name"] = pb.name();
    doc["p"] = pb.p();
    doc["phi"] = box_json(pb.phi());
    doc["c"] = pb.objective().source();
    if (const auto& c = pb.inequality()) {
      doc["gamma"] = box_json(c->domain);
      doc["A"] = c->kernel.source();
      doc["a"] = c->bound.source();
    }
    if (const auto& c = pb.equality()) {
      doc["sigma"] = box_json(c->domain);
      doc["B"] = c->kernel.source();
      doc["b"] = c->bound.source();
    }
    doc["solver"] = {{"x_resolution", f.config.resolution.x},
                     {"y_resolution", f.config.resolution.y},
                     {"z_resolution", f.config.resolution.z},
                     {"quad_resolution", f.config.quad_resolution},
                     {"trials", f.config.trials},
                     {"seed", f.config.seed}};
  }
  return doc;
}

std::string canonical_json(const json& value) {
  std::string out;
  write_value(value, 0, out);
  out += "\n";
  return out;
}

Result<double> json_number(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s == "Infinity") return kInf;
    if (s == "-Infinity") return -kInf;
    if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
  }
  return make_error(ErrorCode::kSchema, "expected a number");
}

json report_to_json(const DualityReport& r) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["kind"] = "moment";
  doc["problem"] = r.problem;
  doc["status"] = to_string(r.status);
  doc["config"] = {{"grid", r.config.grid},
                   {"scan", r.config.scan},
                   {"refine_steps", r.config.refine_steps},
                   {"tol", r.config.tol},
                   {"max_iters", r.config.max_iters},
                   {"gap_tol_factor", r.config.gap_tol_factor},
                   {"verify_factor", r.config.verify_factor},
                   {"run_slater", r.config.run_slater}};
  doc["primal_status"] = r.primal_status;
  doc["primal_value"] = r.primal_value;
  doc["dual_status"] = r.dual_status;
  doc["exchange_value"] = r.exchange_value;
  doc["dual_value"] = r.dual_value;
  doc["gap"] = r.gap;
  doc["gap_tolerance"] = r.gap_tolerance;
  doc["max_dual_violation"] = r.max_dual_violation;
  doc["iterations"] = r.iterations;
  doc["primal_measure"] = json::array();
  for (const auto& a : r.primal_measure.atoms) {
    doc["primal_measure"].push_back(
        {{"point", a.point}, {"box", a.box + 1}, {"weight", a.weight}});
  }
  doc["dual_point"] = {{"y", r.dual_point.y}, {"z", r.dual_point.z}};
  doc["primal_slater_status"] = r.primal_slater_status;
  doc["primal_slater_margin"] = r.primal_slater_margin;
  doc["primal_slater_capped"] = r.primal_slater_capped;
  doc["equality_rows"] = r.equality_rows;
  doc["equality_rank"] = r.equality_rank;
  doc["dual_slater_margin"] = r.dual_slater_margin;
  doc["dual_slater_capped"] = r.dual_slater_capped;
  doc["mass_bound_available"] = r.mass_bound_available;
  doc["mass_bound"] = r.mass_bound;
  doc["weak_duality_residual"] = r.weak_duality_residual;
  doc["weak_duality_ok"] = r.weak_duality_ok;
  doc["notes"] = r.notes;
  doc["timings"] = {{"primal_seconds", r.timings.primal_seconds},
                    {"dual_seconds", r.timings.dual_seconds},
                    {"slater_seconds", r.timings.slater_seconds},
                    {"total_seconds", r.timings.total_seconds}};
  return doc;
}

json report_to_json(const LpDensityReport& r) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["kind"] = "lp_density";
  doc["problem"] = r.problem;
  doc["status"] = to_string(r.status);
  doc["config"] = {{"x_resolution", r.config.resolution.x},
                   {"y_resolution", r.config.resolution.y},
                   {"z_resolution", r.config.resolution.z},
                   {"quad_resolution", r.config.quad_resolution},
                   {"trials", r.config.trials},
                   {"seed", r.config.seed}};
  doc["p"] = r.p;
  doc["q"] = r.q;
  doc["primal_status"] = r.primal_status;
  doc["primal_value"] = r.primal_value;
  doc["dual_status"] = r.dual_status;
  doc["dual_value"] = r.dual_value;
  doc["gap"] = r.gap;
  doc["density"] = r.density;
  doc["refinement"] = json::array();
  for (const auto& s : r.refinement) {
    doc["refinement"].push_back({{"x_resolution", s.x_resolution},
                                 {"value", s.value},
                                 {"density_norm", s.density_norm}});
  }
  doc["escapes"] = r.escapes;
  doc["escape_label"] = r.escape_label;
  doc["slater_status"] = r.slater_status;
  doc["slater_margin"] = r.slater_margin;
  doc["slater_capped"] = r.slater_capped;
  doc["b_rows"] = r.b_rows;
  doc["b_rank"] = r.b_rank;
  doc["operator_checks"] = json::array();
  for (const auto& c : r.operator_checks) {
    doc["operator_checks"].push_back({{"kernel", to_string(c.kernel)},
                                      {"resolution", c.resolution},
                                      {"tau_norm", c.tau_norm},
                                      {"rho_max", c.rho_max},
                                      {"epsilon", c.epsilon},
                                      {"refinement_delta", c.refinement_delta},
                                      {"refinement_ratio", c.refinement_ratio},
                                      {"rho_bounded", c.rho_bounded},
                                      {"trials", c.trials.size()},
                                      {"failures", c.failures}});
  }
  doc["notes"] = r.notes;
  doc["timings"] = {{"primal_seconds", r.timings.primal_seconds},
                    {"dual_seconds", r.timings.dual_seconds},
                    {"slater_seconds", r.timings.slater_seconds},
                    {"total_seconds", r.timings.total_seconds}};
  return doc;
}

Result<DualityReport> duality_report_from_json(const json& doc) {
  try {
    if (doc.value("format_version", std::string()) != kFormatVersion ||
        doc.value("kind", std::string()) != "moment") {
      return make_error(ErrorCode::kSchema, "not a moment report of version 1");
    }
    DualityReport r;
    auto num = [&](const json& v) -> double {
      auto d = json_number(v);
      if (!d) throw std::runtime_error("bad number");
      return *d;
    };
    auto nums = [&](const json& v) {
      std::vector<double> out;
      for (const auto& x : v) out.push_back(num(x));
      return out;
    };
    r.problem = doc.at("problem").get<std::string>();
    const std::string status = doc.at("status").get<std::string>();
    bool known = false;
    for (auto s : {ReportStatus::kStrongDualityNumerically, ReportStatus::kGapRemains,
                   ReportStatus::kPrimalInfeasible, ReportStatus::kPrimalUnbounded,
                   ReportStatus::kDualUnboundedBelow, ReportStatus::kNotConverged}) {
      if (status == to_string(s)) {
        r.status = s;
        known = true;
      }
    }
    if (!known) return make_error(ErrorCode::kSchema, "status: unknown value");
    const json& c = doc.at("config");
    r.config.grid = c.at("grid").get<std::size_t>();
    r.config.scan = c.at("scan").get<std::size_t>();
    r.config.refine_steps = c.at("refine_steps").get<std::size_t>();
    r.config.tol = num(c.at("tol"));
    r.config.max_iters = c.at("max_iters").get<std::size_t>();
    r.config.gap_tol_factor = num(c.at("gap_tol_factor"));
    r.config.verify_factor = c.at("verify_factor").get<std::size_t>();
    r.config.run_slater = c.at("run_slater").get<bool>();
    r.primal_status = doc.at("primal_status").get<std::string>();
    r.primal_value = num(doc.at("primal_value"));
    r.dual_status = doc.at("dual_status").get<std::string>();
    r.exchange_value = num(doc.at("exchange_value"));
    r.dual_value = num(doc.at("dual_value"));
    r.gap = num(doc.at("gap"));
    r.gap_tolerance = num(doc.at("gap_tolerance"));
    r.max_dual_violation = num(doc.at("max_dual_violation"));
    r.iterations = doc.at("iterations").get<std::size_t>();
    for (const auto& a : doc.at("primal_measure")) {
      r.primal_measure.atoms.push_back({nums(a.at("point")),
                                        a.at("box").get<std::size_t>() - 1,
                                        num(a.at("weight"))});
    }
    r.dual_point.y = nums(doc.at("dual_point").at("y"));
    r.dual_point.z = nums(doc.at("dual_point").at("z"));
    r.primal_slater_status = doc.at("primal_slater_status").get<std::string>();
    r.primal_slater_margin = num(doc.at("primal_slater_margin"));
    r.primal_slater_capped = doc.at("primal_slater_capped").get<bool>();
    r.equality_rows = doc.at("equality_rows").get<std::size_t>();
    r.equality_rank = doc.at("equality_rank").get<std::size_t>();
    r.dual_slater_margin = num(doc.at("dual_slater_margin"));
    r.dual_slater_capped = doc.at("dual_slater_capped").get<bool>();
    r.mass_bound_available = doc.at("mass_bound_available").get<bool>();
    r.mass_bound = num(doc.at("mass_bound"));
    r.weak_duality_residual = num(doc.at("weak_duality_residual"));
    r.weak_duality_ok = doc.at("weak_duality_ok").get<bool>();
    r.notes = doc.at("notes").get<std::vector<std::string>>();
    const json& t = doc.at("timings");
    r.timings.primal_seconds = num(t.at("primal_seconds"));
    r.timings.dual_seconds = num(t.at("dual_seconds"));
    r.timings.slater_seconds = num(t.at("slater_seconds"));
    r.timings.total_seconds = num(t.at("total_seconds"));
    return r;
  } catch (const std::exception& e) {
    return make_error(ErrorCode::kSchema, std::string("malformed report: ") + e.what());
  }
}

Status write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) return make_error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) return make_error(ErrorCode::kIo, "write to '" + path + "' failed");
  return {};
}

Result<std::string> read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return make_error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Status write_report(const DualityReport& r, const std::string& path) {
  return write_text(path, canonical_json(report_to_json(r)));
}

Status write_report(const LpDensityReport& r, const std::string& path) {
  return write_text(path, canonical_json(report_to_json(r)));
}

Result<json> read_report(const std::string& path) {
  auto text = read_text(path);
  if (!text) return text.error();
  json doc = json::parse(*text, nullptr, false);
  if (doc.is_discarded()) return make_error(ErrorCode::kSchema, "report is not valid JSON");
  return doc;
}

Result<OptionBoundProblem> build_option_bound_problem(
    const Box& spot_domain, double forward, std::span<const OptionQuote> quotes,
    const std::string& payoff, Direction direction) {
  if (spot_domain.dim() != 1) {
    return make_error(ErrorCode::kInvalidArgument, "spot domain must be one-dimensional");
  }
  if (!std::isfinite(forward) || !(forward > 0.0)) {
    return make_error(ErrorCode::kInvalidArgument, "forward must be positive");
  }
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  const std::string objective =
      direction == Direction::kSup ? payoff : "-(" + payoff + ")";
  auto h = parse_expression(objective, 1);
  if (!h) {
    // Report offsets against the user's text, not the wrapped form.
    auto raw = parse_expression(payoff, 1);
    return raw ? h.error() : at("payoff", raw.error());
  }
  std::vector<MomentConstraint> eq;
  auto add = [&](const std::string& src, double bound) -> Status {
    auto e = parse_expression(src, 1);
    if (!e) return e.error();
    eq.push_back({PiecewiseFunction({std::move(*e)}), bound});
    return {};
  };
  if (auto st = add("1", 1.0); !st) return st.error();
  if (auto st = add("x1", forward); !st) return st.error();
  for (const auto& q : quotes) {
    if (!(q.strike >= spot_domain.lower()[0] && q.strike <= spot_domain.upper()[0])) {
      return make_error(ErrorCode::kInvalidArgument,
                        "strike " + num(q.strike) + " lies outside the spot domain");
    }
    if (!std::isfinite(q.price)) {
      return make_error(ErrorCode::kInvalidArgument, "quote price must be finite");
    }
    if (auto st = add("max(x1-" + num(q.strike) + ",0)", q.price); !st) {
      return st.error();
    }
  }
  Partition part;
  part.boxes.push_back(spot_domain);
  auto mp = MomentProblem::make(std::move(part), spot_domain,
                                PiecewiseFunction({std::move(*h)}), {}, std::move(eq),
                                "option-bound");
  if (!mp) return mp.error();
  return OptionBoundProblem{std::move(*mp), direction,
                            direction == Direction::kSup ? 1.0 : -1.0};
}

}  // namespace measdual
