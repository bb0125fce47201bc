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
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "measdual/cli.hpp"
#include "measdual/io.hpp"
#include "oracles.hpp"

using namespace measdual;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "measdual");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fixture(const std::string& name) {
  return std::string(MEASDUAL_FIXTURE_DIR) + "/" + name + ".json";
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("measdual_io_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string without_timings(std::string text) {
  auto doc = nlohmann::json::parse(text);
  doc.erase("timings");
  return doc.dump();
}

const char* const kLoadable[] = {
    "cauchy_schwarz", "piecewise",       "zero_objective",        "option_call",
    "square_2d",      "contradictory_mass", "not_converged",      "density_unit",
    "density_concentration"};

}  // namespace

TEST_CASE("fixture exit codes") {
  const std::pair<const char*, int> expected[] = {
      {"cauchy_schwarz", kExitOk},
      {"piecewise", kExitOk},
      {"zero_objective", kExitOk},
      {"option_call", kExitOk},
      {"square_2d", kExitOk},
      {"density_unit", kExitOk},
      {"density_concentration", kExitOk},
      {"not_converged", kExitNotConverged},
      {"contradictory_mass", kExitInfeasible},
      {"overlapping", kExitInputError},
      {"volume_deficit", kExitInputError},
      {"arity_error", kExitInputError},
  };
  for (const auto& [name, code] : expected) {
    CAPTURE(name);
    CHECK(run({"solve", fixture(name)}).code == code);
  }
  CHECK(run({"solve", fixture("does_not_exist")}).code == kExitInputError);
  CHECK(run({}).code == kExitInputError);
  CHECK(run({"solve"}).code == kExitInputError);
  CHECK(run({"solve", fixture("cauchy_schwarz"), "--grid", "1"}).code == kExitInputError);
}

TEST_CASE("solve prints both values") {
  const auto r = run({"solve", fixture("cauchy_schwarz"), "--grid", "4097", "--tol", "1e-6"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("primal (grid):  1  [Optimal") != std::string::npos);
  CHECK(r.out.find("status:         StrongDualityNumerically") != std::string::npos);
}

TEST_CASE("validate diagnostics") {
  const auto ok = run({"validate", fixture("cauchy_schwarz")});
  CHECK(ok.code == kExitOk);
  const auto overlap = run({"validate", fixture("overlapping")});
  CHECK(overlap.code == kExitInputError);
  CHECK(overlap.err.find("boxes 1 and 2 overlap on [1,1.5)") != std::string::npos);
  const auto deficit = run({"validate", fixture("volume_deficit")});
  CHECK(deficit.code == kExitInputError);
  CHECK(deficit.err.find("volume deficit: boxes sum to 1, hull has 2") != std::string::npos);
  const auto arity = run({"validate", fixture("arity_error")});
  CHECK(arity.err.find("arity error at offset 5: objective: variable 'x3'") != std::string::npos);
}

TEST_CASE("other subcommands") {
  CHECK(run({"primal", fixture("cauchy_schwarz"), "--grid", "65"}).code == kExitOk);
  CHECK(run({"primal", fixture("contradictory_mass"), "--grid", "9"}).code == kExitInfeasible);
  CHECK(run({"dual", fixture("cauchy_schwarz"), "--tol", "1e-6"}).code == kExitOk);
  CHECK(run({"dual", fixture("cauchy_schwarz"), "--max-iters", "1"}).code == kExitNotConverged);
  CHECK(run({"slater", fixture("cauchy_schwarz")}).code == kExitOk);
  const auto s = run({"slater", fixture("contradictory_mass")});
  CHECK(s.code == kExitInfeasible);
  CHECK(s.out.find("rank deficient") != std::string::npos);
}

TEST_CASE("schema errors name the field") {
  auto unknown = parse_problem_text(R"({"format_version":"1","kind":"moment","name":"t",
    "dimension":1,"hull":{"lower":[0],"upper":[1]},"boxes":[{"lower":[0],"upper":[1]}],
    "objective":"0","equalities":[{"function":"1","bound":1,"bonus":2}]})");
  REQUIRE_FALSE(unknown.ok());
  CHECK(unknown.error().message.find("equalities[0]") != std::string::npos);

  auto version = parse_problem_text(R"({"format_version":"2","kind":"moment"})");
  REQUIRE_FALSE(version.ok());
  CHECK(version.error().message.find("format_version") != std::string::npos);

  auto missing = parse_problem_text(R"({"format_version":"1","kind":"moment","name":"t",
    "dimension":1,"hull":{"lower":[0],"upper":[1]},"objective":"0",
    "equalities":[{"function":"1","bound":1}]})");
  REQUIRE_FALSE(missing.ok());
  CHECK(missing.error().message.find("boxes") != std::string::npos);

  CHECK_FALSE(parse_problem_text("{not json").ok());
}

TEST_CASE("problem files round trip") {
  for (const char* name : kLoadable) {
    CAPTURE(name);
    auto first = load_problem(fixture(name));
    REQUIRE(first.ok());
    const std::string a = canonical_json(problem_to_json(*first));
    const auto path = (scratch() / (std::string(name) + ".json")).string();
    REQUIRE(write_text(path, a).ok());
    auto second = load_problem(path);
    REQUIRE(second.ok());
    CHECK(canonical_json(problem_to_json(*second)) == a);
  }
}

TEST_CASE("minimal moment file solves to zero") {
  auto f = load_problem(fixture("zero_objective"));
  REQUIRE(f.ok());
  auto r = duality_report(std::get<MomentFile>(*f).problem, std::get<MomentFile>(*f).config);
  REQUIRE(r.ok());
  CHECK(r->primal_value == 0.0);
  CHECK(r->dual_value == 0.0);
}

TEST_CASE("reports round trip byte for byte") {
  for (const char* name : {"cauchy_schwarz", "contradictory_mass", "option_call", "not_converged"}) {
    CAPTURE(name);
    auto f = load_problem(fixture(name));
    REQUIRE(f.ok());
    const auto& mf = std::get<MomentFile>(*f);
    auto r = duality_report(mf.problem, mf.config);
    REQUIRE(r.ok());
    const auto path = (scratch() / (std::string(name) + ".report.json")).string();
    REQUIRE(write_report(*r, path).ok());
    auto text = read_text(path);
    REQUIRE(text.ok());
    CHECK(text->back() == '\n');
    auto doc = read_report(path);
    REQUIRE(doc.ok());
    CHECK((*doc)["format_version"] == "1");
    auto back = duality_report_from_json(*doc);
    REQUIRE(back.ok());
    CHECK(canonical_json(report_to_json(*back)) == *text);
    // gap is dual - primal as serialized.
    auto gap = json_number((*doc)["gap"]);
    auto dual = json_number((*doc)["dual_value"]);
    auto primal = json_number((*doc)["primal_value"]);
    REQUIRE(gap.ok());
    if (std::isfinite(*gap)) {
      CHECK(*gap == *dual - *primal);
    } else {
      CHECK(std::isnan(*dual - *primal) == std::isnan(*gap));
    }
  }
}

TEST_CASE("canonical json") {
  nlohmann::json v = {{"b", 0.1}, {"a", kInf}, {"c", {-kInf, std::nan("")}}, {"d", 3}};
  CHECK(canonical_json(v) ==
        "{\n  \"a\": \"Infinity\",\n  \"b\": 0.10000000000000001,\n  \"c\": [\n"
        "    \"-Infinity\",\n    \"NaN\"\n  ],\n  \"d\": 3\n}\n");
  CHECK(*json_number(nlohmann::json("NaN")) != *json_number(nlohmann::json("NaN")));
  CHECK(*json_number(nlohmann::json(2.5)) == 2.5);
  CHECK_FALSE(json_number(nlohmann::json("two")).ok());
}

TEST_CASE("reports are deterministic apart from timings") {
  for (const char* name : {"cauchy_schwarz", "density_concentration"}) {
    const auto a = (scratch() / "det_a.json").string();
    const auto b = (scratch() / "det_b.json").string();
    REQUIRE(run({"solve", fixture(name), "--report", a}).code == kExitOk);
    REQUIRE(run({"solve", fixture(name), "--report", b}).code == kExitOk);
    CHECK(without_timings(*read_text(a)) == without_timings(*read_text(b)));
  }
}

TEST_CASE("option bound preset") {
  auto domain = Box::make({0.0}, {4.0});
  const auto call = [](double x) { return std::max(x - 1.0, 0.0); };
  const double sup_ref = oracle::two_atom_search(call, 0, 4, 1.0, 4001, 1.0);
  const double inf_ref = oracle::two_atom_search(call, 0, 4, 1.0, 4001, -1.0);
  for (auto [dir, ref] : {std::pair{Direction::kSup, sup_ref}, std::pair{Direction::kInf, inf_ref}}) {
    auto ob = build_option_bound_problem(*domain, 1.0, {}, "max(x1-1,0)", dir);
    REQUIRE(ob.ok());
    CHECK(ob->problem.num_equalities() == 2);
    SolverConfig cfg;
    cfg.grid = 4097;
    auto r = duality_report(ob->problem, cfg);
    REQUIRE(r.ok());
    CHECK(std::fabs(ob->sign * r->dual_value - ref) <= 1e-3);
    CHECK(std::fabs(ob->sign * r->primal_value - ref) <= 1e-3);
  }
  CHECK(sup_ref == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(inf_ref == doctest::Approx(0.0));

  for (auto dir : {Direction::kSup, Direction::kInf}) {
    auto ob = build_option_bound_problem(*domain, 1.0, {}, "0", dir);
    auto r = duality_report(ob->problem);
    CHECK(std::fabs(r->dual_value) <= 1e-9);
  }

  // A call quote at strike 1 pins E max(x-1,0) and so the bound itself.
  const OptionQuote quote{1.0, 0.3};
  auto pinned = build_option_bound_problem(*domain, 1.0, std::span(&quote, 1), "max(x1-1,0)",
                                           Direction::kSup);
  REQUIRE(pinned.ok());
  CHECK(pinned->problem.num_equalities() == 3);
  auto rp = duality_report(pinned->problem);
  REQUIRE(rp.ok());
  CHECK(std::fabs(rp->dual_value - 0.3) <= 1e-4);

  const OptionQuote outside{5.0, 0.1};
  CHECK_FALSE(build_option_bound_problem(*domain, 1.0, std::span(&outside, 1), "x1",
                                         Direction::kSup).ok());
  CHECK_FALSE(build_option_bound_problem(*domain, -1.0, {}, "x1", Direction::kSup).ok());
}

TEST_CASE("option bound command") {
  const auto sup = run({"option-bound", "--domain", "0", "4", "--forward", "1", "--payoff",
                        "max(x1-1,0)", "--direction", "sup"});
  CHECK(sup.code == kExitOk);
  CHECK(sup.out.rfind("sup bound: 0.75", 0) == 0);
  const auto inf = run({"option-bound", "--domain", "0", "4", "--forward", "1", "--payoff",
                        "max(x1-1,0)", "--direction", "inf"});
  CHECK(inf.code == kExitOk);
  CHECK(inf.out.rfind("inf bound: 0\n", 0) == 0);
  const auto bad = run({"option-bound", "--domain", "0", "4", "--forward", "1", "--payoff",
                        "max(x1-1,0)", "--direction", "sideways"});
  CHECK(bad.code == kExitInputError);
  const auto inconsistent = run({"option-bound", "--domain", "0", "4", "--forward", "1",
                                 "--quote", "1", "5", "--payoff", "x1", "--direction", "sup"});
  CHECK(inconsistent.code == kExitInfeasible);
}
