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

// Problem and report files (JSON, "format_version": "1") and the option
// pricing preset.

#ifndef MEASDUAL_IO_HPP_
#define MEASDUAL_IO_HPP_

#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "measdual/lp_density.hpp"
#include "measdual/moment.hpp"
#include "measdual/result.hpp"
#include "measdual/sip.hpp"

namespace measdual {

inline constexpr const char* kFormatVersion = "1";

struct MomentFile {
  MomentProblem problem;
  SolverConfig config;
};

struct LpDensityFile {
  LpDensityProblem problem;
  LpDensityConfig config;
};

using ProblemFile = std::variant<MomentFile, LpDensityFile>;

// Schema errors name the offending field path, e.g. "boxes[1].upper".
Result<ProblemFile> parse_problem(const nlohmann::json& doc);
Result<ProblemFile> parse_problem_text(const std::string& text);
Result<ProblemFile> load_problem(const std::string& path);

nlohmann::json problem_to_json(const ProblemFile& file);

// Keys sorted, numbers with 17 significant digits, non-finite numbers as the
// strings "Infinity", "-Infinity" and "NaN", newline-terminated.
std::string canonical_json(const nlohmann::json& value);

nlohmann::json report_to_json(const DualityReport& r);
nlohmann::json report_to_json(const LpDensityReport& r);
Result<DualityReport> duality_report_from_json(const nlohmann::json& doc);

Status write_text(const std::string& path, const std::string& text);
Result<std::string> read_text(const std::string& path);
Status write_report(const DualityReport& r, const std::string& path);
Status write_report(const LpDensityReport& r, const std::string& path);
Result<nlohmann::json> read_report(const std::string& path);

// Reads numbers written by canonical_json, including the non-finite strings.
Result<double> json_number(const nlohmann::json& v);

enum class Direction { kSup, kInf };

struct OptionQuote {
  double strike = 0.0;
  double price = 0.0;
};

struct OptionBoundProblem {
  MomentProblem problem;
  Direction direction = Direction::kSup;
  // Multiply solver values by this to get the bound in the requested direction.
  double sign = 1.0;
};

// Equalities: total mass 1, mean `forward`, and one call price per quote.
Result<OptionBoundProblem> build_option_bound_problem(
    const Box& spot_domain, double forward, std::span<const OptionQuote> quotes,
    const std::string& payoff, Direction direction);

}  // namespace measdual

#endif  // MEASDUAL_IO_HPP_
