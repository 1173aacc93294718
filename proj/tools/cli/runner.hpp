// Copyright 2026 The jetcalc Authors. All Rights Reserved.
//
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace jetcalc::cli {

/// Usage or configuration problem; maps to exit code 3.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitScientific = 2;
inline constexpr int kExitConfig = 3;

struct RunConfig {
  /// Unset means the command's own default (see default_grid).
  std::optional<std::size_t> grid;
  std::uint64_t seed = 20260;
  std::map<std::string, double> tolerances;
  /// Functional names; unset runs every member the command knows.
  std::optional<std::vector<std::string>> suite;
  std::filesystem::path out = ".";
  int trials = 0;
  int power = 3;
  std::size_t peetre_grid = 8192;
  double lambda_min = 1.0 / 64.0;

  double tol(const std::string& name) const;
};

/// Names accepted by --tol and tol.NAME, with their defaults.
const std::map<std::string, double>& default_tolerances();

/// Applies one key=value setting; throws ConfigError on unknown keys or bad values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

/// Flat key=value lines, '#' starts a comment.
void load_config(RunConfig& cfg, std::istream& in, const std::string& origin = "config");
void load_config_file(RunConfig& cfg, const std::filesystem::path& path);

std::size_t default_grid(std::string_view command);

/// Default locality grid for one functional: 1024 for U, whose gradient
/// spectrum is not resolved to the tail threshold at 512 for every sample.
std::size_t locality_grid(std::string_view functional);

/// "local" or "nonlocal", the classification every locality run must reproduce.
std::string expected_locality(std::string_view functional);

int cmd_derivatives(const RunConfig& cfg, std::ostream& log);
int cmd_locality(const RunConfig& cfg, std::ostream& log);
int cmd_identities(const RunConfig& cfg, std::ostream& log);
int cmd_peetre(const RunConfig& cfg, std::ostream& log);
int cmd_counterexample(const RunConfig& cfg, std::ostream& log);
int cmd_zoo(const RunConfig& cfg, std::ostream& log);

/// Full command line entry point; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jetcalc::cli
