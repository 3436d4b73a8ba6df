// Copyright 2026 The lot Authors
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

#include "lot/config.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lot::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kFailure = 2 };

struct Args {
  std::string command;
  std::string config;
  std::optional<std::string> x;
  std::optional<std::string> y;
  std::optional<std::string> s;
  std::string suite = "all";
  std::optional<std::string> out;
};

/// Each command writes its artifacts under the output directory, prints the
/// summary record to `out` and returns the exit code.
int cmd_cost(const RunConfig& cfg, const std::vector<double>& x, const std::vector<double>& y, std::ostream& out);
int cmd_solve(const RunConfig& cfg, std::ostream& out);
int cmd_interp(const RunConfig& cfg, const std::vector<double>& s, std::ostream& out);
int cmd_verify(const RunConfig& cfg, const std::string& suite, std::ostream& out);

/// Loads the config, dispatches, and maps library errors to exit codes with
/// a JSON error record on `err`.
int run(const Args& args, std::ostream& out, std::ostream& err);

}  // namespace lot::cli
