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

#include "lot/kantorovich.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lot {

struct SolverConfig {
  /// RK4 steps for the whole interval [0, t]; 0 keeps the library default.
  int integrator_steps = 0;
  double shooting_tol = 1e-7;
  double lp_tol = 1e-9;
  CostEvaluation cost_evaluation = CostEvaluation::minimizer;
};

/// A measure given inline or by file reference.
struct MeasureSpec {
  std::optional<std::filesystem::path> file;
  Json inline_atoms;
};

/// One run of the command-line tool, parsed from a single JSON document:
///   { "manifold": {"kind": "sphere2", "dim": 2, "params": {"radius": 1}},
///     "lagrangian": {"kind": "power_metric", "r": 2},
///     "t": 1,
///     "measures": {"mu": "mu.csv", "nu": [{"coords": [0, 0], "weight": 1}]},
///     "solver": {"integrator_steps": 1000, "shooting_tol": 1e-7, "lp_tol": 1e-9,
///                "cost_evaluation": "minimizer"},
///     "s": [0.25, 0.5], "seed": 0, "output": "out" }
struct RunConfig {
  ManifoldModel manifold = ManifoldModel::euclidean(2);
  double r = 2.0;
  double t = 1.0;
  std::optional<MeasureSpec> mu;
  std::optional<MeasureSpec> nu;
  SolverConfig solver;
  std::vector<double> s;
  std::uint64_t seed = 0;
  std::filesystem::path output = "out";

  LagrangianModel lagrangian() const;
  MinimizerOptions minimizer_options() const;
  CostModel cost_model() const;
};

/// Parses a config document; relative measure paths resolve against `base`.
/// Throws InputError naming the offending key.
RunConfig parse_config(const Json& doc, const std::filesystem::path& base = {});
RunConfig load_config(const std::filesystem::path& path);

/// CSV rows "x1,...,xn,weight" (a non-numeric first line is a header, blank
/// lines and '#' comments are skipped) or a JSON array of {coords, weight}.
DiscreteMeasure load_measure(const ManifoldModel& m, const MeasureSpec& spec, const std::string& key);
DiscreteMeasure parse_measure_json(const ManifoldModel& m, const Json& atoms, const std::string& key);
DiscreteMeasure parse_measure_csv(const ManifoldModel& m, const std::string& text, const std::string& key);

/// Comma-separated reals, e.g. "0.25,0.5".
std::vector<double> parse_reals(const std::string& text, const std::string& key);

Json plan_to_json(const TransportPlan& plan, const std::string& method, double cost);
Json potentials_to_json(const DualPotentials& pot);
Json point_to_json(const Point& p);

/// Writes `text` to `dir / name`, creating `dir`.
void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text);

}  // namespace lot
