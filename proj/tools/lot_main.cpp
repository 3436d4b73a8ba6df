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

#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Optimal transport for Tonelli Lagrangian costs on manifolds", "lot"};
  app.require_subcommand(1);
  lot::cli::Args args;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config, "JSON run configuration")->required();
    sub->add_option("--out", args.out, "output directory (overrides config.output)");
  };
  CLI::App* cost = app.add_subcommand("cost", "cost, superdifferential and minimizer between two points");
  common(cost);
  cost->add_option("--x", args.x, "source coordinates, comma-separated")->required();
  cost->add_option("--y", args.y, "target coordinates, comma-separated")->required();
  CLI::App* solve = app.add_subcommand("solve", "discrete transport, potentials and map");
  common(solve);
  CLI::App* interp = app.add_subcommand("interp", "displacement interpolation and its verifications");
  common(interp);
  interp->add_option("--s", args.s, "interpolation times in [0, t], comma-separated");
  CLI::App* verify = app.add_subcommand("verify", "seeded property suites");
  common(verify);
  verify->add_option("--suite", args.suite, "flows, legendre, semiconcavity, twist, duality or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << R"({"error":"input","key":"arguments","message":")" << e.get_name() << R"(","exit_code":1})" << "\n";
    return lot::cli::kInputError;
  }
  for (CLI::App* sub : app.get_subcommands()) args.command = sub->get_name();
  return lot::cli::run(args, std::cout, std::cerr);
}
