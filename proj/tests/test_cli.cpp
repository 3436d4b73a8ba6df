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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lot;
using doctest::Approx;

namespace {

const std::filesystem::path kData = LOT_TEST_DATA;
const std::filesystem::path kOut = std::filesystem::path(LOT_TEST_OUT) / "cli";

struct Run {
  int code;
  Json record;
  std::string raw;
  std::string err;
};

Run run(std::string command, const std::string& config, cli::Args extra = {}) {
  extra.command = std::move(command);
  extra.config = (kData / config).string();
  if (!extra.out) extra.out = (kOut / config).string();
  std::ostringstream out, err;
  const int code = cli::run(extra, out, err);
  Run r{code, Json(), out.str(), err.str()};
  if (!r.raw.empty()) r.record = Json::parse(r.raw);
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Json* find_check(const Json& checks, const std::string& name) {
  for (const Json& c : checks)
    if (c["name"] == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("cost") {
  cli::Args a;
  a.x = "0,0";
  a.y = "3,4";
  const Run r = run("cost", "euclid2.json", a);
  CHECK(r.code == 0);
  CHECK(r.record["cost"].get<double>() == Approx(25.0).epsilon(1e-12));
  CHECK(r.record["closed_form"].get<double>() == 25.0);
  CHECK(r.record["superdifferential_x"][0].get<double>() == Approx(-6.0));
  CHECK(r.record["curve"]["nodes"].size() >= 2);
  CHECK(slurp(kOut / "euclid2.json" / "report.json") == r.raw);

  a.y = "0,0";
  CHECK(run("cost", "euclid2.json", a).record["cost"].get<double>() == 0.0);

  const Run bad = run("cost", "malformed.json", a);
  CHECK(bad.code == 1);
  CHECK(Json::parse(bad.err)["key"] == "lagrangian.r");

  a.y = "1,2,3";
  const Run wrong_dim = run("cost", "euclid2.json", a);
  CHECK(wrong_dim.code == 1);
  CHECK(Json::parse(wrong_dim.err)["key"] == "y");
  CHECK(run("cost", "missing.json", a).code == 1);
}

TEST_CASE("solve") {
  const Run shift = run("solve", "shift_1d.json");
  CHECK(shift.code == 0);
  CHECK(shift.record["status"] == "PASS");
  CHECK(shift.record["cost"].get<double>() == Approx(1.0).epsilon(1e-12));
  const std::filesystem::path dir = kOut / "shift_1d.json";
  for (const char* f : {"plan.json", "potentials.json", "map.csv", "report.json"}) CHECK(std::filesystem::exists(dir / f));
  std::istringstream map(slurp(dir / "map.csv"));
  std::string line;
  std::getline(map, line);
  CHECK(line == "x1,tx1,residual");
  double worst = 0.0;
  while (std::getline(map, line)) {
    double x, tx;
    char comma;
    std::istringstream(line) >> x >> comma >> tx;
    worst = std::max(worst, std::abs(tx - x - 1.0));
  }
  CHECK(worst <= 1e-12);

  const Run tie = run("solve", "tie.json");
  CHECK(tie.code == 2);
  CHECK(tie.record["status"] == "FAIL");
  CHECK(tie.record["split_rows"].size() == 2);
  CHECK_FALSE((*find_check(tie.record["checks"], "graph_concentration"))["pass"].get<bool>());

  const Run id = run("solve", "identity.json");
  CHECK(id.code == 0);
  CHECK(id.record["cost"].get<double>() == 0.0);
}

TEST_CASE("interp") {
  const Run r = run("interp", "shift_1d.json");
  CHECK(r.code == 0);
  CHECK(r.record["per_s"].size() == 3);
  const std::string traj = slurp(kOut / "shift_1d.json" / "trajectories.csv");
  CHECK(traj.rfind("atom,s,x1\n", 0) == 0);

  cli::Args ends;
  ends.s = "0,1";
  CHECK(run("interp", "shift_1d.json", ends).code == 0);
  cli::Args outside;
  outside.s = "0.5,1.5";
  const Run bad = run("interp", "shift_1d.json", outside);
  CHECK(bad.code == 1);
  CHECK(Json::parse(bad.err)["key"] == "s");
}

TEST_CASE("verify") {
  cli::Args a;
  a.suite = "legendre";
  const Run first = run("verify", "euclid2.json", a);
  CHECK(first.code == 0);
  CHECK(first.record["suites"][0]["name"] == "legendre");
  // Same seed, byte-identical report.
  CHECK(run("verify", "euclid2.json", a).raw == first.raw);
  a.suite = "flows";
  const Run flows = run("verify", "euclid2.json", a);
  CHECK(flows.code == 0);
  CHECK(flows.record["suites"][0]["checks"][0]["metrics"]["max_relative_spread"].get<double>() <= 1e-8);
  a.suite = "nonsense";
  CHECK(run("verify", "euclid2.json", a).code == 1);
}
