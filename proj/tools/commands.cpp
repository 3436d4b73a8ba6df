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

#include "lot/suites.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace lot::cli {

namespace {

Json manifold_json(const ManifoldModel& m) {
  Json j;
  j["kind"] = to_string(m.kind());
  j["dim"] = m.dim();
  Json p = Json::object();
  for (const auto& [k, v] : m.params()) p[k] = v;
  j["params"] = p;
  return j;
}

Json header(const std::string& command, const RunConfig& cfg) {
  Json j;
  j["command"] = command;
  j["manifold"] = manifold_json(cfg.manifold);
  j["lagrangian"] = Json{{"kind", "power_metric"}, {"r", cfg.r}};
  j["t"] = cfg.t;
  j["cost_evaluation"] = to_string(cfg.solver.cost_evaluation);
  return j;
}

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

Point cli_point(const ManifoldModel& m, const std::vector<double>& c, const std::string& key) {
  if (static_cast<int>(c.size()) != m.dim())
    throw InputError("expected " + std::to_string(m.dim()) + " coordinates", key);
  try {
    return make_point(m, Eigen::Map<const Vec>(c.data(), m.dim()));
  } catch (const DomainError& e) {
    throw InputError(e.what(), key);
  }
}

Json checks_json(const std::vector<CertificateReport>& reps) {
  Json arr = Json::array();
  for (const CertificateReport& r : reps) arr.push_back(r.to_json());
  return arr;
}

bool all_pass(const std::vector<CertificateReport>& reps) {
  return std::all_of(reps.begin(), reps.end(), [](const CertificateReport& r) { return r.pass; });
}

void emit(const RunConfig& cfg, Json& record, bool pass, std::ostream& out) {
  record["status"] = pass ? "PASS" : "FAIL";
  const std::string body = dump_json(record) + "\n";
  write_text(cfg.output, "report.json", body);
  out << body;
}

std::pair<DiscreteMeasure, DiscreteMeasure> measures(const RunConfig& cfg) {
  if (!cfg.mu) throw InputError("missing key", "measures.mu");
  if (!cfg.nu) throw InputError("missing key", "measures.nu");
  return {load_measure(cfg.manifold, *cfg.mu, "measures.mu"), load_measure(cfg.manifold, *cfg.nu, "measures.nu")};
}

std::string coords_header(const std::string& prefix, int dim) {
  std::string h;
  for (int k = 1; k <= dim; ++k) h += (h.empty() ? "" : ",") + prefix + std::to_string(k);
  return h;
}

void append_coords(std::string& line, const Point& p) {
  for (Eigen::Index k = 0; k < p.coords.size(); ++k) line += "," + format_real(p.coords[k]);
}

std::string map_csv(const MongeMap& map, const ManifoldModel& m) {
  const bool charts = m.kind() == ManifoldKind::sphere2;
  std::string body = coords_header("x", m.dim()) + "," + coords_header("tx", m.dim()) + ",residual";
  if (charts) body += ",source_chart,image_chart";
  body += "\n";
  for (std::size_t i = 0; i < map.size(); ++i) {
    std::string line;
    append_coords(line, map.sources[i]);
    append_coords(line, map.images[i]);
    line += "," + format_real(map.residuals[i]);
    if (charts) line += "," + std::to_string(map.sources[i].chart) + "," + std::to_string(map.images[i].chart);
    body += line.substr(1) + "\n";
  }
  return body;
}

struct Pipeline {
  DiscreteMeasure mu, nu;
  Mat C;
  Solution sol;
};

Pipeline solve_pipeline(const RunConfig& cfg, const CostModel& cost) {
  auto [mu, nu] = measures(cfg);
  Mat C = cost_matrix(cost, mu, nu);
  Solution sol = solve_exact(C, mu, nu);
  return {std::move(mu), std::move(nu), std::move(C), std::move(sol)};
}

}  // namespace

int cmd_cost(const RunConfig& cfg, const std::vector<double>& xs, const std::vector<double>& ys, std::ostream& out) {
  const CostModel cost = cfg.cost_model();
  const Point x = cli_point(cfg.manifold, xs, "x"), y = cli_point(cfg.manifold, ys, "y");
  const CostValue cv = cost.evaluate(x, y);
  const Superdifferential sd = cost.superdifferential(x, y);
  const Curve curve = minimize(cost.lagrangian(), CostQuery{x, y, cfg.t}, cost.options());

  Json rec = header("cost", cfg);
  rec["x"] = point_to_json(x);
  rec["y"] = point_to_json(y);
  rec["cost"] = cv.value;
  rec["ambiguous"] = cv.ambiguous;
  rec["superdifferential_x"] = to_std(sd.at_x.components);
  rec["superdifferential_y"] = to_std(sd.at_y.components);
  rec["closed_form"] = power_cost_closed_form(cfg.manifold, cfg.r, x, y, cfg.t);
  Json c;
  c["method"] = curve.method;
  c["action"] = curve.action;
  c["residual"] = curve.residual;
  c["energy_spread"] = curve.energy_spread;
  Json nodes = Json::array();
  const std::size_t n = curve.points.size(), stride = std::max<std::size_t>(1, (n - 1) / 64);
  std::vector<std::size_t> picks;
  for (std::size_t i = 0; i < n; i += stride) picks.push_back(i);
  if (picks.back() != n - 1) picks.push_back(n - 1);
  for (std::size_t i : picks) {
    Json node = point_to_json(curve.points[i]);
    node["time"] = curve.times[i];
    nodes.push_back(node);
  }
  c["nodes"] = nodes;
  rec["curve"] = c;
  emit(cfg, rec, true, out);
  return kOk;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const CostModel cost = cfg.cost_model();
  const Pipeline p = solve_pipeline(cfg, cost);
  const double tol = cfg.solver.lp_tol;
  std::vector<CertificateReport> checks = {check_marginals(p.sol.plan, p.mu.weights, p.nu.weights),
                                           check_duality(p.sol, p.C, p.mu.weights, p.nu.weights, tol),
                                           check_calibration(p.sol.plan, p.sol.potentials, p.C, tol)};
  const bool assignment = p.sol.method == "assignment";
  const UniquenessProbe probe = uniqueness_probe(p.C, p.mu.weights, p.nu.weights, p.sol, tol);
  const MongeMap map = map_from_plan(probe.unique ? p.sol.plan : probe.averaged, p.mu, p.nu);

  CertificateReport graph("graph_concentration");
  graph.metric("split_rows", map.split_count()).metric("tight_edges_off_support", probe.report.get("tight_edges_off_support"));
  if (assignment) {
    graph.require(probe.unique, "optimal plan is not unique");
    graph.require(map.split_count() == 0, "optimal plan splits rows");
  } else {
    graph.note("not gated: atom weights differ, so optimal plans split rows");
  }
  checks.push_back(graph);

  if (assignment) {
    checks.push_back(pushforward_check(map, p.mu, p.nu, cost, p.sol.cost));
    CertificateReport pot("potential_map");
    try {
      const MongeMap flow = map_from_potentials(cost, p.sol.potentials.psi, p.mu, p.nu);
      int mismatched = 0;
      double residual = 0.0;
      for (std::size_t i = 0; i < flow.size(); ++i) {
        mismatched += flow.targets[i] != map.targets[i];
        residual = std::max(residual, flow.residuals[i]);
      }
      pot.metric("mismatched_atoms", mismatched).metric("max_flow_residual", residual);
      pot.require(mismatched == 0, "flow map disagrees with the plan graph");
    } catch (const AmbiguityError& e) {
      pot.fail(e.what());
    }
    checks.push_back(pot);
  }

  write_text(cfg.output, "plan.json", dump_json(plan_to_json(p.sol.plan, p.sol.method, p.sol.cost)) + "\n");
  write_text(cfg.output, "potentials.json", dump_json(potentials_to_json(p.sol.potentials)) + "\n");
  write_text(cfg.output, "map.csv", map_csv(map, cfg.manifold));

  Json rec = header("solve", cfg);
  rec["atoms"] = Json{{"mu", p.mu.size()}, {"nu", p.nu.size()}};
  rec["cost"] = p.sol.cost;
  rec["method"] = p.sol.method;
  rec["checks"] = checks_json(checks);
  Json splits = Json::array();
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map.splits[i].empty()) continue;
    Json dist = Json::array();
    for (const auto& [j, mass] : map.splits[i]) dist.push_back(Json{{"j", j}, {"mass", mass}});
    splits.push_back(Json{{"row", i}, {"distribution", dist}});
  }
  rec["split_rows"] = splits;
  const bool pass = all_pass(checks);
  emit(cfg, rec, pass, out);
  return pass ? kOk : kFailure;
}

int cmd_interp(const RunConfig& cfg, const std::vector<double>& s_list, std::ostream& out) {
  if (s_list.empty()) throw InputError("no interpolation times given", "s");
  for (double s : s_list)
    if (!(s >= 0.0 && s <= cfg.t)) throw InputError("s = " + format_real(s) + " is outside [0, t]", "s");
  const CostModel cost = cfg.cost_model();
  const Pipeline p = solve_pipeline(cfg, cost);
  const MongeMap terminal = map_from_potentials(cost, p.sol.potentials.psi, p.mu, p.nu);

  std::vector<double> grid = s_list;
  for (int k = 0; k <= 20; ++k) grid.push_back(cfg.t * k / 20.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12; }), grid.end());
  PathOptions popts;
  if (cfg.solver.integrator_steps > 0) popts.steps_per_unit = static_cast<int>(std::ceil(cfg.solver.integrator_steps / cfg.t));
  const InterpolationPath path = build_path(cost, p.mu, terminal, grid, popts);

  bool pass = true;
  Json per_s = Json::array();
  for (double s : s_list) {
    const std::vector<CertificateReport> checks = {verify_restriction_identity(path, s), verify_midpoint_optimality(path, s),
                                                   verify_injectivity_and_inverse(path, s),
                                                   verify_cost_additivity(path, s, p.nu)};
    pass = pass && all_pass(checks);
    per_s.push_back(Json{{"s", s}, {"pass", all_pass(checks)}, {"checks", checks_json(checks)}});
  }

  const ManifoldModel& m = cfg.manifold;
  std::string csv = "atom,s," + coords_header("x", m.dim()) + (m.kind() == ManifoldKind::sphere2 ? ",chart" : "") + "\n";
  for (std::size_t i = 0; i < path.curves.size(); ++i)
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Point& q = path.curves[i].points[k];
      std::string line = std::to_string(i) + "," + format_real(grid[k]);
      append_coords(line, q);
      if (m.kind() == ManifoldKind::sphere2) line += "," + std::to_string(q.chart);
      csv += line + "\n";
    }
  write_text(cfg.output, "trajectories.csv", csv);

  double energy = 0.0;
  for (const AtomCurve& c : path.curves) energy = std::max(energy, c.energy_spread);
  Json rec = header("interp", cfg);
  rec["s"] = s_list;
  rec["lp_cost"] = p.sol.cost;
  rec["max_energy_spread"] = energy;
  rec["per_s"] = per_s;
  emit(cfg, rec, pass, out);
  return pass ? kOk : kFailure;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite, std::ostream& out) {
  std::vector<std::string> names;
  if (suite == "all") {
    names = suite_names();
  } else if (std::find(suite_names().begin(), suite_names().end(), suite) != suite_names().end()) {
    names = {suite};
  } else {
    throw InputError("unknown suite '" + suite + "'", "suite");
  }
  SuiteOptions opts;
  opts.seed = cfg.seed;
  if (cfg.solver.integrator_steps > 0) opts.steps_per_unit = static_cast<int>(std::ceil(cfg.solver.integrator_steps / cfg.t));
  const CostModel cost = cfg.cost_model();
  Json rec = header("verify", cfg);
  rec["suite"] = suite;
  rec["seed"] = cfg.seed;
  Json arr = Json::array();
  bool pass = true;
  for (const std::string& n : names) {
    const SuiteResult r = run_suite(n, cost, opts);
    pass = pass && r.pass();
    arr.push_back(r.to_json());
  }
  rec["suites"] = arr;
  emit(cfg, rec, pass, out);
  return pass ? kOk : kFailure;
}

int run(const Args& args, std::ostream& out, std::ostream& err) {
  const auto report_error = [&](const std::string& kind, const std::string& key, const std::string& what, int code) {
    Json e;
    e["error"] = kind;
    if (!key.empty()) e["key"] = key;
    e["message"] = what;
    e["exit_code"] = code;
    err << dump_json(e, -1) << "\n";
    return code;
  };
  try {
    RunConfig cfg = load_config(args.config);
    if (args.out) cfg.output = *args.out;
    if (args.command == "cost") {
      if (!args.x) throw InputError("missing --x", "x");
      if (!args.y) throw InputError("missing --y", "y");
      return cmd_cost(cfg, parse_reals(*args.x, "x"), parse_reals(*args.y, "y"), out);
    }
    if (args.command == "solve") return cmd_solve(cfg, out);
    if (args.command == "interp") return cmd_interp(cfg, args.s ? parse_reals(*args.s, "s") : cfg.s, out);
    if (args.command == "verify") return cmd_verify(cfg, args.suite, out);
    throw InputError("unknown command '" + args.command + "'", "command");
  } catch (const InputError& e) {
    return report_error(dynamic_cast<const PreconditionError*>(&e) ? "precondition" : "input", e.key(), e.what(), kInputError);
  } catch (const AmbiguityError& e) {
    return report_error("ambiguity", "", e.what(), kFailure);
  } catch (const DomainError& e) {
    return report_error("domain", "", e.what(), kFailure);
  } catch (const ConvergenceError& e) {
    return report_error("convergence", "", e.what(), kFailure);
  } catch (const NumericalError& e) {
    return report_error("numerical", "", e.what(), kFailure);
  }
}

}  // namespace lot::cli
