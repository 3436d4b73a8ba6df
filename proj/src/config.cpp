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

#include "lot/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace lot {

namespace {

void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw InputError("unknown key", prefix + it.key());
}

const Json& require_object(const Json& j, const std::string& key) {
  if (!j.is_object()) throw InputError("expected a JSON object", key);
  return j;
}

double number(const Json& j, const std::string& key) {
  if (!j.is_number()) throw InputError("expected a number", key);
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError("expected a finite number", key);
  return v;
}

double positive(const Json& j, const std::string& key) {
  const double v = number(j, key);
  if (!(v > 0)) throw InputError("must be > 0", key);
  return v;
}

std::string text(const Json& j, const std::string& key) {
  if (!j.is_string()) throw InputError("expected a string", key);
  return j.get<std::string>();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

bool parse_real(const std::string& field, double& out) {
  const std::string f = trim(field);
  if (f.empty()) return false;
  char* end = nullptr;
  out = std::strtod(f.c_str(), &end);
  return end == f.c_str() + f.size() && std::isfinite(out);
}

MeasureSpec measure_spec(const Json& j, const std::filesystem::path& base, const std::string& key) {
  MeasureSpec spec;
  if (j.is_string()) {
    std::filesystem::path p = j.get<std::string>();
    spec.file = p.is_absolute() ? p : base / p;
  } else if (j.is_array()) {
    spec.inline_atoms = j;
  } else {
    throw InputError("expected a file path or an array of atoms", key);
  }
  return spec;
}

Point atom(const ManifoldModel& m, const Vec& coords, const std::string& key) {
  if (coords.size() != m.dim())
    throw InputError("atom has " + std::to_string(coords.size()) + " coordinates, manifold has dim " + std::to_string(m.dim()), key);
  try {
    return make_point(m, coords);
  } catch (const DomainError& e) {
    throw InputError(e.what(), key);
  }
}

}  // namespace

LagrangianModel RunConfig::lagrangian() const { return LagrangianModel::power_metric(manifold, r); }

MinimizerOptions RunConfig::minimizer_options() const {
  MinimizerOptions o;
  o.steps = solver.integrator_steps;
  o.tol = solver.shooting_tol;
  return o;
}

CostModel RunConfig::cost_model() const { return CostModel(lagrangian(), t, solver.cost_evaluation, minimizer_options()); }

RunConfig parse_config(const Json& doc, const std::filesystem::path& base) {
  require_object(doc, "config");
  reject_unknown(doc, {"manifold", "lagrangian", "t", "measures", "solver", "s", "seed", "output"}, "");
  RunConfig cfg;

  if (!doc.contains("manifold")) throw InputError("missing key", "manifold");
  {
    const Json& m = require_object(doc["manifold"], "manifold");
    reject_unknown(m, {"kind", "dim", "params"}, "manifold.");
    if (!m.contains("kind")) throw InputError("missing key", "manifold.kind");
    ManifoldKind kind;
    try {
      kind = manifold_kind_from_string(text(m["kind"], "manifold.kind"));
    } catch (const InputError& e) {
      throw InputError(e.what(), "manifold.kind");
    }
    int dim = 2;
    if (m.contains("dim")) {
      if (!m["dim"].is_number_integer()) throw InputError("expected an integer", "manifold.dim");
      dim = m["dim"].get<int>();
    }
    std::map<std::string, double> params;
    if (m.contains("params")) {
      const Json& p = require_object(m["params"], "manifold.params");
      for (auto it = p.begin(); it != p.end(); ++it) params[it.key()] = number(it.value(), "manifold.params." + it.key());
    }
    cfg.manifold = ManifoldModel(kind, dim, params);
  }

  if (!doc.contains("lagrangian")) throw InputError("missing key", "lagrangian");
  {
    const Json& l = require_object(doc["lagrangian"], "lagrangian");
    reject_unknown(l, {"kind", "r"}, "lagrangian.");
    const std::string kind = l.contains("kind") ? text(l["kind"], "lagrangian.kind") : "power_metric";
    if (kind != "power_metric") throw InputError("only power_metric Lagrangians can be configured", "lagrangian.kind");
    if (!l.contains("r")) throw InputError("missing key", "lagrangian.r");
    cfg.r = number(l["r"], "lagrangian.r");
    if (!(cfg.r > 1)) throw InputError("r must be > 1", "lagrangian.r");
  }

  if (doc.contains("t")) cfg.t = positive(doc["t"], "t");

  if (doc.contains("measures")) {
    const Json& ms = require_object(doc["measures"], "measures");
    reject_unknown(ms, {"mu", "nu"}, "measures.");
    if (ms.contains("mu")) cfg.mu = measure_spec(ms["mu"], base, "measures.mu");
    if (ms.contains("nu")) cfg.nu = measure_spec(ms["nu"], base, "measures.nu");
  }

  if (doc.contains("solver")) {
    const Json& s = require_object(doc["solver"], "solver");
    reject_unknown(s, {"integrator_steps", "shooting_tol", "lp_tol", "cost_evaluation"}, "solver.");
    if (s.contains("integrator_steps")) {
      if (!s["integrator_steps"].is_number_integer() || s["integrator_steps"].get<long>() < 2)
        throw InputError("expected an integer >= 2", "solver.integrator_steps");
      cfg.solver.integrator_steps = s["integrator_steps"].get<int>();
    }
    if (s.contains("shooting_tol")) cfg.solver.shooting_tol = positive(s["shooting_tol"], "solver.shooting_tol");
    if (s.contains("lp_tol")) cfg.solver.lp_tol = positive(s["lp_tol"], "solver.lp_tol");
    if (s.contains("cost_evaluation"))
      cfg.solver.cost_evaluation = cost_evaluation_from_string(text(s["cost_evaluation"], "solver.cost_evaluation"));
  }

  if (doc.contains("s")) {
    if (!doc["s"].is_array()) throw InputError("expected an array of reals", "s");
    for (const Json& v : doc["s"]) cfg.s.push_back(number(v, "s"));
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw InputError("expected a non-negative integer", "seed");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("output")) {
    std::filesystem::path p = text(doc["output"], "output");
    cfg.output = p.is_absolute() || base.empty() ? p : base / p;
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file " + path.string(), "config");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what(), "config");
  }
  return parse_config(doc, path.parent_path());
}

DiscreteMeasure parse_measure_json(const ManifoldModel& m, const Json& atoms, const std::string& key) {
  if (!atoms.is_array()) throw InputError("expected an array of {coords, weight}", key);
  std::vector<Point> support;
  std::vector<double> weights;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string at = key + "[" + std::to_string(i) + "]";
    const Json& a = require_object(atoms[i], at);
    reject_unknown(a, {"coords", "weight"}, at + ".");
    if (!a.contains("coords") || !a["coords"].is_array()) throw InputError("expected a coords array", at + ".coords");
    if (!a.contains("weight")) throw InputError("missing key", at + ".weight");
    Vec c(static_cast<Eigen::Index>(a["coords"].size()));
    for (std::size_t k = 0; k < a["coords"].size(); ++k) c[static_cast<Eigen::Index>(k)] = number(a["coords"][k], at + ".coords");
    support.push_back(atom(m, c, at + ".coords"));
    weights.push_back(number(a["weight"], at + ".weight"));
  }
  return make_measure(m, std::move(support), std::move(weights), key);
}

DiscreteMeasure parse_measure_csv(const ManifoldModel& m, const std::string& body, const std::string& key) {
  std::istringstream in(body);
  std::string line;
  std::vector<Point> support;
  std::vector<double> weights;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = trim(line);
    if (row.empty() || row[0] == '#') continue;
    std::vector<double> vals;
    std::stringstream fields(row);
    std::string f;
    bool numeric = true;
    while (std::getline(fields, f, ',')) {
      double v;
      if (!parse_real(f, v)) numeric = false;
      vals.push_back(v);
    }
    const bool header = first && !numeric;
    first = false;
    if (header) continue;
    const std::string at = key + ":" + std::to_string(lineno);
    if (!numeric) throw InputError("non-numeric field", at);
    if (static_cast<int>(vals.size()) != m.dim() + 1)
      throw InputError("expected " + std::to_string(m.dim() + 1) + " fields (coords then weight)", at);
    support.push_back(atom(m, Eigen::Map<Vec>(vals.data(), m.dim()), at));
    weights.push_back(vals.back());
  }
  return make_measure(m, std::move(support), std::move(weights), key);
}

DiscreteMeasure load_measure(const ManifoldModel& m, const MeasureSpec& spec, const std::string& key) {
  if (!spec.file) return parse_measure_json(m, spec.inline_atoms, key);
  std::ifstream in(*spec.file);
  if (!in) throw InputError("cannot read " + spec.file->string(), key);
  std::stringstream ss;
  ss << in.rdbuf();
  if (spec.file->extension() == ".json") {
    Json doc;
    try {
      doc = Json::parse(ss.str());
    } catch (const Json::parse_error& e) {
      throw InputError(std::string("invalid JSON: ") + e.what(), key);
    }
    return parse_measure_json(m, doc, key);
  }
  return parse_measure_csv(m, ss.str(), key);
}

std::vector<double> parse_reals(const std::string& body, const std::string& key) {
  std::vector<double> out;
  std::stringstream in(body);
  std::string f;
  while (std::getline(in, f, ',')) {
    double v;
    if (!parse_real(f, v)) throw InputError("expected comma-separated reals, got '" + body + "'", key);
    out.push_back(v);
  }
  if (out.empty()) throw InputError("expected at least one real", key);
  return out;
}

Json point_to_json(const Point& p) {
  Json j;
  j["chart"] = p.chart;
  j["coords"] = std::vector<double>(p.coords.data(), p.coords.data() + p.coords.size());
  return j;
}

Json plan_to_json(const TransportPlan& plan, const std::string& method, double cost) {
  Json j;
  j["rows"] = plan.rows;
  j["cols"] = plan.cols;
  j["method"] = method;
  j["cost"] = cost;
  Json entries = Json::array();
  for (const PlanEntry& e : plan.entries) entries.push_back(Json{{"i", e.i}, {"j", e.j}, {"mass", e.mass}});
  j["entries"] = entries;
  return j;
}

Json potentials_to_json(const DualPotentials& pot) {
  Json j;
  j["convention"] = "psi_j - phi_i <= c_ij";
  j["phi"] = std::vector<double>(pot.phi.data(), pot.phi.data() + pot.phi.size());
  j["psi"] = std::vector<double>(pot.psi.data(), pot.psi.data() + pot.psi.size());
  return j;
}

void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& body) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw InputError("cannot write " + (dir / name).string(), "output");
  out << body;
}

}  // namespace lot
