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

// Acceptance runner: one PASS/FAIL line per criterion, exit 1 on any failure.
#include "lot/suites.hpp"
#include "oracles.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

using namespace lot;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << " [" << what << "]";
    }
  }
};

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<void(Outcome&)> run;
};

const std::vector<ManifoldModel>& models() {
  static const std::vector<ManifoldModel> all = {ManifoldModel::euclidean(2), ManifoldModel::torus(2),
                                                 ManifoldModel::sphere(1.0), ManifoldModel::hyperbolic()};
  return all;
}

std::string name(const ManifoldModel& m) { return to_string(m.kind()); }

CostModel power_cost(const ManifoldModel& m, double r, double t, CostEvaluation eval = CostEvaluation::minimizer) {
  return CostModel(LagrangianModel::power_metric(m, r), t, eval);
}

std::vector<Point> grid_1d(const ManifoldModel& m, int n, double lo, double hi) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back(make_point(m, {lo + (hi - lo) * i / (n - 1)}));
  return pts;
}

std::vector<double> random_weights(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0;
  for (double& x : w) total += (x = u(rng));
  for (double& x : w) x /= total;
  return w;
}

void closed_form_cost(Outcome& o) {
  double worst = 0.0;
  std::uint64_t seed = 1;
  for (const ManifoldModel& m : models())
    for (double r : {1.5, 2.0, 3.0})
      for (double t : {0.5, 1.0, 2.0}) {
        const CertificateReport rep = closed_form_check(power_cost(m, r, t), 50, seed++, 1e-5);
        worst = std::max(worst, rep.get("max_error"));
        o.require(rep.pass && rep.get("pairs") == 50, name(m) + " r=" + format_real(r) + " t=" + format_real(t));
      }
  o.detail << " max_error=" << worst;
}

void exponent_pin(Outcome& o) {
  for (const ManifoldModel& m : models()) {
    const CertificateReport rep = closed_form_check(power_cost(m, 2.0, 2.0), 50, 99, 1e-5, true);
    const double ratio = rep.get("max_ratio");
    o.require(!rep.pass, name(m) + " statement form passed");
    o.require(std::abs(ratio - 4.0) <= 1e-4, name(m) + " ratio " + format_real(ratio));
    if (m.kind() == ManifoldKind::euclidean) o.detail << " ratio=" << ratio;
  }
}

void duality_calibration(Outcome& o) {
  std::mt19937_64 rng(3);
  double gap = 0, sub = 0, eq = 0;
  for (int k = 0; k < 20; ++k) {
    const ManifoldModel& m = models()[static_cast<std::size_t>(k % 4)];
    const int n_mu = 10 + 10 * k, n_nu = 200 - 9 * k;
    const CostModel c = power_cost(m, k % 3 == 0 ? 1.5 : (k % 3 == 1 ? 2.0 : 3.0), 1.0, CostEvaluation::closed_form);
    const DiscreteMeasure mu = make_measure(m, random_cloud(m, rng, n_mu, 0.6), random_weights(rng, n_mu));
    const DiscreteMeasure nu = make_measure(m, random_cloud(m, rng, n_nu, 0.6), random_weights(rng, n_nu));
    const Mat C = cost_matrix(c, mu, nu);
    const Solution s = solve_exact(C, mu, nu);
    const CertificateReport d = check_duality(s, C, mu.weights, nu.weights, 1e-9);
    const CertificateReport cal = check_calibration(s.plan, s.potentials, C, 1e-9);
    gap = std::max(gap, d.get("gap"));
    sub = std::max(sub, cal.get("subsolution_residual"));
    eq = std::max(eq, cal.get("equality_residual"));
    o.require(d.pass && cal.pass && check_marginals(s.plan, mu.weights, nu.weights).pass, "instance " + std::to_string(k));
  }
  o.detail << " gap=" << gap << " subsolution=" << sub << " equality=" << eq;
}

void graph_concentration(Outcome& o) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    const ManifoldModel& m = models()[static_cast<std::size_t>(k % 4)];
    const int n = 10 + 10 * (k % 20);
    const CostModel c = power_cost(m, 2.0, 1.0, CostEvaluation::closed_form);
    const DiscreteMeasure mu = uniform_measure(m, random_cloud(m, rng, n, 0.6));
    const DiscreteMeasure nu = uniform_measure(m, random_cloud(m, rng, n, 0.6));
    const Mat C = cost_matrix(c, mu, nu);
    const Solution s = solve_exact(C, mu, nu);
    const UniquenessProbe probe = uniqueness_probe(C, mu.weights, nu.weights, s);
    o.require(split_rows(s.plan) == 0 && static_cast<int>(s.plan.entries.size()) == n,
              "instance " + std::to_string(k) + " not a permutation");
    o.require(probe.unique, "instance " + std::to_string(k) + " has a second optimal plan");
  }
  const auto e = ManifoldModel::euclidean(2);
  const CostModel c = power_cost(e, 2.0, 1.0, CostEvaluation::closed_form);
  const DiscreteMeasure mu = uniform_measure(e, {make_point(e, {0, 0}), make_point(e, {1, 1})});
  const DiscreteMeasure nu = uniform_measure(e, {make_point(e, {1, 0}), make_point(e, {0, 1})});
  const Mat C = cost_matrix(c, mu, nu);
  const Solution s = solve_exact(C, mu, nu);
  const UniquenessProbe probe = uniqueness_probe(C, mu.weights, nu.weights, s);
  const CertificateReport push = pushforward_check(map_from_plan(probe.averaged, mu, nu), mu, nu, c, s.cost);
  o.require(!probe.unique && split_rows(probe.averaged) == 2, "tie not detected");
  o.require(!push.pass && push.get("split_rows") == 2, "tie plan not reported as SPLIT");
  o.detail << " tie split_rows=" << split_rows(probe.averaged);
}

void map_formulas(Outcome& o) {
  std::mt19937_64 rng(5);
  double image_gap = 0, grad_gap = 0;
  const auto check = [&](const CostModel& c, const DiscreteMeasure& mu, const DiscreteMeasure& nu, double r,
                         const std::string& label) {
    const Solution s = solve_exact(cost_matrix(c, mu, nu), mu, nu);
    const MongeMap flow = map_from_potentials(c, s.potentials.psi, mu, nu);
    const MongeMap closed = dr_map_all(c.manifold(), flow, r, c.t(), nu);
    double img = 0, grad = 0;
    for (std::size_t i = 0; i < flow.size(); ++i) {
      img = std::max(img, dist(c.manifold(), flow.images[i], closed.images[i]));
      const Superdifferential sd = c.superdifferential(flow.sources[i], flow.images[i]);
      grad = std::max(grad, (sd.at_x.components + flow.gradients[i].components).norm());
    }
    image_gap = std::max(image_gap, img);
    grad_gap = std::max(grad_gap, grad);
    o.require(img <= 1e-5 && grad <= 1e-5, label);
  };
  for (const ManifoldModel& m : {ManifoldModel::euclidean(2), ManifoldModel::hyperbolic()})
    for (double r : {1.5, 2.0, 3.0}) {
      const std::string label = name(m) + " r=" + format_real(r);
      const CostModel c = power_cost(m, r, 1.0);
      check(c, uniform_measure(m, random_cloud(m, rng, 8, 0.6)), uniform_measure(m, random_cloud(m, rng, 1, 0.6)), r,
            label + " single target");
      check(c, uniform_measure(m, random_cloud(m, rng, 6, 0.6)), uniform_measure(m, random_cloud(m, rng, 6, 0.6)), r,
            label + " minimizer");
      const CostModel cf = power_cost(m, r, 1.0, CostEvaluation::closed_form);
      check(cf, uniform_measure(m, random_cloud(m, rng, 30, 0.6)), uniform_measure(m, random_cloud(m, rng, 30, 0.6)), r,
            label + " full");
    }
  o.detail << " image_gap=" << image_gap << " gradient_gap=" << grad_gap;
}

void rearrangement(Outcome& o) {
  const auto e = ManifoldModel::euclidean(1);
  const CostModel c = power_cost(e, 2.0, 1.0, CostEvaluation::closed_form);
  const DiscreteMeasure mu = uniform_measure(e, grid_1d(e, 500, 0, 1));
  const DiscreteMeasure nu = uniform_measure(e, grid_1d(e, 500, 1, 2));
  const Solution s = solve_exact(cost_matrix(c, mu, nu), mu, nu);
  const MongeMap map = map_from_potentials(c, s.potentials.psi, mu, nu);
  double mae = 0;
  bool monotone = true;
  for (std::size_t i = 0; i < map.size(); ++i) {
    mae += std::abs(map.images[i].coords[0] - map.sources[i].coords[0] - 1.0);
    if (i > 0 && !(map.images[i].coords[0] > map.images[i - 1].coords[0])) monotone = false;
  }
  mae /= static_cast<double>(map.size());
  std::vector<double> xs, ys;
  for (const Point& p : mu.support) xs.push_back(p.coords[0]);
  for (const Point& p : nu.support) ys.push_back(p.coords[0]);
  const double oracle = oracle::monotone_coupling_cost(xs, mu.weights, ys, nu.weights, [](double d) { return d * d; });
  o.require(mae <= 1e-3, "mean absolute error");
  o.require(monotone, "map not monotone");
  o.require(std::abs(s.cost - oracle) <= 1e-9, "LP optimum differs from monotone coupling");
  o.detail << " mae=" << mae << " lp=" << s.cost << " oracle=" << oracle;
}

void energy_conservation(Outcome& o) {
  SuiteOptions opts;
  opts.seed = 7;
  for (const ManifoldModel& m : models())
    for (double r : {1.5, 2.0, 3.0}) {
      const SuiteResult res = flows_suite(power_cost(m, r, 1.0), opts);
      for (const CertificateReport& rep : res.checks) {
        o.require(rep.pass, name(m) + " r=" + format_real(r) + " " + rep.name);
        if (rep.has("max_relative_spread") && m.kind() == ManifoldKind::euclidean && r == 2.0)
          o.detail << " " << rep.name << "=" << rep.get("max_relative_spread");
      }
    }
}

void superdifferential_formula(Outcome& o) {
  double worst = 0;
  for (const ManifoldModel& m : models()) {
    const CertificateReport rep = superdifferential_check(power_cost(m, 2.0, 1.0), 100, 8, 1e-4);
    worst = std::max(worst, rep.get("max_relative_error"));
    o.require(rep.pass && rep.get("pairs") == 100, name(m));
  }
  o.detail << " max_relative_error=" << worst;
}

void interpolation_identities(Outcome& o) {
  std::mt19937_64 rng(9);
  struct Case {
    ManifoldModel m;
    double r, t;
    int n;
  };
  const auto e1 = ManifoldModel::euclidean(1);
  const std::vector<Case> cases = {{e1, 2.0, 1.0, 40},
                                   {e1, 3.0, 2.0, 40},
                                   {ManifoldModel::euclidean(2), 2.0, 1.0, 30},
                                   {ManifoldModel::euclidean(2), 1.5, 2.0, 30},
                                   {ManifoldModel::hyperbolic(), 2.0, 1.0, 20},
                                   {ManifoldModel::sphere(1.0), 2.0, 1.0, 20}};
  for (const Case& k : cases) {
    const CostModel c = power_cost(k.m, k.r, k.t, CostEvaluation::closed_form);
    const DiscreteMeasure mu = uniform_measure(k.m, random_cloud(k.m, rng, k.n, 0.5));
    const DiscreteMeasure nu = uniform_measure(k.m, random_cloud(k.m, rng, k.n, 0.5));
    const Solution s = solve_exact(cost_matrix(c, mu, nu), mu, nu);
    const std::vector<double> grid = {0.25 * k.t, 0.5 * k.t, 0.75 * k.t};
    const InterpolationPath path = build_path(c, mu, map_from_potentials(c, s.potentials.psi, mu, nu), grid);
    for (double si : grid) {
      const std::string label = name(k.m) + std::to_string(k.m.dim()) + " s=" + format_real(si);
      o.require(verify_restriction_identity(path, si, 1e-6).pass, label + " restriction");
      o.require(verify_midpoint_optimality(path, si, 1e-6).pass, label + " midpoint");
      o.require(verify_injectivity_and_inverse(path, si).pass, label + " injectivity");
      o.require(verify_cost_additivity(path, si, nu, 1e-6).pass, label + " additivity");
    }
  }
  o.detail << " instances=" << cases.size();
}

void legendre_identities(Outcome& o) {
  SuiteOptions opts;
  opts.seed = 10;
  opts.legendre_points = 1000;
  for (const ManifoldModel& m : models())
    for (double r : {1.5, 2.0, 3.0}) {
      const SuiteResult res = legendre_suite(LagrangianModel::power_metric(m, r), opts);
      for (const CertificateReport& rep : res.checks) o.require(rep.pass, name(m) + " r=" + format_real(r) + " " + rep.name);
    }
}

void semiconcavity(Outcome& o) {
  SuiteOptions opts;
  opts.seed = 11;
  double gap = 0;
  for (const ManifoldModel& m : models()) {
    const SuiteResult res = semiconcavity_suite(power_cost(m, 2.0, 1.0), opts);
    for (const CertificateReport& rep : res.checks) {
      o.require(rep.pass, name(m) + " " + rep.name);
      if (rep.has("max_gradient_gap")) gap = std::max(gap, rep.get("max_gradient_gap"));
      if (rep.has("k_estimate")) o.require(std::isfinite(rep.get("k_estimate")), name(m) + " modulus not finite");
    }
  }
  o.require(gap <= 1e-5, "touching gradient gap");
  o.detail << " max_gradient_gap=" << gap;
}

void determinism(Outcome& o) {
  SuiteOptions opts;
  opts.seed = 12;
  opts.legendre_points = 200;
  opts.certificate_samples = 30;
  for (const ManifoldModel& m : {ManifoldModel::euclidean(2), ManifoldModel::hyperbolic()}) {
    const CostModel c = power_cost(m, 2.0, 1.0);
    for (const std::string& suite : suite_names()) {
      const std::string first = dump_json(run_suite(suite, c, opts).to_json());
      const std::string second = dump_json(run_suite(suite, c, opts).to_json());
      o.require(first == second, name(m) + " " + suite);
    }
    std::mt19937_64 rng(13);
    const DiscreteMeasure mu = uniform_measure(m, random_cloud(m, rng, 12, 0.5));
    const DiscreteMeasure nu = uniform_measure(m, random_cloud(m, rng, 12, 0.5));
    const Mat par = cost_matrix(c, mu, nu), ser = cost_matrix_serial(c, mu, nu);
    o.require(par.cwiseEqual(ser).all(), name(m) + " parallel cost matrix differs from serial");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lot acceptance criteria"};
  std::vector<int> only;
  app.add_option("criteria", only, "criterion numbers to run (default: all)");
  CLI11_PARSE(app, argc, argv);
  const std::set<int> selected(only.begin(), only.end());

  const std::vector<Criterion> criteria = {
      {1, "closed-form cost", 60, closed_form_cost},
      {2, "exponent pin", 5, exponent_pin},
      {3, "duality and calibration", 30, duality_calibration},
      {4, "graph concentration and uniqueness", 30, graph_concentration},
      {5, "map-formula consistency", 60, map_formulas},
      {6, "1-D rearrangement", 30, rearrangement},
      {7, "energy conservation", 30, energy_conservation},
      {8, "superdifferential", 60, superdifferential_formula},
      {9, "interpolation identities", 120, interpolation_identities},
      {10, "Legendre and Hamiltonian identities", 10, legendre_identities},
      {11, "semi-concavity certificates", 60, semiconcavity},
      {12, "determinism", 0, determinism},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && secs > c.budget_s) {
      o.pass = false;
      o.detail << " [runtime over " << c.budget_s << " s]";
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %-38s %7.2fs%s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs, o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
