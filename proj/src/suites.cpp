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

#include "lot/suites.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> random_weights(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  double s = 0.0;
  for (double& x : w) s += (x = u(rng));
  for (double& x : w) x /= s;
  return w;
}

Point shifted(const ManifoldModel& m, const Point& x, int k, double h) {
  Point p = x;
  p.coords[k] += h;
  return canonicalize(m, p);
}

int flow_steps(int per_unit, double t) {
  const int n = std::max(2, static_cast<int>(std::lround(per_unit * t)));
  return n + n % 2;
}

// Points in the chart cube of half-width `radius` around `center`.
std::vector<Point> cloud_near(const ManifoldModel& m, const Vec& center, std::mt19937_64& rng, int n, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) {
    Vec c = center;
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] += u(rng);
    pts.push_back(make_point(m, c));
  }
  return pts;
}

CostModel fast_cost(const CostModel& cost) {
  if (cost.lagrangian().kind() != LagrangianKind::power_metric) return cost;
  return CostModel(cost.lagrangian(), cost.t(), CostEvaluation::closed_form, cost.options());
}

}  // namespace

bool SuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CertificateReport& r) { return r.pass; });
}

Json SuiteResult::to_json() const {
  Json j;
  j["name"] = name;
  j["pass"] = pass();
  Json arr = Json::array();
  for (const CertificateReport& r : checks) arr.push_back(r.to_json());
  j["checks"] = arr;
  return j;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"flows", "legendre", "semiconcavity", "twist", "duality"};
  return names;
}

std::vector<Point> random_cloud(const ManifoldModel& m, std::mt19937_64& rng, int n, double spread) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back(sample_point(m, rng, spread));
  return pts;
}

SuiteResult run_suite(const std::string& name, const CostModel& cost, const SuiteOptions& opts) {
  if (name == "flows") return flows_suite(cost, opts);
  if (name == "legendre") return legendre_suite(cost.lagrangian(), opts);
  if (name == "semiconcavity") return semiconcavity_suite(cost, opts);
  if (name == "twist") return twist_suite(cost, opts);
  if (name == "duality") return duality_suite(cost, opts);
  throw InputError("unknown suite '" + name + "'", "suite");
}

SuiteResult legendre_suite(const LagrangianModel& lag, const SuiteOptions& opts) {
  const ManifoldModel& m = lag.manifold();
  std::mt19937_64 rng(opts.seed);
  double round_trip = 0.0, dhdp = 0.0, fenchel = 0.0;
  for (int k = 0; k < opts.legendre_points; ++k) {
    const Point x = sample_point(m, rng, 0.6);
    const Tangent v{x, sample_vector(m.dim(), rng, 1.5)};
    const Cotangent p = fiber_derivative(lag, v);
    const Tangent back = legendre_inverse(lag, p);
    const double scale = 1.0 + v.components.norm();
    round_trip = std::max(round_trip, (back.components - v.components).norm() / scale);
    const double e = energy(lag, v);
    fenchel = std::max(fenchel, std::abs(hamiltonian(lag, p) - e) / (1.0 + std::abs(e)));
    if (k % 10 != 0) continue;
    // dH/dp by central differences.
    const double h = 1e-6 * (1.0 + p.components.norm());
    Vec g(m.dim());
    for (int i = 0; i < m.dim(); ++i) {
      Cotangent pp = p, pm = p;
      pp.components[i] += h;
      pm.components[i] -= h;
      g[i] = (hamiltonian(lag, pp) - hamiltonian(lag, pm)) / (2 * h);
    }
    dhdp = std::max(dhdp, (g - v.components).norm() / scale);
  }
  CertificateReport rt("legendre_round_trip");
  rt.metric("points", opts.legendre_points).metric("max_error", round_trip).metric("tolerance", 1e-8);
  rt.require(round_trip <= 1e-8, "inverse Legendre transform does not recover v");
  CertificateReport hp("hamiltonian_gradient");
  hp.metric("max_error", dhdp).metric("tolerance", 1e-5);
  hp.require(dhdp <= 1e-5, "dH/dp at L(v) differs from v");
  CertificateReport fe("fenchel_energy");
  fe.metric("max_error", fenchel).metric("tolerance", 1e-9);
  fe.require(fenchel <= 1e-9, "H(L(v)) differs from E(v)");
  std::mt19937_64 probe_rng(opts.seed + 1);
  return {"legendre", {rt, hp, fe, tonelli_probe(lag, probe_rng)}};
}

CertificateReport hamiltonian_energy_check(const LagrangianModel& lag, double t, int trajectories, int steps_per_unit,
                                           std::uint64_t seed) {
  const ManifoldModel& m = lag.manifold();
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  int frozen = 0;
  for (int k = 0; k < trajectories; ++k) {
    const Point x = sample_point(m, rng, 0.5);
    const Cotangent p = fiber_derivative(lag, Tangent{x, sample_vector(m.dim(), rng, 1.0)});
    const FlowTrajectory tr = hamiltonian_trajectory(lag, p, t, flow_steps(steps_per_unit, t));
    if (tr.frozen_at >= 0) ++frozen;
    double lo = kInf, hi = -kInf;
    for (const Cotangent& s : tr.states) {
      const double h = hamiltonian(lag, s);
      lo = std::min(lo, h);
      hi = std::max(hi, h);
    }
    if (hi > lo) worst = std::max(worst, (hi - lo) / std::max({std::abs(hi), std::abs(lo), 1e-300}));
  }
  const double tol = m.flat() && steps_per_unit >= 1000 ? 1e-8 : 1e-6;
  CertificateReport rep("hamiltonian_energy");
  rep.metric("trajectories", trajectories)
      .metric("step", 1.0 / steps_per_unit)
      .metric("max_relative_spread", worst)
      .metric("tolerance", tol)
      .metric("frozen", frozen);
  rep.require(worst <= tol, "energy drifts along a Hamiltonian trajectory");
  return rep;
}

SuiteResult flows_suite(const CostModel& cost, const SuiteOptions& opts) {
  const LagrangianModel& lag = cost.lagrangian();
  SuiteResult out{"flows", {hamiltonian_energy_check(lag, cost.t(), opts.flow_trajectories, opts.steps_per_unit, opts.seed)}};
  std::mt19937_64 rng(opts.seed + 1);
  double worst = 0.0;
  int ambiguous = 0;
  for (int k = 0; k < opts.minimizer_pairs; ++k) {
    const Point x = sample_point(lag.manifold(), rng, 0.5), y = sample_point(lag.manifold(), rng, 0.5);
    const Curve c = minimize(lag, CostQuery{x, y, cost.t()}, cost.options());
    worst = std::max(worst, c.energy_spread);
    if (c.ambiguous) ++ambiguous;
  }
  CertificateReport rep("minimizer_energy");
  rep.metric("pairs", opts.minimizer_pairs).metric("max_relative_spread", worst).metric("tolerance", 1e-6).metric("ambiguous", ambiguous);
  rep.require(worst <= 1e-6, "energy drifts along an accepted minimizer");
  out.checks.push_back(rep);
  return out;
}

CertificateReport superdifferential_check(const CostModel& cost, int pairs, std::uint64_t seed, double tol) {
  const ManifoldModel& m = cost.manifold();
  std::mt19937_64 rng(seed);
  const double h = 1e-5;
  double worst = 0.0;
  int used = 0, skipped = 0;
  while (used < pairs) {
    const Point x = sample_point(m, rng, 0.6), y = sample_point(m, rng, 0.6);
    if (near_cut_locus(m, x, y, 0.05) || dist(m, x, y) < 0.05) {
      ++skipped;
      continue;
    }
    ++used;
    const Superdifferential sd = cost.superdifferential(x, y);
    Vec fx(m.dim()), fy(m.dim());
    for (int k = 0; k < m.dim(); ++k) {
      fx[k] = (cost(shifted(m, x, k, h), y) - cost(shifted(m, x, k, -h), y)) / (2 * h);
      fy[k] = (cost(x, shifted(m, y, k, h)) - cost(x, shifted(m, y, k, -h))) / (2 * h);
    }
    worst = std::max(worst, (sd.at_x.components - fx).norm() / std::max(fx.norm(), 1e-3));
    worst = std::max(worst, (sd.at_y.components - fy).norm() / std::max(fy.norm(), 1e-3));
  }
  CertificateReport rep("superdifferential");
  rep.metric("pairs", used).metric("skipped_near_cut_locus", skipped).metric("max_relative_error", worst).metric("tolerance", tol);
  rep.require(worst <= tol, "superdifferential differs from finite differences of the cost");
  return rep;
}

SuiteResult twist_suite(const CostModel& cost, const SuiteOptions& opts) {
  const ManifoldModel& m = cost.manifold();
  SuiteResult out{"twist", {}};
  std::mt19937_64 rng(opts.seed);
  for (int b = 0; b < opts.twist_bases; ++b) {
    const Point x = sample_point(m, rng, 0.5);
    std::vector<Point> ys;
    while (ys.size() < 6) {
      const Point y = sample_point(m, rng, 0.6);
      if (!near_cut_locus(m, x, y, 0.05)) ys.push_back(y);
    }
    CertificateReport rep = twist_probe(cost.lagrangian(), x, ys, cost.t(), cost.options());
    rep.name += "#" + std::to_string(b);
    out.checks.push_back(rep);
  }
  out.checks.push_back(superdifferential_check(cost, opts.superdifferential_pairs, opts.seed + 1));
  return out;
}

CertificateReport closed_form_check(const CostModel& cost, int pairs, std::uint64_t seed, double tol,
                                    bool statement_form) {
  const LagrangianModel& lag = cost.lagrangian();
  if (lag.kind() != LagrangianKind::power_metric) throw InputError("closed form needs a power_metric Lagrangian", "lagrangian");
  const ManifoldModel& m = lag.manifold();
  const double r = lag.r(), t = cost.t();
  const double factor = statement_form ? std::pow(t, r - 1.0) : std::pow(t, 1.0 - r);
  std::mt19937_64 rng(seed);
  double worst = 0.0, ratio = 0.0;
  int used = 0;
  while (used < pairs) {
    const Point x = sample_point(m, rng, 0.7), y = sample_point(m, rng, 0.7);
    if (near_cut_locus(m, x, y, 1e-3)) continue;
    ++used;
    const double c = cost(x, y);
    const double ref = factor * std::pow(dist(m, x, y), r);
    worst = std::max(worst, std::abs(c - ref) / (1.0 + std::abs(c)));
    if (c > 1e-8) ratio = std::max(ratio, ref / c);
  }
  CertificateReport rep(statement_form ? "closed_form_statement" : "closed_form");
  rep.metric("r", r).metric("t", t).metric("pairs", used).metric("max_error", worst).metric("max_ratio", ratio).metric("tolerance", tol);
  rep.require(worst <= tol, "boundary-value cost differs from the closed form");
  return rep;
}

SliceSetup slice_setup(const ManifoldModel& m) {
  Vec c = Vec::Zero(m.dim());
  if (m.kind() == ManifoldKind::torus) c.setConstant(0.3);
  c[0] += 0.1;
  Vec y = c;
  y[0] += 0.25;
  return {Box::cube(c, 0.1), make_point(m, y)};
}

SuiteResult semiconcavity_suite(const CostModel& cost, const SuiteOptions& opts) {
  const ManifoldModel& m = cost.manifold();
  const SliceSetup setup = slice_setup(m);
  SuiteResult out{"semiconcavity", {}};
  const int n = opts.certificate_samples;
  CertifyOptions est;
  est.grid_per_axis = 3;
  est.seed = opts.seed;
  CertifyOptions cert = est;
  cert.seed = opts.seed + 1;

  const auto slice = [&](const Point& y) -> ScalarField {
    return [&m, &cost, y](const Vec& x) { return cost(make_point(m, x), y); };
  };
  const double k = estimate_linear_modulus(slice(setup.target), setup.box, n, est);
  const double k_cert = 1.5 * k + 1e-6;
  ModulusCertificate c = certify_semiconcave(slice(setup.target), setup.box, n, k_cert, cert);
  CertificateReport rep = c.to_report("cost_slice");
  rep.metric("k_estimate", k);
  rep.require(std::isfinite(k_cert), "modulus is not finite");
  out.checks.push_back(rep);

  // Targets on a circle (segment in 1-D) around the slice target.
  std::vector<ScalarField> family;
  double k_family = 0.0;
  const Vec center = setup.box.center();
  for (int j = 0; j < 5; ++j) {
    Vec y = center;
    const double a = 2.0 * M_PI * j / 5;
    if (m.dim() > 1) {
      y[0] += 0.25 * std::cos(a);
      y[1] += 0.25 * std::sin(a);
    } else {
      y[0] += (j % 2 ? 0.25 : -0.25) * (1.0 + 0.1 * j);
    }
    family.push_back(slice(make_point(m, y)));
    k_family = std::max(k_family, estimate_linear_modulus(family.back(), setup.box, n, est));
  }
  const InfFamilyResult inf = inf_family_certificate(family, setup.box, 1.5 * k_family + 1e-6, n, cert);
  CertificateReport irep = inf.certificate.to_report("inf_family");
  irep.metric("members", static_cast<double>(family.size()));
  out.checks.push_back(irep);

  out.checks.push_back(c_transform_touching(cost, opts.seed + 2));
  return out;
}

CertificateReport c_transform_touching(const CostModel& cost_in, std::uint64_t seed, int samples) {
  const CostModel cost = fast_cost(cost_in);
  const ManifoldModel& m = cost.manifold();
  const SliceSetup setup = slice_setup(m);
  const Vec center = setup.box.center();
  std::mt19937_64 rng(seed);
  const DiscreteMeasure mu = uniform_measure(m, cloud_near(m, center, rng, 5, 0.3));
  const DiscreteMeasure nu = uniform_measure(m, cloud_near(m, center, rng, 5, 0.3));
  const Solution sol = solve_exact(cost_matrix(cost, mu, nu), mu, nu);
  const Vec psi = sol.potentials.psi;
  const auto at = [&](const Vec& x) { return c_transform(psi, nu, cost, make_point(m, x)); };
  const int star = at(center).index;

  // Shrink the box until it sits inside the argmax cell of `star`.
  double half = 0.05;
  bool inside = false;
  for (int attempt = 0; attempt < 10 && !inside; ++attempt, half *= 0.5) {
    inside = true;
    for (const Vec& x : sample_box(Box::cube(center, half), 3, 20, seed)) {
      const CTransform ct = at(x);
      if (ct.tie || ct.index != star) {
        inside = false;
        break;
      }
    }
    if (inside) break;
  }
  if (!inside) throw NumericalError("box center lies on a c-transform cell boundary");
  const Box cell = Box::cube(center, half);

  const Point ystar = nu.support[static_cast<std::size_t>(star)];
  const double psi_star = psi[star];
  const ScalarField phi1 = [&](const Vec& x) { return at(x).value; };
  const ScalarField phi2 = [&](const Vec& x) { return psi_star - cost(make_point(m, x), ystar); };
  TouchingOptions opts;
  opts.samples = samples;
  opts.seed = seed;
  CertificateReport rep = touching_criterion(phi1, phi2, sample_box(cell, 3, 10, seed + 1), cell, opts);
  rep.metric("box_half_width", half).metric("argmax_atom", star);
  return rep;
}

SuiteResult duality_suite(const CostModel& cost, const SuiteOptions& opts) {
  const ManifoldModel& m = cost.manifold();
  std::mt19937_64 rng(opts.seed);
  SuiteResult out{"duality", {}};
  for (int k = 0; k < opts.duality_instances; ++k) {
    const int n = opts.duality_atoms;
    const bool equal = k % 2 == 0;
    const DiscreteMeasure mu = equal ? uniform_measure(m, random_cloud(m, rng, n, 0.6))
                                     : make_measure(m, random_cloud(m, rng, n, 0.6), random_weights(rng, n));
    const DiscreteMeasure nu = equal ? uniform_measure(m, random_cloud(m, rng, n, 0.6))
                                     : make_measure(m, random_cloud(m, rng, n, 0.6), random_weights(rng, n));
    const Mat C = cost_matrix(cost, mu, nu);
    const Solution sol = solve_exact(C, mu, nu);
    const std::string tag = "#" + std::to_string(k);
    for (CertificateReport rep : {check_duality(sol, C, mu.weights, nu.weights), check_calibration(sol.plan, sol.potentials, C),
                                  check_marginals(sol.plan, mu.weights, nu.weights)}) {
      rep.name += tag;
      out.checks.push_back(rep);
    }
    double ct = 0.0;
    for (Eigen::Index i = 0; i < C.rows(); ++i)
      ct = std::max(ct, std::abs(sol.potentials.phi[i] - c_transform_row(sol.potentials.psi, C.row(i).transpose()).value));
    CertificateReport crep("c_transform" + tag);
    crep.metric("max_gap", ct).metric("tolerance", 1e-9);
    crep.require(ct <= 1e-9, "phi is not the c-transform of psi");
    out.checks.push_back(crep);
    if (equal) {
      const UniquenessProbe probe = uniqueness_probe(C, mu.weights, nu.weights, sol);
      CertificateReport g("graph_concentration" + tag);
      g.metric("split_rows", split_rows(sol.plan)).metric("entries", static_cast<double>(sol.plan.entries.size()));
      g.require(split_rows(sol.plan) == 0 && static_cast<int>(sol.plan.entries.size()) == n, "optimal plan is not a permutation");
      g.require(probe.unique, "an optimal plan with different support exists");
      out.checks.push_back(g);
    }
  }
  return out;
}

}  // namespace lot
