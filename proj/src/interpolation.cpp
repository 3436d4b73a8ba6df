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

#include "lot/interpolation.hpp"

#include "rethrow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int segment_steps(int per_unit, double length) {
  return std::max(2, static_cast<int>(std::ceil(per_unit * length)));
}

// Atom indices used for O(n^2) pair statistics.
std::vector<std::size_t> subsample(std::size_t n, std::size_t cap) {
  std::vector<std::size_t> idx;
  if (n <= cap) {
    for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
    return idx;
  }
  for (std::size_t k = 0; k < cap; ++k) idx.push_back(k * n / cap);
  return idx;
}

struct PairRatio {
  double value = 0.0;
  std::size_t i = 0, j = 0;
};

// max over pairs of d(num_i, num_j) / d(den_i, den_j) restricted to idx[0..count).
PairRatio max_ratio(const ManifoldModel& m, const std::vector<Point>& num, const std::vector<Point>& den,
                    const std::vector<std::size_t>& idx, std::size_t count) {
  PairRatio best;
  for (std::size_t a = 0; a < count; ++a)
    for (std::size_t b = a + 1; b < count; ++b) {
      const std::size_t i = idx[a], j = idx[b];
      const double d = dist(m, den[i], den[j]);
      const double r = d > 0 ? dist(m, num[i], num[j]) / d : kInf;
      if (r > best.value) best = {r, i, j};
    }
  return best;
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

bool diagonal_plan(const TransportPlan& plan) {
  return std::all_of(plan.entries.begin(), plan.entries.end(), [](const PlanEntry& e) { return e.i == e.j || e.mass <= 1e-12; });
}

}  // namespace

std::size_t InterpolationPath::index_of(double s) const {
  for (std::size_t k = 0; k < s_grid.size(); ++k)
    if (std::abs(s_grid[k] - s) <= 1e-12 * std::max(1.0, cost.t())) return k;
  throw InputError("s = " + std::to_string(s) + " is not on the interpolation grid", "s");
}

InterpolationPath build_path(const CostModel& cost, const DiscreteMeasure& mu0, const MongeMap& terminal,
                             std::vector<double> s_grid, const PathOptions& opts) {
  const double t = cost.t();
  if (s_grid.empty()) throw InputError("empty s grid", "s");
  for (std::size_t k = 0; k < s_grid.size(); ++k) {
    if (!(s_grid[k] >= 0.0 && s_grid[k] <= t)) throw InputError("s must lie in [0, t]", "s");
    if (k > 0 && s_grid[k] < s_grid[k - 1]) throw InputError("s grid must be sorted", "s");
  }
  if (terminal.size() != mu0.size() || terminal.gradients.size() != mu0.size())
    throw InputError("terminal map must carry a gradient for every source atom", "map");

  const std::size_t n = mu0.size(), ns = s_grid.size();
  const LagrangianModel& lag = cost.lagrangian();
  std::vector<AtomCurve> curves(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 2)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      AtomCurve& curve = curves[i];
      Cotangent state = terminal.gradients[i];
      double now = 0.0, hmin = kInf, hmax = -kInf;
      const auto advance = [&](double to) {
        if (to <= now) return;
        const FlowTrajectory tr = hamiltonian_trajectory(lag, state, to - now, segment_steps(opts.steps_per_unit, to - now));
        for (const Cotangent& p : tr.states) {
          const double h = hamiltonian(lag, p);
          hmin = std::min(hmin, h);
          hmax = std::max(hmax, h);
        }
        state = tr.states.back();
        now = to;
      };
      for (double s : s_grid) {
        advance(s);
        curve.points.push_back(canonicalize(cost.manifold(), state.base));
      }
      advance(t);
      curve.endpoint_residual = dist(cost.manifold(), state.base, terminal.images[i]);
      if (hmax > hmin) curve.energy_spread = (hmax - hmin) / std::max({std::abs(hmax), std::abs(hmin), 1e-300});
    } catch (const Error&) {
      errors[i] = std::current_exception();
    }
  }
  detail::rethrow_first(errors, "atom");

  InterpolationPath path{cost, s_grid, mu0, terminal, {}, {}, std::move(curves)};
  for (std::size_t k = 0; k < ns; ++k) {
    MongeMap map;
    map.method = MapMethod::potential_flow;
    map.sources = mu0.support;
    map.targets.assign(n, -1);
    map.residuals.assign(n, 0.0);
    map.splits.resize(n);
    for (std::size_t i = 0; i < n; ++i) map.images.push_back(path.curves[i].points[k]);
    path.measures.push_back(DiscreteMeasure{map.images, mu0.weights});
    path.maps.push_back(std::move(map));
  }
  return path;
}

CertificateReport verify_restriction_identity(const InterpolationPath& path, double s, double tol) {
  const std::size_t k = path.index_of(s);
  const double t = path.cost.t();
  const std::size_t n = path.mu0.size();
  std::vector<double> residual(n, 0.0);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 2)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      const Point& x = path.mu0.support[i];
      const Point& z = path.maps[k].images[i];
      const Point& y = path.terminal.images[i];
      const double ct = path.cost(x, y);
      const double first = s > 0 ? path.cost.at_time(s)(x, z) : 0.0;
      const double second = s < t ? path.cost.at_time(t - s)(z, y) : 0.0;
      residual[i] = std::abs(ct - first - second) / (1.0 + ct);
    } catch (const Error&) {
      errors[i] = std::current_exception();
    }
  }
  detail::rethrow_first(errors, "atom");
  double worst = 0.0, endpoint = 0.0, energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    worst = std::max(worst, residual[i]);
    endpoint = std::max(endpoint, path.curves[i].endpoint_residual);
    energy = std::max(energy, path.curves[i].energy_spread);
  }
  CertificateReport rep("restriction_identity");
  rep.metric("s", s)
      .metric("max_residual", worst)
      .metric("tolerance", tol)
      .metric("max_endpoint_residual", endpoint)
      .metric("max_energy_spread", energy);
  rep.require(worst <= tol, "cost does not split along the interpolating curves");
  rep.require(endpoint <= 1e-6, "flow endpoint misses the terminal image");
  rep.require(energy <= 1e-6, "energy drifts along an interpolating curve");
  return rep;
}

CertificateReport verify_midpoint_optimality(const InterpolationPath& path, double s, double rel_tol) {
  const std::size_t k = path.index_of(s);
  CertificateReport rep("midpoint_optimality");
  rep.metric("s", s);
  if (s <= 0.0) {
    rep.metric("lp_optimum", 0.0).metric("pairing_cost", 0.0).note("s = 0: mu_s = mu0, both costs vanish");
    return rep;
  }
  const CostModel cs = path.cost.at_time(s);
  const DiscreteMeasure& mus = path.measures[k];
  const Mat C = cost_matrix(cs, path.mu0, mus);
  const Solution fwd = solve_exact(C, path.mu0.weights, mus.weights);
  const Solution rev = solve_exact(C.transpose(), mus.weights, path.mu0.weights);
  double pairing = 0.0;
  for (Eigen::Index i = 0; i < C.rows(); ++i) pairing += path.mu0.weights[static_cast<std::size_t>(i)] * C(i, i);
  const double gap = std::abs(fwd.cost - pairing), rgap = std::abs(rev.cost - pairing);
  rep.metric("lp_optimum", fwd.cost)
      .metric("pairing_cost", pairing)
      .metric("relative_gap", gap / std::max(std::abs(pairing), 1e-300))
      .metric("reversed_optimum", rev.cost)
      .metric("reversed_relative_gap", rgap / std::max(std::abs(pairing), 1e-300));
  rep.require(gap <= rel_tol * std::abs(pairing) + 1e-12, "discrete optimum is below the pairing cost");
  rep.require(diagonal_plan(fwd.plan), "optimal plan differs from the pairing x -> T_s(x)");
  rep.require(rgap <= rel_tol * std::abs(pairing) + 1e-12, "reversed optimum differs from the pairing cost");
  rep.require(diagonal_plan(rev.plan), "reversed optimal plan differs from the inverse pairing");
  return rep;
}

CertificateReport verify_injectivity_and_inverse(const InterpolationPath& path, double s,
                                                 const InjectivityOptions& opts) {
  const std::size_t k = path.index_of(s);
  const ManifoldModel& m = path.cost.manifold();
  const std::vector<Point>& src = path.mu0.support;
  const std::vector<Point>& img = path.maps[k].images;
  const std::vector<Point>& end = path.terminal.images;
  const std::vector<std::size_t> idx = subsample(src.size(), opts.max_atoms);
  const std::size_t n = idx.size();

  CertificateReport rep("injectivity_and_inverse");
  rep.metric("s", s).metric("atoms", static_cast<double>(n));
  double min_sep = kInf;
  std::size_t ci = 0, cj = 0;
  std::vector<double> nn_img(n, kInf), nn_src(n, kInf);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const double d = dist(m, img[idx[a]], img[idx[b]]);
      const double d0 = dist(m, src[idx[a]], src[idx[b]]);
      if (d < min_sep) {
        min_sep = d;
        ci = idx[a];
        cj = idx[b];
      }
      nn_img[a] = std::min(nn_img[a], d);
      nn_img[b] = std::min(nn_img[b], d);
      nn_src[a] = std::min(nn_src[a], d0);
      nn_src[b] = std::min(nn_src[b], d0);
    }
  double spacing = kInf;
  for (std::size_t a = 0; a < n; ++a)
    if (nn_src[a] > 0) spacing = std::min(spacing, nn_img[a] / nn_src[a]);
  rep.metric("min_image_separation", n > 1 ? min_sep : 0.0);
  if (n > 1 && !(min_sep > opts.collision_tol)) {
    rep.fail("images of atoms " + std::to_string(ci) + " and " + std::to_string(cj) + " collide");
    return rep;
  }

  const PairRatio inv = max_ratio(m, src, img, idx, n), inv_half = max_ratio(m, src, img, idx, n / 2);
  const PairRatio comp = max_ratio(m, end, img, idx, n), comp_half = max_ratio(m, end, img, idx, n / 2);
  rep.metric("inverse_lipschitz", inv.value)
      .metric("inverse_lipschitz_half", inv_half.value)
      .metric("composed_lipschitz", comp.value)
      .metric("composed_lipschitz_half", comp_half.value)
      .metric("nn_spacing_ratio", n > 1 ? spacing : 0.0);
  rep.require(std::isfinite(inv.value) && std::isfinite(comp.value), "Lipschitz estimate is not finite");
  if (n >= 4) {
    rep.require(inv.value <= opts.stability_factor * inv_half.value + 1e-12, "inverse Lipschitz estimate is unstable");
    rep.require(comp.value <= opts.stability_factor * comp_half.value + 1e-12, "composed Lipschitz estimate is unstable");
  } else {
    rep.note("fewer than 4 atoms: stability not assessed");
  }
  if (n < src.size()) rep.note("pair statistics use an evenly strided subsample");
  return rep;
}

CertificateReport verify_cost_additivity(const InterpolationPath& path, double s, const DiscreteMeasure& nu,
                                         double rel_tol) {
  const std::size_t k = path.index_of(s);
  const double t = path.cost.t();
  CertificateReport rep("cost_additivity");
  rep.metric("s", s);
  const double whole = solve_exact(cost_matrix(path.cost, path.mu0, nu), path.mu0, nu).cost;
  const DiscreteMeasure& mus = path.measures[k];
  const double first = s > 0 ? solve_exact(cost_matrix(path.cost.at_time(s), path.mu0, mus), path.mu0.weights, mus.weights).cost : 0.0;
  const double second = s < t ? solve_exact(cost_matrix(path.cost.at_time(t - s), mus, nu), mus.weights, nu.weights).cost : 0.0;
  rep.metric("lp_first", first).metric("lp_second", second).metric("lp_whole", whole);
  rep.metric("relative_gap", relative_gap(first + second, whole));
  rep.require(std::abs(first + second - whole) <= rel_tol * std::abs(whole) + 1e-12, "interpolated costs do not add up");
  return rep;
}

}  // namespace lot
