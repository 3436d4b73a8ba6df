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

#include "lot/monge.hpp"

#include "rethrow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lot {

std::string to_string(MapMethod m) {
  switch (m) {
    case MapMethod::plan_graph: return "plan_graph";
    case MapMethod::potential_flow: return "potential_flow";
    case MapMethod::dr_closed_form: return "dr_closed_form";
  }
  return "unknown";
}

int MongeMap::split_count() const {
  return static_cast<int>(std::count_if(splits.begin(), splits.end(), [](const auto& s) { return !s.empty(); }));
}

std::pair<int, double> nearest_atom(const ManifoldModel& m, const DiscreteMeasure& nu, const Point& p) {
  int best = -1;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < nu.size(); ++j) {
    const double dj = dist(m, p, nu.support[j]);
    if (dj < d) {
      d = dj;
      best = static_cast<int>(j);
    }
  }
  return {best, d};
}

MongeMap map_from_plan(const TransportPlan& plan, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (plan.rows != static_cast<int>(mu.size()) || plan.cols != static_cast<int>(nu.size()))
    throw InputError("plan shape does not match the measures", "plan");
  const std::size_t n = mu.size();
  MongeMap map;
  map.method = MapMethod::plan_graph;
  map.sources = mu.support;
  map.images.resize(n);
  map.targets.assign(n, -1);
  map.residuals.assign(n, 0.0);
  map.splits.resize(n);
  std::vector<std::vector<std::pair<int, double>>> rows(n);
  for (const PlanEntry& e : plan.entries) rows[static_cast<std::size_t>(e.i)].emplace_back(e.j, e.mass);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].empty()) throw InputError("plan row " + std::to_string(i) + " carries no mass", "plan");
    const auto heaviest = std::max_element(rows[i].begin(), rows[i].end(),
                                           [](const auto& a, const auto& b) { return a.second < b.second; });
    map.targets[i] = heaviest->first;
    map.images[i] = nu.support[static_cast<std::size_t>(heaviest->first)];
    if (rows[i].size() > 1) map.splits[i] = rows[i];
  }
  return map;
}

PotentialImage map_from_potential(const CostModel& cost, const Vec& psi, const DiscreteMeasure& nu, const Point& x,
                                  const PotentialMapOptions& opts) {
  const CTransform ct = c_transform(psi, nu, cost, x);
  if (ct.tie) throw AmbiguityError("c-transform argmax is not unique at this point");
  const Point& ystar = nu.support[static_cast<std::size_t>(ct.index)];
  const Superdifferential sd = cost.superdifferential(x, ystar);
  PotentialImage out;
  out.target = ct.index;
  out.grad = Cotangent{sd.at_x.base, -sd.at_x.components};
  const double t = cost.t();
  const Cotangent end = hamiltonian_flow(cost.lagrangian(), out.grad, t, opts.steps > 0 ? opts.steps : default_steps(t));
  out.image = canonicalize(cost.manifold(), end.base);
  out.residual = dist(cost.manifold(), out.image, ystar);
  if (!(out.residual <= opts.consistency_tol))
    throw ConvergenceError("flow image misses the c-transform argmax by " + std::to_string(out.residual), out.residual);
  return out;
}

MongeMap map_from_potentials(const CostModel& cost, const Vec& psi, const DiscreteMeasure& mu,
                             const DiscreteMeasure& nu, const PotentialMapOptions& opts) {
  const std::size_t n = mu.size();
  std::vector<PotentialImage> out(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 2)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      out[i] = map_from_potential(cost, psi, nu, mu.support[i], opts);
    } catch (const Error&) {
      errors[i] = std::current_exception();
    }
  }
  detail::rethrow_first(errors, "atom");
  MongeMap map;
  map.method = MapMethod::potential_flow;
  map.sources = mu.support;
  map.splits.resize(n);
  for (PotentialImage& p : out) {
    map.images.push_back(std::move(p.image));
    map.targets.push_back(p.target);
    map.residuals.push_back(p.residual);
    map.gradients.push_back(std::move(p.grad));
  }
  return map;
}

Point dr_map(const ManifoldModel& m, double r, const Cotangent& grad, double t, bool* critical) {
  if (!(r > 1)) throw InputError("dr_map needs r > 1", "lagrangian.r");
  const double a = dual_norm(m, grad);
  if (critical) *critical = a == 0.0;
  if (a == 0.0) return canonicalize(m, grad.base);
  Tangent v = sharp(m, grad);
  // |v| = (a / r)^{1/(r-1)}; sharp(grad) has norm a.
  v.components *= std::pow(a / r, 1.0 / (r - 1.0)) / a;
  return exp(m, v, t);
}

MongeMap dr_map_all(const ManifoldModel& m, const MongeMap& potential_map, double r, double t,
                    const DiscreteMeasure& nu) {
  if (potential_map.gradients.size() != potential_map.size())
    throw InputError("dr_map needs gradients from a potential_flow map", "map");
  MongeMap map = potential_map;
  map.method = MapMethod::dr_closed_form;
  for (std::size_t i = 0; i < map.size(); ++i) {
    map.images[i] = dr_map(m, r, map.gradients[i], t);
    const auto [k, d] = nearest_atom(m, nu, map.images[i]);
    map.targets[i] = k;
    map.residuals[i] = d;
  }
  return map;
}

CertificateReport pushforward_check(const MongeMap& map, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    const CostModel& cost, std::optional<double> lp_optimum,
                                    const PushforwardOptions& opts) {
  if (map.size() != mu.size()) throw InputError("map is not total on the source support", "map");
  const ManifoldModel& m = cost.manifold();
  const std::size_t n = mu.size();
  std::vector<double> pushed(nu.size(), 0.0);
  double unmatched = 0.0, max_snap = 0.0, map_cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [k, d] = nearest_atom(m, nu, map.images[i]);
    max_snap = std::max(max_snap, d);
    const double w = mu.weights[i];
    if (d <= opts.snap_tol) {
      pushed[static_cast<std::size_t>(k)] += w;
      map_cost += w * cost(mu.support[i], nu.support[static_cast<std::size_t>(k)]);
    } else {
      unmatched += w;
      map_cost += w * cost(mu.support[i], map.images[i]);
    }
  }
  double tv = unmatched;
  for (std::size_t j = 0; j < nu.size(); ++j) tv += std::abs(pushed[j] - nu.weights[j]);
  tv *= 0.5;
  const double lp = lp_optimum ? *lp_optimum : solve_exact(cost_matrix(cost, mu, nu), mu, nu).cost;
  const double excess = map_cost - lp;

  CertificateReport rep("pushforward");
  rep.metric("total_variation", tv)
      .metric("unmatched_mass", unmatched)
      .metric("max_snap_distance", max_snap)
      .metric("map_cost", map_cost)
      .metric("lp_optimum", lp)
      .metric("cost_excess", excess)
      .metric("split_rows", map.split_count());
  rep.require(tv <= opts.tv_tol, "pushed weights differ from the target measure");
  rep.require(std::abs(excess) <= opts.cost_rel_tol * std::abs(lp) + 1e-12, "map cost differs from the optimum");
  rep.require(map.split_count() == 0, "plan splits mass on some rows");
  return rep;
}

}  // namespace lot
