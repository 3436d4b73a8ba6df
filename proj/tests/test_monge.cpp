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

#include "lot/monge.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace lot;
using doctest::Approx;

namespace {

std::vector<Point> grid_1d(const ManifoldModel& m, int n, double lo, double hi) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back(make_point(m, {lo + (hi - lo) * i / (n - 1)}));
  return pts;
}

std::vector<Point> cloud(const ManifoldModel& m, std::mt19937_64& rng, int n, double spread) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back(sample_point(m, rng, spread));
  return pts;
}

struct Instance {
  DiscreteMeasure mu, nu;
  Solution sol;
};

Instance solve(const CostModel& c, DiscreteMeasure mu, DiscreteMeasure nu) {
  Solution s = solve_exact(cost_matrix(c, mu, nu), mu, nu);
  return {std::move(mu), std::move(nu), std::move(s)};
}

}  // namespace

TEST_CASE("map_from_plan") {
  const auto e = ManifoldModel::euclidean(2);
  const CostModel c(LagrangianModel::power_metric(e, 2), 1.0, CostEvaluation::closed_form);
  std::mt19937_64 rng(3);
  const Instance in = solve(c, uniform_measure(e, cloud(e, rng, 12, 1.0)), uniform_measure(e, cloud(e, rng, 12, 1.0)));
  const MongeMap map = map_from_plan(in.sol.plan, in.mu, in.nu);
  CHECK(map.split_count() == 0);
  std::vector<int> hit(12, 0);
  for (int j : map.targets) ++hit[static_cast<std::size_t>(j)];
  CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
  const CertificateReport push = pushforward_check(map, in.mu, in.nu, c, in.sol.cost);
  CHECK(push.pass);
  CHECK(push.get("max_snap_distance") == 0.0);

  // Swapping two images keeps the pushforward but not the cost.
  MongeMap wrong = map;
  std::swap(wrong.images[0], wrong.images[1]);
  const CertificateReport bad = pushforward_check(wrong, in.mu, in.nu, c);
  CHECK_FALSE(bad.pass);
  CHECK(bad.get("total_variation") <= 1e-15);
  CHECK(bad.get("cost_excess") > 0.0);

  const Instance same = solve(c, in.mu, in.mu);
  const MongeMap id = map_from_plan(same.sol.plan, same.mu, same.mu);
  for (std::size_t i = 0; i < id.size(); ++i) CHECK(id.targets[i] == static_cast<int>(i));
  CHECK(same.sol.cost == 0.0);

  const DiscreteMeasure a = uniform_measure(e, {make_point(e, {0, 0}), make_point(e, {1, 1})});
  const DiscreteMeasure b = uniform_measure(e, {make_point(e, {1, 0}), make_point(e, {0, 1})});
  const Mat C = cost_matrix(c, a, b);
  const Solution s = solve_exact(C, a, b);
  const UniquenessProbe probe = uniqueness_probe(C, a.weights, b.weights, s);
  const MongeMap tied = map_from_plan(probe.averaged, a, b);
  CHECK(tied.split_count() == 2);
  CHECK(tied.splits[0].size() == 2);
  CHECK(tied.splits[0][0].second == Approx(0.25));
  CHECK_FALSE(pushforward_check(tied, a, b, c, s.cost).pass);
}

TEST_CASE("map_from_potential examples") {
  const auto e = ManifoldModel::euclidean(2);
  const CostModel c(LagrangianModel::power_metric(e, 2), 1.0);
  const Point y0 = make_point(e, {0.4, -0.3});
  const DiscreteMeasure single = uniform_measure(e, {y0});
  std::mt19937_64 rng(5);
  for (int k = 0; k < 5; ++k) {
    const Point x = sample_point(e, rng, 1.0);
    const PotentialImage p = map_from_potential(c, Vec::Zero(1), single, x);
    CHECK((p.image.coords - y0.coords).norm() <= 1e-9);
    CHECK((p.grad.components - 2 * (y0.coords - x.coords)).norm() <= 1e-6);
  }

  const Point x = make_point(e, {0.1, 0.2});
  const DiscreteMeasure pair = uniform_measure(e, {x, make_point(e, {1, 1})});
  Vec psi(2);
  psi << 0.0, -10.0;
  const PotentialImage fixed = map_from_potential(c, psi, pair, x);
  CHECK(fixed.target == 0);
  CHECK((fixed.image.coords - x.coords).norm() <= 1e-12);
  CHECK(fixed.grad.components.norm() <= 1e-9);

  const DiscreteMeasure sym = uniform_measure(e, {make_point(e, {1, 0}), make_point(e, {-1, 0})});
  CHECK_THROWS_AS(map_from_potential(c, Vec::Zero(2), sym, make_point(e, {0, 0})), AmbiguityError);
  CHECK_THROWS_AS(map_from_potentials(c, Vec::Zero(2), uniform_measure(e, {make_point(e, {0, 0.5}), make_point(e, {0, 0})}), sym),
                  AmbiguityError);
}

TEST_CASE("one-dimensional rearrangement") {
  const auto e = ManifoldModel::euclidean(1);
  const CostModel c(LagrangianModel::power_metric(e, 2), 1.0, CostEvaluation::closed_form);
  const Instance in = solve(c, uniform_measure(e, grid_1d(e, 60, 0, 1)), uniform_measure(e, grid_1d(e, 60, 1, 2)));
  const MongeMap map = map_from_potentials(c, in.sol.potentials.psi, in.mu, in.nu);
  double err = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    err = std::max(err, std::abs(map.images[i].coords[0] - map.sources[i].coords[0] - 1.0));
    if (i > 0) CHECK(map.images[i].coords[0] > map.images[i - 1].coords[0]);
  }
  CHECK(err <= 1e-3);

  std::vector<double> xs, ys;
  for (const Point& p : in.mu.support) xs.push_back(p.coords[0]);
  for (const Point& p : in.nu.support) ys.push_back(p.coords[0]);
  const double oracle = oracle::monotone_coupling_cost(xs, in.mu.weights, ys, in.nu.weights, [](double d) { return d * d; });
  const CertificateReport push = pushforward_check(map, in.mu, in.nu, c);
  CHECK(push.pass);
  CHECK(push.get("map_cost") == Approx(oracle).epsilon(1e-9));
  CHECK(std::abs(push.get("lp_optimum") - oracle) <= 1e-9);
}

TEST_CASE("dr_map examples") {
  const auto e = ManifoldModel::euclidean(2);
  const Point o = make_point(e, {0, 0});
  CHECK((dr_map(e, 2, Cotangent{o, Vec::Unit(2, 0) * 2}).coords - Vec::Unit(2, 0)).norm() <= 1e-15);
  bool critical = false;
  CHECK(dr_map(e, 1.5, Cotangent{o, Vec::Zero(2)}, 1.0, &critical).coords.norm() == 0.0);
  CHECK(critical);
  CHECK((dr_map(e, 3, Cotangent{o, Vec::Unit(2, 0) * 3}).coords - Vec::Unit(2, 0)).norm() <= 1e-14);
  CHECK_THROWS_AS(dr_map(e, 1.0, Cotangent{o, Vec::Unit(2, 0)}), InputError);

  // r = 3 against the flow on a single-target instance.
  const CostModel c3(LagrangianModel::power_metric(e, 3), 1.0);
  const DiscreteMeasure single = uniform_measure(e, {make_point(e, {1, 0})});
  const PotentialImage p = map_from_potential(c3, Vec::Zero(1), single, o);
  CHECK((p.grad.components - Vec::Unit(2, 0) * 3).norm() <= 1e-6);
  CHECK((dr_map(e, 3, p.grad).coords - p.image.coords).norm() <= 1e-6);
}

TEST_CASE("formula equivalence, gradient law and calibration") {
  struct Case {
    ManifoldModel m;
    double r;
    double t;
    CostEvaluation eval;
    int n;
  };
  const std::vector<Case> cases = {
      {ManifoldModel::euclidean(2), 2.0, 1.0, CostEvaluation::closed_form, 25},
      {ManifoldModel::euclidean(2), 3.0, 0.5, CostEvaluation::closed_form, 25},
      {ManifoldModel::euclidean(2), 1.5, 2.0, CostEvaluation::closed_form, 25},
      {ManifoldModel::hyperbolic(), 2.0, 1.0, CostEvaluation::closed_form, 25},
      {ManifoldModel::hyperbolic(), 3.0, 1.0, CostEvaluation::minimizer, 6},
  };
  std::mt19937_64 rng(17);
  for (const Case& k : cases) {
    CAPTURE(to_string(k.m.kind()));
    CAPTURE(k.r);
    const CostModel c(LagrangianModel::power_metric(k.m, k.r), k.t, k.eval);
    const Instance in = solve(c, uniform_measure(k.m, cloud(k.m, rng, k.n, 0.6)), uniform_measure(k.m, cloud(k.m, rng, k.n, 0.6)));
    const MongeMap flow = map_from_potentials(c, in.sol.potentials.psi, in.mu, in.nu);
    const MongeMap closed = dr_map_all(k.m, flow, k.r, k.t, in.nu);
    const MongeMap graph = map_from_plan(in.sol.plan, in.mu, in.nu);
    for (std::size_t i = 0; i < flow.size(); ++i) {
      CHECK(dist(k.m, flow.images[i], closed.images[i]) <= 1e-5);
      CHECK(flow.targets[i] == graph.targets[i]);
      const Superdifferential sd = c.superdifferential(flow.sources[i], flow.images[i]);
      CHECK((sd.at_x.components + flow.gradients[i].components).norm() <= 1e-5);
      const int j = flow.targets[i];
      CHECK(std::abs(in.sol.potentials.psi[j] - in.sol.potentials.phi[static_cast<Eigen::Index>(i)] -
                     c(flow.sources[i], in.nu.support[static_cast<std::size_t>(j)])) <= 1e-8);
    }
    CHECK(pushforward_check(flow, in.mu, in.nu, c, in.sol.cost).pass);
  }
}

TEST_CASE("potential maps match the plan graph on the other models") {
  std::mt19937_64 rng(23);
  for (const ManifoldModel& m : {ManifoldModel::torus(2), ManifoldModel::sphere(1.0)}) {
    CAPTURE(to_string(m.kind()));
    const CostModel c(LagrangianModel::power_metric(m, 2), 1.0, CostEvaluation::closed_form);
    const Instance in = solve(c, uniform_measure(m, cloud(m, rng, 15, 0.5)), uniform_measure(m, cloud(m, rng, 15, 0.5)));
    const MongeMap flow = map_from_potentials(c, in.sol.potentials.psi, in.mu, in.nu);
    const MongeMap graph = map_from_plan(in.sol.plan, in.mu, in.nu);
    CHECK(flow.targets == graph.targets);
    for (double res : flow.residuals) CHECK(res <= 1e-6);
  }
}
