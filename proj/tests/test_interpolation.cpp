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

#include "lot/interpolation.hpp"

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

InterpolationPath path_for(const CostModel& c, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           std::vector<double> s) {
  const Solution sol = solve_exact(cost_matrix(c, mu, nu), mu, nu);
  return build_path(c, mu, map_from_potentials(c, sol.potentials.psi, mu, nu), std::move(s));
}

const std::vector<double> kQuarters = {0.0, 0.25, 0.5, 0.75, 1.0};

}  // namespace

TEST_CASE("straight lines in one dimension") {
  const auto e = ManifoldModel::euclidean(1);
  const CostModel c(LagrangianModel::power_metric(e, 2), 1.0, CostEvaluation::closed_form);
  const DiscreteMeasure mu = uniform_measure(e, grid_1d(e, 40, 0, 1));
  const DiscreteMeasure nu = uniform_measure(e, grid_1d(e, 40, 1, 2));
  const InterpolationPath path = path_for(c, mu, nu, kQuarters);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double x = mu.support[i].coords[0];
    CHECK(path.maps[0].images[i].coords[0] == x);
    CHECK(std::abs(path.maps[2].images[i].coords[0] - (x + 0.5)) <= 1e-6);
    CHECK(std::abs(path.maps[4].images[i].coords[0] - path.terminal.images[i].coords[0]) <= 1e-6);
    CHECK(path.curves[i].energy_spread <= 1e-8);
  }
  for (double s : kQuarters) {
    CAPTURE(s);
    const CertificateReport eq2 = verify_restriction_identity(path, s);
    CHECK(eq2.pass);
    CHECK(eq2.get("max_residual") <= 1e-9);
    CHECK(verify_midpoint_optimality(path, s).pass);
    CHECK(verify_cost_additivity(path, s, nu).pass);
    const CertificateReport inj = verify_injectivity_and_inverse(path, s);
    CHECK(inj.pass);
    if (s < 1.0) CHECK(inj.get("inverse_lipschitz") == Approx(1.0).epsilon(1e-6));
  }
  CHECK_THROWS_AS(verify_restriction_identity(path, 0.3), InputError);
  const Solution sol = solve_exact(cost_matrix(c, mu, nu), mu, nu);
  const MongeMap map = map_from_potentials(c, sol.potentials.psi, mu, nu);
  CHECK_THROWS_AS(build_path(c, mu, map, {0.5, 1.5}), InputError);
  CHECK_THROWS_AS(build_path(c, mu, map, {0.5, 0.25}), InputError);
  CHECK_THROWS_AS(build_path(c, mu, map_from_plan(sol.plan, mu, nu), {0.5}), InputError);
}

TEST_CASE("contracting map") {
  const auto e = ManifoldModel::euclidean(1);
  const CostModel c(LagrangianModel::power_metric(e, 2), 1.0, CostEvaluation::closed_form);
  const DiscreteMeasure mu = uniform_measure(e, grid_1d(e, 30, 0, 2));
  const DiscreteMeasure nu = uniform_measure(e, grid_1d(e, 30, 0, 1));
  const InterpolationPath path = path_for(c, mu, nu, {0.5});
  // T_s(x) = (1 - s/2) x.
  for (std::size_t i = 0; i < mu.size(); ++i)
    CHECK(path.maps[0].images[i].coords[0] == Approx(0.75 * mu.support[i].coords[0]).epsilon(1e-9));
  const CertificateReport inj = verify_injectivity_and_inverse(path, 0.5);
  CHECK(inj.pass);
  CHECK(inj.get("inverse_lipschitz") == Approx(4.0 / 3.0).epsilon(1e-6));
  CHECK(inj.get("composed_lipschitz") == Approx(2.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("random clouds") {
  std::mt19937_64 rng(41);
  struct Case {
    ManifoldModel m;
    double r;
    double t;
  };
  for (const Case& k : {Case{ManifoldModel::euclidean(2), 2.0, 1.0}, Case{ManifoldModel::euclidean(2), 3.0, 2.0},
                        Case{ManifoldModel::hyperbolic(), 2.0, 1.0}, Case{ManifoldModel::sphere(1.0), 2.0, 1.0}}) {
    CAPTURE(to_string(k.m.kind()));
    const CostModel c(LagrangianModel::power_metric(k.m, k.r), k.t, CostEvaluation::closed_form);
    const DiscreteMeasure mu = uniform_measure(k.m, cloud(k.m, rng, 20, 0.5));
    const DiscreteMeasure nu = uniform_measure(k.m, cloud(k.m, rng, 20, 0.5));
    const std::vector<double> s = {0.25 * k.t, 0.5 * k.t, 0.75 * k.t};
    const InterpolationPath path = path_for(c, mu, nu, s);
    for (double si : s) {
      CAPTURE(si);
      CHECK(verify_restriction_identity(path, si).pass);
      CHECK(verify_midpoint_optimality(path, si).pass);
      CHECK(verify_injectivity_and_inverse(path, si).pass);
      CHECK(verify_cost_additivity(path, si, nu).pass);
    }
  }
}

TEST_CASE("minimizer-evaluated costs") {
  const auto h = ManifoldModel::hyperbolic();
  const CostModel c(LagrangianModel::power_metric(h, 2), 1.0);
  std::mt19937_64 rng(43);
  const DiscreteMeasure mu = uniform_measure(h, cloud(h, rng, 5, 0.5));
  const DiscreteMeasure nu = uniform_measure(h, cloud(h, rng, 5, 0.5));
  const InterpolationPath path = path_for(c, mu, nu, {0.5});
  CHECK(verify_restriction_identity(path, 0.5).pass);
  CHECK(verify_midpoint_optimality(path, 0.5).pass);
}
