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

#include "lot/lagrangian.hpp"
#include "oracles.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

using namespace lot;
using doctest::Approx;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

std::vector<ManifoldModel> all_models() {
  return {ManifoldModel::euclidean(2), ManifoldModel::torus(2), ManifoldModel::sphere(1.0),
          ManifoldModel::hyperbolic()};
}

// L(x,v) = 1/2 (1 + |x|^2/2) |v|^2 + 1/4 |v|^4 on euclidean R^2: Tonelli,
// position-dependent, with no closed-form Legendre inverse.
LagrangianModel quartic_model() {
  CustomLagrangian c;
  c.name = "quartic";
  c.value = [](const Point& x, const Vec& v) {
    const double a = 1 + 0.5 * x.coords.squaredNorm();
    return 0.5 * a * v.squaredNorm() + 0.25 * std::pow(v.squaredNorm(), 2);
  };
  c.dv = [](const Point& x, const Vec& v) -> Vec {
    const double a = 1 + 0.5 * x.coords.squaredNorm();
    return (a + v.squaredNorm()) * v;
  };
  c.dx = [](const Point& x, const Vec& v) -> Vec { return 0.5 * v.squaredNorm() * x.coords; };
  return LagrangianModel::custom(ManifoldModel::euclidean(2), c);
}

}  // namespace

TEST_CASE("eval_L examples") {
  const auto e = ManifoldModel::euclidean(2);
  const Point o = make_point(e, {0, 0});
  CHECK(eval_L(LagrangianModel::power_metric(e, 2), Tangent{o, v2(1, 2)}) == Approx(5.0));
  CHECK(eval_L(LagrangianModel::power_metric(e, 3), Tangent{o, v2(3, 4)}) == Approx(125.0));
  const auto h = ManifoldModel::hyperbolic();
  const Point ho = make_point(h, {0, 0});
  CHECK(eval_L(LagrangianModel::power_metric(h, 2), Tangent{ho, v2(1, 0)}) ==
        Approx(metric(h, ho, v2(1, 0), v2(1, 0))));
  CHECK_THROWS_AS(LagrangianModel::power_metric(e, 1.0), InputError);
}

TEST_CASE("fiber_derivative examples") {
  const auto e = ManifoldModel::euclidean(2);
  const Point o = make_point(e, {0, 0});
  const auto l2 = LagrangianModel::power_metric(e, 2);
  const Cotangent p = fiber_derivative(l2, Tangent{o, v2(1, 2)});
  CHECK(p.components[0] == Approx(2.0));
  CHECK(p.components[1] == Approx(4.0));
  for (double r : {1.5, 2.0, 3.0})
    CHECK(fiber_derivative(LagrangianModel::power_metric(e, r), Tangent{o, v2(0, 0)}).components.norm() == 0.0);

  // Finite-difference oracle on eval_L for r = 3.
  const auto l3 = LagrangianModel::power_metric(e, 3);
  const auto f = [&](const Vec& v) { return eval_L(l3, Tangent{o, v}); };
  const Cotangent p3 = fiber_derivative(l3, Tangent{o, v2(1, 0)});
  CHECK(p3.components[0] == Approx(oracle::central_diff(f, v2(1, 0), 0, 1e-5)).epsilon(1e-8));
  CHECK(p3.components[0] == Approx(3.0));
  CHECK(std::abs(p3.components[1]) < 1e-12);
}

TEST_CASE("fiber_derivative matches finite differences on every model") {
  std::mt19937_64 rng(23);
  for (const auto& m : all_models()) {
    for (double r : {1.5, 2.0, 3.0}) {
      const auto lag = LagrangianModel::power_metric(m, r);
      for (int i = 0; i < 50; ++i) {
        const Point x = sample_point(m, rng, 0.8);
        const Vec v = sample_vector(2, rng);
        const auto f = [&](const Vec& w) { return lag.value(x, w); };
        const Vec p = fiber_derivative(lag, Tangent{x, v}).components;
        for (int k = 0; k < 2; ++k)
          CHECK(p[k] == Approx(oracle::central_diff(f, v, k, 1e-6 * (1 + v.norm()))).epsilon(1e-6).scale(p.norm()));
      }
    }
  }
}

TEST_CASE("legendre_inverse examples") {
  const auto e = ManifoldModel::euclidean(2);
  const Point o = make_point(e, {0, 0});
  const Tangent v = legendre_inverse(LagrangianModel::power_metric(e, 2), Cotangent{o, v2(2, 4)});
  CHECK(v.components[0] == Approx(1.0));
  CHECK(v.components[1] == Approx(2.0));
  CHECK(legendre_inverse(LagrangianModel::power_metric(e, 2), Cotangent{o, v2(0, 0)}).components.norm() == 0.0);
  const auto l3 = LagrangianModel::power_metric(e, 3);
  const Tangent v3 = legendre_inverse(l3, Cotangent{o, v2(3, 0)});
  CHECK(v3.components[0] == Approx(1.0));
  const Cotangent back = fiber_derivative(l3, v3);
  CHECK(back.components[0] == Approx(3.0).epsilon(1e-12));
}

TEST_CASE("Legendre round trip on 1000 random fiber points per model") {
  std::mt19937_64 rng(29);
  for (const auto& m : all_models()) {
    for (double r : {1.5, 2.0, 3.0}) {
      const auto lag = LagrangianModel::power_metric(m, r);
      double worst = 0;
      for (int i = 0; i < 1000; ++i) {
        const Point x = sample_point(m, rng, 0.8);
        const Tangent v{x, sample_vector(2, rng, 2.0)};
        const Tangent back = legendre_inverse(lag, fiber_derivative(lag, v));
        worst = std::max(worst, (back.components - v.components).norm() / (1 + v.components.norm()));
      }
      CHECK(worst <= 1e-8);
    }
  }
  const auto q = quartic_model();
  for (int i = 0; i < 1000; ++i) {
    const Point x = sample_point(q.manifold(), rng, 1.0);
    const Tangent v{x, sample_vector(2, rng, 2.0)};
    const Tangent back = legendre_inverse(q, fiber_derivative(q, v));
    CHECK((back.components - v.components).norm() <= 1e-8 * (1 + v.components.norm()));
  }
}

TEST_CASE("Legendre inversion reports non-convergence") {
  const auto q = quartic_model();
  LegendreOptions opts;
  opts.max_iter = 1;
  opts.tol = 1e-30;
  CHECK_THROWS_AS(legendre_inverse(q, Cotangent{make_point(q.manifold(), {0.1, 0.2}), v2(5, -3)}, opts),
                  ConvergenceError);
}

TEST_CASE("hamiltonian examples") {
  const auto e = ManifoldModel::euclidean(2);
  const Point o = make_point(e, {0, 0});
  const auto l2 = LagrangianModel::power_metric(e, 2);
  CHECK(hamiltonian(l2, Cotangent{o, v2(2, 0)}) == Approx(oracle::max_linear_minus_power(2, 2)).epsilon(1e-10));
  CHECK(hamiltonian(l2, Cotangent{o, v2(2, 0)}) == Approx(1.0));
  CHECK(hamiltonian(l2, Cotangent{o, v2(0, 0)}) == 0.0);
  const auto l3 = LagrangianModel::power_metric(e, 3);
  CHECK(hamiltonian(l3, Cotangent{o, v2(3, 0)}) == Approx(oracle::max_linear_minus_power(3, 3)).epsilon(1e-10));
  CHECK(hamiltonian(l3, Cotangent{o, v2(0, 3)}) == Approx(2.0));
}

TEST_CASE("dH/dp at L(x,v) recovers v") {
  std::mt19937_64 rng(31);
  for (const auto& m : all_models()) {
    for (double r : {1.5, 2.0, 3.0}) {
      const auto lag = LagrangianModel::power_metric(m, r);
      for (int i = 0; i < 100; ++i) {
        const Point x = sample_point(m, rng, 0.8);
        const Vec v = sample_vector(2, rng, 1.5);
        const Vec p = fiber_derivative(lag, Tangent{x, v}).components;
        const auto hf = [&](const Vec& pp) { return hamiltonian(lag, Cotangent{x, pp}); };
        for (int k = 0; k < 2; ++k)
          CHECK(oracle::central_diff(hf, p, k, 1e-6 * (1 + p.norm())) == Approx(v[k]).epsilon(1e-5).scale(1 + v.norm()));
      }
    }
  }
}

TEST_CASE("hamiltonian is convex along fibers") {
  std::mt19937_64 rng(37);
  const auto lag = LagrangianModel::power_metric(ManifoldModel::hyperbolic(), 3);
  for (int i = 0; i < 200; ++i) {
    const Point x = sample_point(lag.manifold(), rng, 0.7);
    const Vec a = sample_vector(2, rng, 3), b = sample_vector(2, rng, 3);
    CHECK(hamiltonian(lag, Cotangent{x, 0.5 * (a + b)}) <=
          0.5 * (hamiltonian(lag, Cotangent{x, a}) + hamiltonian(lag, Cotangent{x, b})) + 1e-12);
  }
}

TEST_CASE("energy examples") {
  const auto e = ManifoldModel::euclidean(2);
  const Point o = make_point(e, {0, 0});
  const auto l2 = LagrangianModel::power_metric(e, 2);
  const Tangent v{o, v2(1, 2)};
  CHECK(energy(l2, v) == Approx(5.0));
  CHECK(energy(l2, v) == Approx(hamiltonian(l2, fiber_derivative(l2, v))));
  CHECK(energy(l2, Tangent{o, v2(0, 0)}) == 0.0);
  CHECK(energy(LagrangianModel::power_metric(e, 3), Tangent{o, v2(1, 0)}) == Approx(2.0));
}

TEST_CASE("hamiltonian_flow examples") {
  const auto e = ManifoldModel::euclidean(2);
  const auto l2 = LagrangianModel::power_metric(e, 2);
  const Cotangent p0{make_point(e, {0, 0}), v2(2, 0)};
  const Cotangent p1 = hamiltonian_flow(l2, p0, 1.0);
  CHECK(p1.base.coords[0] == Approx(1.0).epsilon(1e-14));
  CHECK(p1.base.coords[1] == Approx(0.0));
  CHECK(p1.components[0] == Approx(2.0));
  const Cotangent same = hamiltonian_flow(l2, p0, 0.0, 10);
  CHECK(same.base.coords == p0.base.coords);
  CHECK(same.components == p0.components);

  // Unit energy at the north pole of the unit sphere: unit speed, period 2 pi.
  const auto s = ManifoldModel::sphere(1.0);
  const auto ls = LagrangianModel::power_metric(s, 2);
  const Point pole = make_point(s, {0, 0});
  const Cotangent ps{pole, v2(1.0, 0)};  // |p|_* = 1/2 at the pole -> H = |p|_*^2 / 4 ... scale below
  const double scale = 2.0 / dual_norm(s, ps);
  const Cotangent pu{pole, scale * ps.components};
  CHECK(hamiltonian(ls, pu) == Approx(1.0));
  const Cotangent back = hamiltonian_flow(ls, pu, 2 * std::numbers::pi, 8000);
  CHECK(dist(s, back.base, pole) <= 1e-6);
  const Cotangent back_chart = to_chart(s, back, 0);
  CHECK((back_chart.components - pu.components).norm() <= 1e-6);
}

TEST_CASE("euler_lagrange_flow examples") {
  const auto e = ManifoldModel::euclidean(2);
  const auto l2 = LagrangianModel::power_metric(e, 2);
  const Tangent v = euler_lagrange_flow(l2, Tangent{make_point(e, {0, 0}), v2(1, 0)}, 1.0);
  CHECK(v.base.coords[0] == Approx(1.0));
  CHECK(v.components[0] == Approx(1.0));
  const Tangent v0{make_point(e, {0.2, 0.1}), v2(1, 0)};
  const Tangent same = euler_lagrange_flow(l2, v0, 0.0);
  CHECK(same.base.coords == v0.base.coords);
  CHECK(same.components == v0.components);

  const auto h = ManifoldModel::hyperbolic();
  const Point o = make_point(h, {0, 0});
  const Tangent vh{o, v2(0.5, 0)};
  const Tangent end = euler_lagrange_flow(LagrangianModel::power_metric(h, 2), vh, 1.0);
  CHECK(dist(h, o, end.base) == Approx(norm(h, vh)).epsilon(1e-6));
}

TEST_CASE("euler_lagrange_flow is the conjugated Hamiltonian flow, bit for bit") {
  std::mt19937_64 rng(41);
  for (const auto& m : all_models()) {
    const auto lag = LagrangianModel::power_metric(m, 2.5);
    const Point x = sample_point(m, rng, 0.5);
    const Tangent v{x, sample_vector(2, rng, 0.7)};
    const Tangent a = euler_lagrange_flow(lag, v, 0.8, 400);
    const Tangent b = legendre_inverse(lag, hamiltonian_flow(lag, fiber_derivative(lag, v), 0.8, 400));
    CHECK(a.base.chart == b.base.chart);
    CHECK(std::memcmp(a.base.coords.data(), b.base.coords.data(), sizeof(double) * 2) == 0);
    CHECK(std::memcmp(a.components.data(), b.components.data(), sizeof(double) * 2) == 0);
  }
}

TEST_CASE("energy is conserved along flows") {
  std::mt19937_64 rng(43);
  for (const auto& m : all_models()) {
    for (double r : {2.0, 3.0}) {
      const auto lag = LagrangianModel::power_metric(m, r);
      for (int i = 0; i < 5; ++i) {
        const Point x = sample_point(m, rng, 0.6);
        const Cotangent p{x, sample_vector(2, rng, 1.0)};
        const FlowTrajectory tr = hamiltonian_trajectory(lag, p, 1.0, 1000);
        const double e0 = hamiltonian(lag, tr.states.front());
        double drift = 0;
        for (const auto& s : tr.states) drift = std::max(drift, std::abs(hamiltonian(lag, s) - e0));
        CHECK(drift <= (m.flat() ? 1e-8 : 1e-6) * std::max(1.0, e0));
      }
    }
  }
  const auto q = quartic_model();
  const FlowTrajectory tr = hamiltonian_trajectory(q, Cotangent{make_point(q.manifold(), {0.3, 0.1}), v2(1, 0.5)}, 1.0, 1000);
  const double e0 = hamiltonian(q, tr.states.front());
  for (const auto& s : tr.states) CHECK(std::abs(hamiltonian(q, s) - e0) <= 1e-6 * std::max(1.0, e0));
}

TEST_CASE("sub-quadratic flows freeze at rest") {
  const auto e = ManifoldModel::euclidean(2);
  const auto lag = LagrangianModel::power_metric(e, 1.5);
  const FlowTrajectory tr = hamiltonian_trajectory(lag, Cotangent{make_point(e, {0.5, 0.5}), v2(0, 0)}, 1.0, 10);
  CHECK(tr.frozen_at == 0);
  CHECK(tr.states.back().base.coords[0] == 0.5);
}

TEST_CASE("tonelli probe") {
  std::mt19937_64 rng(47);
  for (const auto& m : all_models()) {
    for (double r : {1.5, 2.0, 3.0}) {
      const auto rep = tonelli_probe(LagrangianModel::power_metric(m, r), rng);
      CHECK(rep.pass);
      CHECK(std::isfinite(rep.get("superlinearity_constant")));
    }
  }
  CHECK(tonelli_probe(quartic_model(), rng).pass);
}
