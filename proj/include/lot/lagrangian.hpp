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

#pragma once

#include "lot/manifold.hpp"
#include "lot/report.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lot {

enum class LagrangianKind { power_metric, custom };

/// Chart-component callbacks of a user-supplied Tonelli Lagrangian. All
/// three are required: the flow never finite-differences dL/dx.
struct CustomLagrangian {
  std::string name = "custom";
  std::function<double(const Point&, const Vec&)> value;
  std::function<Vec(const Point&, const Vec&)> dv;
  std::function<Vec(const Point&, const Vec&)> dx;
};

class LagrangianModel {
 public:
  /// L(x,v) = |v|_x^r, r > 1.
  static LagrangianModel power_metric(ManifoldModel manifold, double r);
  static LagrangianModel custom(ManifoldModel manifold, CustomLagrangian callbacks);

  LagrangianKind kind() const { return kind_; }
  const ManifoldModel& manifold() const { return manifold_; }
  /// Exponent of power_metric; NaN for custom models.
  double r() const { return r_; }
  const std::string& name() const { return custom_.name; }

  double value(const Point& x, const Vec& v) const;
  Vec dv(const Point& x, const Vec& v) const;
  Vec dx(const Point& x, const Vec& v) const;

 private:
  LagrangianModel(LagrangianKind kind, ManifoldModel manifold) : kind_(kind), manifold_(std::move(manifold)) {}

  LagrangianKind kind_;
  ManifoldModel manifold_;
  double r_ = std::numeric_limits<double>::quiet_NaN();
  CustomLagrangian custom_;
};

double eval_L(const LagrangianModel& lag, const Tangent& v);
/// Global Legendre transform (x,v) -> (x, dL/dv(x,v)).
Cotangent fiber_derivative(const LagrangianModel& lag, const Tangent& v);

struct LegendreOptions {
  int max_iter = 100;
  double tol = 1e-12;
};

/// Inverse Legendre transform. Closed form for power_metric, damped Newton on
/// the strictly convex fiber problem v -> L(x,v) - p(v) otherwise.
Tangent legendre_inverse(const LagrangianModel& lag, const Cotangent& p, const LegendreOptions& opts = {});
/// H(x,p) = sup_v p(v) - L(x,v), attained at v = legendre_inverse(p).
double hamiltonian(const LagrangianModel& lag, const Cotangent& p);
/// E(x,v) = dL/dv(x,v)(v) - L(x,v).
double energy(const LagrangianModel& lag, const Tangent& v);

/// RK4 steps used when a caller does not choose: 1000 per unit time, even,
/// at least 2.
int default_steps(double t);

struct FlowTrajectory {
  std::vector<double> times;
  std::vector<Cotangent> states;
  /// Index of the step at which the trajectory was frozen at rest (r < 2
  /// power costs reaching |p| < 1e-12), or -1.
  int frozen_at = -1;
};

/// Fixed-step RK4 integration of Hamilton's equations
///   x' = dH/dp = legendre_inverse(p),   p' = -dH/dx = dL/dx(x, legendre_inverse(p)),
/// re-charting the state after every step (torus wrap, sphere chart switch).
FlowTrajectory hamiltonian_trajectory(const LagrangianModel& lag, const Cotangent& p0, double t, int steps);
Cotangent hamiltonian_flow(const LagrangianModel& lag, const Cotangent& p0, double t, int steps);
Cotangent hamiltonian_flow(const LagrangianModel& lag, const Cotangent& p0, double t);

/// Euler-Lagrange flow as the conjugate L^{-1} o phi^H_t o L.
Tangent euler_lagrange_flow(const LagrangianModel& lag, const Tangent& v0, double t, int steps);
Tangent euler_lagrange_flow(const LagrangianModel& lag, const Tangent& v0, double t);

/// Sampled Tonelli diagnostics: strict fiber convexity (midpoint gap) and the
/// superlinearity proxy constant C in L(x,v) >= |v|_x + C.
CertificateReport tonelli_probe(const LagrangianModel& lag, std::mt19937_64& rng, int samples = 200,
                                double spread = 0.5, double velocity_scale = 2.0);

}  // namespace lot
