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

#include "lot/lagrangian.hpp"
#include "lot/report.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lot {

/// Discretized path gamma:[0,t] -> M.
struct Curve {
  std::vector<double> times;
  std::vector<Point> points;
  std::vector<Tangent> velocities;
  /// Composite Simpson quadrature of L(gamma, gamma') on the node grid.
  double action = 0.0;
  /// dist(gamma(t), y) of the accepted solution.
  double residual = 0.0;
  /// (max E - min E) / max |E| over the nodes; 0 for rest curves.
  double energy_spread = 0.0;
  /// Several homotopy seeds converged to distinct curves with equal action:
  /// the endpoints are (numerically) on each other's cut locus.
  bool ambiguous = false;
  std::string method;  // "shooting" or "direct+shooting"

  double duration() const { return times.empty() ? 0.0 : times.back(); }
};

struct CostQuery {
  Point x;
  Point y;
  double t = 1.0;
};

struct MinimizerOptions {
  /// RK4 steps for the whole interval; 0 selects default_steps(t).
  int steps = 0;
  /// Acceptance threshold on the endpoint residual.
  double tol = 1e-7;
  /// Newton keeps refining until the residual drops below this.
  double newton_tol = 1e-13;
  int newton_max_iter = 30;
  /// Relative action gap under which distinct minimizers count as tied.
  double ambiguity_tol = 1e-9;
  /// Seed-based shooting; when disabled only the direct fallback runs.
  bool seed_shooting = true;
  int direct_segments = 64;
  int direct_max_iter = 500;
};

/// Two-point action minimization. Shooting on the initial velocity from one
/// seed per homotopy representative (torus translates, both great-circle arcs)
/// with Newton refinement; falls back to direct minimization of the
/// discretized action, whose solution seeds a final shooting pass.
Curve minimize(const LagrangianModel& lag, const CostQuery& q, const MinimizerOptions& opts = {});

/// Direct minimization of the discretized action over interior nodes with
/// fixed endpoints, in the chart of q.x. No shooting polish.
Curve minimize_direct(const LagrangianModel& lag, const CostQuery& q, const MinimizerOptions& opts = {});

/// c_{t,L}(x,y), the action of the minimizer.
double cost(const LagrangianModel& lag, const CostQuery& q, const MinimizerOptions& opts = {});

/// t^{1-r} d(x,y)^r, the closed form of the power_metric cost.
double power_cost_closed_form(const ManifoldModel& m, double r, const Point& x, const Point& y, double t);

struct Superdifferential {
  Cotangent at_x;  // -dL/dv(gamma(0), gamma'(0)), i.e. dc/dx
  Cotangent at_y;  // +dL/dv(gamma(t), gamma'(t)), i.e. dc/dy
};

/// Superdifferential read off a minimizer, expressed in the charts of x and y.
Superdifferential superdifferential_of(const LagrangianModel& lag, const Curve& curve, const Point& x,
                                       const Point& y);
Superdifferential cost_superdifferential(const LagrangianModel& lag, const CostQuery& q,
                                         const MinimizerOptions& opts = {});

enum class CostEvaluation { minimizer, closed_form };

std::string to_string(CostEvaluation e);
CostEvaluation cost_evaluation_from_string(const std::string& name);

struct CostValue {
  double value = 0.0;
  bool ambiguous = false;
};

/// c_{t,L}(x, y) at a fixed t. The closed_form evaluation (power_metric only)
/// uses t^{1-r} d^r and reads the superdifferential off the geodesic
/// log_x(y)/t; the minimizer evaluation solves the boundary value problem.
class CostModel {
 public:
  CostModel(LagrangianModel lag, double t, CostEvaluation eval = CostEvaluation::minimizer,
            MinimizerOptions opts = {});

  const LagrangianModel& lagrangian() const { return lag_; }
  const ManifoldModel& manifold() const { return lag_.manifold(); }
  double t() const { return t_; }
  CostEvaluation evaluation() const { return eval_; }
  const MinimizerOptions& options() const { return opts_; }
  /// Same model and evaluation at another time.
  CostModel at_time(double t) const { return CostModel(lag_, t, eval_, opts_); }

  double operator()(const Point& x, const Point& y) const { return evaluate(x, y).value; }
  CostValue evaluate(const Point& x, const Point& y) const;
  Superdifferential superdifferential(const Point& x, const Point& y) const;

 private:
  LagrangianModel lag_;
  double t_;
  CostEvaluation eval_;
  MinimizerOptions opts_;
};

/// Injectivity of y -> dc/dx(x,y) on the given targets plus the flow
/// reconstruction y = pi phi^L_t(x, L^{-1}(-dc/dx(x,y))).
CertificateReport twist_probe(const LagrangianModel& lag, const Point& x, const std::vector<Point>& ys, double t,
                              const MinimizerOptions& opts = {}, double margin = 1e-6);

/// Largest minimizer speed over random endpoint pairs drawn from K, checked
/// for saturation when the number of trials doubles.
CertificateReport speed_bound_probe(const LagrangianModel& lag, const std::vector<Point>& K, double t, int trials,
                                    std::uint64_t seed = 0, const MinimizerOptions& opts = {});

}  // namespace lot
