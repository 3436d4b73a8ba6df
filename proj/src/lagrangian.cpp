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

#include "lot/lagrangian.hpp"

#include <cmath>
#include <limits>

namespace lot {

namespace {

constexpr double kRestMomentum = 1e-12;

void check_dims(const LagrangianModel& lag, const Vec& v) {
  if (v.size() != lag.manifold().dim()) throw DomainError("vector dimension mismatch");
}

// Re-express the flow state in a well-conditioned chart.
Cotangent recharted(const ManifoldModel& m, const Cotangent& p) {
  if (m.kind() == ManifoldKind::torus) {
    Cotangent out = p;
    for (Eigen::Index k = 0; k < out.base.coords.size(); ++k) {
      double c = out.base.coords[k] - std::floor(out.base.coords[k]);
      out.base.coords[k] = c >= 1.0 ? 0.0 : c;
    }
    return out;
  }
  if (m.kind() == ManifoldKind::sphere2 && p.base.coords.squaredNorm() > 1.0)
    return to_chart(m, p, 1 - p.base.chart);
  return p;
}

struct PhaseRate {
  Vec dx;
  Vec dp;
};

PhaseRate rate(const LagrangianModel& lag, const Point& x, const Vec& p) {
  const Tangent v = legendre_inverse(lag, Cotangent{x, p});
  return PhaseRate{v.components, lag.dx(x, v.components)};
}

bool at_rest(const LagrangianModel& lag, const Vec& p) {
  return lag.kind() == LagrangianKind::power_metric && lag.r() < 2.0 && p.norm() < kRestMomentum;
}

// Allocation-free phase rate for power_metric on the built-in models, all of
// which are conformal in their charts: G = lambda(x) I.
constexpr int kFastMaxDim = 4;
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kFastMaxDim, 1>;

struct FastRate {
  SmallVec dx;
  SmallVec dp;
};

FastRate fast_rate(const ManifoldModel& m, double r, const SmallVec& x, const SmallVec& p) {
  const double s = x.squaredNorm();
  double lambda = 1.0, dlambda = 0.0;  // d lambda / d x_k = dlambda * x_k
  if (m.kind() == ManifoldKind::sphere2) {
    const double rr = m.radius() * m.radius();
    lambda = 4 * rr / ((1 + s) * (1 + s));
    dlambda = -16 * rr / ((1 + s) * (1 + s) * (1 + s));
  } else if (m.kind() == ManifoldKind::hyperbolic2) {
    if (!(s < 1.0)) throw DomainError("point outside the Poincare disk");
    lambda = 4 / ((1 - s) * (1 - s));
    dlambda = 16 / ((1 - s) * (1 - s) * (1 - s));
  }
  FastRate out{SmallVec::Zero(x.size()), SmallVec::Zero(x.size())};
  const double pn = std::sqrt(p.squaredNorm() / lambda);
  if (pn == 0.0) return out;
  const double speed = r == 2.0 ? 0.5 * pn : std::pow(pn / r, 1.0 / (r - 1));
  const double scaled = r == 2.0 ? 1.0 : std::pow(speed, r - 2);
  out.dx = p / (lambda * r * scaled);
  if (dlambda != 0.0) {
    // dL/dx_k = (r/2) q^{r/2-1} |v|^2 d lambda/d x_k with q = speed^2.
    out.dp = (0.5 * r * scaled * out.dx.squaredNorm() * dlambda) * x;
  }
  return out;
}

bool fast_path(const LagrangianModel& lag) {
  return lag.kind() == LagrangianKind::power_metric && lag.manifold().dim() <= kFastMaxDim;
}

}  // namespace

LagrangianModel LagrangianModel::power_metric(ManifoldModel manifold, double r) {
  if (!(r > 1.0) || !std::isfinite(r)) throw InputError("power_metric requires r > 1", "lagrangian.r");
  LagrangianModel lag(LagrangianKind::power_metric, std::move(manifold));
  lag.r_ = r;
  lag.custom_.name = "power_metric";
  return lag;
}

LagrangianModel LagrangianModel::custom(ManifoldModel manifold, CustomLagrangian callbacks) {
  if (!callbacks.value || !callbacks.dv || !callbacks.dx)
    throw InputError("custom Lagrangians must supply L, dL/dv and dL/dx", "lagrangian");
  LagrangianModel lag(LagrangianKind::custom, std::move(manifold));
  lag.custom_ = std::move(callbacks);
  return lag;
}

double LagrangianModel::value(const Point& x, const Vec& v) const {
  if (kind_ == LagrangianKind::custom) return custom_.value(x, v);
  const double q = conformal_factor(manifold_, x) * v.squaredNorm();
  return r_ == 2.0 ? q : std::pow(q, r_ / 2);
}

Vec LagrangianModel::dv(const Point& x, const Vec& v) const {
  if (kind_ == LagrangianKind::custom) return custom_.dv(x, v);
  const double lambda = conformal_factor(manifold_, x);
  const double q = lambda * v.squaredNorm();
  if (q <= 0.0) return Vec::Zero(v.size());
  return (r_ * std::pow(q, r_ / 2 - 1) * lambda) * v;
}

Vec LagrangianModel::dx(const Point& x, const Vec& v) const {
  if (kind_ == LagrangianKind::custom) return custom_.dx(x, v);
  const int n = manifold_.dim();
  Vec out = Vec::Zero(n);
  if (manifold_.flat()) return out;
  const double q = conformal_factor(manifold_, x) * v.squaredNorm();
  if (q <= 0.0) return out;
  // d lambda / d x_k is proportional to x_k on both curved models.
  const double s = x.coords.squaredNorm();
  const double dlambda = manifold_.kind() == ManifoldKind::sphere2
                             ? -16 * manifold_.radius() * manifold_.radius() / std::pow(1 + s, 3)
                             : 16 / std::pow(1 - s, 3);
  return (0.5 * r_ * std::pow(q, r_ / 2 - 1) * v.squaredNorm() * dlambda) * x.coords;
}

double eval_L(const LagrangianModel& lag, const Tangent& v) {
  check_admissible(lag.manifold(), v.base);
  check_dims(lag, v.components);
  return lag.value(v.base, v.components);
}

Cotangent fiber_derivative(const LagrangianModel& lag, const Tangent& v) {
  check_admissible(lag.manifold(), v.base);
  check_dims(lag, v.components);
  return Cotangent{v.base, lag.dv(v.base, v.components)};
}

Tangent legendre_inverse(const LagrangianModel& lag, const Cotangent& p, const LegendreOptions& opts) {
  const ManifoldModel& m = lag.manifold();
  check_admissible(m, p.base);
  check_dims(lag, p.components);
  if (!p.components.allFinite()) throw DomainError("cotangent has non-finite components");
  const int n = m.dim();
  if (p.components.isZero(0.0) && lag.kind() == LagrangianKind::power_metric) return Tangent{p.base, Vec::Zero(n)};

  if (lag.kind() == LagrangianKind::power_metric) {
    // r |v|^{r-2} G v = p  =>  |v| = (|p|_* / r)^{1/(r-1)},  v = G^{-1} p / (r |v|^{r-2}).
    const double r = lag.r();
    const Vec raised = p.components / conformal_factor(m, p.base);
    const double pn = std::sqrt(std::max(0.0, p.components.dot(raised)));
    if (pn == 0.0) return Tangent{p.base, Vec::Zero(n)};
    const double speed = std::pow(pn / r, 1.0 / (r - 1));
    return Tangent{p.base, raised / (r * std::pow(speed, r - 2))};
  }

  // Damped Newton on phi(v) = L(x,v) - p.v, gradient dL/dv - p.
  const Point& x = p.base;
  Vec v = metric_tensor(m, x).ldlt().solve(p.components);
  const auto phi = [&](const Vec& w) { return lag.value(x, w) - p.components.dot(w); };
  const double scale = 1.0 + p.components.norm();
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iter; ++it) {
    const Vec grad = lag.dv(x, v) - p.components;
    residual = grad.norm();
    if (residual <= opts.tol * scale) return Tangent{x, v};
    Mat hess(n, n);
    for (int k = 0; k < n; ++k) {
      const double h = 1e-6 * (1.0 + std::abs(v[k]));
      Vec vp = v, vm = v;
      vp[k] += h;
      vm[k] -= h;
      hess.col(k) = (lag.dv(x, vp) - lag.dv(x, vm)) / (2 * h);
    }
    hess = 0.5 * (hess + hess.transpose());
    Vec step = -hess.ldlt().solve(grad);
    if (!step.allFinite() || step.dot(grad) >= 0) step = -grad;
    // Accept on either sufficient decrease of phi or of the gradient norm:
    // close to the optimum phi differences drown in rounding.
    const double f0 = phi(v);
    double alpha = 1.0;
    Vec trial = v + step;
    for (int ls = 0; ls < 40; ++ls) {
      trial = v + alpha * step;
      if (phi(trial) <= f0 + 1e-4 * alpha * step.dot(grad)) break;
      if ((lag.dv(x, trial) - p.components).norm() < 0.9 * residual) break;
      alpha *= 0.5;
    }
    v = trial;
  }
  const double final_res = (lag.dv(x, v) - p.components).norm();
  if (final_res <= opts.tol * scale) return Tangent{x, v};
  throw ConvergenceError("Legendre inversion did not converge (residual " + std::to_string(final_res) + ")",
                         final_res);
}

double hamiltonian(const LagrangianModel& lag, const Cotangent& p) {
  const Tangent v = legendre_inverse(lag, p);
  return p.components.dot(v.components) - lag.value(p.base, v.components);
}

double energy(const LagrangianModel& lag, const Tangent& v) {
  check_admissible(lag.manifold(), v.base);
  check_dims(lag, v.components);
  return lag.dv(v.base, v.components).dot(v.components) - lag.value(v.base, v.components);
}

int default_steps(double t) {
  int steps = static_cast<int>(std::ceil(1000.0 * std::abs(t)));
  if (steps < 2) steps = 2;
  if (steps % 2 != 0) ++steps;
  return steps;
}

FlowTrajectory hamiltonian_trajectory(const LagrangianModel& lag, const Cotangent& p0, double t, int steps) {
  const ManifoldModel& m = lag.manifold();
  check_admissible(m, p0.base);
  check_dims(lag, p0.components);
  if (!(t >= 0) || !std::isfinite(t)) throw DomainError("flow time must be finite and >= 0");
  if (steps <= 0) throw InputError("flow step count must be positive", "solver.integrator_steps");

  FlowTrajectory traj;
  traj.times.reserve(static_cast<std::size_t>(steps) + 1);
  traj.states.reserve(static_cast<std::size_t>(steps) + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(p0);
  if (t == 0.0) return traj;

  const double h = t / steps;
  Cotangent state = p0;
  for (int i = 0; i < steps; ++i) {
    if (traj.frozen_at >= 0 || at_rest(lag, state.components)) {
      if (traj.frozen_at < 0) traj.frozen_at = i;
    } else {
      const Point& x = state.base;
      const Vec& p = state.components;
      Cotangent next;
      if (fast_path(lag)) {
        const double r = lag.r();
        const SmallVec x0 = x.coords, p0s = p;
        const FastRate k1 = fast_rate(m, r, x0, p0s);
        const FastRate k2 = fast_rate(m, r, x0 + 0.5 * h * k1.dx, p0s + 0.5 * h * k1.dp);
        const FastRate k3 = fast_rate(m, r, x0 + 0.5 * h * k2.dx, p0s + 0.5 * h * k2.dp);
        const FastRate k4 = fast_rate(m, r, x0 + h * k3.dx, p0s + h * k3.dp);
        next.base = Point{x.chart, x0 + h / 6 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx)};
        next.components = p0s + h / 6 * (k1.dp + 2 * k2.dp + 2 * k3.dp + k4.dp);
      } else {
        const auto shifted = [&](const Vec& dx) { return Point{x.chart, x.coords + dx}; };
        const PhaseRate k1 = rate(lag, x, p);
        const PhaseRate k2 = rate(lag, shifted(0.5 * h * k1.dx), p + 0.5 * h * k1.dp);
        const PhaseRate k3 = rate(lag, shifted(0.5 * h * k2.dx), p + 0.5 * h * k2.dp);
        const PhaseRate k4 = rate(lag, shifted(h * k3.dx), p + h * k3.dp);
        next = Cotangent{shifted(h / 6 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx)),
                         p + h / 6 * (k1.dp + 2 * k2.dp + 2 * k3.dp + k4.dp)};
      }
      if (!next.base.coords.allFinite() || !next.components.allFinite())
        throw IntegrationError("Hamiltonian flow produced a non-finite state at step " + std::to_string(i + 1) +
                                   " (t = " + std::to_string((i + 1) * h) + ", |p| before step = " +
                                   std::to_string(p.norm()) + ")",
                               i + 1, (i + 1) * h);
      state = recharted(m, next);
    }
    traj.times.push_back(i + 1 == steps ? t : (i + 1) * h);
    traj.states.push_back(state);
  }
  return traj;
}

Cotangent hamiltonian_flow(const LagrangianModel& lag, const Cotangent& p0, double t, int steps) {
  return hamiltonian_trajectory(lag, p0, t, steps).states.back();
}

Cotangent hamiltonian_flow(const LagrangianModel& lag, const Cotangent& p0, double t) {
  return hamiltonian_flow(lag, p0, t, default_steps(t));
}

Tangent euler_lagrange_flow(const LagrangianModel& lag, const Tangent& v0, double t, int steps) {
  return legendre_inverse(lag, hamiltonian_flow(lag, fiber_derivative(lag, v0), t, steps));
}

Tangent euler_lagrange_flow(const LagrangianModel& lag, const Tangent& v0, double t) {
  return euler_lagrange_flow(lag, v0, t, default_steps(t));
}

CertificateReport tonelli_probe(const LagrangianModel& lag, std::mt19937_64& rng, int samples, double spread,
                                double velocity_scale) {
  const ManifoldModel& m = lag.manifold();
  CertificateReport rep("tonelli_probe");
  double min_gap = std::numeric_limits<double>::infinity();
  double min_c = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const Point x = sample_point(m, rng, spread);
    const Vec v = sample_vector(m.dim(), rng, velocity_scale);
    const Vec w = sample_vector(m.dim(), rng, velocity_scale);
    const double mid = lag.value(x, 0.5 * (v + w));
    const double avg = 0.5 * (lag.value(x, v) + lag.value(x, w));
    // Relative midpoint gap; v and w are distinct almost surely.
    min_gap = std::min(min_gap, (avg - mid) / (1.0 + std::abs(avg)));
    min_c = std::min(min_c, lag.value(x, v) - norm(m, Tangent{x, v}));
  }
  rep.metric("min_midpoint_gap", min_gap).metric("superlinearity_constant", min_c);
  rep.require(min_gap > 0.0, "fiber convexity is not strict on the sample");
  rep.require(std::isfinite(min_c), "superlinearity constant is not finite");
  return rep;
}

}  // namespace lot
