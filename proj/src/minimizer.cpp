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

#include "lot/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

namespace lot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int even_steps(const MinimizerOptions& opts, double t) {
  if (opts.steps <= 0) return default_steps(t);
  return opts.steps % 2 == 0 ? opts.steps : opts.steps + 1;
}

double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size() - 1;
  double s = f.front() + f.back();
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
  return s * h / 3.0;
}

double energy_spread(const LagrangianModel& lag, const Curve& c) {
  double lo = kInf, hi = -kInf;
  for (const Tangent& v : c.velocities) {
    const double e = energy(lag, v);
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  const double scale = std::max(std::abs(lo), std::abs(hi));
  if (scale < 1e-300) return 0.0;
  return (hi - lo) / scale;
}

Curve curve_from_trajectory(const LagrangianModel& lag, const FlowTrajectory& traj) {
  Curve c;
  c.times = traj.times;
  c.points.reserve(traj.states.size());
  c.velocities.reserve(traj.states.size());
  std::vector<double> integrand;
  integrand.reserve(traj.states.size());
  for (const Cotangent& p : traj.states) {
    Tangent v = legendre_inverse(lag, p);
    integrand.push_back(lag.value(v.base, v.components));
    c.points.push_back(p.base);
    c.velocities.push_back(std::move(v));
  }
  const double h = traj.times.back() / static_cast<double>(traj.times.size() - 1);
  c.action = simpson(integrand, h);
  c.energy_spread = energy_spread(lag, c);
  return c;
}

struct Shot {
  double residual = kInf;
  Vec v0;
  std::optional<FlowTrajectory> traj;
};

struct EndpointEval {
  double residual = kInf;
  Vec residual_vec;
  std::optional<FlowTrajectory> traj;
};

EndpointEval evaluate(const LagrangianModel& lag, const CostQuery& q, const Vec& v0, int steps) {
  EndpointEval out;
  try {
    const Cotangent p0 = fiber_derivative(lag, Tangent{q.x, v0});
    FlowTrajectory traj = hamiltonian_trajectory(lag, p0, q.t, steps);
    const Point& end = traj.states.back().base;
    out.residual_vec = log(lag.manifold(), q.y, end).components;
    out.residual = dist(lag.manifold(), q.y, end);
    out.traj = std::move(traj);
  } catch (const Error&) {
    out.residual = kInf;
  }
  return out;
}

// Newton on the endpoint residual log_y(gamma(t)) as a function of gamma'(0).
Shot shoot(const LagrangianModel& lag, const CostQuery& q, const Vec& seed, int steps, const MinimizerOptions& opts) {
  const int n = lag.manifold().dim();
  Vec v = seed;
  EndpointEval cur = evaluate(lag, q, v, steps);
  for (int it = 0; it < opts.newton_max_iter && std::isfinite(cur.residual); ++it) {
    if (cur.residual <= opts.newton_tol * (1.0 + v.norm() * q.t)) break;
    Mat jac(n, n);
    bool ok = true;
    for (int k = 0; k < n && ok; ++k) {
      const double h = 1e-7 * (1.0 + v.norm());
      Vec vk = v;
      vk[k] += h;
      const EndpointEval e = evaluate(lag, q, vk, steps);
      if (!std::isfinite(e.residual)) {
        ok = false;
        break;
      }
      jac.col(k) = (e.residual_vec - cur.residual_vec) / h;
    }
    if (!ok) break;
    const Vec step = jac.colPivHouseholderQr().solve(-cur.residual_vec);
    if (!step.allFinite()) break;
    double alpha = 1.0;
    bool improved = false;
    // Near the rounding floor a failed full step means we are done.
    const int halvings = cur.residual <= 1e-3 * opts.tol ? 1 : 12;
    for (int ls = 0; ls < halvings; ++ls) {
      EndpointEval trial = evaluate(lag, q, v + alpha * step, steps);
      if (trial.residual < cur.residual) {
        v += alpha * step;
        cur = std::move(trial);
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }
  Shot s;
  s.residual = cur.residual;
  s.v0 = v;
  s.traj = std::move(cur.traj);
  return s;
}

std::vector<Vec> shooting_seeds(const LagrangianModel& lag, const CostQuery& q) {
  const ManifoldModel& m = lag.manifold();
  const double t = q.t;
  std::vector<Vec> seeds;
  switch (m.kind()) {
    case ManifoldKind::torus: {
      const auto reps = torus_translates(m, q.x, q.y);
      double dmin = kInf;
      for (const Point& z : reps) dmin = std::min(dmin, (z.coords - q.x.coords).norm());
      for (const Point& z : reps) {
        if ((z.coords - q.x.coords).norm() <= 1.5 * dmin + 1e-12) seeds.push_back((z.coords - q.x.coords) / t);
      }
      break;
    }
    case ManifoldKind::sphere2: {
      const double circumference = 2 * std::numbers::pi * m.radius();
      try {
        const Tangent u = log(m, q.x, q.y);
        const double d = norm(m, u);
        if (d == 0.0) {
          seeds.push_back(u.components);
        } else {
          seeds.push_back(u.components / t);
          seeds.push_back(-u.components * ((circumference - d) / (d * t)));
        }
      } catch (const AmbiguityError&) {
        // Antipodal endpoints: every great circle through x is minimal.
        for (int k = 0; k < 2; ++k) {
          Vec e = Vec::Zero(2);
          e[k] = 1.0;
          const double speed = norm(m, Tangent{q.x, e});
          seeds.push_back(e * (0.5 * circumference / (speed * t)));
        }
      }
      break;
    }
    default:
      seeds.push_back(log(m, q.x, q.y).components / t);
  }
  return seeds;
}

// Endpoint representative of y in the chart of x (after a possible switch of
// x's chart on the sphere).
std::pair<Point, Point> direct_endpoints(const ManifoldModel& m, const CostQuery& q) {
  if (m.kind() == ManifoldKind::torus) {
    return {q.x, Point{0, q.x.coords + log(m, q.x, q.y).components}};
  }
  if (m.kind() == ManifoldKind::sphere2) {
    if (q.y.chart == q.x.chart) return {q.x, q.y};
    if (q.y.coords.squaredNorm() > 0.0) return {q.x, to_chart(m, q.y, q.x.chart)};
    return {to_chart(m, q.x, q.y.chart), q.y};
  }
  return {q.x, q.y};
}

void validate(const LagrangianModel& lag, const CostQuery& q) {
  if (!(q.t > 0) || !std::isfinite(q.t)) throw InputError("cost query requires t > 0", "t");
  check_admissible(lag.manifold(), q.x);
  check_admissible(lag.manifold(), q.y);
}

}  // namespace

Curve minimize_direct(const LagrangianModel& lag, const CostQuery& q, const MinimizerOptions& opts) {
  validate(lag, q);
  const ManifoldModel& m = lag.manifold();
  const int n = m.dim();
  const int segs = std::max(2, opts.direct_segments);
  const double h = q.t / segs;
  const auto [a, b] = direct_endpoints(m, q);
  const int chart = a.chart;
  const int dim = (segs - 1) * n;

  const auto node = [&](const Vec& z, int k) -> Vec {
    if (k == 0) return a.coords;
    if (k == segs) return b.coords;
    return z.segment((k - 1) * n, n);
  };
  const auto action = [&](const Vec& z, Vec* grad) {
    double s = 0.0;
    if (grad) grad->setZero(dim);
    for (int k = 0; k < segs; ++k) {
      const Vec q0 = node(z, k), q1 = node(z, k + 1);
      const Point mid{chart, 0.5 * (q0 + q1)};
      const Vec w = (q1 - q0) / h;
      s += h * lag.value(mid, w);
      if (grad) {
        const Vec lx = lag.dx(mid, w), lv = lag.dv(mid, w);
        if (k >= 1) grad->segment((k - 1) * n, n) += 0.5 * h * lx - lv;
        if (k + 1 <= segs - 1) grad->segment(k * n, n) += 0.5 * h * lx + lv;
      }
    }
    return s;
  };

  Vec z(dim);
  for (int k = 1; k < segs; ++k) {
    const double s = static_cast<double>(k) / segs;
    z.segment((k - 1) * n, n) = (1 - s) * a.coords + s * b.coords;
  }
  if (dim > 0) {
    // BFGS with Armijo backtracking.
    Mat hinv = Mat::Identity(dim, dim) * (h / 2);
    Vec g(dim);
    double f = action(z, &g);
    for (int it = 0; it < opts.direct_max_iter && g.norm() > 1e-12 * (1 + std::abs(f)); ++it) {
      Vec dir = -hinv * g;
      if (dir.dot(g) >= 0) {
        hinv = Mat::Identity(dim, dim) * (h / 2);
        dir = -hinv * g;
      }
      double alpha = 1.0;
      Vec zn = z + dir, gn(dim);
      double fn = kInf;
      for (int ls = 0; ls < 40; ++ls) {
        zn = z + alpha * dir;
        bool admissible = true;
        if (m.kind() == ManifoldKind::hyperbolic2) {
          for (int k = 1; k < segs && admissible; ++k) admissible = zn.segment((k - 1) * n, n).squaredNorm() < 1.0;
        }
        if (admissible) {
          fn = action(zn, &gn);
          if (fn <= f + 1e-4 * alpha * dir.dot(g)) break;
        }
        alpha *= 0.5;
      }
      if (!(fn < f)) break;
      const Vec sv = zn - z, yv = gn - g;
      const double sy = sv.dot(yv);
      if (sy > 1e-300) {
        const Vec hy = hinv * yv;
        hinv += ((sy + yv.dot(hy)) / (sy * sy)) * (sv * sv.transpose()) - (hy * sv.transpose() + sv * hy.transpose()) / sy;
      }
      z = zn;
      g = gn;
      f = fn;
    }
  }

  Curve c;
  c.method = "direct";
  std::vector<double> seg_l;
  for (int k = 0; k <= segs; ++k) {
    c.times.push_back(k == segs ? q.t : k * h);
    c.points.push_back(Point{chart, node(z, k)});
  }
  for (int k = 0; k <= segs; ++k) {
    Vec v;
    if (k == 0) v = (node(z, 1) - node(z, 0)) / h;
    else if (k == segs) v = (node(z, segs) - node(z, segs - 1)) / h;
    else v = (node(z, k + 1) - node(z, k - 1)) / (2 * h);
    c.velocities.push_back(Tangent{c.points[static_cast<std::size_t>(k)], v});
  }
  c.action = action(z, nullptr);
  c.energy_spread = energy_spread(lag, c);
  return c;
}

Curve minimize(const LagrangianModel& lag, const CostQuery& q, const MinimizerOptions& opts) {
  validate(lag, q);
  const int steps = even_steps(opts, q.t);

  struct Candidate {
    Curve curve;
    Vec v0;
  };
  std::vector<Candidate> found;
  double best_residual = kInf;
  const auto try_seed = [&](const Vec& seed, const char* method) {
    Shot s = shoot(lag, q, seed, steps, opts);
    best_residual = std::min(best_residual, s.residual);
    if (!(s.residual <= opts.tol) || !s.traj) return;
    Curve c = curve_from_trajectory(lag, *s.traj);
    c.residual = s.residual;
    c.method = method;
    found.push_back(Candidate{std::move(c), s.v0});
  };

  if (opts.seed_shooting) {
    for (const Vec& seed : shooting_seeds(lag, q)) try_seed(seed, "shooting");
  }
  if (found.empty()) {
    const Curve direct = minimize_direct(lag, q, opts);
    Tangent v0 = direct.velocities.front();
    v0 = to_chart(lag.manifold(), v0, q.x.chart);
    try_seed(v0.components, "direct+shooting");
  }
  if (found.empty())
    throw ConvergenceError("minimizer failed: best endpoint residual " + std::to_string(best_residual), best_residual);

  std::size_t best = 0;
  for (std::size_t i = 1; i < found.size(); ++i)
    if (found[i].curve.action < found[best].curve.action) best = i;
  Curve out = std::move(found[best].curve);
  const Vec v_best = found[best].v0;
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (i == best) continue;
    const bool tied = std::abs(found[i].curve.action - out.action) <= opts.ambiguity_tol * (1.0 + out.action);
    const bool distinct = (found[i].v0 - v_best).norm() > 1e-6 * (1.0 + v_best.norm());
    if (tied && distinct) out.ambiguous = true;
  }
  return out;
}

double cost(const LagrangianModel& lag, const CostQuery& q, const MinimizerOptions& opts) {
  return minimize(lag, q, opts).action;
}

double power_cost_closed_form(const ManifoldModel& m, double r, const Point& x, const Point& y, double t) {
  return std::pow(t, 1.0 - r) * std::pow(dist(m, x, y), r);
}

Superdifferential superdifferential_of(const LagrangianModel& lag, const Curve& curve, const Point& x,
                                       const Point& y) {
  const ManifoldModel& m = lag.manifold();
  const Tangent& v0 = curve.velocities.front();
  const Tangent& v1 = curve.velocities.back();
  Cotangent px = to_chart(m, Cotangent{v0.base, -lag.dv(v0.base, v0.components)}, x.chart);
  Cotangent py = to_chart(m, Cotangent{v1.base, lag.dv(v1.base, v1.components)}, y.chart);
  px.base = x;
  py.base = y;
  return Superdifferential{std::move(px), std::move(py)};
}

Superdifferential cost_superdifferential(const LagrangianModel& lag, const CostQuery& q, const MinimizerOptions& opts) {
  return superdifferential_of(lag, minimize(lag, q, opts), q.x, q.y);
}

std::string to_string(CostEvaluation e) { return e == CostEvaluation::minimizer ? "minimizer" : "closed_form"; }

CostEvaluation cost_evaluation_from_string(const std::string& name) {
  if (name == "minimizer") return CostEvaluation::minimizer;
  if (name == "closed_form") return CostEvaluation::closed_form;
  throw InputError("unknown cost evaluation '" + name + "'", "solver.cost_evaluation");
}

CostModel::CostModel(LagrangianModel lag, double t, CostEvaluation eval, MinimizerOptions opts)
    : lag_(std::move(lag)), t_(t), eval_(eval), opts_(opts) {
  if (!(t_ > 0) || !std::isfinite(t_)) throw InputError("cost requires t > 0", "t");
  if (eval_ == CostEvaluation::closed_form && lag_.kind() != LagrangianKind::power_metric)
    throw InputError("closed_form cost evaluation needs a power_metric Lagrangian", "solver.cost_evaluation");
}

CostValue CostModel::evaluate(const Point& x, const Point& y) const {
  if (eval_ == CostEvaluation::minimizer) {
    const Curve c = minimize(lag_, CostQuery{x, y, t_}, opts_);
    return CostValue{c.action, c.ambiguous};
  }
  check_admissible(manifold(), x);
  check_admissible(manifold(), y);
  return CostValue{power_cost_closed_form(manifold(), lag_.r(), x, y, t_),
                   near_cut_locus(manifold(), x, y, opts_.ambiguity_tol)};
}

Superdifferential CostModel::superdifferential(const Point& x, const Point& y) const {
  if (eval_ == CostEvaluation::minimizer) return cost_superdifferential(lag_, CostQuery{x, y, t_}, opts_);
  const ManifoldModel& m = manifold();
  const Vec vx = log(m, x, y).components / t_;
  const Vec vy = -log(m, y, x).components / t_;
  return Superdifferential{Cotangent{x, -lag_.dv(x, vx)}, Cotangent{y, lag_.dv(y, vy)}};
}

CertificateReport twist_probe(const LagrangianModel& lag, const Point& x, const std::vector<Point>& ys, double t,
                              const MinimizerOptions& opts, double margin) {
  const ManifoldModel& m = lag.manifold();
  CertificateReport rep("twist_probe");
  std::vector<Vec> grads;
  double worst_reconstruction = 0.0;
  int ambiguous = 0;
  const int steps = even_steps(opts, t);
  for (const Point& y : ys) {
    const Curve c = minimize(lag, CostQuery{x, y, t}, opts);
    if (c.ambiguous) ++ambiguous;
    const Superdifferential sd = superdifferential_of(lag, c, x, y);
    grads.push_back(sd.at_x.components);
    const Tangent v = legendre_inverse(lag, Cotangent{x, -sd.at_x.components});
    const Point end = hamiltonian_flow(lag, fiber_derivative(lag, v), t, steps).base;
    worst_reconstruction = std::max(worst_reconstruction, dist(m, end, y));
  }
  double min_sep = kInf;
  for (std::size_t i = 0; i < grads.size(); ++i)
    for (std::size_t j = i + 1; j < grads.size(); ++j)
      min_sep = std::min(min_sep, dual_norm(m, Cotangent{x, grads[i] - grads[j]}));
  rep.metric("targets", static_cast<double>(ys.size()))
      .metric("min_gradient_separation", grads.size() > 1 ? min_sep : 0.0)
      .metric("max_reconstruction_residual", worst_reconstruction)
      .metric("ambiguous_targets", ambiguous);
  if (grads.size() > 1) rep.require(min_sep > margin, "two targets share the same dc/dx");
  rep.require(worst_reconstruction <= 1e-6, "flow reconstruction misses a target");
  rep.require(ambiguous == 0, "a target lies on the cut locus of x");
  return rep;
}

CertificateReport speed_bound_probe(const LagrangianModel& lag, const std::vector<Point>& K, double t, int trials,
                                    std::uint64_t seed, const MinimizerOptions& opts) {
  if (K.empty()) throw PreconditionError("speed_bound_probe needs a non-empty K");
  if (trials <= 0) throw InputError("speed_bound_probe needs trials > 0", "trials");
  const ManifoldModel& m = lag.manifold();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, K.size() - 1);
  double bound_half = 0.0, bound = 0.0;
  for (int i = 0; i < 2 * trials; ++i) {
    const Point& a = K[pick(rng)];
    const Point& b = K[pick(rng)];
    const Curve c = minimize(lag, CostQuery{a, b, t}, opts);
    for (const Tangent& v : c.velocities) bound = std::max(bound, norm(m, v));
    if (i + 1 == trials) bound_half = bound;
  }
  CertificateReport rep("speed_bound_probe");
  rep.metric("bound", bound).metric("bound_half_trials", bound_half).metric("trials", 2.0 * trials);
  rep.require(std::isfinite(bound), "speed bound is not finite");
  rep.require(bound <= 1.1 * bound_half + 1e-12, "speed bound did not saturate under doubling of trials");
  return rep;
}

}  // namespace lot
