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

#include "lot/kantorovich.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace lot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Flows at or below this are dropped from reported plans.
constexpr double kPlanFloor = 1e-15;

struct FlowState {
  Mat flow;     // m x n
  Vec pi_row;   // phi
  Vec pi_col;   // psi
  int augmentations = 0;
};

// Successive shortest paths from a virtual source feeding every row with
// remaining supply. Potentials keep all residual reduced costs >= 0, so each
// search is a dense Dijkstra on m + n nodes.
FlowState shortest_paths(const Mat& C, std::vector<double> supply, std::vector<double> demand, double active,
                         Vec pi_row, Vec pi_col) {
  const int m = static_cast<int>(C.rows()), n = static_cast<int>(C.cols());
  const int nodes = m + n;
  FlowState st{Mat::Zero(m, n), std::move(pi_row), std::move(pi_col), 0};
  std::vector<double> dist(static_cast<std::size_t>(nodes));
  std::vector<int> parent(static_cast<std::size_t>(nodes));
  std::vector<char> done(static_cast<std::size_t>(nodes));

  while (true) {
    double top = -kInf;
    for (int i = 0; i < m; ++i)
      if (supply[static_cast<std::size_t>(i)] > active) top = std::max(top, st.pi_row[i]);
    if (top == -kInf) break;

    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (int i = 0; i < m; ++i)
      if (supply[static_cast<std::size_t>(i)] > active) dist[static_cast<std::size_t>(i)] = top - st.pi_row[i];

    int target = -1;
    while (true) {
      int u = -1;
      double best = kInf;
      for (int v = 0; v < nodes; ++v)
        if (!done[static_cast<std::size_t>(v)] && dist[static_cast<std::size_t>(v)] < best) {
          best = dist[static_cast<std::size_t>(v)];
          u = v;
        }
      if (u < 0) break;
      done[static_cast<std::size_t>(u)] = 1;
      if (u >= m && demand[static_cast<std::size_t>(u - m)] > active) {
        target = u;
        break;
      }
      if (u < m) {
        for (int j = 0; j < n; ++j) {
          const auto v = static_cast<std::size_t>(m + j);
          if (done[v]) continue;
          const double nd = best + std::max(0.0, C(u, j) + st.pi_row[u] - st.pi_col[j]);
          if (nd < dist[v]) {
            dist[v] = nd;
            parent[v] = u;
          }
        }
      } else {
        const int j = u - m;
        for (int i = 0; i < m; ++i) {
          const auto v = static_cast<std::size_t>(i);
          if (done[v] || !(st.flow(i, j) > 0.0)) continue;
          const double nd = best + std::max(0.0, -C(i, j) + st.pi_col[j] - st.pi_row[i]);
          if (nd < dist[v]) {
            dist[v] = nd;
            parent[v] = u;
          }
        }
      }
    }
    if (target < 0) break;

    const double reach = dist[static_cast<std::size_t>(target)];
    for (int v = 0; v < nodes; ++v) {
      const double d = std::min(dist[static_cast<std::size_t>(v)], reach);
      if (v < m) st.pi_row[v] += d;
      else st.pi_col[v - m] += d;
    }

    double delta = demand[static_cast<std::size_t>(target - m)];
    int v = target, source = -1;
    while (v >= 0) {
      const int p = parent[static_cast<std::size_t>(v)];
      if (p < 0) {
        source = v;
        break;
      }
      if (p >= m) delta = std::min(delta, st.flow(v, p - m));  // backward arc col -> row
      v = p;
    }
    delta = std::min(delta, supply[static_cast<std::size_t>(source)]);
    v = target;
    while (parent[static_cast<std::size_t>(v)] >= 0) {
      const int p = parent[static_cast<std::size_t>(v)];
      if (p < m) st.flow(p, v - m) += delta;
      else st.flow(v, p - m) -= delta;
      v = p;
    }
    supply[static_cast<std::size_t>(source)] -= delta;
    demand[static_cast<std::size_t>(target - m)] -= delta;
    ++st.augmentations;
  }
  return st;
}

// Barycenter of the shortest-path potentials rooted at every node of the
// difference-constraint graph (psi_j - phi_i <= c_ij everywhere, equality on
// the flow support). An edge is tight in the average iff it lies on a
// zero-length cycle, i.e. iff it is tight for every optimal dual.
void center_potentials(const Mat& C, const Mat& flow, Vec& phi, Vec& psi) {
  const int m = static_cast<int>(C.rows()), n = static_cast<int>(C.cols());
  const int nodes = m + n;
  const auto N = static_cast<std::size_t>(nodes);
  std::vector<double> D(N * N, kInf);
  const auto at = [&](int a, int b) -> double& { return D[static_cast<std::size_t>(a) * N + static_cast<std::size_t>(b)]; };
  for (int v = 0; v < nodes; ++v) at(v, v) = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      at(i, m + j) = std::max(0.0, C(i, j) + phi[i] - psi[j]);
      if (flow(i, j) > 0.0) at(m + j, i) = 0.0;
    }
  for (int k = 0; k < nodes; ++k) {
    const double* rk = &D[static_cast<std::size_t>(k) * N];
    for (int a = 0; a < nodes; ++a) {
      double* ra = &D[static_cast<std::size_t>(a) * N];
      const double dak = ra[k];
      if (dak == kInf) continue;
      for (std::size_t b = 0; b < N; ++b) ra[b] = std::min(ra[b], dak + rk[b]);
    }
  }
  Vec shift = Vec::Zero(nodes);
  for (int a = 0; a < nodes; ++a)
    for (int b = 0; b < nodes; ++b) shift[b] += at(a, b);
  shift /= nodes;
  for (int i = 0; i < m; ++i) phi[i] += shift[i];
  for (int j = 0; j < n; ++j) psi[j] += shift[m + j];
}

TransportPlan plan_from_flow(const Mat& flow, double scale) {
  TransportPlan plan;
  plan.rows = static_cast<int>(flow.rows());
  plan.cols = static_cast<int>(flow.cols());
  for (int i = 0; i < plan.rows; ++i)
    for (int j = 0; j < plan.cols; ++j) {
      const double w = flow(i, j) * scale;
      if (w > kPlanFloor) plan.entries.push_back(PlanEntry{i, j, w});
    }
  return plan;
}

Mat dense(const TransportPlan& plan) {
  Mat f = Mat::Zero(plan.rows, plan.cols);
  for (const PlanEntry& e : plan.entries) f(e.i, e.j) += e.mass;
  return f;
}

void check_shapes(const Mat& C, const std::vector<double>& a, const std::vector<double>& b) {
  if (C.rows() != static_cast<Eigen::Index>(a.size()) || C.cols() != static_cast<Eigen::Index>(b.size()))
    throw InputError("cost matrix shape does not match the measures", "measures");
  if (a.empty() || b.empty()) throw InputError("empty measure", "measures");
  if (!C.allFinite()) throw InputError("cost matrix has non-finite entries", "measures");
}

void normalize_gauge(DualPotentials& pot) {
  const double s = pot.phi[0];
  pot.phi.array() -= s;
  pot.psi.array() -= s;
}

template <typename Eval>
Mat assemble(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::vector<std::pair<int, int>>* ambiguous,
             bool parallel, Eval&& eval) {
  const int m = static_cast<int>(mu.size()), n = static_cast<int>(nu.size());
  const long total = static_cast<long>(m) * n;
  Mat C(m, n);
  std::vector<char> flags(static_cast<std::size_t>(total), 0);
  long first_error = total;
  std::string error_what;
  double error_residual = 0.0;
  bool error_numerical = false;
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (long k = 0; k < total; ++k) {
    const int i = static_cast<int>(k / n), j = static_cast<int>(k % n);
    try {
      const CostValue cv = eval(mu.support[static_cast<std::size_t>(i)], nu.support[static_cast<std::size_t>(j)]);
      C(i, j) = cv.value;
      flags[static_cast<std::size_t>(k)] = cv.ambiguous ? 1 : 0;
    } catch (const Error& e) {
      C(i, j) = kInf;
#pragma omp critical(lot_cost_matrix_error)
      if (k < first_error) {
        first_error = k;
        error_what = e.what();
        const auto* ce = dynamic_cast<const ConvergenceError*>(&e);
        error_residual = ce ? ce->residual() : kInf;
        error_numerical = dynamic_cast<const NumericalError*>(&e) != nullptr;
      }
    }
  }
  if (first_error < total) {
    const std::string where = "cost(" + std::to_string(first_error / n) + ", " + std::to_string(first_error % n) + "): ";
    if (error_numerical) throw ConvergenceError(where + error_what, error_residual);
    throw DomainError(where + error_what);
  }
  if (ambiguous)
    for (long k = 0; k < total; ++k)
      if (flags[static_cast<std::size_t>(k)]) ambiguous->emplace_back(static_cast<int>(k / n), static_cast<int>(k % n));
  return C;
}

}  // namespace

DiscreteMeasure make_measure(const ManifoldModel& m, std::vector<Point> support, std::vector<double> weights,
                             const std::string& key) {
  if (support.empty()) throw InputError("measure has no atoms", key);
  if (support.size() != weights.size()) throw InputError("support and weights differ in length", key);
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0) || !std::isfinite(w)) throw InputError("measure weights must be positive and finite", key);
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("measure weights must sum to 1 (got " + std::to_string(total) + ")", key);
  for (Point& p : support) {
    try {
      p = canonicalize(m, p);
    } catch (const DomainError& e) {
      throw InputError(std::string("measure atom outside the model: ") + e.what(), key);
    }
  }
  for (std::size_t i = 0; i < support.size(); ++i)
    for (std::size_t j = i + 1; j < support.size(); ++j)
      if (dist(m, support[i], support[j]) <= 1e-14)
        throw InputError("measure atoms " + std::to_string(i) + " and " + std::to_string(j) + " coincide", key);
  return DiscreteMeasure{std::move(support), std::move(weights)};
}

DiscreteMeasure uniform_measure(const ManifoldModel& m, std::vector<Point> support, const std::string& key) {
  std::vector<double> w(support.size(), support.empty() ? 0.0 : 1.0 / static_cast<double>(support.size()));
  return make_measure(m, std::move(support), std::move(w), key);
}

std::vector<double> weights_of(const DiscreteMeasure& mu) { return mu.weights; }

double plan_cost(const TransportPlan& plan, const Mat& C) {
  double s = 0.0;
  for (const PlanEntry& e : plan.entries) s += e.mass * C(e.i, e.j);
  return s;
}

double dual_objective(const DualPotentials& pot, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) s += pot.psi[static_cast<Eigen::Index>(j)] * b[j];
  for (std::size_t i = 0; i < a.size(); ++i) s -= pot.phi[static_cast<Eigen::Index>(i)] * a[i];
  return s;
}

int split_rows(const TransportPlan& plan) {
  std::vector<int> count(static_cast<std::size_t>(plan.rows), 0);
  for (const PlanEntry& e : plan.entries) ++count[static_cast<std::size_t>(e.i)];
  return static_cast<int>(std::count_if(count.begin(), count.end(), [](int c) { return c > 1; }));
}

Mat cost_matrix(const CostModel& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                std::vector<std::pair<int, int>>* ambiguous) {
  return assemble(mu, nu, ambiguous, true, [&](const Point& x, const Point& y) { return cost.evaluate(x, y); });
}

Mat cost_matrix_serial(const CostModel& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       std::vector<std::pair<int, int>>* ambiguous) {
  return assemble(mu, nu, ambiguous, false, [&](const Point& x, const Point& y) { return cost.evaluate(x, y); });
}

DualPotentials sinkhorn_potentials(const Mat& C, const std::vector<double>& a, const std::vector<double>& b,
                                   double eps, int iterations) {
  check_shapes(C, a, b);
  if (!(eps > 0)) throw InputError("Sinkhorn temperature must be positive", "solver.sinkhorn_epsilon");
  const Eigen::Index m = C.rows(), n = C.cols();
  Vec f = Vec::Zero(m), g = Vec::Zero(n);
  const auto lse = [](const Vec& z) {
    const double top = z.maxCoeff();
    return top + std::log((z.array() - top).exp().sum());
  };
  Vec z;
  for (int it = 0; it < iterations; ++it) {
    z.resize(n);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) z[j] = std::log(b[static_cast<std::size_t>(j)]) + (g[j] - C(i, j)) / eps;
      f[i] = -eps * lse(z);
    }
    z.resize(m);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < m; ++i) z[i] = std::log(a[static_cast<std::size_t>(i)]) + (f[i] - C(i, j)) / eps;
      g[j] = -eps * lse(z);
    }
  }
  return DualPotentials{-f, g};
}

Solution solve_exact(const Mat& C, const std::vector<double>& a, const std::vector<double>& b,
                     const SolveOptions& opts) {
  check_shapes(C, a, b);
  const double sa = std::accumulate(a.begin(), a.end(), 0.0), sb = std::accumulate(b.begin(), b.end(), 0.0);
  if (std::abs(sa - sb) > 1e-12 * std::max(1.0, sa))
    throw InputError("marginal masses differ (" + std::to_string(sa) + " vs " + std::to_string(sb) + ")", "measures");
  const Eigen::Index m = C.rows(), n = C.cols();

  Vec phi = Vec::Zero(m), psi(n);
  if (opts.sinkhorn_warm_start) {
    const double scale = std::max(C.cwiseAbs().maxCoeff(), 1e-300);
    const DualPotentials warm = sinkhorn_potentials(C, a, b, opts.sinkhorn_epsilon * scale, opts.sinkhorn_iterations);
    psi = warm.psi;
    for (Eigen::Index i = 0; i < m; ++i) phi[i] = (psi.transpose() - C.row(i)).maxCoeff();
  } else {
    for (Eigen::Index j = 0; j < n; ++j) psi[j] = C.col(j).minCoeff();
  }

  const bool equal = m == n && std::all_of(a.begin(), a.end(), [&](double w) { return w == a[0]; }) &&
                     std::all_of(b.begin(), b.end(), [&](double w) { return w == a[0]; });
  Solution sol;
  FlowState st;
  double scale = 1.0;
  if (equal) {
    // Unit flows: every augmentation moves one atom, no rounding in masses.
    st = shortest_paths(C, std::vector<double>(a.size(), 1.0), std::vector<double>(b.size(), 1.0), 0.5, phi, psi);
    scale = a[0];
    sol.method = "assignment";
  } else {
    st = shortest_paths(C, a, b, 1e-14, phi, psi);
    sol.method = "min_cost_flow";
  }
  if (opts.center_duals) center_potentials(C, st.flow, st.pi_row, st.pi_col);
  sol.plan = plan_from_flow(st.flow, scale);
  sol.potentials = DualPotentials{st.pi_row, st.pi_col};
  normalize_gauge(sol.potentials);
  sol.cost = plan_cost(sol.plan, C);
  sol.augmentations = st.augmentations;
  return sol;
}

Solution solve_exact(const Mat& C, const DiscreteMeasure& mu, const DiscreteMeasure& nu, const SolveOptions& opts) {
  return solve_exact(C, mu.weights, nu.weights, opts);
}

CTransform c_transform_row(const Vec& psi, const Vec& costs) {
  if (psi.size() != costs.size() || psi.size() == 0) throw InputError("c-transform needs matching non-empty inputs", "psi");
  if (!psi.allFinite()) throw InputError("c-transform needs finite psi", "psi");
  const Vec vals = psi - costs;
  const double top = vals.maxCoeff();
  const double tol = kTieTolerance * (1.0 + std::abs(top));
  CTransform out;
  out.value = top;
  int count = 0;
  for (Eigen::Index j = 0; j < vals.size(); ++j) {
    if (vals[j] >= top - tol) {
      if (out.index < 0) out.index = static_cast<int>(j);
      ++count;
    }
  }
  out.tie = count > 1;
  return out;
}

CTransform c_transform(const Vec& psi, const DiscreteMeasure& nu, const CostModel& cost, const Point& x) {
  if (psi.size() != static_cast<Eigen::Index>(nu.size())) throw InputError("psi does not match the target measure", "psi");
  Vec costs(psi.size());
  for (std::size_t j = 0; j < nu.size(); ++j) costs[static_cast<Eigen::Index>(j)] = cost(x, nu.support[j]);
  return c_transform_row(psi, costs);
}

CertificateReport check_calibration(const TransportPlan& plan, const DualPotentials& pot, const Mat& C, double tol) {
  CertificateReport rep("calibration");
  double sub = 0.0, eq = 0.0;
  for (Eigen::Index i = 0; i < C.rows(); ++i)
    for (Eigen::Index j = 0; j < C.cols(); ++j) sub = std::max(sub, pot.psi[j] - pot.phi[i] - C(i, j));
  for (const PlanEntry& e : plan.entries) eq = std::max(eq, std::abs(pot.psi[e.j] - pot.phi[e.i] - C(e.i, e.j)));
  rep.metric("subsolution_residual", sub).metric("equality_residual", eq).metric("tolerance", tol);
  rep.require(sub <= tol, "psi(y) - phi(x) exceeds c(x,y)");
  rep.require(eq <= tol, "pair is not calibrated on the plan support");
  return rep;
}

CertificateReport check_marginals(const TransportPlan& plan, const std::vector<double>& a,
                                  const std::vector<double>& b, double tol) {
  std::vector<double> rows(a.size(), 0.0), cols(b.size(), 0.0);
  for (const PlanEntry& e : plan.entries) {
    rows[static_cast<std::size_t>(e.i)] += e.mass;
    cols[static_cast<std::size_t>(e.j)] += e.mass;
  }
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(rows[i] - a[i]));
  for (std::size_t j = 0; j < b.size(); ++j) err = std::max(err, std::abs(cols[j] - b[j]));
  CertificateReport rep("marginals");
  rep.metric("max_marginal_error", err).metric("tolerance", tol);
  rep.require(err <= tol, "plan marginals differ from the measures");
  return rep;
}

CertificateReport check_duality(const Solution& sol, const Mat& C, const std::vector<double>& a,
                                const std::vector<double>& b, double tol) {
  const double primal = plan_cost(sol.plan, C);
  const double dual = dual_objective(sol.potentials, a, b);
  CertificateReport rep("duality");
  rep.metric("primal", primal).metric("dual", dual).metric("gap", std::abs(primal - dual)).metric("tolerance", tol);
  rep.require(std::abs(primal - dual) <= tol, "duality gap above tolerance");
  return rep;
}

UniquenessProbe uniqueness_probe(const Mat& C, const std::vector<double>& a, const std::vector<double>& b,
                                 const Solution& sol, double tol) {
  check_shapes(C, a, b);
  const Eigen::Index m = C.rows(), n = C.cols();
  const Mat flow = dense(sol.plan);
  Vec phi = sol.potentials.phi, psi = sol.potentials.psi;
  center_potentials(C, flow, phi, psi);

  // Every plan supported on tight edges is optimal; look for the one that
  // overlaps least with the current support.
  const double edge_tol = tol * (1.0 + C.cwiseAbs().maxCoeff());
  Mat steer(m, n);
  int tight_off_support = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const bool tight = C(i, j) + phi[i] - psi[j] <= edge_tol;
      const bool on = flow(i, j) > 0.0;
      if (tight && !on) ++tight_off_support;
      steer(i, j) = on ? 1.0 : (tight ? 0.0 : 1e6);
    }

  UniquenessProbe out;
  SolveOptions plain;
  plain.center_duals = false;
  out.alternative = solve_exact(steer, a, b, plain).plan;
  const Mat alt = dense(out.alternative);
  bool differs = false;
  for (Eigen::Index i = 0; i < m && !differs; ++i)
    for (Eigen::Index j = 0; j < n && !differs; ++j) differs = (alt(i, j) > 0.0) != (flow(i, j) > 0.0);
  const double gap = std::abs(plan_cost(out.alternative, C) - sol.cost);
  out.unique = !(differs && gap <= tol * (1.0 + std::abs(sol.cost)));
  out.averaged = plan_from_flow(0.5 * (flow + alt), 1.0);

  out.report.metric("tight_edges_off_support", tight_off_support)
      .metric("alternative_cost_gap", gap)
      .metric("split_rows_averaged", split_rows(out.averaged));
  out.report.require(out.unique, "optimal plan is not unique: averaging two optimal plans splits rows");
  return out;
}

}  // namespace lot
