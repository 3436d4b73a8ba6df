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

#include "lot/minimizer.hpp"
#include "lot/report.hpp"

#include <utility>
#include <vector>

namespace lot {

struct DiscreteMeasure {
  std::vector<Point> support;
  std::vector<double> weights;

  std::size_t size() const { return support.size(); }
};

/// Canonicalizes the support and checks weights > 0, sum 1 within 1e-12 and
/// pairwise distinct atoms. Throws InputError with `key` on violation.
DiscreteMeasure make_measure(const ManifoldModel& m, std::vector<Point> support, std::vector<double> weights,
                             const std::string& key = "measures");
DiscreteMeasure uniform_measure(const ManifoldModel& m, std::vector<Point> support,
                                const std::string& key = "measures");

struct PlanEntry {
  int i;
  int j;
  double mass;
};

/// Sparse coupling, entries sorted by (i, j).
struct TransportPlan {
  int rows = 0;
  int cols = 0;
  std::vector<PlanEntry> entries;
};

/// Sign convention: psi_j - phi_i <= c_ij, objective sum psi nu - sum phi mu.
/// Standard LP duals u_i + v_j <= c_ij correspond to phi = -u, psi = v.
struct DualPotentials {
  Vec phi;
  Vec psi;
};

double plan_cost(const TransportPlan& plan, const Mat& C);
double dual_objective(const DualPotentials& pot, const std::vector<double>& a, const std::vector<double>& b);
/// Number of rows carrying more than one nonzero entry.
int split_rows(const TransportPlan& plan);

/// C_ij = c(x_i, y_j). Parallel over entries; the result does not depend on
/// the schedule. Pairs flagged ambiguous by the cost are appended to
/// `ambiguous` in row-major order. Convergence failures are rethrown for the
/// lowest failing (i, j).
Mat cost_matrix(const CostModel& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                std::vector<std::pair<int, int>>* ambiguous = nullptr);
/// Single-threaded reference of cost_matrix.
Mat cost_matrix_serial(const CostModel& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       std::vector<std::pair<int, int>>* ambiguous = nullptr);

struct SolveOptions {
  /// Seed the potentials with a c-transformed entropic solution.
  bool sinkhorn_warm_start = false;
  /// Entropic temperature relative to max |C|.
  double sinkhorn_epsilon = 1e-2;
  int sinkhorn_iterations = 300;
  /// Replace the solver's vertex duals by the barycenter of the optimal dual
  /// face, so that c-transform ties only occur where the primal optimum is
  /// itself non-unique.
  bool center_duals = true;
};

struct Solution {
  TransportPlan plan;
  DualPotentials potentials;
  double cost = 0.0;
  /// "assignment" (equal weights, unit flows) or "min_cost_flow".
  std::string method;
  int augmentations = 0;
};

/// Exact discrete transport by successive shortest augmenting paths with
/// reduced costs. Throws InputError when the total masses differ.
Solution solve_exact(const Mat& C, const std::vector<double>& a, const std::vector<double>& b,
                     const SolveOptions& opts = {});
Solution solve_exact(const Mat& C, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     const SolveOptions& opts = {});

/// Log-domain Sinkhorn potentials at temperature eps (absolute), in the
/// same sign convention. Not optimal for the unregularized problem.
DualPotentials sinkhorn_potentials(const Mat& C, const std::vector<double>& a, const std::vector<double>& b,
                                   double eps, int iterations);

struct CTransform {
  double value = 0.0;
  int index = -1;
  /// Another index attains the max within the tie tolerance.
  bool tie = false;
};

/// Relative tolerance under which two candidates of a c-transform tie.
inline constexpr double kTieTolerance = 1e-10;

/// max_j psi_j - costs_j, lowest index on ties.
CTransform c_transform_row(const Vec& psi, const Vec& costs);
/// phi(x) = max_j psi_j - c(x, y_j).
CTransform c_transform(const Vec& psi, const DiscreteMeasure& nu, const CostModel& cost, const Point& x);

/// Subsolution psi_j - phi_i <= c_ij + tol everywhere and equality within tol
/// on the plan support.
CertificateReport check_calibration(const TransportPlan& plan, const DualPotentials& pot, const Mat& C,
                                    double tol = 1e-9);
CertificateReport check_marginals(const TransportPlan& plan, const std::vector<double>& a,
                                  const std::vector<double>& b, double tol = 1e-10);
CertificateReport check_duality(const Solution& sol, const Mat& C, const std::vector<double>& a,
                                const std::vector<double>& b, double tol = 1e-9);

struct UniquenessProbe {
  bool unique = true;
  /// Optimal plan steered away from the support of the first one.
  TransportPlan alternative;
  /// Average of both optimal plans; splits rows when the optimum is not unique.
  TransportPlan averaged;
  CertificateReport report{"uniqueness_probe"};
};

/// Re-solves with the current support penalized; an alternative plan of equal
/// cost and different support proves non-uniqueness.
UniquenessProbe uniqueness_probe(const Mat& C, const std::vector<double>& a, const std::vector<double>& b,
                                 const Solution& sol, double tol = 1e-9);

std::vector<double> weights_of(const DiscreteMeasure& mu);

}  // namespace lot
