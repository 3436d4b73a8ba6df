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

#include "lot/kantorovich.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace lot {

enum class MapMethod { plan_graph, potential_flow, dr_closed_form };

std::string to_string(MapMethod m);

/// A map x_i -> T(x_i) on the support of a source measure.
struct MongeMap {
  MapMethod method = MapMethod::plan_graph;
  std::vector<Point> sources;
  std::vector<Point> images;
  /// Index of the target atom reached by each source, -1 when unresolved.
  std::vector<int> targets;
  /// Distance from the image to its target atom (0 for plan_graph).
  std::vector<double> residuals;
  /// d_x phi at each source (potential_flow only).
  std::vector<Cotangent> gradients;
  /// Mass distribution (target, mass) of rows the plan splits; empty when the
  /// row is carried by a single atom.
  std::vector<std::vector<std::pair<int, double>>> splits;

  std::size_t size() const { return sources.size(); }
  int split_count() const;
};

/// Reads the graph of a plan. Split rows keep the heaviest target as image
/// and are listed in `splits`.
MongeMap map_from_plan(const TransportPlan& plan, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct PotentialImage {
  Point image;
  /// d_x phi = -dc/dx(x, y*) in the chart of x.
  Cotangent grad;
  int target = -1;
  /// dist(image, y*).
  double residual = 0.0;
};

struct PotentialMapOptions {
  /// RK4 steps of the Hamiltonian flow; 0 selects default_steps(t).
  int steps = 0;
  /// Largest accepted dist(image, y*); larger values raise ConvergenceError.
  double consistency_tol = 1e-5;
};

/// T(x) = pi phi^H_t(x, d_x phi) with phi the c-transform of psi. Throws
/// AmbiguityError when the c-transform argmax is not unique at x.
PotentialImage map_from_potential(const CostModel& cost, const Vec& psi, const DiscreteMeasure& nu, const Point& x,
                                  const PotentialMapOptions& opts = {});
/// map_from_potential over every atom of mu, parallel over atoms. Errors are
/// rethrown for the lowest failing atom with its index in the message.
MongeMap map_from_potentials(const CostModel& cost, const Vec& psi, const DiscreteMeasure& mu,
                             const DiscreteMeasure& nu, const PotentialMapOptions& opts = {});

/// exp_x(t v) where v is the velocity with dL/dv(x, v) = grad for
/// L = |v|^r, in displacement form |v| = (|grad| / r)^{1/(r-1)}. A vanishing
/// gradient maps to x and sets *critical.
Point dr_map(const ManifoldModel& m, double r, const Cotangent& grad, double t = 1.0, bool* critical = nullptr);
/// dr_map applied to the gradients of a potential_flow map;
/// targets and residuals refer to the nearest atom of nu.
MongeMap dr_map_all(const ManifoldModel& m, const MongeMap& potential_map, double r, double t,
                    const DiscreteMeasure& nu);

struct PushforwardOptions {
  double snap_tol = 1e-4;
  double tv_tol = 1e-9;
  double cost_rel_tol = 1e-6;
};

/// Snaps images to the nearest atom of nu, compares the pushed weights to nu
/// in total variation and sum c(x, T(x)) mu(x) to the discrete optimum. The
/// optimum is recomputed when not supplied.
CertificateReport pushforward_check(const MongeMap& map, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    const CostModel& cost, std::optional<double> lp_optimum = std::nullopt,
                                    const PushforwardOptions& opts = {});

/// Nearest atom of nu to p and its distance.
std::pair<int, double> nearest_atom(const ManifoldModel& m, const DiscreteMeasure& nu, const Point& p);

}  // namespace lot
