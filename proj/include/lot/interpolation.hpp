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

#include "lot/monge.hpp"

#include <vector>

namespace lot {

/// Trajectory of one source atom sampled on the s grid.
struct AtomCurve {
  std::vector<Point> points;
  /// (max H - min H) / max(|H|, tiny) over every RK4 state on [0, t].
  double energy_spread = 0.0;
  /// dist(flow endpoint at t, terminal image).
  double endpoint_residual = 0.0;
};

/// T_s(x) = pi phi^L_s(x, grad^L_x phi) on the atoms of mu0, for each s in
/// the grid, with mu_s the pushforward of the mu0 weights.
struct InterpolationPath {
  CostModel cost;
  std::vector<double> s_grid;
  DiscreteMeasure mu0;
  MongeMap terminal;
  std::vector<MongeMap> maps;
  /// Images of mu0 at each s, weights of mu0. Atoms are not merged.
  std::vector<DiscreteMeasure> measures;
  std::vector<AtomCurve> curves;

  /// Index of s in the grid; InputError when absent.
  std::size_t index_of(double s) const;
};

struct PathOptions {
  /// RK4 steps per unit time.
  int steps_per_unit = 1000;
};

/// Integrates the Hamiltonian flow from (x, d_x phi) for every atom. Throws
/// InputError for grids outside [0, t] or unsorted, and a gradient-free map.
InterpolationPath build_path(const CostModel& cost, const DiscreteMeasure& mu0, const MongeMap& terminal,
                             std::vector<double> s_grid, const PathOptions& opts = {});

/// Per-atom residual of c_t(x, T_t x) = c_s(x, T_s x) + c_{t-s}(T_s x, T_t x).
CertificateReport verify_restriction_identity(const InterpolationPath& path, double s, double tol = 1e-6);

/// Discrete optimum of (mu0, mu_s) under c_s against the pairing x -> T_s(x),
/// and of the reversed problem (mu_s, mu0) under c_s(y, x).
CertificateReport verify_midpoint_optimality(const InterpolationPath& path, double s, double rel_tol = 1e-6);

struct InjectivityOptions {
  /// Images closer than this collide.
  double collision_tol = 1e-12;
  /// Full-sample Lipschitz estimates may exceed the half-sample ones by this factor.
  double stability_factor = 4.0;
  /// Pair budget above which the estimates are subsampled.
  std::size_t max_atoms = 500;
};

/// Distinct images, Lipschitz constants of T_s^{-1} and T_t o T_s^{-1}, and a
/// nearest-neighbour spacing ratio reported as an absolute-continuity proxy.
CertificateReport verify_injectivity_and_inverse(const InterpolationPath& path, double s,
                                                 const InjectivityOptions& opts = {});

/// LP(mu0, mu_s; c_s) + LP(mu_s, nu; c_{t-s}) against LP(mu0, nu; c_t).
CertificateReport verify_cost_additivity(const InterpolationPath& path, double s, const DiscreteMeasure& nu,
                                         double rel_tol = 1e-6);

}  // namespace lot
