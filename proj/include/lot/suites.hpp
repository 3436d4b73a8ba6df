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

#include "lot/interpolation.hpp"
#include "lot/semiconcave.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lot {

/// Named group of seeded property checks.
struct SuiteResult {
  std::string name;
  std::vector<CertificateReport> checks;

  bool pass() const;
  Json to_json() const;
};

struct SuiteOptions {
  std::uint64_t seed = 0;
  /// RK4 steps per unit time for flow checks.
  int steps_per_unit = 1000;
  int legendre_points = 1000;
  int flow_trajectories = 20;
  int minimizer_pairs = 10;
  int superdifferential_pairs = 20;
  int twist_bases = 3;
  int duality_instances = 3;
  int duality_atoms = 12;
  int certificate_samples = 60;
};

/// flows, legendre, semiconcavity, twist, duality.
const std::vector<std::string>& suite_names();

/// Runs one suite on `lag` at time t. Throws InputError for unknown names.
SuiteResult run_suite(const std::string& name, const CostModel& cost, const SuiteOptions& opts = {});

SuiteResult legendre_suite(const LagrangianModel& lag, const SuiteOptions& opts);
SuiteResult flows_suite(const CostModel& cost, const SuiteOptions& opts);
SuiteResult twist_suite(const CostModel& cost, const SuiteOptions& opts);
SuiteResult semiconcavity_suite(const CostModel& cost, const SuiteOptions& opts);
SuiteResult duality_suite(const CostModel& cost, const SuiteOptions& opts);

/// Central-difference check of the cost superdifferential on random pairs
/// away from the cut locus; relative error against max(|fd|, 1e-3).
CertificateReport superdifferential_check(const CostModel& cost, int pairs, std::uint64_t seed, double tol = 1e-4);

/// Energy spread of RK4 Hamiltonian trajectories from random states.
CertificateReport hamiltonian_energy_check(const LagrangianModel& lag, double t, int trajectories, int steps_per_unit,
                                           std::uint64_t seed);

/// Max over random pairs of |c - t^{1-r} d^r| / (1 + value), or of the
/// statement form t^{r-1} d^r when `statement_form` is set.
CertificateReport closed_form_check(const CostModel& cost, int pairs, std::uint64_t seed, double tol = 1e-5,
                                    bool statement_form = false);

/// Box in chart coordinates around a canonical point of the model with a
/// target atom outside the box and off its cut locus.
struct SliceSetup {
  Box box;
  Point target;
};
SliceSetup slice_setup(const ManifoldModel& m);

/// phi1 = c-transform of an optimal psi, phi2 = psi_j - c(., y_j) on a box
/// inside the argmax cell of atom j. Returns the touching report.
CertificateReport c_transform_touching(const CostModel& cost, std::uint64_t seed, int samples = 120);

/// Random admissible points at chart radius <= spread.
std::vector<Point> random_cloud(const ManifoldModel& m, std::mt19937_64& rng, int n, double spread);

}  // namespace lot
