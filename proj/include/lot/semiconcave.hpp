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

#include "lot/common.hpp"
#include "lot/report.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

namespace lot {

/// Real function of chart coordinates.
using ScalarField = std::function<double(const Vec&)>;
/// Supporting covector l_x of a field at x (chart components).
using CovectorField = std::function<Vec(const Vec&)>;

struct Box {
  Vec lo;
  Vec hi;

  static Box cube(const Vec& center, double half_width);
  int dim() const { return static_cast<int>(lo.size()); }
  double diameter() const { return (hi - lo).norm(); }
  Vec center() const { return 0.5 * (lo + hi); }
  bool contains(const Vec& x) const;
  /// Concentric box scaled by `factor`.
  Box scaled(double factor) const;
};

/// Tensor grid with `per_axis` nodes per coordinate followed by `random`
/// uniform points; deterministic for a given seed.
std::vector<Vec> sample_box(const Box& box, int per_axis, int random, std::uint64_t seed);

enum class ModulusKind { linear, tabulated };

/// Outcome of a sampled check of f(y) - f(x) <= l_x(y - x) + |y - x| omega(|y - x|).
/// The linear modulus omega(t) = k t becomes the quadratic slack k |y - x|^2.
struct ModulusCertificate {
  ModulusKind kind = ModulusKind::linear;
  double k = 0.0;
  /// (radius, omega) pairs, radius increasing, omega non-decreasing, starting at (0, 0).
  std::vector<std::pair<double, double>> table;
  Box domain;
  int samples = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  /// omega at radius t: k t, or the table value at the first radius >= t.
  double omega(double t) const;
  CertificateReport to_report(const std::string& name) const;
};

struct CertifyOptions {
  /// Grid nodes per axis; random points are added on top.
  int grid_per_axis = 7;
  std::uint64_t seed = 0;
  /// Central-difference step for l_x when no supergradient is supplied.
  double fd_step = 1e-5;
  /// Exact supporting covectors, e.g. a cost superdifferential.
  CovectorField supergradient;
  /// PASS threshold relative to max(1, max |f|).
  double relative_tolerance = 1e-7;
};

Vec fd_gradient(const ScalarField& f, const Vec& x, double h);

/// Samples x and y over the box and reports the worst
/// f(y) - f(x) - l_x(y - x) - k |y - x|^2.
ModulusCertificate certify_semiconcave(const ScalarField& f, const Box& box, int samples, double k,
                                       const CertifyOptions& opts = {});
/// Smallest k for which the sampled certificate has no violation.
double estimate_linear_modulus(const ScalarField& f, const Box& box, int samples, const CertifyOptions& opts = {});
/// Certificate with the modulus of continuity of the gradient, tabulated on
/// `radii` (a C^1 field always passes with it).
ModulusCertificate certify_tabulated(const ScalarField& f, const Box& box, int samples,
                                     const std::vector<double>& radii, const CertifyOptions& opts = {});

struct InfFamilyResult {
  ScalarField inf;
  ModulusCertificate certificate;
  std::vector<ModulusCertificate> members;
};

/// Certifies every member with modulus k (PreconditionError on a failure),
/// then certifies the pointwise infimum with the same k, using the gradient of
/// the active member as the supporting covector.
InfFamilyResult inf_family_certificate(const std::vector<ScalarField>& family, const Box& box, double k,
                                       int samples, const CertifyOptions& opts = {});

struct TouchingOptions {
  int samples = 200;
  std::uint64_t seed = 0;
  double fd_step = 1e-5;
  /// Allowed excess of phi1 over phi2 before the ordering counts as violated.
  double order_tolerance = 1e-10;
  double contact_tolerance = 1e-10;
  double gradient_tolerance = 1e-5;
};

/// phi1 semi-convex below phi2 semi-concave, equal on `contact`: both are
/// differentiable there with equal differentials, Lipschitz in x for linear
/// moduli. Throws PreconditionError when phi1 > phi2 somewhere on the box or
/// the contact points do not touch.
CertificateReport touching_criterion(const ScalarField& phi1, const ScalarField& phi2,
                                     const std::vector<Vec>& contact, const Box& box,
                                     const TouchingOptions& opts = {});

/// Fraction of grid nodes where one-sided differences disagree by more than
/// `threshold`: a proxy for the non-differentiability set, expected to shrink
/// under refinement for semi-concave fields.
double nondifferentiable_fraction(const ScalarField& f, const Box& box, int per_axis, double threshold = 1e-3);

}  // namespace lot
