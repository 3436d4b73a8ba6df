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

#include <map>
#include <random>
#include <string>
#include <vector>

namespace lot {

enum class ManifoldKind { euclidean, torus, sphere2, hyperbolic2 };

std::string to_string(ManifoldKind kind);
ManifoldKind manifold_kind_from_string(const std::string& name);

/// A point in chart coordinates. Only sphere2 has more than one chart:
/// chart 0 is stereographic projection from the south pole (north pole at
/// the origin), chart 1 the projection from the north pole. Every other
/// model uses chart 0.
struct Point {
  int chart = 0;
  Vec coords;
};

/// Chart components of v in T_xM, expressed in the chart of `base`.
struct Tangent {
  Point base;
  Vec components;
};

/// Chart components of p in T*_xM, expressed in the chart of `base`.
struct Cotangent {
  Point base;
  Vec components;
};

class ManifoldModel {
 public:
  ManifoldModel(ManifoldKind kind, int dim, std::map<std::string, double> params = {});

  static ManifoldModel euclidean(int dim);
  static ManifoldModel torus(int dim);
  static ManifoldModel sphere(double radius = 1.0);
  static ManifoldModel hyperbolic();

  ManifoldKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const std::map<std::string, double>& params() const { return params_; }
  /// Sphere radius (1 for other models).
  double radius() const { return radius_; }
  bool flat() const { return kind_ == ManifoldKind::euclidean || kind_ == ManifoldKind::torus; }

 private:
  ManifoldKind kind_;
  int dim_;
  std::map<std::string, double> params_;
  double radius_ = 1.0;
};

// Points -------------------------------------------------------------------

/// Throws DomainError unless x lies in the chart domain of m.
void check_admissible(const ManifoldModel& m, const Point& x);
/// Validates and canonicalizes: torus coordinates wrapped to [0,1)^n, sphere
/// points moved to the chart in which |coords| <= 1.
Point canonicalize(const ManifoldModel& m, const Point& x);
Point make_point(const ManifoldModel& m, const Vec& coords, int chart = 0);
Point make_point(const ManifoldModel& m, std::initializer_list<double> coords);

/// Re-expresses a point / tangent / cotangent in another chart of the atlas.
Point to_chart(const ManifoldModel& m, const Point& x, int chart);
Tangent to_chart(const ManifoldModel& m, const Tangent& v, int chart);
Cotangent to_chart(const ManifoldModel& m, const Cotangent& p, int chart);

// Metric -------------------------------------------------------------------

Mat metric_tensor(const ManifoldModel& m, const Point& x);
/// Every built-in model is conformal in its charts: G(x) = conformal_factor(x) I.
double conformal_factor(const ManifoldModel& m, const Point& x);
/// Partial derivatives d G / d x_k, k = 0..n-1, in chart coordinates.
std::vector<Mat> metric_tensor_derivatives(const ManifoldModel& m, const Point& x);
double metric(const ManifoldModel& m, const Point& x, const Vec& u, const Vec& v);
double norm(const ManifoldModel& m, const Tangent& v);
/// Dual norm sqrt(p^T G^{-1} p) of a covector.
double dual_norm(const ManifoldModel& m, const Cotangent& p);
/// Index raising: the tangent g-dual to p, i.e. g_x(sharp(p), .) = p.
Tangent sharp(const ManifoldModel& m, const Cotangent& p);
Cotangent flat(const ManifoldModel& m, const Tangent& v);

// Geodesics ----------------------------------------------------------------

/// exp_x(t v). Result is canonicalized.
Point exp(const ManifoldModel& m, const Tangent& v, double t = 1.0);
/// Minimal-geodesic initial velocity from x to y, in the chart of x.
/// Throws AmbiguityError for antipodal sphere points.
Tangent log(const ManifoldModel& m, const Point& x, const Point& y);
double dist(const ManifoldModel& m, const Point& x, const Point& y);
/// True when y lies within `margin` of the cut locus of x (torus: some
/// coordinate offset near 1/2; sphere: near the antipode).
bool near_cut_locus(const ManifoldModel& m, const Point& x, const Point& y, double margin);

/// Lattice translates of y (as chart points, not canonicalized) that are
/// candidate endpoints of minimal geodesics from x on the torus: the 3^n
/// neighbours of the representative nearest to x. Other models return {y}.
std::vector<Point> torus_translates(const ManifoldModel& m, const Point& x, const Point& y);

// Sampling -----------------------------------------------------------------

/// Uniform-ish random admissible point. `spread` bounds the chart radius
/// (euclidean box half-width, disk radius for hyperbolic2 and sphere2).
Point sample_point(const ManifoldModel& m, std::mt19937_64& rng, double spread = 1.0);
Vec sample_vector(int dim, std::mt19937_64& rng, double scale = 1.0);

}  // namespace lot
