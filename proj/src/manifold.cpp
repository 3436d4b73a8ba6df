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

#include "lot/manifold.hpp"

#include <cmath>
#include <numbers>

namespace lot {

namespace {

constexpr double kPi = std::numbers::pi;

// Sign of the height coordinate of the stereographic chart.
double chart_sign(int chart) { return chart == 0 ? 1.0 : -1.0; }

// Sphere chart -> unit vector in R^3.
Eigen::Vector3d sphere_embed(const Point& x) {
  const double u1 = x.coords[0], u2 = x.coords[1];
  const double s = u1 * u1 + u2 * u2;
  return Eigen::Vector3d(2 * u1, 2 * u2, chart_sign(x.chart) * (1 - s)) / (1 + s);
}

// d(embed)/du, 3x2.
Eigen::Matrix<double, 3, 2> sphere_jacobian(const Point& x) {
  const double u1 = x.coords[0], u2 = x.coords[1];
  const double s = u1 * u1 + u2 * u2;
  const double d = (1 + s) * (1 + s);
  Eigen::Matrix<double, 3, 2> j;
  j(0, 0) = (2 * (1 + s) - 4 * u1 * u1) / d;
  j(0, 1) = -4 * u1 * u2 / d;
  j(1, 0) = -4 * u1 * u2 / d;
  j(1, 1) = (2 * (1 + s) - 4 * u2 * u2) / d;
  j(2, 0) = chart_sign(x.chart) * (-4 * u1) / d;
  j(2, 1) = chart_sign(x.chart) * (-4 * u2) / d;
  return j;
}

// Unit vector -> canonical chart point (|coords| <= 1).
Point sphere_project(const Eigen::Vector3d& p_in) {
  const Eigen::Vector3d p = p_in.normalized();
  Point x;
  x.chart = p.z() >= 0 ? 0 : 1;
  const double denom = 1 + chart_sign(x.chart) * p.z();
  x.coords = Vec(2);
  x.coords << p.x() / denom, p.y() / denom;
  return x;
}

double minkowski(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Eigen::Vector3d hyperboloid_embed(const Point& x) {
  const double s = x.coords.squaredNorm();
  return Eigen::Vector3d(1 + s, 2 * x.coords[0], 2 * x.coords[1]) / (1 - s);
}

Eigen::Matrix<double, 3, 2> hyperboloid_jacobian(const Point& x) {
  const double x1 = x.coords[0], x2 = x.coords[1];
  const double s = x1 * x1 + x2 * x2;
  const double d = (1 - s) * (1 - s);
  Eigen::Matrix<double, 3, 2> j;
  j(0, 0) = 4 * x1 / d;
  j(0, 1) = 4 * x2 / d;
  j(1, 0) = (2 * (1 - s) + 4 * x1 * x1) / d;
  j(1, 1) = 4 * x1 * x2 / d;
  j(2, 0) = 4 * x1 * x2 / d;
  j(2, 1) = (2 * (1 - s) + 4 * x2 * x2) / d;
  return j;
}

Point hyperboloid_project(const Eigen::Vector3d& p) {
  Point x;
  x.coords = Vec(2);
  x.coords << p[1] / (1 + p[0]), p[2] / (1 + p[0]);
  return x;
}

// Conformal factor lambda^2 with G = lambda^2 I, for sphere2/hyperbolic2.
double curved_factor(const ManifoldModel& m, const Point& x) {
  const double s = x.coords.squaredNorm();
  if (m.kind() == ManifoldKind::sphere2) {
    const double r = m.radius();
    return 4 * r * r / ((1 + s) * (1 + s));
  }
  return 4 / ((1 - s) * (1 - s));
}

// Jacobian of the sphere chart inversion w = u / |u|^2 (an involution).
Mat inversion_jacobian(const Vec& u) {
  const double s = u.squaredNorm();
  return (Mat::Identity(2, 2) * s - 2 * u * u.transpose()) / (s * s);
}

bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::euclidean: return "euclidean";
    case ManifoldKind::torus: return "torus";
    case ManifoldKind::sphere2: return "sphere2";
    case ManifoldKind::hyperbolic2: return "hyperbolic2";
  }
  return "unknown";
}

ManifoldKind manifold_kind_from_string(const std::string& name) {
  if (name == "euclidean") return ManifoldKind::euclidean;
  if (name == "torus") return ManifoldKind::torus;
  if (name == "sphere2") return ManifoldKind::sphere2;
  if (name == "hyperbolic2") return ManifoldKind::hyperbolic2;
  throw InputError("unknown manifold kind '" + name + "'", "manifold.kind");
}

ManifoldModel::ManifoldModel(ManifoldKind kind, int dim, std::map<std::string, double> params)
    : kind_(kind), dim_(dim), params_(std::move(params)) {
  if (dim_ <= 0) throw InputError("manifold dimension must be positive", "manifold.dim");
  if ((kind_ == ManifoldKind::sphere2 || kind_ == ManifoldKind::hyperbolic2) && dim_ != 2)
    throw InputError(to_string(kind_) + " requires dim = 2", "manifold.dim");
  if (kind_ == ManifoldKind::sphere2) {
    if (auto it = params_.find("radius"); it != params_.end()) radius_ = it->second;
    if (!(radius_ > 0) || !std::isfinite(radius_))
      throw InputError("sphere radius must be positive", "manifold.params.radius");
    params_["radius"] = radius_;
  }
}

ManifoldModel ManifoldModel::euclidean(int dim) { return {ManifoldKind::euclidean, dim}; }
ManifoldModel ManifoldModel::torus(int dim) { return {ManifoldKind::torus, dim}; }
ManifoldModel ManifoldModel::sphere(double radius) {
  return {ManifoldKind::sphere2, 2, {{"radius", radius}}};
}
ManifoldModel ManifoldModel::hyperbolic() { return {ManifoldKind::hyperbolic2, 2}; }

void check_admissible(const ManifoldModel& m, const Point& x) {
  if (x.coords.size() != m.dim())
    throw DomainError("point has " + std::to_string(x.coords.size()) + " coordinates, model has dim " +
                      std::to_string(m.dim()));
  if (!all_finite(x.coords)) throw DomainError("point has non-finite coordinates");
  const int max_chart = m.kind() == ManifoldKind::sphere2 ? 1 : 0;
  if (x.chart < 0 || x.chart > max_chart)
    throw DomainError("chart id " + std::to_string(x.chart) + " not in the atlas of " + to_string(m.kind()));
  if (m.kind() == ManifoldKind::hyperbolic2 && !(x.coords.squaredNorm() < 1.0))
    throw DomainError("point outside the Poincare disk");
}

Point canonicalize(const ManifoldModel& m, const Point& x) {
  check_admissible(m, x);
  Point out = x;
  if (m.kind() == ManifoldKind::torus) {
    for (Eigen::Index k = 0; k < out.coords.size(); ++k) {
      double c = out.coords[k] - std::floor(out.coords[k]);
      if (c >= 1.0) c = 0.0;
      out.coords[k] = c;
    }
  } else if (m.kind() == ManifoldKind::sphere2 && out.coords.squaredNorm() > 1.0) {
    out = to_chart(m, out, 1 - out.chart);
  }
  return out;
}

Point make_point(const ManifoldModel& m, const Vec& coords, int chart) {
  return canonicalize(m, Point{chart, coords});
}

Point make_point(const ManifoldModel& m, std::initializer_list<double> coords) {
  Vec v(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) v[i++] = c;
  return make_point(m, v, 0);
}

Point to_chart(const ManifoldModel& m, const Point& x, int chart) {
  if (x.chart == chart) return x;
  if (m.kind() != ManifoldKind::sphere2) throw DomainError("model has a single chart");
  const double s = x.coords.squaredNorm();
  if (s == 0.0) throw DomainError("pole is not covered by the requested chart");
  return Point{chart, x.coords / s};
}

Tangent to_chart(const ManifoldModel& m, const Tangent& v, int chart) {
  if (v.base.chart == chart) return v;
  Point base = to_chart(m, v.base, chart);
  return Tangent{base, inversion_jacobian(v.base.coords) * v.components};
}

Cotangent to_chart(const ManifoldModel& m, const Cotangent& p, int chart) {
  if (p.base.chart == chart) return p;
  Point base = to_chart(m, p.base, chart);
  // p_new = (du/dw)^T p_old, and du/dw is the inversion Jacobian at w.
  return Cotangent{base, inversion_jacobian(base.coords).transpose() * p.components};
}

Mat metric_tensor(const ManifoldModel& m, const Point& x) {
  check_admissible(m, x);
  const int n = m.dim();
  if (m.flat()) return Mat::Identity(n, n);
  return curved_factor(m, x) * Mat::Identity(n, n);
}

double conformal_factor(const ManifoldModel& m, const Point& x) {
  check_admissible(m, x);
  return m.flat() ? 1.0 : curved_factor(m, x);
}

std::vector<Mat> metric_tensor_derivatives(const ManifoldModel& m, const Point& x) {
  check_admissible(m, x);
  const int n = m.dim();
  std::vector<Mat> out(static_cast<std::size_t>(n), Mat::Zero(n, n));
  if (m.flat()) return out;
  const double s = x.coords.squaredNorm();
  for (int k = 0; k < n; ++k) {
    double d;
    if (m.kind() == ManifoldKind::sphere2) {
      const double r = m.radius();
      d = -16 * r * r * x.coords[k] / std::pow(1 + s, 3);
    } else {
      d = 16 * x.coords[k] / std::pow(1 - s, 3);
    }
    out[static_cast<std::size_t>(k)] = d * Mat::Identity(n, n);
  }
  return out;
}

double metric(const ManifoldModel& m, const Point& x, const Vec& u, const Vec& v) {
  if (u.size() != m.dim() || v.size() != m.dim()) throw DomainError("vector dimension mismatch");
  return u.dot(metric_tensor(m, x) * v);
}

double norm(const ManifoldModel& m, const Tangent& v) {
  return std::sqrt(std::max(0.0, metric(m, v.base, v.components, v.components)));
}

double dual_norm(const ManifoldModel& m, const Cotangent& p) {
  const Mat g = metric_tensor(m, p.base);
  return std::sqrt(std::max(0.0, p.components.dot(g.ldlt().solve(p.components))));
}

Tangent sharp(const ManifoldModel& m, const Cotangent& p) {
  return Tangent{p.base, metric_tensor(m, p.base).ldlt().solve(p.components)};
}

Cotangent flat(const ManifoldModel& m, const Tangent& v) {
  return Cotangent{v.base, metric_tensor(m, v.base) * v.components};
}

Point exp(const ManifoldModel& m, const Tangent& v, double t) {
  check_admissible(m, v.base);
  if (!(t >= 0) || !std::isfinite(t)) throw DomainError("exp requires finite t >= 0");
  if (!v.components.allFinite()) throw DomainError("tangent has non-finite components");
  if (t == 0.0 || v.components.isZero(0.0)) return canonicalize(m, v.base);
  switch (m.kind()) {
    case ManifoldKind::euclidean:
    case ManifoldKind::torus:
      return canonicalize(m, Point{0, v.base.coords + t * v.components});
    case ManifoldKind::sphere2: {
      const Eigen::Vector3d p = sphere_embed(v.base);
      const Eigen::Vector3d w = sphere_jacobian(v.base) * v.components;
      const double speed = w.norm();
      const double theta = speed * t;
      return sphere_project(p * std::cos(theta) + (w / speed) * std::sin(theta));
    }
    case ManifoldKind::hyperbolic2: {
      const Eigen::Vector3d p = hyperboloid_embed(v.base);
      const Eigen::Vector3d w = hyperboloid_jacobian(v.base) * v.components;
      const double speed = std::sqrt(std::max(0.0, minkowski(w, w)));
      const double a = speed * t;
      Point out = hyperboloid_project(p * std::cosh(a) + (w / speed) * std::sinh(a));
      check_admissible(m, out);
      return out;
    }
  }
  return v.base;
}

Tangent log(const ManifoldModel& m, const Point& x, const Point& y) {
  check_admissible(m, x);
  check_admissible(m, y);
  const int n = m.dim();
  switch (m.kind()) {
    case ManifoldKind::euclidean:
      return Tangent{x, y.coords - x.coords};
    case ManifoldKind::torus: {
      Vec d = y.coords - x.coords;
      for (int k = 0; k < n; ++k) d[k] -= std::round(d[k]);
      return Tangent{x, d};
    }
    case ManifoldKind::sphere2: {
      const Eigen::Vector3d p = sphere_embed(x);
      const Eigen::Vector3d q = sphere_embed(y);
      const double c = p.dot(q);
      const Eigen::Vector3d perp = q - c * p;
      const double s = perp.norm();
      const double theta = std::atan2(p.cross(q).norm(), c);
      if (theta == 0.0 || s == 0.0) {
        if (c > 0) return Tangent{x, Vec::Zero(n)};
        throw AmbiguityError("log of antipodal points on the sphere is not unique");
      }
      if (kPi - theta < 1e-9) throw AmbiguityError("log of antipodal points on the sphere is not unique");
      const Eigen::Vector3d w = theta * perp / s;
      const auto j = sphere_jacobian(x);
      const double u2 = x.coords.squaredNorm();
      const double scale = (1 + u2) * (1 + u2) / 4;
      return Tangent{x, scale * (j.transpose() * w)};
    }
    case ManifoldKind::hyperbolic2: {
      const Eigen::Vector3d p = hyperboloid_embed(x);
      const Eigen::Vector3d q = hyperboloid_embed(y);
      const double d = dist(m, x, y);
      if (d == 0.0) return Tangent{x, Vec::Zero(n)};
      const Eigen::Vector3d perp = q + minkowski(p, q) * p;
      const double s = std::sqrt(std::max(0.0, minkowski(perp, perp)));
      const Eigen::Vector3d w = d * perp / s;
      const Eigen::Vector3d eta_w(-w[0], w[1], w[2]);
      const double lambda2 = curved_factor(m, x);
      return Tangent{x, (hyperboloid_jacobian(x).transpose() * eta_w) / lambda2};
    }
  }
  return Tangent{x, Vec::Zero(n)};
}

double dist(const ManifoldModel& m, const Point& x, const Point& y) {
  check_admissible(m, x);
  check_admissible(m, y);
  switch (m.kind()) {
    case ManifoldKind::euclidean:
      return (y.coords - x.coords).norm();
    case ManifoldKind::torus: {
      double best = std::numeric_limits<double>::infinity();
      for (const Point& z : torus_translates(m, x, y)) best = std::min(best, (z.coords - x.coords).norm());
      return best;
    }
    case ManifoldKind::sphere2: {
      const Eigen::Vector3d p = sphere_embed(x);
      const Eigen::Vector3d q = sphere_embed(y);
      return m.radius() * std::atan2(p.cross(q).norm(), p.dot(q));
    }
    case ManifoldKind::hyperbolic2: {
      const double num = (x.coords - y.coords).norm();
      const double den = std::sqrt((1 - x.coords.squaredNorm()) * (1 - y.coords.squaredNorm()));
      return 2 * std::asinh(num / den);
    }
  }
  return 0.0;
}

bool near_cut_locus(const ManifoldModel& m, const Point& x, const Point& y, double margin) {
  if (m.kind() == ManifoldKind::torus) {
    const Vec d = log(m, x, y).components;
    return d.cwiseAbs().maxCoeff() > 0.5 - margin;
  }
  if (m.kind() == ManifoldKind::sphere2) return dist(m, x, y) > kPi * m.radius() - margin;
  return false;
}

std::vector<Point> torus_translates(const ManifoldModel& m, const Point& x, const Point& y) {
  if (m.kind() != ManifoldKind::torus) return {y};
  const int n = m.dim();
  Vec base = y.coords;
  for (int k = 0; k < n; ++k) base[k] = x.coords[k] + (y.coords[k] - x.coords[k] - std::round(y.coords[k] - x.coords[k]));
  std::vector<Point> out;
  int total = 1;
  for (int k = 0; k < n; ++k) total *= 3;
  out.reserve(static_cast<std::size_t>(total));
  for (int idx = 0; idx < total; ++idx) {
    Vec shift(n);
    int rest = idx;
    for (int k = 0; k < n; ++k) {
      shift[k] = static_cast<double>(rest % 3) - 1.0;
      rest /= 3;
    }
    out.push_back(Point{0, base + shift});
  }
  return out;
}

Point sample_point(const ManifoldModel& m, std::mt19937_64& rng, double spread) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int n = m.dim();
  Vec c(n);
  switch (m.kind()) {
    case ManifoldKind::euclidean:
      for (int k = 0; k < n; ++k) c[k] = spread * unit(rng);
      return make_point(m, c);
    case ManifoldKind::torus: {
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      for (int k = 0; k < n; ++k) c[k] = u01(rng);
      return make_point(m, c);
    }
    case ManifoldKind::sphere2:
    case ManifoldKind::hyperbolic2: {
      const double limit = m.kind() == ManifoldKind::hyperbolic2 ? std::min(spread, 0.95) : spread;
      do {
        c[0] = unit(rng);
        c[1] = unit(rng);
      } while (c.squaredNorm() > 1.0);
      return make_point(m, limit * c);
    }
  }
  return make_point(m, c);
}

Vec sample_vector(int dim, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vec v(dim);
  for (int k = 0; k < dim; ++k) v[k] = scale * unit(rng);
  return v;
}

}  // namespace lot
