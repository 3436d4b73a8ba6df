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

#include "lot/semiconcave.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Samples {
  std::vector<Vec> points;
  std::vector<double> values;
  std::vector<Vec> covectors;
  double scale = 1.0;
};

Samples evaluate(const ScalarField& f, const Box& box, int samples, const CertifyOptions& opts) {
  if (box.lo.size() != box.hi.size() || box.lo.size() == 0 || !((box.hi - box.lo).array() >= 0).all())
    throw InputError("malformed box", "box");
  const int dim = box.dim();
  int grid = std::max(1, opts.grid_per_axis);
  long nodes = 1;
  for (int k = 0; k < dim; ++k) nodes *= grid;
  if (nodes > samples) {
    grid = 1;
    nodes = 1;
  }
  Samples s;
  s.points = sample_box(box, grid, std::max(0, samples - static_cast<int>(nodes)), opts.seed);
  const std::size_t n = s.points.size();
  s.values.resize(n);
  s.covectors.resize(n);
  bool finite = true;
#pragma omp parallel for schedule(dynamic, 4) reduction(&& : finite)
  for (std::size_t i = 0; i < n; ++i) {
    s.values[i] = f(s.points[i]);
    s.covectors[i] = opts.supergradient ? opts.supergradient(s.points[i]) : fd_gradient(f, s.points[i], opts.fd_step);
    finite = finite && std::isfinite(s.values[i]) && s.covectors[i].allFinite();
  }
  if (!finite) throw NumericalError("field evaluation produced a non-finite value on the box");
  for (double v : s.values) s.scale = std::max(s.scale, std::abs(v));
  return s;
}

// Worst slack-adjusted violation per x, reduced in index order.
template <class Slack>
double worst_violation(const Samples& s, Slack&& slack) {
  const std::size_t n = s.points.size();
  std::vector<double> per(n, -kInf);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const Vec h = s.points[j] - s.points[i];
      const double gap = s.values[j] - s.values[i] - s.covectors[i].dot(h);
      per[i] = std::max(per[i], gap - slack(h.norm()));
    }
  }
  double worst = n > 1 ? -kInf : 0.0;
  for (double v : per) worst = std::max(worst, v);
  return worst;
}

}  // namespace

Box Box::cube(const Vec& center, double half_width) {
  return Box{center.array() - half_width, center.array() + half_width};
}

bool Box::contains(const Vec& x) const {
  return x.size() == lo.size() && (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

Box Box::scaled(double factor) const {
  const Vec c = center(), half = 0.5 * factor * (hi - lo);
  return Box{c - half, c + half};
}

std::vector<Vec> sample_box(const Box& box, int per_axis, int random, std::uint64_t seed) {
  const int dim = box.dim();
  std::vector<Vec> out;
  long nodes = 1;
  for (int k = 0; k < dim; ++k) nodes *= per_axis;
  for (long idx = 0; idx < nodes; ++idx) {
    Vec x(dim);
    long rest = idx;
    for (int k = 0; k < dim; ++k) {
      const long c = rest % per_axis;
      rest /= per_axis;
      x[k] = per_axis == 1 ? 0.5 * (box.lo[k] + box.hi[k])
                           : box.lo[k] + (box.hi[k] - box.lo[k]) * static_cast<double>(c) / (per_axis - 1);
    }
    out.push_back(std::move(x));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < random; ++i) {
    Vec x(dim);
    for (int k = 0; k < dim; ++k) x[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * u(rng);
    out.push_back(std::move(x));
  }
  return out;
}

double ModulusCertificate::omega(double t) const {
  if (kind == ModulusKind::linear) return k * t;
  for (const auto& [radius, value] : table)
    if (radius >= t) return value;
  return table.empty() ? 0.0 : table.back().second;
}

CertificateReport ModulusCertificate::to_report(const std::string& name) const {
  CertificateReport rep(name);
  rep.metric(kind == ModulusKind::linear ? "k" : "omega_at_diameter", kind == ModulusKind::linear ? k : omega(domain.diameter()))
      .metric("samples", samples)
      .metric("max_violation", max_violation)
      .metric("tolerance", tolerance);
  rep.require(pass, "sampled semi-concavity inequality violated");
  return rep;
}

Vec fd_gradient(const ScalarField& f, const Vec& x, double h) {
  Vec g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (f(xp) - f(xm)) / (2 * h);
  }
  return g;
}

ModulusCertificate certify_semiconcave(const ScalarField& f, const Box& box, int samples, double k,
                                       const CertifyOptions& opts) {
  if (!(k >= 0) || !std::isfinite(k)) throw InputError("modulus k must be finite and >= 0", "k");
  const Samples s = evaluate(f, box, samples, opts);
  ModulusCertificate cert;
  cert.kind = ModulusKind::linear;
  cert.k = k;
  cert.domain = box;
  cert.samples = static_cast<int>(s.points.size());
  cert.max_violation = worst_violation(s, [k](double r) { return k * r * r; });
  cert.tolerance = opts.relative_tolerance * s.scale;
  cert.pass = cert.max_violation <= cert.tolerance;
  return cert;
}

double estimate_linear_modulus(const ScalarField& f, const Box& box, int samples, const CertifyOptions& opts) {
  const Samples s = evaluate(f, box, samples, opts);
  const std::size_t n = s.points.size();
  std::vector<double> per(n, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const Vec h = s.points[j] - s.points[i];
      const double r2 = h.squaredNorm();
      if (r2 == 0.0) continue;
      per[i] = std::max(per[i], (s.values[j] - s.values[i] - s.covectors[i].dot(h)) / r2);
    }
  double k = 0.0;
  for (double v : per) k = std::max(k, v);
  return k;
}

ModulusCertificate certify_tabulated(const ScalarField& f, const Box& box, int samples,
                                     const std::vector<double>& radii, const CertifyOptions& opts) {
  const Samples s = evaluate(f, box, samples, opts);
  std::vector<double> grid = radii;
  grid.push_back(box.diameter());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<double> omega(grid.size(), 0.0);
  const std::size_t n = s.points.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = (s.points[j] - s.points[i]).norm();
      const double jump = (s.covectors[j] - s.covectors[i]).norm();
      const auto it = std::lower_bound(grid.begin(), grid.end(), r);
      if (it == grid.end()) continue;
      const auto at = static_cast<std::size_t>(it - grid.begin());
      omega[at] = std::max(omega[at], jump);
    }
  for (std::size_t a = 1; a < omega.size(); ++a) omega[a] = std::max(omega[a], omega[a - 1]);

  ModulusCertificate cert;
  cert.kind = ModulusKind::tabulated;
  cert.table.emplace_back(0.0, 0.0);
  for (std::size_t a = 0; a < grid.size(); ++a)
    if (grid[a] > 0.0) cert.table.emplace_back(grid[a], omega[a]);
  cert.domain = box;
  cert.samples = static_cast<int>(n);
  cert.max_violation = worst_violation(s, [&cert](double r) { return r * cert.omega(r); });
  cert.tolerance = opts.relative_tolerance * s.scale;
  cert.pass = cert.max_violation <= cert.tolerance;
  return cert;
}

InfFamilyResult inf_family_certificate(const std::vector<ScalarField>& family, const Box& box, double k,
                                       int samples, const CertifyOptions& opts) {
  if (family.empty()) throw InputError("empty family", "family");
  InfFamilyResult out;
  CertifyOptions member_opts = opts;
  member_opts.supergradient = nullptr;
  for (std::size_t i = 0; i < family.size(); ++i) {
    out.members.push_back(certify_semiconcave(family[i], box, samples, k, member_opts));
    if (!out.members.back().pass)
      throw PreconditionError("family member " + std::to_string(i) + " is not k-semi-concave on the box", "family");
  }
  const auto active = [&family](const Vec& x) {
    std::size_t best = 0;
    double v = family[0](x);
    for (std::size_t i = 1; i < family.size(); ++i) {
      const double w = family[i](x);
      if (w < v) {
        v = w;
        best = i;
      }
    }
    return std::make_pair(best, v);
  };
  out.inf = [active](const Vec& x) { return active(x).second; };
  CertifyOptions inf_opts = member_opts;
  const double h = opts.fd_step;
  inf_opts.supergradient = [active, &family, h](const Vec& x) {
    return fd_gradient(family[active(x).first], x, h);
  };
  out.certificate = certify_semiconcave(out.inf, box, samples, k, inf_opts);
  return out;
}

CertificateReport touching_criterion(const ScalarField& phi1, const ScalarField& phi2,
                                     const std::vector<Vec>& contact, const Box& box, const TouchingOptions& opts) {
  if (contact.empty()) throw InputError("touching criterion needs at least one contact point", "contact");
  const std::vector<Vec> pts = sample_box(box, 1, opts.samples, opts.seed);
  double excess = -kInf;
  for (const Vec& x : pts) {
    const double b = phi2(x);
    excess = std::max(excess, (phi1(x) - b) / (1.0 + std::abs(b)));
  }
  if (excess > opts.order_tolerance)
    throw PreconditionError("phi1 exceeds phi2 on the box (relative excess " + std::to_string(excess) + ")", "phi1");
  for (std::size_t i = 0; i < contact.size(); ++i) {
    const double a = phi1(contact[i]), b = phi2(contact[i]);
    if (!box.contains(contact[i]) || std::abs(a - b) > opts.contact_tolerance * (1.0 + std::abs(b)))
      throw PreconditionError("contact point " + std::to_string(i) + " does not touch", "contact");
  }

  CertifyOptions est;
  est.grid_per_axis = 1;
  est.seed = opts.seed;
  est.fd_step = opts.fd_step;
  const double k1 = estimate_linear_modulus([&](const Vec& x) { return -phi1(x); }, box, std::min(opts.samples, 120), est);
  const double k2 = estimate_linear_modulus(phi2, box, std::min(opts.samples, 120), est);

  std::vector<Vec> grads;
  double worst = 0.0;
  for (const Vec& x : contact) {
    const Vec g1 = fd_gradient(phi1, x, opts.fd_step), g2 = fd_gradient(phi2, x, opts.fd_step);
    worst = std::max(worst, (g1 - g2).norm());
    grads.push_back(g1);
  }
  const auto lipschitz = [&](std::size_t count) {
    double l = 0.0;
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = i + 1; j < count; ++j) {
        const double d = (contact[i] - contact[j]).norm();
        if (d > 0.0) l = std::max(l, (grads[i] - grads[j]).norm() / d);
      }
    return l;
  };
  const double lip = lipschitz(contact.size());
  const double lip_half = lipschitz(contact.size() / 2);

  CertificateReport rep("touching_criterion");
  rep.metric("contact_points", static_cast<double>(contact.size()))
      .metric("semiconvexity_k_phi1", k1)
      .metric("semiconcavity_k_phi2", k2)
      .metric("max_gradient_gap", worst)
      .metric("gradient_lipschitz", lip)
      .metric("gradient_lipschitz_half", lip_half);
  rep.require(worst <= opts.gradient_tolerance, "differentials of phi1 and phi2 differ at a contact point");
  rep.require(std::isfinite(lip), "gradient Lipschitz estimate is not finite");
  if (contact.size() >= 8)
    rep.require(lip <= 1.5 * lip_half + 1e-8, "gradient Lipschitz estimate is unstable under refinement");
  else
    rep.note("fewer than 8 contact points: stability of the Lipschitz estimate not assessed");
  return rep;
}

double nondifferentiable_fraction(const ScalarField& f, const Box& box, int per_axis, double threshold) {
  if (per_axis < 3) throw InputError("need at least 3 grid nodes per axis", "per_axis");
  const std::vector<Vec> nodes = sample_box(box, per_axis, 0, 0);
  const Vec h = (box.hi - box.lo) / (per_axis - 1);
  long interior = 0, flagged = 0;
  for (const Vec& x : nodes) {
    bool inside = true;
    for (Eigen::Index k = 0; k < x.size(); ++k)
      inside = inside && x[k] > box.lo[k] + 0.5 * h[k] && x[k] < box.hi[k] - 0.5 * h[k];
    if (!inside) continue;
    ++interior;
    const double f0 = f(x);
    bool kink = false;
    for (Eigen::Index k = 0; k < x.size() && !kink; ++k) {
      Vec xp = x, xm = x;
      xp[k] += h[k];
      xm[k] -= h[k];
      kink = std::abs((f(xp) - f0) / h[k] - (f0 - f(xm)) / h[k]) > threshold;
    }
    if (kink) ++flagged;
  }
  return interior ? static_cast<double>(flagged) / static_cast<double>(interior) : 0.0;
}

}  // namespace lot
