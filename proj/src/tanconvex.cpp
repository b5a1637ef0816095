// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#include "cba/tanconvex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace cba {
namespace {

constexpr int kLadderSteps = 25;

double ladder_alpha(int k) { return 0.1 * std::ldexp(1.0, -k); }

// Least-squares projection onto the affine hull of a vertex subset; valid
// when the barycentric weights stay nonnegative.
bool affine_projection(const std::vector<const Vec*>& verts, const Vec& p, Vec& out) {
  const int k = static_cast<int>(verts.size());
  // Solve for weights l with sum = 1 minimizing |p - V l|: bordered normal
  // equations [V^T V, 1; 1^T, 0] [l; s] = [V^T p; 1].
  std::vector<std::vector<double>> G(k + 1, std::vector<double>(k + 1, 0.0));
  std::vector<double> rhs(k + 1, 0.0);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) G[i][j] = dot(*verts[i], *verts[j]);
    G[i][k] = 1.0;
    G[k][i] = 1.0;
    rhs[i] = dot(*verts[i], p);
  }
  rhs[k] = 1.0;

  // Gaussian elimination with partial pivoting.
  const int nsys = k + 1;
  std::vector<double> sol(nsys, 0.0);
  for (int col = 0; col < nsys; ++col) {
    int best = col;
    for (int i = col + 1; i < nsys; ++i)
      if (std::fabs(G[i][col]) > std::fabs(G[best][col])) best = i;
    if (std::fabs(G[best][col]) < 1e-12) return false;
    std::swap(G[col], G[best]);
    std::swap(rhs[col], rhs[best]);
    for (int i = col + 1; i < nsys; ++i) {
      double f = G[i][col] / G[col][col];
      if (f == 0) continue;
      for (int j = col; j < nsys; ++j) G[i][j] -= f * G[col][j];
      rhs[i] -= f * rhs[col];
    }
  }
  for (int i = nsys - 1; i >= 0; --i) {
    double s = rhs[i];
    for (int j = i + 1; j < nsys; ++j) s -= G[i][j] * sol[j];
    sol[i] = s / G[i][i];
  }
  for (int i = 0; i < k; ++i)
    if (sol[i] < -1e-12) return false;
  out.assign(p.size(), 0.0);
  for (int i = 0; i < k; ++i) out = add(out, scale(*verts[i], std::max(0.0, sol[i])));
  return true;
}

void subsets_upto(int m, int max_size, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx;
  std::function<void(int)> rec = [&](int start) {
    if (!idx.empty()) fn(idx);
    if (static_cast<int>(idx.size()) >= max_size) return;
    for (int i = start; i < m; ++i) {
      idx.push_back(i);
      rec(i + 1);
      idx.pop_back();
    }
  };
  rec(0);
}

// Clips a convex polygon against {y : <y, nu> <= c} (Sutherland-Hodgman).
std::vector<Vec> clip_polygon(const std::vector<Vec>& poly, const Vec& nu, double c) {
  std::vector<Vec> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& p = poly[i];
    const Vec& q = poly[(i + 1) % n];
    double dp = dot(p, nu) - c;
    double dq = dot(q, nu) - c;
    if (dp <= 0) out.push_back(p);
    if ((dp < 0 && dq > 0) || (dp > 0 && dq < 0)) {
      double t = dp / (dp - dq);
      out.push_back(add(p, scale(sub(q, p), t)));
    }
  }
  return out;
}

double uniform(std::mt19937_64& eng, double lo, double hi) {
  double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

Vec random_unit(std::mt19937_64& eng, int dim) {
  for (;;) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = uniform(eng, -1.0, 1.0);
    double n = norm(v);
    if (n > 1e-3) return scale(v, 1.0 / n);
  }
}

}  // namespace

double support_value(const PolytopeV& P, const Vec& nu) {
  if (P.vertices.empty()) throw InputError("support_value: empty polytope");
  double best = dot(P.vertices[0], nu);
  for (std::size_t i = 1; i < P.vertices.size(); ++i)
    best = std::max(best, dot(P.vertices[i], nu));
  return best;
}

double polytope_distance(const PolytopeV& P, const Vec& p) {
  if (P.vertices.empty()) throw InputError("polytope_distance: empty polytope");
  const int dim = static_cast<int>(p.size());
  double best = dist(P.vertices[0], p);
  std::vector<const Vec*> ptrs;
  subsets_upto(static_cast<int>(P.vertices.size()), dim + 1, [&](const std::vector<int>& S) {
    ptrs.clear();
    for (int i : S) ptrs.push_back(&P.vertices[i]);
    Vec proj;
    if (!affine_projection(ptrs, p, proj)) return;
    best = std::min(best, dist(proj, p));
  });
  return best;
}

PolytopeV prune_polytope(PolytopeV P, double tol) {
  std::vector<Vec> kept;
  for (Vec& v : P.vertices) {
    bool dup = false;
    for (const Vec& e : kept) dup = dup || dist(e, v) <= tol;
    if (!dup) kept.push_back(std::move(v));
  }
  // Iteratively drop vertices that the remaining hull already covers.
  for (std::size_t i = 0; i < kept.size();) {
    if (kept.size() == 1) break;
    PolytopeV rest;
    for (std::size_t j = 0; j < kept.size(); ++j)
      if (j != i) rest.vertices.push_back(kept[j]);
    if (polytope_distance(rest, kept[i]) <= tol) {
      kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  return {std::move(kept)};
}

double hausdorff_distance(const PolytopeV& a, const PolytopeV& b) {
  double h = 0;
  for (const Vec& v : a.vertices) h = std::max(h, polytope_distance(b, v));
  for (const Vec& v : b.vertices) h = std::max(h, polytope_distance(a, v));
  return h;
}

const PolytopeV* ConstraintFn::exact_subdiff_at(const Vec& x, double tol) const {
  for (const auto& [anchor, poly] : exact_subdiffs)
    if (approx_eq(anchor, x, tol)) return &poly;
  return nullptr;
}

double dir_deriv(const ConstraintFn& f, const Vec& xbar, const Vec& nu) {
  if (norm(nu) <= 0) throw InputError("dir_deriv: zero direction");
  const double f0 = f.eval(xbar);
  std::vector<double> q(kLadderSteps);
  for (int k = 0; k < kLadderSteps; ++k) {
    double a = ladder_alpha(k);
    q[k] = (f.eval(add(xbar, scale(nu, a))) - f0) / a;
  }

  // est[k] extrapolates using quotients k-1, k, k+1. The cancellation noise
  // floor guards against amplifying rounding error through the ratio.
  std::vector<double> est(kLadderSteps, q[0]);
  for (int k = 1; k + 1 < kLadderSteps; ++k) {
    double d0 = q[k - 1], d1 = q[k], d2 = q[k + 1];
    double da = d1 - d0, db = d2 - d1;
    double noise = 4e-16 * std::max(1.0, std::fabs(f0)) / ladder_alpha(k + 1);
    if (std::fabs(db) <= 16 * noise || std::fabs(db) <= 1e-13 * (1 + std::fabs(d2))) {
      est[k + 1] = d2;
      continue;
    }
    double r = da / db;
    if (r >= 1.05 && r <= 64.0) {
      est[k + 1] = d2 + db / (r - 1.0);
    } else {
      est[k + 1] = d2;
    }
  }

  double declared = est[kLadderSteps - 1];
  double spread = 0;
  for (int k = kLadderSteps - 4; k < kLadderSteps; ++k)
    for (int j = kLadderSteps - 4; j < kLadderSteps; ++j)
      spread = std::max(spread, std::fabs(est[k] - est[j]));
  if (spread > kTolDirDeriv * (1 + std::fabs(declared)))
    throw DirDerivFailure("dir_deriv: quotient sequence did not settle (spread " +
                              std::to_string(spread) + ")",
                          q);
  return declared;
}

std::vector<Vec> sample_directions(int dim, int n_dirs) {
  std::vector<Vec> dirs;
  if (dim == 1) {
    dirs.push_back({1.0});
    dirs.push_back({-1.0});
  } else if (dim == 2) {
    dirs.reserve(n_dirs);
    for (int i = 0; i < n_dirs; ++i) {
      double th = 2.0 * M_PI * i / n_dirs;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
  } else if (dim == 3) {
    dirs.reserve(n_dirs);
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n_dirs; ++i) {
      double z = 1.0 - 2.0 * (i + 0.5) / n_dirs;
      double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
      double phi = golden * i;
      dirs.push_back({rad * std::cos(phi), rad * std::sin(phi), z});
    }
  } else {
    throw InputError("sample_directions: dimension must be <= 3");
  }
  return dirs;
}

PolytopeV reconstruct_subdiff(const ConstraintFn& f, const Vec& xbar, int n_dirs) {
  const int dim = static_cast<int>(xbar.size());
  if (dim > 3) throw InputError("reconstruct_subdiff: dimension must be <= 3");
  if (n_dirs < 64) throw InputError("reconstruct_subdiff: need n_dirs >= 64");

  if (dim == 1) {
    double hi = dir_deriv(f, xbar, {1.0});
    double lo = -dir_deriv(f, xbar, {-1.0});
    if (hi < lo - kTolDirDeriv)
      throw NumericError("reconstruct_subdiff: interval inverted, sublinearity fails");
    if (std::fabs(hi - lo) <= kRayDedupTol) return {{{0.5 * (lo + hi)}}};
    return {{{lo}, {hi}}};
  }

  std::vector<Vec> dirs = sample_directions(dim, n_dirs);
  std::vector<double> h(dirs.size());
  double hmax = 0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    // The directional-derivative estimate carries ~1e-9 noise; a slack keeps
    // degenerate subdifferentials (points, segments) from clipping to empty.
    double d = dir_deriv(f, xbar, dirs[i]);
    h[i] = d + 1e-7 * (1 + std::fabs(d));
    hmax = std::max(hmax, std::fabs(h[i]));
  }
  const double R = 2.0 * (1.0 + hmax);

  if (dim == 2) {
    std::vector<Vec> poly = {{-R, -R}, {R, -R}, {R, R}, {-R, R}};
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      poly = clip_polygon(poly, dirs[i], h[i]);
      if (poly.empty())
        throw NumericError("reconstruct_subdiff: sampled halfplanes have empty intersection");
    }
    for (const Vec& v : poly)
      if (std::fabs(v[0]) >= R - 1e-6 || std::fabs(v[1]) >= R - 1e-6)
        throw NumericError("reconstruct_subdiff: intersection unbounded, sublinearity fails");
    return prune_polytope({poly}, kTolGeometry);
  }

  // dim == 3: LP vertex harvesting over the sampled H-representation.
  std::vector<Halfspace> sys;
  sys.reserve(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i) sys.push_back({dirs[i], h[i]});
  std::vector<Vec> verts;
  std::mt19937_64 jitter(0x5bd1e995);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    Vec obj = dirs[i];
    for (double& v : obj) v += uniform(jitter, -1e-7, 1e-7);
    LPResult r = lp_solve(3, sys, obj, LPSense::Maximize);
    if (r.status == LPStatus::Unbounded)
      throw NumericError("reconstruct_subdiff: intersection unbounded, sublinearity fails");
    if (r.status != LPStatus::Feasible)
      throw NumericError("reconstruct_subdiff: sampled halfplanes have empty intersection");
    verts.push_back(*r.witness);
  }
  return prune_polytope({std::move(verts)}, kTolGeometry);
}

PolytopeV subdiff_at(const ConstraintFn& f, const Vec& xbar, int n_dirs, bool* exact) {
  if (const PolytopeV* p = f.exact_subdiff_at(xbar)) {
    if (exact) *exact = true;
    return *p;
  }
  if (exact) *exact = false;
  return reconstruct_subdiff(f, xbar, n_dirs);
}

ConvexityProbe tangential_convexity_probe(const ConstraintFn& f, const Vec& xbar, int n_pairs,
                                          std::uint64_t seed) {
  if (n_pairs < 100) throw InputError("tangential_convexity_probe: need n_pairs >= 100");
  const int dim = static_cast<int>(xbar.size());
  std::mt19937_64 eng(seed);
  for (int it = 0; it < n_pairs; ++it) {
    Vec a = random_unit(eng, dim);
    Vec b = random_unit(eng, dim);
    double fa = dir_deriv(f, xbar, a);
    double fb = dir_deriv(f, xbar, b);
    double scalecap = 1 + std::fabs(fa) + std::fabs(fb);

    Vec mid = scale(add(a, b), 0.5);
    double fmid = norm(mid) < 1e-8 ? 0.0 : dir_deriv(f, xbar, mid);
    if (fmid > 0.5 * (fa + fb) + kTolDirDeriv * scalecap) return {false, std::make_pair(a, b)};

    double f2a = dir_deriv(f, xbar, scale(a, 2.0));
    if (std::fabs(f2a - 2.0 * fa) > kTolDirDeriv * 2 * scalecap) return {false, std::make_pair(a, b)};
  }
  return {true, std::nullopt};
}

std::vector<std::size_t> active_set(const std::vector<ConstraintFn>& constraints, const Vec& xbar,
                                    double tol) {
  std::string violated;
  for (std::size_t j = 0; j < constraints.size(); ++j) {
    double g = constraints[j].eval(xbar);
    if (g > tol) violated += (violated.empty() ? "" : ", ") + constraints[j].name;
  }
  if (!violated.empty())
    throw InputError("active_set: point is infeasible, violated: " + violated);
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < constraints.size(); ++j)
    if (std::fabs(constraints[j].eval(xbar)) <= tol) idx.push_back(j);
  return idx;
}

}  // namespace cba
