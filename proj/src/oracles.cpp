// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#include "cba/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace cba {
namespace {

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform(double lo, double hi) {
    double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }
  int pick(int n) { return static_cast<int>(eng() % static_cast<std::uint64_t>(n)); }
  Vec unit(int dim) {
    for (;;) {
      Vec v(dim);
      for (int i = 0; i < dim; ++i) v[i] = uniform(-1.0, 1.0);
      double n = norm(v);
      if (n > 0.2) return scale(v, 1.0 / n);
    }
  }
};

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Renders sum_i c_i * x_i + c0 with every coefficient parenthesized, so the
// string parses back to the same doubles and evaluates in the same order.
std::string linear_expr(const Vec& c, double c0) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!s.empty()) s += " + ";
    s += "(" + fmt_double(c[i]) + ")*x" + std::to_string(i + 1);
  }
  if (s.empty()) return "(" + fmt_double(c0) + ")";
  s += " + (" + fmt_double(c0) + ")";
  return s;
}

// Left-to-right sum matching the rendered expression's evaluation order.
double eval_lin(const Vec& c, double c0, const Vec& x) {
  double s = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i == 0)
      s = c[0] * x[0];
    else
      s = s + c[i] * x[i];
  }
  return c.empty() ? c0 : s + c0;
}

// Derivative-free polish of the grid argmin. The grid pins the distance
// value but leaves the argmin loose along the boundary when x is far away
// (the near-optimal set is a flat pancake in point space, a knife-edge
// valley when the projection sits on an edge). Candidates are
// re-parametrized as first feasible points along rays from x. For a convex
// set the entry radius r is quasiconvex over directions, and stays
// quasiconvex on a gnomonic tangent chart (the chart maps great circles to
// lines), so nested golden-section minimization -- an exact inner line
// minimum inside an outer search over the remaining chart coordinate -- is
// valid and cannot jam on the valley.
class RadialPolish {
 public:
  RadialPolish(const FeasibilityOracle& oracle, Vec x, double box_diam)
      : oracle_(oracle), x_(std::move(x)), rmax_(4 * box_diam) {}

  Vec run(const Vec& p0) {
    best_r_ = dist(x_, p0);
    if (best_r_ <= 1e-12) return p0;
    best_v_ = normalized(sub(p0, x_));
    double r0 = entry_radius(best_v_);
    if (r0 < best_r_) best_r_ = r0;

    const int dim = oracle_.dim;
    if (dim == 1) {
      consider(Vec{1.0});
      consider(Vec{-1.0});
    } else {
      for (int round = 0; round < 3; ++round) {
        double before = best_r_;
        descend_chart();
        if (before - best_r_ <= 1e-13 * (1 + best_r_)) break;
      }
    }
    return add(x_, scale(best_v_, best_r_));
  }

 private:
  static constexpr double kInf = 1e300;
  static constexpr double kGolden = 0.6180339887498949;

  // First feasible radius along x + r*dir; kInf when the ray misses. The
  // probe ladder is dense around the incumbent radius: useful candidates
  // enter near best_r_, and thin feasible sets have short chords there that
  // a coarse geometric ladder would step over.
  double entry_radius(const Vec& dir) const {
    double hi = -1;
    for (double mult :
         {1.0,      0.99999,  1.00001, 0.99996, 1.00004, 0.99984, 1.00016, 0.99936,
          1.00064,  0.99744,  1.00256, 0.98976, 1.01024, 0.959,   1.041,   0.836,
          1.164,    0.59,     1.41,    0.25,    2.0,     3.0}) {
      double r = mult * best_r_;
      if (r <= 0 || r > rmax_) continue;
      if (oracle_.contains(add(x_, scale(dir, r)))) {
        hi = r;
        break;
      }
    }
    if (hi < 0) {
      double probe = 4.0 * best_r_;
      while (probe <= rmax_) {
        if (oracle_.contains(add(x_, scale(dir, probe)))) {
          hi = probe;
          break;
        }
        probe *= 1.25;
      }
    }
    if (hi < 0) return kInf;
    double lo = 0;
    for (int it = 0; it < 42; ++it) {
      double mid = 0.5 * (lo + hi);
      (oracle_.contains(add(x_, scale(dir, mid))) ? hi : lo) = mid;
    }
    return hi;
  }

  void consider(const Vec& v) {
    double r = entry_radius(v);
    if (r < best_r_) {
      best_r_ = r;
      best_v_ = v;
    }
  }

  // Minimize f over [a, b]: a coarse scan brackets the minimum (the finite
  // region of f can be a narrow spike when the feasible set subtends a thin
  // cone from x), then golden-section refines. The anchor is a point with a
  // known finite value; when both probes sit on the infinite plateau the
  // window contracts toward the incumbent instead of guessing a side.
  static double scanned_golden(const std::function<double(double)>& f, double a, double b,
                               double anchor, double* arg) {
    double best_t = anchor, best_f = f(anchor);
    const int scan_pts = 21;
    double step = (b - a) / (scan_pts - 1);
    for (int i = 0; i < scan_pts; ++i) {
      double t = a + i * step;
      double v = f(t);
      if (v < best_f) {
        best_f = v;
        best_t = t;
      }
    }
    double lo = std::max(a, best_t - step), hi = std::min(b, best_t + step);
    double p1 = hi - kGolden * (hi - lo), p2 = lo + kGolden * (hi - lo);
    double f1 = f(p1), f2 = f(p2);
    auto track = [&](double t, double v) {
      if (v < best_f) {
        best_f = v;
        best_t = t;
      }
    };
    track(p1, f1);
    track(p2, f2);
    for (int it = 0; it < 30; ++it) {
      if (f1 >= kInf / 2 && f2 >= kInf / 2) {
        lo = 0.5 * (lo + best_t);
        hi = 0.5 * (hi + best_t);
        p1 = hi - kGolden * (hi - lo);
        p2 = lo + kGolden * (hi - lo);
        f1 = f(p1);
        f2 = f(p2);
        track(p1, f1);
        track(p2, f2);
        continue;
      }
      if (f1 <= f2) {
        hi = p2;
        p2 = p1;
        f2 = f1;
        p1 = hi - kGolden * (hi - lo);
        f1 = f(p1);
        track(p1, f1);
      } else {
        lo = p1;
        p1 = p2;
        f1 = f2;
        p2 = lo + kGolden * (hi - lo);
        f2 = f(p2);
        track(p2, f2);
      }
    }
    *arg = best_t;
    return best_f;
  }

  // One nested pass on the gnomonic tangent chart at the current best
  // direction: v(s, t) = normalize(v0 + s*t1 + t*t2). Quasiconvexity of the
  // entry radius survives the chart, so the inner exact line minimum leaves
  // a quasiconvex outer profile.
  void descend_chart() {
    const int dim = oracle_.dim;
    const Vec v0 = best_v_;
    Vec seed(dim, 0.0);
    seed[0] = 1.0;
    if (std::fabs(dot(seed, v0)) > 0.9) seed[1] = 1.0;
    Vec t1 = normalized(sub(seed, scale(v0, dot(seed, v0))));
    if (is_zero(t1, 1e-12)) return;

    if (dim == 2) {
      auto f = [&](double s) { return entry_radius(normalized(add(v0, scale(t1, s)))); };
      double s_best = 0;
      scanned_golden(f, -1.0, 1.0, 0.0, &s_best);
      consider(normalized(add(v0, scale(t1, s_best))));
      return;
    }

    Vec t2 = {v0[1] * t1[2] - v0[2] * t1[1], v0[2] * t1[0] - v0[0] * t1[2],
              v0[0] * t1[1] - v0[1] * t1[0]};
    auto chart = [&](double s, double t) {
      return normalized(add(add(v0, scale(t1, s)), scale(t2, t)));
    };
    auto inner = [&](double s, double* t_arg) {
      auto f = [&](double t) { return entry_radius(chart(s, t)); };
      return scanned_golden(f, -1.0, 1.0, 0.0, t_arg);
    };
    auto outer = [&](double s) {
      double t_arg = 0;
      return inner(s, &t_arg);
    };
    double s_best = 0;
    scanned_golden(outer, -1.0, 1.0, 0.0, &s_best);
    double t_best = 0;
    inner(s_best, &t_best);
    consider(chart(s_best, t_best));
  }

  const FeasibilityOracle& oracle_;
  Vec x_;
  double rmax_;
  Vec best_v_;
  double best_r_ = kInf;
};

Vec pattern_polish(const FeasibilityOracle& oracle, const Vec& x, Vec p, double box_diam) {
  RadialPolish polish(oracle, x, box_diam);
  Vec refined = polish.run(p);
  return dist(x, refined) <= dist(x, p) ? refined : p;
}

void scan_grid(const FeasibilityOracle& oracle, const Vec& x,
               const std::vector<std::pair<double, double>>& box, int res, Vec* best,
               double* best_d) {
  const int dim = oracle.dim;
  std::vector<int> idx(dim, 0);
  Vec p(dim);
  for (;;) {
    for (int i = 0; i < dim; ++i) {
      double t = res == 1 ? 0.5 : static_cast<double>(idx[i]) / (res - 1);
      p[i] = box[i].first + t * (box[i].second - box[i].first);
    }
    if (oracle.contains(p)) {
      double d = dist(p, x);
      if (*best_d < 0 || d < *best_d) {
        *best_d = d;
        *best = p;
      }
    }
    int k = 0;
    while (k < dim && ++idx[k] >= res) idx[k++] = 0;
    if (k == dim) break;
  }
}

}  // namespace

Vec grid_project(const FeasibilityOracle& oracle, const Vec& x, const GridSpec& spec) {
  if (spec.resolution < 11) throw InputError("grid_project: resolution must be >= 11");
  if (static_cast<int>(spec.box.size()) != oracle.dim)
    throw InputError("grid_project: box dimension mismatch");
  if (oracle.contains(x)) return x;
  Vec best;
  double best_d = -1;
  scan_grid(oracle, x, spec.box, spec.resolution, &best, &best_d);
  if (best_d < 0)
    throw NumericError(
        "grid_project: no feasible grid point at the initial resolution; enlarge the box or "
        "raise the resolution");
  std::vector<std::pair<double, double>> win = spec.box;
  for (int round = 0; round < spec.rounds; ++round) {
    std::vector<std::pair<double, double>> next(oracle.dim);
    for (int i = 0; i < oracle.dim; ++i) {
      double w = (win[i].second - win[i].first) / spec.shrink;
      double lo = std::max(spec.box[i].first, best[i] - 0.5 * w);
      double hi = std::min(spec.box[i].second, best[i] + 0.5 * w);
      next[i] = {lo, hi};
    }
    win = next;
    scan_grid(oracle, x, win, spec.resolution, &best, &best_d);
  }
  double diam = 0;
  for (const auto& [lo, hi] : spec.box) diam += (hi - lo) * (hi - lo);
  return pattern_polish(oracle, x, best, std::sqrt(diam));
}

FeasiblePool collect_feasible_pool(const FeasibilityOracle& oracle, const Vec& xbar,
                                   const std::vector<std::pair<double, double>>& box,
                                   int n_samples, std::uint64_t seed) {
  FeasiblePool pool;
  pool.xbar = xbar;
  if (oracle.contains(xbar)) pool.points.push_back(xbar);
  Rng rng(seed);
  const int dim = oracle.dim;
  for (int it = 0; it < n_samples; ++it) {
    Vec y(dim);
    for (int i = 0; i < dim; ++i) y[i] = rng.uniform(box[i].first, box[i].second);
    if (oracle.contains(y)) {
      pool.points.push_back(std::move(y));
      ++pool.random_hits;
    }
  }
  // Coarse lattice pass; catches measure-zero feasible sets (single points,
  // segments on axis-aligned lines) that rejection sampling misses.
  const int res = dim == 1 ? 81 : (dim == 2 ? 41 : 21);
  std::vector<int> idx(dim, 0);
  for (;;) {
    Vec p(dim);
    for (int i = 0; i < dim; ++i)
      p[i] = box[i].first + (box[i].second - box[i].first) * idx[i] / (res - 1);
    if (oracle.contains(p)) pool.points.push_back(p);
    int k = 0;
    while (k < dim && ++idx[k] >= res) idx[k++] = 0;
    if (k == dim) break;
  }
  return pool;
}

bool pool_polar_member(const FeasiblePool& pool, const Vec& u, double box_diameter) {
  if (pool.points.empty()) throw NumericError("sampled_polar: no feasible samples");
  const double tol = 1e-6 * box_diameter;
  for (const Vec& y : pool.points)
    if (dot(u, sub(y, pool.xbar)) > tol) return false;
  return true;
}

bool sampled_polar(const FeasibilityOracle& oracle, const Vec& xbar, const Vec& u, int n_samples,
                   const std::vector<std::pair<double, double>>& box, std::uint64_t seed) {
  if (n_samples < 500) throw InputError("sampled_polar: need n_samples >= 500");
  FeasiblePool pool = collect_feasible_pool(oracle, xbar, box, n_samples, seed);
  if (pool.points.empty()) throw NumericError("sampled_polar: no feasible samples");
  double diam = 0;
  for (const auto& [lo, hi] : box) diam += (hi - lo) * (hi - lo);
  return pool_polar_member(pool, u, std::sqrt(diam));
}

Instance random_instance(std::uint64_t seed, int n, int m) {
  if (n < 1 || n > 3 || m < 1 || m > 4) throw InputError("random_instance: need 1<=n<=3, 1<=m<=4");
  Rng rng(seed * 0x9e3779b97f4a7c15ull + 1);

  Instance inst;
  inst.id = "rand-" + std::to_string(seed);
  inst.n = n;
  for (int i = 0; i < n; ++i) inst.box.emplace_back(-3.0, 3.0);

  Vec xbar(n);
  const double lattice[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (int i = 0; i < n; ++i) xbar[i] = lattice[rng.pick(5)];

  Polyhedron hrep;
  for (int j = 0; j < m; ++j) {
    ConstraintFn fn;
    fn.name = "g" + std::to_string(j + 1);
    const int kind = rng.pick(3);  // 0 affine, 1 abs kink, 2 odd-cubic perturbation
    const bool active = j == 0 || rng.pick(2) == 0;
    const double slack = active ? 0.0 : rng.uniform(0.3, 1.0);

    if (kind == 0 || kind == 2) {
      // g = t (+ gamma t^3), t = <a, x> - b; the sublevel set is the exact
      // halfspace <a, x> <= b since t(1 + gamma t^2) <= 0 iff t <= 0.
      Vec a = rng.unit(n);
      double b = eval_lin(a, 0.0, xbar) + slack;
      std::string lin = linear_expr(a, -b);
      PolytopeV sd;
      if (kind == 0) {
        fn.body = parse_expr(lin);
        sd.vertices.push_back(a);
      } else {
        double gamma = rng.uniform(0.1, 0.6);
        fn.body = parse_expr("(" + lin + ") + (" + fmt_double(gamma) + ")*(" + lin + ")^3");
        double t0 = -slack;
        sd.vertices.push_back(scale(a, 1.0 + 3.0 * gamma * t0 * t0));
      }
      hrep.halfspaces.push_back({a, b});
      fn.exact_subdiffs.emplace_back(xbar, std::move(sd));
    } else {
      // g = |<d,x> - e| - (<c,x> - f); the sublevel set is the halfspace pair
      // (d - c, e - f), (-(d + c), -(e + f)). |c| = 1.2 keeps an interior.
      Vec d = rng.unit(n);
      Vec c = scale(rng.unit(n), 1.2);
      double e = eval_lin(d, 0.0, xbar);
      double f = eval_lin(c, 0.0, xbar) - slack;
      fn.body = parse_expr("abs(" + linear_expr(d, -e) + ") - (" + linear_expr(c, -f) + ")");
      hrep.halfspaces.push_back({sub(d, c), e - f});
      hrep.halfspaces.push_back({scale(add(d, c), -1.0), -(e + f)});
      PolytopeV sd;
      sd.vertices.push_back(sub(d, c));
      sd.vertices.push_back(sub(scale(d, -1.0), c));
      fn.exact_subdiffs.emplace_back(xbar, prune_polytope(std::move(sd), 1e-9));
    }
    inst.constraints.push_back(std::move(fn));
  }

  // C: zero to two halfspaces, strictly slack at xbar. An active C row can
  // cut T_Ktilde below D (which only sees the g's) and void NRCQ => NACQ;
  // the corpus fixtures cover the active-C geometry.
  const int n_c = rng.pick(3);
  for (int i = 0; i < n_c; ++i) {
    Vec a = rng.unit(n);
    double b = eval_lin(a, 0.0, xbar) + rng.uniform(0.3, 1.0);
    inst.C.halfspaces.push_back({a, b});
    hrep.halfspaces.push_back({a, b});
  }
  inst.feasible_hrep = hrep;

  // Query points pushed along the active-normal cone project back onto xbar,
  // plus one unconstrained probe.
  AnchorSpec anchor;
  anchor.xbar = xbar;
  ConeFG nc = normal_cone(hrep, xbar, 1e-9);
  for (int rep = 0; rep < 2; ++rep) {
    Vec push(n, 0.0);
    for (const Vec& r : nc.rays) push = add(push, scale(r, rng.uniform(0.1, 0.8)));
    if (norm(push) > 1.2) push = scale(push, 1.2 / norm(push));
    anchor.xs.push_back(add(xbar, push));
  }
  {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(-2.0, 2.0);
    anchor.xs.push_back(x);
  }
  inst.anchors.push_back(std::move(anchor));
  return inst;
}

}  // namespace cba
