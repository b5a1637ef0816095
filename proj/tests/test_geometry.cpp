// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cba/geometry.hpp"
#include "cba/instance.hpp"
#include "cba/oracles.hpp"

using namespace cba;

namespace {

double urand(std::mt19937_64& eng, double lo, double hi) {
  double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

// Brute-force membership of u in the polar of cone(rays): random nonnegative
// combinations plus pure ray multiples (mixtures alone can average away a
// violation of a single ray near the boundary).
bool sampled_polar_of_rays(const std::vector<Vec>& rays, const Vec& u, std::mt19937_64& eng) {
  for (const Vec& r : rays)
    if (dot(u, scale(r, 3.0)) > 1e-9) return false;
  for (int it = 0; it < 2000; ++it) {
    Vec y(u.size(), 0.0);
    for (const Vec& r : rays) y = add(y, scale(r, urand(eng, 0.0, 3.0)));
    if (dot(u, y) > 1e-9) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("lp feasibility basics") {
  // {x1 <= 1} is feasible with an obvious witness.
  LPResult r = lp_solve(1, {{{1.0}, 1.0}});
  REQUIRE(r.status == LPStatus::Feasible);
  CHECK(dot({1.0}, *r.witness) <= 1.0 + kTolLP);

  // Contradictory bounds are infeasible.
  LPResult bad = lp_solve(1, {{{1.0}, -1.0}, {{-1.0}, -1.0}});
  CHECK(bad.status == LPStatus::Infeasible);

  // Unbounded objective.
  LPResult ub = lp_solve(1, {{{-1.0}, 0.0}}, Vec{1.0}, LPSense::Maximize);
  CHECK(ub.status == LPStatus::Unbounded);
}

TEST_CASE("lp reproduces the failed separation of the three-constraint example") {
  // max delta s.t. <v, nu> <= -delta over the subdifferential vertices
  // {(-1,-1),(-1,1),(0,2),(0,-2)}, |nu|_inf <= 1. The opposed vertical
  // vertices force delta = 0.
  std::vector<Halfspace> sys;
  for (Vec v : {Vec{-1, -1}, Vec{-1, 1}, Vec{0, 2}, Vec{0, -2}})
    sys.push_back({{v[0], v[1], 1.0}, 0.0});
  for (int i = 0; i < 2; ++i) {
    Vec pos(3, 0.0), neg(3, 0.0);
    pos[i] = 1;
    neg[i] = -1;
    sys.push_back({pos, 1.0});
    sys.push_back({neg, 1.0});
  }
  LPResult r = lp_solve(3, sys, Vec{0, 0, 1}, LPSense::Maximize);
  REQUIRE(r.status == LPStatus::Feasible);
  CHECK(std::fabs(*r.objective) <= 1e-9);
}

TEST_CASE("lp witnesses satisfy every constraint and infeasibility has a Farkas witness") {
  std::mt19937_64 eng(7);
  int infeasible_seen = 0;
  for (int trial = 0; trial < 60; ++trial) {
    int n = 1 + static_cast<int>(eng() % 3);
    int m = 2 + static_cast<int>(eng() % 5);
    std::vector<Halfspace> sys;
    for (int i = 0; i < m; ++i) {
      Vec a(n);
      for (int j = 0; j < n; ++j) a[j] = urand(eng, -1, 1);
      if (norm(a) < 1e-2) a[0] = 1.0;
      sys.push_back({a, urand(eng, -0.8, 0.8)});
    }
    LPResult r = lp_solve(n, sys);
    if (r.status == LPStatus::Feasible) {
      for (const Halfspace& h : sys)
        CHECK(dot(h.normal, *r.witness) <= h.offset + kTolLP * (1 + norm(h.normal)));
    } else {
      ++infeasible_seen;
      auto y = farkas_certificate(n, sys);
      REQUIRE(y.has_value());
      Vec comb(n, 0.0);
      double yb = 0;
      for (int i = 0; i < m; ++i) {
        CHECK((*y)[i] >= -1e-9);
        comb = add(comb, scale(sys[i].normal, (*y)[i]));
        yb += (*y)[i] * sys[i].offset;
      }
      CHECK(norm(comb) <= 1e-7);
      CHECK(yb <= -1 + 1e-7);
    }
  }
  CHECK(infeasible_seen > 0);
}

TEST_CASE("polar flips match the worked examples") {
  // polar of {0} is R^n.
  CHECK(polar_fg(ConeFG{}).normals.empty());
  // polar of the ray [0, inf) is (-inf, 0].
  ConeH h = polar_fg(make_cone_fg({{1.0}}));
  REQUIRE(h.normals.size() == 1);
  CHECK(h.normals[0][0] == doctest::Approx(1.0));
  // polar of R^n is {0}.
  CHECK(polar_h(ConeH{}).rays.empty());
  // polar of (-inf, 0] is [0, inf).
  ConeFG f = polar_h(make_cone_h({{1.0}}));
  REQUIRE(f.rays.size() == 1);
  CHECK(f.rays[0][0] == doctest::Approx(1.0));
}

TEST_CASE("polar of the linearized cone is the cone on its normals") {
  // D from the three-constraint example: the polar must be the cone on the
  // subdifferential vertices, cross-checked by a sampled combination oracle.
  ConeH D = make_cone_h({{-1, -1}, {-1, 1}, {0, 2}, {0, -2}});
  ConeFG polar = polar_h(D);
  ConeFG want = make_cone_fg({{-1, 1}, {-1, -1}, {0, 1}, {0, -1}});
  CHECK(cones_equal(polar, want, 2, 1e-9));
  std::mt19937_64 eng(101);
  for (int it = 0; it < 300; ++it) {
    Vec u = {urand(eng, -2, 2), urand(eng, -2, 2)};
    // u in D's polar iff <u, d> <= 0 for every generator d of D.
    bool via_rays = true;
    for (const Vec& d : rays_of(D, 2).rays) via_rays = via_rays && dot(u, d) <= 1e-9;
    CHECK(cone_contains(polar, u, 1e-7) == via_rays);
  }
}

TEST_CASE("polar of the wedge matches the displayed union form pointwise") {
  // Rays {(1,0),(1,1)}: the polar {u1 <= 0, u1 + u2 <= 0} must equal the
  // union {t1 <= -t2, t1 <= 0} U (R- x R-) on sampled points.
  ConeH polar = polar_fg(make_cone_fg({{1, 0}, {1, 1}}));
  std::mt19937_64 eng(11);
  for (int it = 0; it < 10000; ++it) {
    Vec u = {urand(eng, -2, 2), urand(eng, -2, 2)};
    bool in_polar = cone_contains(polar, u, 1e-12);
    bool in_union = (u[0] <= -u[1] + 1e-12 && u[0] <= 1e-12) || (u[0] <= 1e-12 && u[1] <= 1e-12);
    CHECK(in_polar == in_union);
  }
}

TEST_CASE("ray enumeration recovers generators of H-cones") {
  // D of the three-constraint example: normals are the subdifferential
  // vertices; the cone is the nonnegative x1-axis.
  ConeH D = make_cone_h({{-1, -1}, {-1, 1}, {0, 2}, {0, -2}});
  ConeFG rays = rays_of(D, 2);
  REQUIRE(rays.rays.size() == 1);
  CHECK(approx_eq(rays.rays[0], {1, 0}, 1e-9));

  // Whole line: no normals in R^1.
  ConeFG line = rays_of(ConeH{}, 1);
  CHECK(line.rays.size() == 2);

  // Halfplane {x : <a, x> <= 0} in R^2 has a lineality direction and -a.
  ConeFG half = rays_of(make_cone_h({{0, 1}}), 2);
  CHECK(half.rays.size() == 3);
  CHECK(cone_contains(half, Vec{0, -1}, 1e-9));
  CHECK(cone_contains(half, Vec{1, 0}, 1e-9));
  CHECK(!cone_contains(half, Vec{0, 1}, 1e-6));
}

TEST_CASE("cone membership matches the worked examples") {
  ConeH D21 = make_cone_h({{-1, -1}, {-1, 1}, {0, 2}, {0, -2}});
  CHECK(cone_contains(D21, Vec{0, 0}, 1e-12));
  CHECK(cone_contains(D21, Vec{1, 0}, 1e-9));
  CHECK(!cone_contains(D21, Vec{0, 1}, 1e-6));

  ConeFG M34;  // {0}
  CHECK(cone_contains(M34, Vec{0.0}, 1e-12));
  CHECK(!cone_contains(M34, Vec{-1.0}, 1e-6));
}

TEST_CASE("cones_equal distinguishes the examples") {
  ConeH D21 = make_cone_h({{-1, -1}, {-1, 1}, {0, 2}, {0, -2}});
  CHECK(cones_equal(D21, D21, 2, 1e-9));
  ConeFG axis = make_cone_fg({{1, 0}});
  CHECK(cones_equal(D21, axis, 2, 1e-9));
  CHECK(cones_equal(axis, D21, 2, 1e-9));

  // D = R vs T = {0}.
  ConeH D_full{};  // R^1
  ConeFG T_zero{};
  CHECK(!cones_equal(D_full, T_zero, 1, 1e-9));

  ConeFG r_line = make_cone_fg({{1.0}, {-1.0}});
  CHECK(cones_equal(D_full, r_line, 1, 1e-9));
}

TEST_CASE("normal cones of polyhedra") {
  Polyhedron box{{{{1, 0}, 1}, {{-1, 0}, 1}, {{0, 1}, 1}, {{0, -1}, 1}}};
  CHECK(normal_cone(box, {0, 0}, 1e-9).rays.empty());

  Polyhedron halfline{{{{-1.0}, -1.0}}};  // [1, inf)
  ConeFG nc = normal_cone(halfline, {1.0}, 1e-9);
  REQUIRE(nc.rays.size() == 1);
  CHECK(nc.rays[0][0] == doctest::Approx(-1.0));

  Polyhedron all;  // R^2
  CHECK(normal_cone(all, {3, -2}, 1e-9).rays.empty());

  CHECK_THROWS_AS(normal_cone(halfline, {0.0}, 1e-9), InputError);
}

TEST_CASE("projection onto polyhedra: fixed points and the interval example") {
  Polyhedron box{{{{1, 0}, 1}, {{-1, 0}, 1}, {{0, 1}, 1}, {{0, -1}, 1}}};
  Vec inside = {0.25, -0.5};
  CHECK(approx_eq(project_polyhedron(box, inside), inside, 1e-12));

  Polyhedron interval{{{{1.0}, 3.0}, {{-1.0}, -1.0}}};  // [1, 3]
  CHECK(project_polyhedron(interval, {0.0})[0] == doctest::Approx(1.0));
  CHECK(project_polyhedron(interval, {7.0})[0] == doctest::Approx(3.0));

  Polyhedron empty{{{{1.0}, -1.0}, {{-1.0}, -1.0}}};
  CHECK_THROWS_AS(project_polyhedron(empty, {0.0}), InputError);
}

TEST_CASE("projection matches the grid oracle on random 3d polyhedra") {
  std::mt19937_64 eng(3);
  for (int trial = 0; trial < 12; ++trial) {
    Polyhedron P;
    for (int i = 0; i < 3; ++i) {
      Vec a(3);
      for (int j = 0; j < 3; ++j) a[j] = urand(eng, -1, 1);
      if (norm(a) < 1e-2) a[0] = 1;
      P.halfspaces.push_back({a, urand(eng, 0.1, 1.0)});
    }
    for (int j = 0; j < 3; ++j) {
      Vec lo(3, 0.0), hi(3, 0.0);
      lo[j] = -1;
      hi[j] = 1;
      P.halfspaces.push_back({hi, 2.0});
      P.halfspaces.push_back({lo, 2.0});
    }
    Vec x = {urand(eng, -4, 4), urand(eng, -4, 4), urand(eng, -4, 4)};
    Vec exact = project_polyhedron(P, x);

    FeasibilityOracle oracle;
    oracle.dim = 3;
    oracle.contains_fn = [&P](const Vec& y) { return polyhedron_contains(P, y, 1e-9); };
    GridSpec spec;
    spec.box = {{-2, 2}, {-2, 2}, {-2, 2}};
    Vec approx = grid_project(oracle, x, spec);
    CHECK(dist(exact, approx) <= 1e-3);
  }
}

TEST_CASE("projection characterization holds on random instances") {
  std::mt19937_64 eng(19);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + static_cast<int>(eng() % 2);
    Polyhedron P;
    for (int i = 0; i < 4; ++i) {
      Vec a(n);
      for (int j = 0; j < n; ++j) a[j] = urand(eng, -1, 1);
      if (norm(a) < 1e-2) a[0] = 1;
      P.halfspaces.push_back({a, urand(eng, 0.2, 1.2)});
    }
    Vec x(n);
    for (int j = 0; j < n; ++j) x[j] = urand(eng, -3, 3);
    Vec x0 = project_polyhedron(P, x);
    CHECK(polyhedron_contains(P, x0, 1e-8));
    CHECK(cone_contains(normal_cone(P, x0, 1e-7), sub(x, x0), 1e-7));
    // No sampled feasible point does better.
    for (int it = 0; it < 200; ++it) {
      Vec y(n);
      for (int j = 0; j < n; ++j) y[j] = urand(eng, -2, 2);
      if (!polyhedron_contains(P, y, 0.0)) continue;
      CHECK(dist(x, y) >= dist(x, x0) - 1e-7);
    }
  }
}

TEST_CASE("minkowski sums of FG cones") {
  ConeFG zero{};
  ConeFG c = make_cone_fg({{1, 0}, {0, 1}});
  CHECK(cones_equal(minkowski_sum_fg(c, zero), c, 2, 1e-9));

  // (-inf, 0] + [0, inf) = R.
  ConeFG left = make_cone_fg({{-1.0}});
  ConeFG right = make_cone_fg({{1.0}});
  ConeFG sum = minkowski_sum_fg(left, right);
  CHECK(cones_equal(sum, ConeH{}, 1, 1e-9));
}

TEST_CASE("polar involution through enumeration on random FG cones") {
  std::mt19937_64 eng(23);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 2 + static_cast<int>(eng() % 3);
    int k = 1 + static_cast<int>(eng() % 8);
    std::vector<Vec> rays;
    for (int i = 0; i < k; ++i) {
      Vec r(n);
      for (int j = 0; j < n; ++j) r[j] = urand(eng, -1, 1);
      if (norm(r) > 1e-2) rays.push_back(r);
    }
    ConeFG c = make_cone_fg(rays);
    if (c.rays.empty()) continue;
    // Trivial flip pair (the stored representation round-trips).
    CHECK(cones_equal(polar_h(polar_fg(c)), c, n, 1e-9));
    // Facet enumeration and back: the real involution.
    ConeFG back = rays_of(facets_of(c, n), n);
    CHECK(cones_equal(back, c, n, 1e-7));
  }
}

TEST_CASE("membership verdicts agree between an FG cone and its polar-derived sampling") {
  std::mt19937_64 eng(31);
  ConeFG c = make_cone_fg({{1, 0.2}, {0.3, 1}, {-0.5, 1}});
  ConeH facets = facets_of(c, 2);
  for (int it = 0; it < 1000; ++it) {
    Vec v = {urand(eng, -2, 2), urand(eng, -2, 2)};
    bool via_lp = cone_contains(c, v, 1e-7);
    bool via_facets = cone_contains(facets, v, 1e-7);
    CHECK(via_lp == via_facets);
  }
  // The sampled-combination oracle agrees on polar membership away from the
  // boundary (both sides use absolute tolerances on different scales there).
  ConeH polar = polar_fg(c);
  int compared = 0;
  for (int it = 0; it < 80; ++it) {
    Vec u = {urand(eng, -1, 1), urand(eng, -1, 1)};
    double margin = -1e300;
    for (const Vec& r : c.rays) margin = std::max(margin, dot(r, normalized(u)));
    if (std::fabs(margin) <= 1e-7) continue;
    ++compared;
    CHECK(cone_contains(polar, u, 1e-9) == sampled_polar_of_rays(c.rays, u, eng));
  }
  CHECK(compared >= 40);
}

TEST_CASE("projection onto FG cones") {
  ConeFG quad = make_cone_fg({{1, 0}, {0, 1}});
  CHECK(approx_eq(project_cone_fg(quad, {2, 3}, 2), {2, 3}, 1e-9));
  CHECK(approx_eq(project_cone_fg(quad, {-1, 2}, 2), {0, 2}, 1e-9));
  CHECK(approx_eq(project_cone_fg(quad, {-1, -1}, 2), {0, 0}, 1e-9));
  ConeFG zero{};
  CHECK(approx_eq(project_cone_fg(zero, {1, 1}, 2), {0, 0}, 1e-12));
}
