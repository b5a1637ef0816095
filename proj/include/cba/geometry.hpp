// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "cba/vec.hpp"

namespace cba {

// {x : <normal, x> <= offset}. normal must be nonzero.
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

// H-representation. No halfspaces means all of R^n.
struct Polyhedron {
  std::vector<Halfspace> halfspaces;
};

// Finitely generated cone: all nonnegative combinations of rays. Rays are
// stored normalized to unit length; an empty list is the cone {0}.
struct ConeFG {
  std::vector<Vec> rays;
};

// Homogeneous halfspace intersection {x : <a, x> <= 0 for all a in normals}.
// Normals stored normalized; an empty list is R^n.
struct ConeH {
  std::vector<Vec> normals;
};

// Unit-length rays with zero vectors and duplicates (within 1e-9) dropped.
ConeFG make_cone_fg(std::vector<Vec> rays);
ConeH make_cone_h(std::vector<Vec> normals);

enum class LPStatus { Feasible, Infeasible, Unbounded };
enum class LPSense { Minimize, Maximize };

struct LPResult {
  LPStatus status = LPStatus::Infeasible;
  std::optional<Vec> witness;      // present iff Feasible
  std::optional<double> objective; // present iff Feasible and objective given
};

inline constexpr double kTolLP = 1e-10;
inline constexpr double kTolProjection = 1e-9;
inline constexpr double kTolGeometry = 1e-6;
inline constexpr double kRayDedupTol = 1e-9;

// Dense two-phase simplex over free variables in R^dim with Bland's
// (lowest-index) anti-cycling rule. Pure feasibility when objective is absent.
LPResult lp_solve(int dim, const std::vector<Halfspace>& constraints,
                  const std::optional<Vec>& objective = std::nullopt,
                  LPSense sense = LPSense::Minimize);

// Dual witness for an infeasible system: y >= 0 with sum y_i a_i = 0 and
// sum y_i b_i <= -1. Empty when the system is feasible.
std::optional<Vec> farkas_certificate(int dim, const std::vector<Halfspace>& constraints);

// Polar flips. polar_fg lists one normal per ray; polar_h (Farkas duality)
// lists one ray per normal.
ConeH polar_fg(const ConeFG& c);
ConeFG polar_h(const ConeH& c);

// Generator representation of an H-cone in R^n, n <= 4: a lineality basis
// (both signs) plus the extreme rays of the pointed part, found by
// enumerating row subsets whose null space meets the lineality complement in
// a line. Exact for the desk-scale cones handled here.
ConeFG rays_of(const ConeH& c, int dim);

// H-representation of an FG cone (facets), via rays_of on the polar.
ConeH facets_of(const ConeFG& c, int dim);

bool cone_contains(const ConeH& c, const Vec& v, double tol);
bool cone_contains(const ConeFG& c, const Vec& v, double tol);

bool cones_equal(const ConeFG& a, const ConeFG& b, int dim, double tol);
bool cones_equal(const ConeFG& a, const ConeH& b, int dim, double tol);
bool cones_equal(const ConeH& a, const ConeFG& b, int dim, double tol);
bool cones_equal(const ConeH& a, const ConeH& b, int dim, double tol);

// Cone of active-constraint normals at x (x must be feasible within tol).
ConeFG normal_cone(const Polyhedron& P, const Vec& x, double tol);

// Exact projection by active-set enumeration; at most 12 halfspaces.
Vec project_polyhedron(const Polyhedron& P, const Vec& x);

// Euclidean projection onto an FG cone (conic least squares over ray
// subsets of size <= dim).
Vec project_cone_fg(const ConeFG& c, const Vec& w, int dim);

// Ray-list union; the Minkowski sum of FG cones.
ConeFG minkowski_sum_fg(const ConeFG& a, const ConeFG& b);

// Basis of {x : rows * x = 0}. rows may be empty (yields the standard basis).
std::vector<Vec> null_space(const std::vector<Vec>& rows, int dim, double tol = 1e-9);

bool polyhedron_contains(const Polyhedron& P, const Vec& x, double tol);

}  // namespace cba
