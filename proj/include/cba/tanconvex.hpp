// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cba/expr.hpp"
#include "cba/geometry.hpp"
#include "cba/vec.hpp"

namespace cba {

inline constexpr double kTolDirDeriv = 1e-6;
inline constexpr double kTolActive = 1e-9;

// Compact convex polytope as a vertex list.
struct PolytopeV {
  std::vector<Vec> vertices;
};

// max over vertices of <v, nu>.
double support_value(const PolytopeV& P, const Vec& nu);

// Euclidean distance from p to the convex hull of the vertices.
double polytope_distance(const PolytopeV& P, const Vec& p);

// Drops duplicate vertices (within tol) and vertices inside the hull of the
// remaining ones.
PolytopeV prune_polytope(PolytopeV P, double tol);

double hausdorff_distance(const PolytopeV& a, const PolytopeV& b);

// A scalar constraint g_j with an optional exact subdifferential pinned at
// specific anchor points.
struct ConstraintFn {
  std::string name;
  ExprPtr body;
  std::vector<std::pair<Vec, PolytopeV>> exact_subdiffs;

  double eval(const Vec& p) const { return eval_expr(body, p); }
  const PolytopeV* exact_subdiff_at(const Vec& x, double tol = 1e-9) const;
};

// One-sided directional derivative estimated on the step ladder
// alpha_k = 0.1 * 2^-k, k = 0..24. The quotient tail is extrapolated with the
// convergence order estimated from consecutive difference ratios (exact for
// pure-power remainders such as the alpha^{1/2} tail of x^{3/2}); the
// declared value must be stable to 1e-6 across the last four estimates.
double dir_deriv(const ConstraintFn& f, const Vec& xbar, const Vec& nu);

struct DirDerivFailure : NumericError {
  DirDerivFailure(const std::string& what, std::vector<double> quotients)
      : NumericError(what), quotients(std::move(quotients)) {}
  std::vector<double> quotients;
};

// Recovers the tangential subdifferential from sampled directional
// derivatives: interval in R^1, halfplane-intersection polygon in R^2,
// LP vertex enumeration on Fibonacci-sphere samples in R^3.
PolytopeV reconstruct_subdiff(const ConstraintFn& f, const Vec& xbar, int n_dirs);

// Exact subdifferential when pinned at xbar, otherwise reconstruction.
// Sets `exact` accordingly when non-null.
PolytopeV subdiff_at(const ConstraintFn& f, const Vec& xbar, int n_dirs, bool* exact = nullptr);

struct ConvexityProbe {
  bool pass = true;
  std::optional<std::pair<Vec, Vec>> witness;  // failing direction pair
};

// Midpoint-convexity and positive-homogeneity spot checks of f'(xbar, .) on
// seeded random direction pairs.
ConvexityProbe tangential_convexity_probe(const ConstraintFn& f, const Vec& xbar, int n_pairs,
                                          std::uint64_t seed);

// Indices (0-based) with |g_j(xbar)| <= tol. Throws when xbar is infeasible.
std::vector<std::size_t> active_set(const std::vector<ConstraintFn>& constraints, const Vec& xbar,
                                    double tol = kTolActive);

// Deterministic uniform directions: {+1,-1} in R^1, the unit circle in R^2,
// a Fibonacci sphere in R^3.
std::vector<Vec> sample_directions(int dim, int n_dirs);

}  // namespace cba
