// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "cba/instance.hpp"

namespace cba {

struct GridSpec {
  std::vector<std::pair<double, double>> box;
  int resolution = 41;    // points per axis
  int rounds = 6;         // local refinement rounds
  double shrink = 4.0;    // box shrink factor per round
};

// Brute-force nearest feasible point: scan the grid, then refine around the
// best cell. Within 1e-4 of the true distance for convex feasible sets
// contained in the box at the default schedule.
Vec grid_project(const FeasibilityOracle& oracle, const Vec& x, const GridSpec& spec);

// Number of feasible points backing the last sampled_polar-style query; a
// pool is exposed so audits can reuse one sample across many directions.
struct FeasiblePool {
  Vec xbar;
  std::vector<Vec> points;  // feasible points, xbar included
  int random_hits = 0;      // how many came from rejection sampling
};

FeasiblePool collect_feasible_pool(const FeasibilityOracle& oracle, const Vec& xbar,
                                   const std::vector<std::pair<double, double>>& box,
                                   int n_samples, std::uint64_t seed);

// u in (W - xbar)^polar, decided against the pool: max <u, y - xbar> <= tol
// with tol = 1e-6 * box diameter.
bool pool_polar_member(const FeasiblePool& pool, const Vec& u, double box_diameter);

// One-shot variant per the module contract. Inconclusive (NumericError) only
// when no feasible point at all is found.
bool sampled_polar(const FeasibilityOracle& oracle, const Vec& xbar, const Vec& u, int n_samples,
                   const std::vector<std::pair<double, double>>& box, std::uint64_t seed);

// Deterministic desk-scale instance: tangentially convex constraints (affine,
// affine plus abs, affine plus vanishing odd cubic) whose feasible set is a
// known polyhedron stored in feasible_hrep; the anchor sits on the boundary.
Instance random_instance(std::uint64_t seed, int n, int m);

}  // namespace cba
