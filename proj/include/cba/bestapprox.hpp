// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cba/cones.hpp"
#include "cba/instance.hpp"
#include "cba/oracles.hpp"

namespace cba {

inline constexpr double kTolCertExact = 1e-8;
inline constexpr double kTolCertSampled = 1e-3;

struct ProjectionResult {
  Vec point;
  bool exact = false;  // H-representation path vs grid oracle
  double tol = kTolCertSampled;
};

// Projection onto K-tilde: exact polyhedral path when feasible_hrep is
// present, grid oracle otherwise.
ProjectionResult project_feasible(const Instance& inst, const Vec& x);

// x0 = P_P(x) iff x - x0 lies in the normal cone at x0.
bool verify_projection(const Polyhedron& P, const Vec& x, const Vec& x0);

struct Certificate {
  std::vector<double> lambda;      // one multiplier per constraint, >= 0
  std::vector<Vec> eta;            // chosen subgradients, eta_j in subdiff g_j(xbar)
  std::vector<char> eta_inert;     // true when lambda_j = 0 and eta_j is a placeholder vertex
  double residual_cs = 0.0;        // max_j |lambda_j g_j(xbar)|
  double residual_membership = 0;  // distance of x - xbar - sum lambda eta from N_C(xbar)
  bool exact_subdiffs = true;
};

// Lagrange-multiplier decomposition of x - xbar over the active
// subdifferential vertex rays and the normal cone of C at xbar; none when
// the feasibility LP has no solution. Inactive constraints carry lambda = 0.
std::optional<Certificate> find_certificate(const Instance& inst, const Vec& x, const Vec& xbar,
                                            int n_dirs = 360);

// xbar = P_C(x - sum lambda_j eta_j) and complementary slackness.
bool check_certificate_perturbation(const Instance& inst, const Certificate& cert, const Vec& x,
                                    const Vec& xbar);

// 0 in d|.-x|(xbar) + N_C(xbar) + sum lambda_j eta_j, with the multipliers
// rescaled by 1/|x - xbar| when x != xbar (the norm subdifferential is the
// unit sphere facing x, so the stationarity multipliers live on that scale).
bool check_certificate_stationarity(const Instance& inst, const Certificate& cert, const Vec& x,
                                    const Vec& xbar);

struct ChipResult {
  bool holds = false;
  std::string lhs_provenance;  // "exact" | "sampled"
  std::string rhs_provenance;
  ConeFG lhs, rhs;
  std::string note;
};

// Strong CHIP at xbar: (Ktilde - xbar)^polar vs N_C(xbar) + (K - xbar)^polar.
// C = R^n short-circuits exactly (then Ktilde = K and the sum is trivial);
// otherwise the K-side uses M(xbar) when the audit validates it, and sampled
// polar hulls as the fallback.
ChipResult check_strong_chip(const Instance& inst, const Vec& xbar, std::uint64_t seed);

struct EquivalenceRow {
  Vec x;
  bool projection_here = false;   // (i): xbar = P_Ktilde(x)
  bool certificate_ok = false;    // (ii): certificate exists and perturbation check passes
  bool stationarity_ok = false;   // (iii)
  bool agree = false;
  std::optional<Certificate> cert;
  ProjectionResult projection;
};

struct EquivalenceAudit {
  ProbeResult nearly_convex;
  bool nacq = false;
  ProbeResult ktilde_convex;  // midpoint feasibility on sampled pairs
  std::vector<EquivalenceRow> rows;
  ChipResult chip;
  bool all_agree = true;
  bool chip_implied_by_hypotheses = true;  // hypotheses => strong CHIP
  bool defect = false;               // disagreement under satisfied hypotheses
  std::vector<std::string> notes;
};

EquivalenceAudit equivalence_audit(const Instance& inst, const Vec& xbar,
                                   const std::vector<Vec>& xs, std::uint64_t seed);

}  // namespace cba
