// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cba/instance.hpp"
#include "cba/oracles.hpp"

namespace cba {

// Linearized tangential cone D(xbar): one normal per vertex of every active
// subdifferential. A polytope constraint <x, eta> <= 0 over eta holds iff it
// holds at the vertices, so the vertex set suffices. No active constraints
// means all of R^n.
ConeH build_D(const std::vector<PolytopeV>& active_subdiffs, int dim);

// Multiplier cone M(xbar): the cone on the union of active subdifferential
// vertices ({0} when nothing is active).
ConeFG build_M(const std::vector<PolytopeV>& active_subdiffs, int dim);

struct ConeSampleReport {
  Vec xbar;
  std::vector<Vec> dirs;
  std::vector<char> accepted;
  ConeFG hull;  // extreme subset of the accepted directions
  int n_accepted = 0;
};

// Samples the contingent cone: a unit direction d is accepted iff for every
// alpha in {1e-1..1e-6} some mesh perturbation d' with |d'-d| <= 10*alpha
// keeps xbar + alpha*d' feasible. Callers should hand in a tight-tolerance
// oracle (kTolSampling); looser feasibility fuzz divides through by alpha.
ConeSampleReport contingent_cone_sample(const FeasibilityOracle& oracle, const Vec& xbar,
                                        int n_dirs);

// The per-direction acceptance test behind the sampler.
bool direction_in_contingent_sample(const FeasibilityOracle& oracle, const Vec& xbar,
                                    const Vec& d);

struct ProbeResult {
  bool pass = true;
  std::optional<Vec> witness;
};

// Near-convexity probe at xbar: for each sample y, the segment points
// xbar + t(y - xbar) must stay feasible for t = 2^-10 .. 2^-20 (the full
// ladder 2^-1..2^-20 is evaluated). Can only falsify; pass means no
// violation found on the ladder.
ProbeResult nearly_convex_probe(const FeasibilityOracle& oracle, const Vec& xbar,
                                const std::vector<Vec>& samples);

// Default sample set: declared anchors/query points that are feasible, plus
// up to 32 rejection-sampled feasible points.
std::vector<Vec> default_near_convexity_samples(const Instance& inst,
                                                const FeasibilityOracle& oracle,
                                                std::uint64_t seed);

struct NrcqResult {
  bool holds = false;
  std::optional<Vec> witness;
  double margin = 0.0;  // optimal delta of the separation LP
};

// max delta s.t. <v, nu> <= -delta over all active subdifferential vertices,
// |nu|_inf <= 1; holds iff delta > 1e-8.
NrcqResult check_nrcq(const std::vector<PolytopeV>& active_subdiffs, int dim);

struct NacqResult {
  bool holds = true;
  std::vector<Vec> d_rays;
  std::vector<char> ray_accepted;
  std::vector<double> nearest_accepted_angle;  // radians, informational
};

// D(xbar) subset of T_Ktilde(xbar): every generator of D must pass the
// direct alpha-ladder test. The sampled grid is too coarse to certify the
// rays by angular proximity alone, so each ray is retested directly.
NacqResult check_nacq(const ConeH& D, const ConeSampleReport& T_report,
                      const FeasibilityOracle& oracle);

struct DualConeAudit {
  ProbeResult nearly_convex;          // hypothesis
  bool nacq = false;                  // hypothesis
  bool t_subset_d = true;             // sampled T inside D
  bool m_in_polar_k = true;           // every ray of M in sampled (K - xbar)^polar
  bool m_in_polar_ktilde = true;
  bool polar_k_in_m = true;           // sampled polar directions of K - xbar inside M
  bool polar_ktilde_in_m = true;
  bool identity_k = false;               // M = (K - xbar)^polar, sampled both ways
  bool identity_ktilde = false;
  ConeFG M;
  ConeH D;
  ConeSampleReport T;
  std::vector<std::string> notes;
};

// Checks the conclusions of the tangent-cone inclusion and the dual-cone
// identity at xbar, flagging each hypothesis so failures are attributable.
DualConeAudit audit_dual_cones(const Instance& inst, const Vec& xbar, std::uint64_t seed,
                               int n_dirs = 360);

// Active subdifferentials at xbar (exact when pinned, reconstructed
// otherwise). Returns one polytope per active constraint; sets all_exact.
std::vector<PolytopeV> active_subdiffs_at(const Instance& inst, const Vec& xbar, int n_dirs,
                                          bool* all_exact = nullptr,
                                          double tol_active = kTolActive);

}  // namespace cba
