// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#include "cba/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace cba {
namespace {

const double kAlphaLadder[] = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};

std::vector<Vec> mesh_offsets(int dim) {
  std::vector<Vec> out;
  std::vector<int> idx(dim, -1);
  for (;;) {
    Vec v(dim);
    bool all_zero = true;
    for (int i = 0; i < dim; ++i) {
      v[i] = idx[i];
      all_zero = all_zero && idx[i] == 0;
    }
    if (!all_zero) out.push_back(normalized(v));
    int k = 0;
    while (k < dim && ++idx[k] > 1) idx[k++] = -1;
    if (k == dim) break;
  }
  return out;
}

}  // namespace

ConeH build_D(const std::vector<PolytopeV>& active_subdiffs, int dim) {
  std::vector<Vec> normals;
  for (const PolytopeV& P : active_subdiffs)
    for (const Vec& v : P.vertices) {
      if (static_cast<int>(v.size()) != dim) throw InputError("build_D: dimension mismatch");
      normals.push_back(v);
    }
  return make_cone_h(std::move(normals));
}

ConeFG build_M(const std::vector<PolytopeV>& active_subdiffs, int dim) {
  std::vector<Vec> rays;
  for (const PolytopeV& P : active_subdiffs)
    for (const Vec& v : P.vertices) {
      if (static_cast<int>(v.size()) != dim) throw InputError("build_M: dimension mismatch");
      rays.push_back(v);
    }
  return make_cone_fg(std::move(rays));
}

bool direction_in_contingent_sample(const FeasibilityOracle& oracle, const Vec& xbar,
                                    const Vec& d) {
  const int dim = oracle.dim;
  static thread_local std::vector<std::vector<Vec>> offsets_cache(5);
  if (offsets_cache[dim].empty()) offsets_cache[dim] = mesh_offsets(dim);
  const std::vector<Vec>& offsets = offsets_cache[dim];

  for (double alpha : kAlphaLadder) {
    bool ok = oracle.contains(add(xbar, scale(d, alpha)));
    const double radius = 10.0 * alpha;
    for (int round = 0; round < 2 && !ok; ++round) {
      double r = radius / (1 << round);
      for (const Vec& u : offsets) {
        Vec dp = add(d, scale(u, r));
        if (oracle.contains(add(xbar, scale(dp, alpha)))) {
          ok = true;
          break;
        }
      }
    }
    if (!ok) return false;
  }
  return true;
}

ConeSampleReport contingent_cone_sample(const FeasibilityOracle& oracle, const Vec& xbar,
                                        int n_dirs) {
  if (!oracle.contains(xbar))
    throw InputError("contingent_cone_sample: anchor infeasible for the oracle");
  ConeSampleReport rep;
  rep.xbar = xbar;
  rep.dirs = sample_directions(oracle.dim, n_dirs);
  rep.accepted.assign(rep.dirs.size(), 0);
  std::vector<Vec> acc;
  for (std::size_t i = 0; i < rep.dirs.size(); ++i) {
    if (direction_in_contingent_sample(oracle, xbar, rep.dirs[i])) {
      rep.accepted[i] = 1;
      ++rep.n_accepted;
      acc.push_back(rep.dirs[i]);
    }
  }
  // Extreme subset: drop any accepted direction generated by the others.
  ConeFG all = make_cone_fg(acc);
  std::vector<Vec> keep = all.rays;
  for (std::size_t i = 0; i < keep.size();) {
    ConeFG rest;
    for (std::size_t j = 0; j < keep.size(); ++j)
      if (j != i) rest.rays.push_back(keep[j]);
    if (!rest.rays.empty() && cone_contains(rest, keep[i], 1e-9)) {
      keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  rep.hull.rays = std::move(keep);
  return rep;
}

ProbeResult nearly_convex_probe(const FeasibilityOracle& oracle, const Vec& xbar,
                                const std::vector<Vec>& samples) {
  if (!oracle.contains(xbar)) throw InputError("nearly_convex_probe: anchor infeasible");
  for (const Vec& y : samples) {
    if (!oracle.contains(y))
      throw InputError("nearly_convex_probe: sample " + point_key(y) + " infeasible");
    Vec step = sub(y, xbar);
    bool ok = true;
    for (int k = 10; k <= 20 && ok; ++k)
      ok = oracle.contains(add(xbar, scale(step, std::ldexp(1.0, -k))));
    if (!ok) return {false, y};
  }
  return {true, std::nullopt};
}

std::vector<Vec> default_near_convexity_samples(const Instance& inst,
                                                const FeasibilityOracle& oracle,
                                                std::uint64_t seed) {
  std::vector<Vec> samples;
  auto push_if_feasible = [&](const Vec& y) {
    if (!oracle.contains(y)) return;
    for (const Vec& e : samples)
      if (approx_eq(e, y, 1e-12)) return;
    samples.push_back(y);
  };
  for (const AnchorSpec& a : inst.anchors) {
    push_if_feasible(a.xbar);
    for (const Vec& x : a.xs) push_if_feasible(x);
  }
  std::mt19937_64 eng(seed);
  auto rnd = [&](double lo, double hi) {
    double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  };
  int found = 0, draws = 0;
  while (found < 32 && draws < 20000) {
    ++draws;
    Vec y(inst.n);
    for (int i = 0; i < inst.n; ++i) y[i] = rnd(inst.box[i].first, inst.box[i].second);
    if (oracle.contains(y)) {
      samples.push_back(std::move(y));
      ++found;
    }
  }
  return samples;
}

NrcqResult check_nrcq(const std::vector<PolytopeV>& active_subdiffs, int dim) {
  std::vector<Vec> verts;
  for (const PolytopeV& P : active_subdiffs)
    for (const Vec& v : P.vertices) verts.push_back(v);
  if (verts.empty()) {
    // Vacuous: no active constraints. Any nonzero direction witnesses.
    Vec e(dim, 0.0);
    e[0] = 1.0;
    return {true, e, std::numeric_limits<double>::infinity()};
  }
  // Variables (nu, delta): maximize delta s.t. <v, nu> + delta <= 0,
  // |nu_i| <= 1.
  std::vector<Halfspace> sys;
  for (const Vec& v : verts) {
    Vec row(dim + 1, 0.0);
    for (int i = 0; i < dim; ++i) row[i] = v[i];
    row[dim] = 1.0;
    sys.push_back({row, 0.0});
  }
  for (int i = 0; i < dim; ++i) {
    Vec pos(dim + 1, 0.0), neg(dim + 1, 0.0);
    pos[i] = 1.0;
    neg[i] = -1.0;
    sys.push_back({pos, 1.0});
    sys.push_back({neg, 1.0});
  }
  Vec obj(dim + 1, 0.0);
  obj[dim] = 1.0;
  LPResult r = lp_solve(dim + 1, sys, obj, LPSense::Maximize);
  if (r.status != LPStatus::Feasible)
    throw NumericError("check_nrcq: separation LP failed");
  double delta = *r.objective;
  NrcqResult out;
  out.margin = delta;
  out.holds = delta > 1e-8;
  if (out.holds) {
    Vec nu(r.witness->begin(), r.witness->begin() + dim);
    out.witness = nu;
  }
  return out;
}

NacqResult check_nacq(const ConeH& D, const ConeSampleReport& T_report,
                      const FeasibilityOracle& oracle) {
  NacqResult out;
  out.d_rays = rays_of(D, oracle.dim).rays;
  for (const Vec& r : out.d_rays) {
    bool ok = direction_in_contingent_sample(oracle, T_report.xbar, r);
    double best_angle = M_PI;
    for (std::size_t i = 0; i < T_report.dirs.size(); ++i) {
      if (!T_report.accepted[i]) continue;
      double c = std::clamp(dot(r, T_report.dirs[i]), -1.0, 1.0);
      best_angle = std::min(best_angle, std::acos(c));
    }
    if (!ok && best_angle <= 1e-3) ok = true;
    out.ray_accepted.push_back(ok ? 1 : 0);
    out.nearest_accepted_angle.push_back(best_angle);
    out.holds = out.holds && ok;
  }
  return out;
}

std::vector<PolytopeV> active_subdiffs_at(const Instance& inst, const Vec& xbar, int n_dirs,
                                          bool* all_exact, double tol_active) {
  std::vector<std::size_t> act = active_set(inst.constraints, xbar, tol_active);
  std::vector<PolytopeV> out;
  bool exact_all = true;
  for (std::size_t j : act) {
    bool exact = false;
    out.push_back(subdiff_at(inst.constraints[j], xbar, n_dirs, &exact));
    exact_all = exact_all && exact;
  }
  if (all_exact) *all_exact = exact_all;
  return out;
}

DualConeAudit audit_dual_cones(const Instance& inst, const Vec& xbar, std::uint64_t seed,
                               int n_dirs) {
  FeasibilityOracle k_tight = inst.oracle_K(kTolSampling);
  FeasibilityOracle kt_tight = inst.oracle_feasible(kTolSampling);
  FeasibilityOracle k_loose = inst.oracle_K(kTolFeasible);
  FeasibilityOracle kt_loose = inst.oracle_feasible(kTolFeasible);
  if (!kt_loose.contains(xbar)) throw InputError("audit: anchor infeasible");

  DualConeAudit audit;
  std::vector<PolytopeV> subdiffs = active_subdiffs_at(inst, xbar, n_dirs);
  audit.D = build_D(subdiffs, inst.n);
  audit.M = build_M(subdiffs, inst.n);

  audit.nearly_convex =
      nearly_convex_probe(k_loose, xbar, default_near_convexity_samples(inst, k_loose, seed));
  audit.T = contingent_cone_sample(kt_tight, xbar, n_dirs);
  audit.nacq = check_nacq(audit.D, audit.T, kt_tight).holds;

  // Tangent-cone inclusion: accepted directions against D, at the sampler's
  // angular resolution (the 10*alpha_min perturbation allowance).
  for (std::size_t i = 0; i < audit.T.dirs.size(); ++i)
    if (audit.T.accepted[i])
      audit.t_subset_d = audit.t_subset_d && cone_contains(audit.D, audit.T.dirs[i], 2e-5);

  FeasiblePool pool_k = collect_feasible_pool(k_loose, xbar, inst.box, 3000, seed ^ 0x517cc1b7);
  FeasiblePool pool_kt = collect_feasible_pool(kt_loose, xbar, inst.box, 3000, seed ^ 0x27220a95);
  const double diam = inst.box_diameter();

  for (const Vec& r : audit.M.rays) {
    audit.m_in_polar_k = audit.m_in_polar_k && pool_polar_member(pool_k, r, diam);
    audit.m_in_polar_ktilde = audit.m_in_polar_ktilde && pool_polar_member(pool_kt, r, diam);
  }
  // Membership of sampled polar directions in M runs at the sampled-verdict
  // tier: directions just outside the true polar can pass the pool test when
  // the rejecting feasible sliver is thinner than the pool resolution.
  for (const Vec& u : sample_directions(inst.n, inst.n == 1 ? 2 : (inst.n == 2 ? 360 : 200))) {
    if (pool_polar_member(pool_k, u, diam))
      audit.polar_k_in_m = audit.polar_k_in_m && cone_contains(audit.M, u, 1e-3);
    if (pool_polar_member(pool_kt, u, diam))
      audit.polar_ktilde_in_m = audit.polar_ktilde_in_m && cone_contains(audit.M, u, 1e-3);
  }
  audit.identity_k = audit.m_in_polar_k && audit.polar_k_in_m;
  audit.identity_ktilde = audit.m_in_polar_ktilde && audit.polar_ktilde_in_m;

  if (!audit.nearly_convex.pass)
    audit.notes.push_back("near convexity fails at the anchor (witness " +
                          point_key(*audit.nearly_convex.witness) +
                          "); the dual-cone identity is not expected to hold");
  if (!audit.nacq)
    audit.notes.push_back("Abadie's qualification fails at the anchor; the dual-cone identity "
                          "is not expected to hold");
  if (!audit.identity_k)
    audit.notes.push_back("M differs from the sampled polar of K - xbar");
  if (!audit.identity_ktilde)
    audit.notes.push_back("M differs from the sampled polar of Ktilde - xbar");
  return audit;
}

}  // namespace cba
