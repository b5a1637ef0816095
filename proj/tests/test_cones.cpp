// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cba/cones.hpp"
#include "cba/fixtures.hpp"

using namespace cba;

namespace {

Instance fixture(const char* id) {
  for (const Fixture& fx : builtin_fixtures())
    if (fx.id == id) return load_instance_json(fx.instance_json, fx.id);
  throw std::runtime_error("missing fixture");
}

}  // namespace

TEST_CASE("build_D and build_M on the worked examples") {
  // Three-constraint example: D is the nonnegative x1-axis.
  std::vector<PolytopeV> sd21 = {{{{-1, -1}, {-1, 1}}}, {{{0, 2}}}, {{{0, -2}}}};
  ConeH D = build_D(sd21, 2);
  CHECK(cones_equal(D, make_cone_fg({{1, 0}}), 2, 1e-9));
  CHECK(cone_contains(D, Vec{1, 0}, 1e-9));
  CHECK(!cone_contains(D, Vec{0, 1}, 1e-6));

  // Interval example: D = [0, inf).
  std::vector<PolytopeV> sd42 = {{{{-3.0}}}};
  CHECK(cones_equal(build_D(sd42, 1), make_cone_fg({{1.0}}), 1, 1e-9));

  // Half-power example: both subdifferentials are {0}, so D = R and M = {0}.
  std::vector<PolytopeV> sd34 = {{{{0.0}}}, {{{0.0}}}};
  CHECK(build_D(sd34, 1).normals.empty());
  CHECK(build_M(sd34, 1).rays.empty());

  // Cubic pair: M = cone{-12, 2} = R.
  std::vector<PolytopeV> sd3x = {{{{-12.0}}}, {{{2.0}}}};
  ConeFG M3x = build_M(sd3x, 1);
  CHECK(cones_equal(M3x, ConeH{}, 1, 1e-9));

  // Single |x|-x constraint: M = cone{-2, 0} = (-inf, 0].
  std::vector<PolytopeV> sd31 = {{{{-2.0}, {0.0}}}};
  ConeFG M31 = build_M(sd31, 1);
  REQUIRE(M31.rays.size() == 1);
  CHECK(M31.rays[0][0] == doctest::Approx(-1.0));
  // Cross-check against the sampled polar of K - xbar = [0, inf).
  Instance ex31 = fixture("ex31");
  FeasiblePool pool = collect_feasible_pool(ex31.oracle_K(kTolFeasible), {0.0}, ex31.box, 2000, 1);
  CHECK(pool_polar_member(pool, M31.rays[0], ex31.box_diameter()));
  CHECK(!pool_polar_member(pool, Vec{1.0}, ex31.box_diameter()));
}

TEST_CASE("build_M and build_D are polar to each other by construction") {
  std::vector<PolytopeV> sd = {{{{-1, -1}, {-1, 1}}}, {{{0.5, 2}}}};
  CHECK(cones_equal(polar_fg(build_M(sd, 2)), build_D(sd, 2), 2, 1e-9));
}

TEST_CASE("contingent cone sampling on the worked examples") {
  // Full space: everything is accepted.
  FeasibilityOracle all;
  all.dim = 2;
  all.contains_fn = [](const Vec&) { return true; };
  ConeSampleReport rep = contingent_cone_sample(all, {0, 0}, 90);
  CHECK(rep.n_accepted == 90);

  // Singleton feasible set: nothing is accepted.
  Instance ex31 = fixture("ex31");
  ConeSampleReport r31 = contingent_cone_sample(ex31.oracle_feasible(kTolSampling), {0.0}, 2);
  CHECK(r31.n_accepted == 0);
  CHECK(r31.hull.rays.empty());

  // Three-constraint example: only the positive x1-axis survives.
  Instance ex21 = fixture("ex21");
  ConeSampleReport r21 = contingent_cone_sample(ex21.oracle_feasible(kTolSampling), {0, 0}, 360);
  CHECK(r21.n_accepted >= 1);
  for (std::size_t i = 0; i < r21.dirs.size(); ++i)
    if (r21.accepted[i]) CHECK(cone_contains(make_cone_h({{0, 2}, {0, -2}, {-1, 1}, {-1, -1}}), r21.dirs[i], 2e-5));
  CHECK(cones_equal(build_D({{{{-1, -1}, {-1, 1}}}, {{{0, 2}}}, {{{0, -2}}}}, 2), r21.hull, 2, 1e-9));
}

TEST_CASE("near-convexity probe") {
  // Convex sets pass.
  Instance ex34 = fixture("ex34");
  FeasibilityOracle k34 = ex34.oracle_K(kTolFeasible);
  ProbeResult p34 = nearly_convex_probe(k34, {0.0}, default_near_convexity_samples(ex34, k34, 7));
  CHECK(p34.pass);

  // {2} U [4, inf) fails at 2 with witness 4.
  Instance ex3x = fixture("ex3x");
  FeasibilityOracle k3x = ex3x.oracle_K(kTolFeasible);
  ProbeResult p3x = nearly_convex_probe(k3x, {2.0}, default_near_convexity_samples(ex3x, k3x, 7));
  CHECK(!p3x.pass);
  REQUIRE(p3x.witness.has_value());
  CHECK((*p3x.witness)[0] == doctest::Approx(4.0));

  CHECK_THROWS_AS(nearly_convex_probe(k3x, {2.0}, {Vec{3.0}}), InputError);
}

TEST_CASE("nonsmooth Robinson qualification") {
  // A single strictly separable vertex set.
  NrcqResult ok = check_nrcq({{{{-1.0, 0.0}}}}, 2);
  CHECK(ok.holds);
  REQUIRE(ok.witness.has_value());
  CHECK(dot(*ok.witness, {-1, 0}) < 0);

  // The three-constraint example forces delta = 0.
  NrcqResult fail21 = check_nrcq({{{{-1, -1}, {-1, 1}}}, {{{0, 2}}}, {{{0, -2}}}}, 2);
  CHECK(!fail21.holds);
  CHECK(std::fabs(fail21.margin) <= 1e-8);

  // One active constraint with subdifferential {-3}.
  NrcqResult ok42 = check_nrcq({{{{-3.0}}}}, 1);
  CHECK(ok42.holds);
  CHECK(dot(*ok42.witness, {-3.0}) < 0);

  // A zero subgradient can never separate strictly.
  NrcqResult zero = check_nrcq({{{{0.0}}}}, 1);
  CHECK(!zero.holds);

  // Vacuous when nothing is active.
  CHECK(check_nrcq({}, 2).holds);
}

TEST_CASE("nonsmooth Abadie qualification on the worked examples") {
  Instance ex21 = fixture("ex21");
  FeasibilityOracle kt21 = ex21.oracle_feasible(kTolSampling);
  ConeSampleReport t21 = contingent_cone_sample(kt21, {0, 0}, 360);
  ConeH D21 = build_D({{{{-1, -1}, {-1, 1}}}, {{{0, 2}}}, {{{0, -2}}}}, 2);
  CHECK(check_nacq(D21, t21, kt21).holds);

  Instance ex31 = fixture("ex31");
  FeasibilityOracle kt31 = ex31.oracle_feasible(kTolSampling);
  ConeSampleReport t31 = contingent_cone_sample(kt31, {0.0}, 2);
  ConeH D31 = build_D({{{{-2.0}, {0.0}}}}, 1);  // [0, inf)
  NacqResult n31 = check_nacq(D31, t31, kt31);
  CHECK(!n31.holds);

  Instance ex34 = fixture("ex34");
  FeasibilityOracle kt34 = ex34.oracle_feasible(kTolSampling);
  ConeSampleReport t34 = contingent_cone_sample(kt34, {0.0}, 2);
  CHECK(!check_nacq(ConeH{}, t34, kt34).holds);  // D = R vs T = {0}
}

TEST_CASE("dual-cone audit flags the counterexamples attributably") {
  // Half-power example: M = {0} but the polar of Ktilde is everything.
  Instance ex34 = fixture("ex34");
  DualConeAudit a34 = audit_dual_cones(ex34, {0.0}, 3);
  CHECK(a34.nearly_convex.pass);
  CHECK(!a34.nacq);
  CHECK(a34.m_in_polar_k);
  CHECK(!a34.polar_ktilde_in_m);
  CHECK(!a34.identity_ktilde);

  // Cubic pair: near convexity fails, M = R vs (K - xbar)^polar = (-inf, 0].
  Instance ex3x = fixture("ex3x");
  DualConeAudit a3x = audit_dual_cones(ex3x, {2.0}, 3);
  CHECK(!a3x.nearly_convex.pass);
  CHECK(a3x.nacq);
  CHECK(!a3x.m_in_polar_k);
  CHECK(!a3x.identity_k);

  // Interval example: every check passes.
  Instance ex42 = fixture("ex42");
  DualConeAudit a42 = audit_dual_cones(ex42, {1.0}, 3);
  CHECK(a42.nearly_convex.pass);
  CHECK(a42.nacq);
  CHECK(a42.identity_k);
  CHECK(a42.identity_ktilde);
  CHECK(a42.t_subset_d);
}

TEST_CASE("qualification implication and tangent inclusion on random instances") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Instance inst = random_instance(seed, 1 + static_cast<int>(seed % 3),
                                    1 + static_cast<int>(seed % 4));
    const Vec& xbar = inst.anchors[0].xbar;
    std::vector<PolytopeV> sd = active_subdiffs_at(inst, xbar, 360);
    NrcqResult nrcq = check_nrcq(sd, inst.n);
    FeasibilityOracle kt = inst.oracle_feasible(kTolSampling);
    ConeSampleReport T = contingent_cone_sample(kt, xbar, inst.n == 1 ? 2 : 360);
    NacqResult nacq = check_nacq(build_D(sd, inst.n), T, kt);
    if (nrcq.holds) CHECK(nacq.holds);

    FeasibilityOracle k = inst.oracle_K(kTolFeasible);
    ProbeResult ncv = nearly_convex_probe(k, xbar, default_near_convexity_samples(inst, k, seed));
    CHECK(ncv.pass);  // generator regions are convex
    ConeH D = build_D(sd, inst.n);
    for (std::size_t i = 0; i < T.dirs.size(); ++i)
      if (T.accepted[i]) CHECK(cone_contains(D, T.dirs[i], 2e-5));

    // Multiplier rays stay inside the sampled polar of K - xbar.
    FeasiblePool pool = collect_feasible_pool(k, xbar, inst.box, 1500, seed ^ 0xf00d);
    for (const Vec& r : build_M(sd, inst.n).rays)
      CHECK(pool_polar_member(pool, r, inst.box_diameter()));
  }
}
