// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cba/geometry.hpp"
#include "cba/tanconvex.hpp"
#include "cba/vec.hpp"

namespace cba {

inline constexpr double kTolFeasible = 1e-9;
// Tight tolerance for cone-sampling oracles, where feasibility slack divides
// through by step sizes as small as 1e-6.
inline constexpr double kTolSampling = 1e-12;

struct AnchorSpec {
  Vec xbar;
  std::vector<Vec> xs;  // query points audited against this anchor
};

// Membership test for K, C, or K-tilde derived from an instance.
struct FeasibilityOracle {
  int dim = 0;
  double tol = kTolFeasible;
  std::function<bool(const Vec&)> contains_fn;
  bool contains(const Vec& y) const { return contains_fn(y); }
};

struct Instance {
  std::string id;
  int n = 0;
  std::vector<ConstraintFn> constraints;
  Polyhedron C;
  std::optional<Polyhedron> feasible_hrep;  // H-rep of K-tilde when known
  std::vector<AnchorSpec> anchors;
  std::vector<std::pair<double, double>> box;

  FeasibilityOracle oracle_K(double tol = kTolFeasible) const;
  FeasibilityOracle oracle_C(double tol = kTolFeasible) const;
  FeasibilityOracle oracle_feasible(double tol = kTolFeasible) const;  // K-tilde

  double box_diameter() const;
};

struct InstanceValidation {
  int hrep_samples_checked = 0;
  // Oracle-feasible points rejected by the hrep would indicate the stored
  // hull undershoots the constraint region; counted informationally.
  int oracle_only_points = 0;
  std::vector<std::string> notes;
};

// Parses the normative JSON schema, checks invariants (anchor feasibility,
// exact-subdifferential consistency against dir_deriv, hrep soundness), and
// throws InputError on violations.
Instance load_instance_json(const std::string& text, const std::string& id = "");
InstanceValidation validate_instance(const Instance& inst);
std::string instance_to_json(const Instance& inst);

// Comma-joined decimal rendering used for subdifferential anchor keys.
std::string point_key(const Vec& v);
Vec parse_point_key(const std::string& key);

}  // namespace cba
