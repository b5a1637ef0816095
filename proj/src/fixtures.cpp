// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#include "cba/fixtures.hpp"

#include <cmath>

namespace cba {
namespace {

// ---------------------------------------------------------------------------
// Built-in instances. Subdifferential blocks carry the exact vertex lists so
// the exact certificate path is available; reconstruction is still exercised
// and compared independently.
// ---------------------------------------------------------------------------

const char* kEx21Instance = R"json({
  "n": 2,
  "constraints": [
    {"name": "g1", "expr": "abs(x2) - x1", "subdiff": {"0,0": [[-1, -1], [-1, 1]]}},
    {"name": "g2", "expr": "1 - x1^2 - (x2 - 1)^2", "subdiff": {"0,0": [[0, 2]]}},
    {"name": "g3", "expr": "1 - x1^2 - (x2 + 1)^2", "subdiff": {"0,0": [[0, -2]]}}
  ],
  "C": {"halfspaces": [{"a": [-1, 0], "b": 0}]},
  "anchors": [{"xbar": [0, 0], "xs": [[-1, 0]]}],
  "box": [[-2, 2], [-2, 2]]
})json";

const char* kEx21Expected = R"json({
  "reconstructed": {
    "g1": {"vertices": {"__vset": [[-1, -1], [-1, 1]], "tol": 1e-4}},
    "g2": {"vertices": {"__vset": [[0, 2]], "tol": 1e-4}},
    "g3": {"vertices": {"__vset": [[0, -2]], "tol": 1e-4}}
  },
  "cq": {
    "nrcq": {"holds": {"__bool": false}},
    "nacq": {"holds": {"__bool": true}}
  },
  "cones": {
    "anchor": {
      "D_rays": {"rays": {"__vset": [[1, 0]], "tol": 1e-6}},
      "d_equals_sampled_t": {"__bool": true}
    }
  }
})json";

const char* kEx31Instance = R"json({
  "n": 1,
  "constraints": [
    {"name": "g1", "expr": "abs(x1) - x1", "subdiff": {"0": [[-2], [0]]}}
  ],
  "C": {"halfspaces": [{"a": [1], "b": 0}]},
  "feasible_hrep": {"halfspaces": [{"a": [1], "b": 0}, {"a": [-1], "b": 0}]},
  "anchors": [{"xbar": [0], "xs": [[-1]]}],
  "box": [[-2, 2]]
})json";

const char* kEx31Expected = R"json({
  "reconstructed": {
    "g1": {"vertices": {"__vset": [[-2], [0]], "tol": 1e-6}}
  },
  "cq": {"nacq": {"holds": {"__bool": false}}},
  "chip": {
    "strong_chip": {
      "holds": {"__bool": true},
      "lhs_provenance": {"__str": "exact"},
      "rhs_provenance": {"__str": "exact"},
      "lhs": {"rays": {"__vset": [[1], [-1]], "tol": 1e-9}}
    }
  }
})json";

const char* kEx3xInstance = R"json({
  "n": 1,
  "constraints": [
    {"name": "g1", "expr": "8 - x1^3", "subdiff": {"2": [[-12]]}},
    {"name": "g2", "expr": "-x1^2 + 6*x1 - 8", "subdiff": {"2": [[2]]}}
  ],
  "C": {"halfspaces": [{"a": [-1], "b": -2}, {"a": [1], "b": 3}]},
  "feasible_hrep": {"halfspaces": [{"a": [1], "b": 2}, {"a": [-1], "b": -2}]},
  "anchors": [{"xbar": [2], "xs": [[0], [4]]}],
  "box": [[0, 6]]
})json";

const char* kEx3xExpected = R"json({
  "cq": {
    "nacq": {"holds": {"__bool": true}},
    "nearly_convex": {"pass": {"__bool": false}, "witness": {"__vec": [4], "tol": 1e-9}}
  },
  "audit": {
    "dual_cone_audit": {
      "nearly_convex": {"__bool": false},
      "nacq": {"__bool": true},
      "m_in_polar_k": {"__bool": false},
      "dual_cone_identity_k": {"__bool": false},
      "M": {"rays": {"__vset": [[1], [-1]], "tol": 1e-9}}
    }
  }
})json";

const char* kEx34Instance = R"json({
  "n": 1,
  "constraints": [
    {"name": "g1", "expr": "sqrt(max(x1, 0))^3", "subdiff": {"0": [[0]]}},
    {"name": "g2", "expr": "-sqrt(max(x1, 0))^3", "subdiff": {"0": [[0]]}}
  ],
  "C": {"halfspaces": [{"a": [-1], "b": 0}, {"a": [1], "b": 1}]},
  "feasible_hrep": {"halfspaces": [{"a": [1], "b": 0}, {"a": [-1], "b": 0}]},
  "anchors": [{"xbar": [0], "xs": [[0.5]]}],
  "box": [[-2, 2]]
})json";

const char* kEx34Expected = R"json({
  "reconstructed": {
    "g1": {"vertices": {"__vset": [[0]], "tol": 1e-6}},
    "g2": {"vertices": {"__vset": [[0]], "tol": 1e-6}}
  },
  "cq": {
    "nacq": {"holds": {"__bool": false}},
    "nearly_convex": {"pass": {"__bool": true}}
  },
  "cones": {
    "anchor": {
      "D_rays": {"rays": {"__vset": [[1], [-1]], "tol": 1e-9}},
      "T_sampled": {"hull": {"rays": {"__vset": [], "tol": 1e-9}}}
    }
  },
  "audit": {
    "dual_cone_audit": {
      "polar_ktilde_in_m": {"__bool": false},
      "dual_cone_identity_ktilde": {"__bool": false},
      "M": {"rays": {"__vset": [], "tol": 1e-9}}
    }
  }
})json";

const char* kEx41Instance = R"json({
  "n": 2,
  "constraints": [
    {"name": "g1", "expr": "abs(x2) - x1 - x1^2 - x1^3",
     "subdiff": {"0,0": [[-1, 1], [-1, -1]]}},
    {"name": "g2", "expr": "abs(x1 - x2) - x1 - x1*x2 - x2^3",
     "subdiff": {"0,0": [[-2, 1], [0, -1]]}}
  ],
  "C": {"halfspaces": []},
  "feasible_hrep": {"halfspaces": [{"a": [-1, 1], "b": 0}, {"a": [0, -1], "b": 0}]},
  "anchors": [{"xbar": [0, 0], "xs": [[0, -1], [0, -2]]}],
  "box": [[-2, 2], [-2, 2]]
})json";

const char* kEx41Expected = R"json({
  "cq": {"nacq": {"holds": {"__bool": true}}},
  "queries": {
    "x0": {
      "project": {"projection": {"__vec": [0, 0], "tol": 1e-8}},
      "certify": {"certificate": {
        "found": {"__bool": true},
        "lambda": {"__vec": [0, 1], "tol": 1e-8},
        "eta_g2": {"__vec": [0, -1], "tol": 1e-8},
        "perturbation_check": {"__bool": true},
        "stationarity_check": {"__bool": true}}}
    },
    "x1": {
      "project": {"projection": {"__vec": [0, 0], "tol": 1e-8}},
      "certify": {"certificate": {
        "found": {"__bool": true},
        "lambda": {"__vec": [0, 2], "tol": 1e-8},
        "eta_g2": {"__vec": [0, -1], "tol": 1e-8},
        "perturbation_check": {"__bool": true},
        "stationarity_check": {"__bool": true}}}
    }
  },
  "chip": {"strong_chip": {"holds": {"__bool": true}}}
})json";

const char* kEx42Instance = R"json({
  "n": 1,
  "constraints": [
    {"name": "g1", "expr": "1 - x1^3", "subdiff": {"1": [[-3]]}},
    {"name": "g2", "expr": "x1^3 - 3*x1^2 + x1 - 3", "subdiff": {"1": [[-2]]}}
  ],
  "C": {"halfspaces": [{"a": [-1], "b": -1}]},
  "feasible_hrep": {"halfspaces": [{"a": [-1], "b": -1}, {"a": [1], "b": 3}]},
  "anchors": [{"xbar": [1], "xs": [[0], [0.5], [-3]]}],
  "box": [[-4, 4]]
})json";

const char* kEx42Expected = R"json({
  "cq": {
    "nacq": {"holds": {"__bool": true}},
    "nearly_convex": {"pass": {"__bool": true}}
  },
  "queries": {
    "x0": {
      "project": {"projection": {"__vec": [1], "tol": 1e-8}},
      "certify": {"certificate": {
        "found": {"__bool": true},
        "lambda": {"__vec": [0.3333333333333333, 0], "tol": 1e-8},
        "perturbation_check": {"__bool": true},
        "stationarity_check": {"__bool": true}}}
    },
    "x1": {
      "project": {"projection": {"__vec": [1], "tol": 1e-8}},
      "certify": {"certificate": {
        "lambda": {"__vec": [0.16666666666666666, 0], "tol": 1e-8}}}
    },
    "x2": {
      "project": {"projection": {"__vec": [1], "tol": 1e-8}},
      "certify": {"certificate": {
        "lambda": {"__vec": [1.3333333333333333, 0], "tol": 1e-8}}}
    }
  },
  "audit": {
    "equivalence": {
      "all_agree": {"__bool": true},
      "strong_chip": {"__bool": true}
    }
  },
  "chip": {"strong_chip": {"holds": {"__bool": true}, "lhs_provenance": {"__str": "exact"}}}
})json";

// ---------------------------------------------------------------------------
// Comparison of an expected block against the observed battery.
// ---------------------------------------------------------------------------

const json& unwrap(const json& node) {
  if (node.is_object() && node.contains("value") && node.contains("provenance"))
    return node["value"];
  return node;
}

Vec to_vec(const json& arr) {
  Vec v;
  for (const auto& e : arr) v.push_back(e.get<double>());
  return v;
}

void compare_node(const std::string& fixture, const json& expected, const json& observed_raw,
                  const std::string& path, std::vector<std::string>& mismatches) {
  auto fail = [&](const std::string& msg) {
    mismatches.push_back("fixture " + fixture + ": " + path + ": " + msg);
  };
  const json& observed = unwrap(observed_raw);

  if (expected.is_object() && expected.contains("__bool")) {
    if (!observed.is_boolean() || observed.get<bool>() != expected["__bool"].get<bool>())
      fail("expected " + expected["__bool"].dump() + ", got " + observed.dump());
    return;
  }
  if (expected.is_object() && expected.contains("__str")) {
    if (!observed.is_string() || observed.get<std::string>() != expected["__str"].get<std::string>())
      fail("expected " + expected["__str"].dump() + ", got " + observed.dump());
    return;
  }
  if (expected.is_object() && expected.contains("__num")) {
    double tol = expected.value("tol", 1e-9);
    if (!observed.is_number() || std::fabs(observed.get<double>() - expected["__num"].get<double>()) > tol)
      fail("expected " + expected["__num"].dump() + " +- " + std::to_string(tol) + ", got " +
           observed.dump());
    return;
  }
  if (expected.is_object() && expected.contains("__vec")) {
    double tol = expected.value("tol", 1e-9);
    if (!observed.is_array()) {
      fail("expected a vector, got " + observed.dump());
      return;
    }
    Vec want = to_vec(expected["__vec"]);
    Vec got = to_vec(observed);
    if (want.size() != got.size() || dist(want, got) > tol)
      fail("expected " + expected["__vec"].dump() + " +- " + std::to_string(tol) + ", got " +
           observed.dump());
    return;
  }
  if (expected.is_object() && expected.contains("__vset")) {
    double tol = expected.value("tol", 1e-9);
    if (!observed.is_array()) {
      fail("expected a vertex set, got " + observed.dump());
      return;
    }
    PolytopeV want, got;
    for (const auto& vj : expected["__vset"]) want.vertices.push_back(to_vec(vj));
    for (const auto& vj : observed) got.vertices.push_back(to_vec(vj));
    if (want.vertices.empty() != got.vertices.empty()) {
      fail("expected " + expected["__vset"].dump() + ", got " + observed.dump());
      return;
    }
    if (!want.vertices.empty() && hausdorff_distance(want, got) > tol)
      fail("expected vertex set " + expected["__vset"].dump() + " within " + std::to_string(tol) +
           ", got " + observed.dump());
    return;
  }

  if (expected.is_object()) {
    for (const auto& [key, child] : expected.items()) {
      if (!observed.is_object() || !observed.contains(key)) {
        fail("missing key '" + key + "'");
        continue;
      }
      compare_node(fixture, child, observed[key], path + "/" + key, mismatches);
    }
    return;
  }
  fail("unsupported expected node " + expected.dump());
}

}  // namespace

const std::vector<Fixture>& builtin_fixtures() {
  static const std::vector<Fixture> fixtures = {
      {"ex21", kEx21Instance, kEx21Expected}, {"ex31", kEx31Instance, kEx31Expected},
      {"ex3x", kEx3xInstance, kEx3xExpected}, {"ex34", kEx34Instance, kEx34Expected},
      {"ex41", kEx41Instance, kEx41Expected}, {"ex42", kEx42Instance, kEx42Expected},
  };
  return fixtures;
}

json fixture_battery(const Instance& inst, const ReportOptions& opt) {
  json out;
  bool pos = true;
  out["inspect"] = report_inspect(inst, opt, &pos);

  json rec = json::object();
  for (const ConstraintFn& fn : inst.constraints) {
    PolytopeV P = reconstruct_subdiff(fn, inst.anchors[static_cast<std::size_t>(opt.anchor)].xbar,
                                      opt.n_dirs);
    rec[fn.name] = json{{"vertices", tagged(P.vertices, "sampled")}};
  }
  out["reconstructed"] = rec;

  out["cones"] = report_cones(inst, opt, &pos);
  out["cq"] = report_cq(inst, opt, &pos);
  out["chip"] = report_chip(inst, opt, &pos);
  out["audit"] = report_audit(inst, opt, &pos);

  json queries = json::object();
  const AnchorSpec& a = inst.anchors[static_cast<std::size_t>(opt.anchor)];
  for (std::size_t i = 0; i < a.xs.size(); ++i) {
    json qj;
    qj["project"] = report_project(inst, opt, a.xs[i], &pos);
    json certify = report_certify(inst, opt, a.xs[i], &pos);
    // Convenience aliases so expected blocks can pin a single eta by name.
    if (certify["certificate"].value("found", false)) {
      const json& etas = certify["certificate"]["eta"]["value"];
      for (std::size_t jx = 0; jx < inst.constraints.size(); ++jx)
        certify["certificate"]["eta_" + inst.constraints[jx].name] =
            tagged(to_vec(etas[jx]), certify["certificate"]["eta"]["provenance"].get<std::string>());
    }
    qj["certify"] = certify;
    queries["x" + std::to_string(i)] = qj;
  }
  out["queries"] = queries;
  return out;
}

FixtureOutcome run_fixture(const Fixture& fx) {
  FixtureOutcome out;
  out.id = fx.id;
  Instance inst = load_instance_json(fx.instance_json, fx.id);
  ReportOptions opt;
  out.observed = fixture_battery(inst, opt);
  json expected = json::parse(fx.expected_json);
  compare_node(fx.id, expected, out.observed, "", out.mismatches);
  out.pass = out.mismatches.empty();
  return out;
}

}  // namespace cba
