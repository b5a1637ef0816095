// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#include "cba/instance.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <json.hpp>

namespace cba {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Vec parse_vec(const json& j, int dim, const char* what) {
  if (!j.is_array() || (dim >= 0 && static_cast<int>(j.size()) != dim))
    throw InputError(std::string("instance: bad vector for ") + what);
  Vec v;
  for (const auto& e : j) {
    if (!e.is_number()) throw InputError(std::string("instance: non-numeric entry in ") + what);
    v.push_back(e.get<double>());
  }
  return v;
}

Polyhedron parse_polyhedron(const json& j, int dim, const char* what) {
  Polyhedron P;
  if (!j.is_object() || !j.contains("halfspaces") || !j["halfspaces"].is_array())
    throw InputError(std::string("instance: ") + what + " must be {\"halfspaces\": [...]}");
  for (const auto& h : j["halfspaces"]) {
    if (!h.contains("a") || !h.contains("b"))
      throw InputError(std::string("instance: halfspace in ") + what + " needs \"a\" and \"b\"");
    Halfspace hs{parse_vec(h["a"], dim, what), h["b"].get<double>()};
    if (norm(hs.normal) <= 0)
      throw InputError(std::string("instance: zero normal in ") + what);
    P.halfspaces.push_back(std::move(hs));
  }
  return P;
}

json polyhedron_to_json(const Polyhedron& P) {
  json arr = json::array();
  for (const Halfspace& h : P.halfspaces) arr.push_back({{"a", h.normal}, {"b", h.offset}});
  return json{{"halfspaces", arr}};
}

}  // namespace

std::string point_key(const Vec& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt_double(v[i]);
  }
  return s;
}

Vec parse_point_key(const std::string& key) {
  Vec v;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      v.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw InputError("instance: bad point key '" + key + "'");
    }
  }
  if (v.empty()) throw InputError("instance: empty point key");
  return v;
}

FeasibilityOracle Instance::oracle_K(double tol) const {
  FeasibilityOracle o;
  o.dim = n;
  o.tol = tol;
  o.contains_fn = [this, tol](const Vec& y) {
    for (const ConstraintFn& g : constraints) {
      double v;
      try {
        v = g.eval(y);
      } catch (const NumericError&) {
        return false;
      }
      if (v > tol) return false;
    }
    return true;
  };
  return o;
}

FeasibilityOracle Instance::oracle_C(double tol) const {
  FeasibilityOracle o;
  o.dim = n;
  o.tol = tol;
  o.contains_fn = [this, tol](const Vec& y) { return polyhedron_contains(C, y, tol); };
  return o;
}

FeasibilityOracle Instance::oracle_feasible(double tol) const {
  FeasibilityOracle o;
  o.dim = n;
  o.tol = tol;
  FeasibilityOracle k = oracle_K(tol);
  o.contains_fn = [this, k, tol](const Vec& y) {
    return k.contains(y) && polyhedron_contains(C, y, tol);
  };
  return o;
}

double Instance::box_diameter() const {
  double s = 0;
  for (const auto& [lo, hi] : box) s += (hi - lo) * (hi - lo);
  return std::sqrt(s);
}

Instance load_instance_json(const std::string& text, const std::string& id) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("instance: JSON parse error: ") + e.what());
  }
  Instance inst;
  inst.id = id;
  if (!j.contains("n") || !j["n"].is_number_integer())
    throw InputError("instance: missing integer field \"n\"");
  inst.n = j["n"].get<int>();
  if (inst.n < 1 || inst.n > 4) throw InputError("instance: n must be in 1..4");

  if (!j.contains("constraints") || !j["constraints"].is_array() || j["constraints"].empty())
    throw InputError("instance: missing constraint list");
  for (const auto& cj : j["constraints"]) {
    ConstraintFn fn;
    fn.name = cj.value("name", "g" + std::to_string(inst.constraints.size() + 1));
    if (!cj.contains("expr") || !cj["expr"].is_string())
      throw InputError("instance: constraint " + fn.name + " missing \"expr\"");
    fn.body = parse_expr(cj["expr"].get<std::string>());
    if (expr_max_var(fn.body) > inst.n)
      throw InputError("instance: constraint " + fn.name + " references variable beyond n");
    if (cj.contains("subdiff")) {
      for (const auto& [key, verts] : cj["subdiff"].items()) {
        Vec anchor = parse_point_key(key);
        if (static_cast<int>(anchor.size()) != inst.n)
          throw InputError("instance: subdiff key dimension mismatch in " + fn.name);
        PolytopeV poly;
        for (const auto& vj : verts) poly.vertices.push_back(parse_vec(vj, inst.n, "subdiff"));
        if (poly.vertices.empty())
          throw InputError("instance: empty subdiff polytope in " + fn.name);
        fn.exact_subdiffs.emplace_back(std::move(anchor), prune_polytope(std::move(poly), 1e-9));
      }
    }
    inst.constraints.push_back(std::move(fn));
  }

  if (!j.contains("C")) throw InputError("instance: missing \"C\"");
  inst.C = parse_polyhedron(j["C"], inst.n, "C");
  if (j.contains("feasible_hrep") && !j["feasible_hrep"].is_null())
    inst.feasible_hrep = parse_polyhedron(j["feasible_hrep"], inst.n, "feasible_hrep");

  if (!j.contains("anchors") || !j["anchors"].is_array())
    throw InputError("instance: missing \"anchors\"");
  for (const auto& aj : j["anchors"]) {
    AnchorSpec a;
    a.xbar = parse_vec(aj.at("xbar"), inst.n, "anchor xbar");
    if (aj.contains("xs"))
      for (const auto& xj : aj["xs"]) a.xs.push_back(parse_vec(xj, inst.n, "anchor xs"));
    inst.anchors.push_back(std::move(a));
  }

  if (!j.contains("box") || !j["box"].is_array() || static_cast<int>(j["box"].size()) != inst.n)
    throw InputError("instance: \"box\" must list one [lo,hi] per axis");
  for (const auto& bj : j["box"]) {
    Vec iv = parse_vec(bj, 2, "box");
    if (!(iv[0] < iv[1])) throw InputError("instance: empty box interval");
    inst.box.emplace_back(iv[0], iv[1]);
  }
  for (const AnchorSpec& a : inst.anchors)
    for (int i = 0; i < inst.n; ++i)
      if (a.xbar[i] < inst.box[i].first - 1e-9 || a.xbar[i] > inst.box[i].second + 1e-9)
        throw InputError("instance: anchor outside box");

  validate_instance(inst);
  return inst;
}

InstanceValidation validate_instance(const Instance& inst) {
  InstanceValidation out;
  FeasibilityOracle ktilde = inst.oracle_feasible(kTolFeasible);

  for (const AnchorSpec& a : inst.anchors)
    if (!ktilde.contains(a.xbar))
      throw InputError("instance: anchor " + point_key(a.xbar) + " is infeasible");

  // Exact subdifferentials must reproduce the directional derivative.
  for (const ConstraintFn& fn : inst.constraints) {
    for (const auto& [anchor, poly] : fn.exact_subdiffs) {
      std::vector<Vec> dirs = sample_directions(inst.n, inst.n == 1 ? 2 : 16);
      for (const Vec& d : dirs) {
        double lhs = support_value(poly, d);
        double rhs = dir_deriv(fn, anchor, d);
        if (std::fabs(lhs - rhs) > 1e-5 * (1 + std::fabs(rhs)))
          throw InputError("instance: exact subdiff of " + fn.name + " at " + point_key(anchor) +
                           " disagrees with the directional derivative (support " +
                           std::to_string(lhs) + " vs " + std::to_string(rhs) + ")");
      }
    }
  }

  // When an H-representation of K-tilde is supplied, its points must be
  // feasible for the constraint oracle. (The reverse direction is reported,
  // not enforced: worked examples sometimes state a hull smaller than the
  // full constraint region away from the anchor.)
  if (inst.feasible_hrep) {
    std::mt19937_64 eng(0x9e3779b97f4a7c15ull);
    auto rnd = [&](double lo, double hi) {
      double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
      return lo + u * (hi - lo);
    };
    int checked = 0, oracle_only = 0;
    int draws = 0;
    while (checked < 1000 && draws < 40000) {
      ++draws;
      Vec y(inst.n);
      for (int i = 0; i < inst.n; ++i) y[i] = rnd(inst.box[i].first, inst.box[i].second);
      bool in_hrep = polyhedron_contains(*inst.feasible_hrep, y, kTolFeasible);
      bool in_oracle = ktilde.contains(y);
      if (in_hrep) {
        ++checked;
        if (!in_oracle)
          throw InputError("instance: feasible_hrep point " + point_key(y) +
                           " violates the constraint oracle");
      } else if (in_oracle) {
        ++oracle_only;
      }
    }
    for (const AnchorSpec& a : inst.anchors) {
      if (!polyhedron_contains(*inst.feasible_hrep, a.xbar, kTolFeasible))
        throw InputError("instance: anchor outside feasible_hrep");
    }
    out.hrep_samples_checked = checked;
    out.oracle_only_points = oracle_only;
    if (oracle_only > 0)
      out.notes.push_back("feasible_hrep is a strict subset of the constraint region on " +
                          std::to_string(oracle_only) + " sampled points; hrep treated as the "
                          "authoritative convex feasible set");
  }
  return out;
}

std::string instance_to_json(const Instance& inst) {
  json j;
  j["n"] = inst.n;
  json cons = json::array();
  for (const ConstraintFn& fn : inst.constraints) {
    json cj;
    cj["name"] = fn.name;
    cj["expr"] = expr_to_string(fn.body);
    if (!fn.exact_subdiffs.empty()) {
      json sj = json::object();
      for (const auto& [anchor, poly] : fn.exact_subdiffs) {
        json verts = json::array();
        for (const Vec& v : poly.vertices) verts.push_back(v);
        sj[point_key(anchor)] = verts;
      }
      cj["subdiff"] = sj;
    }
    cons.push_back(cj);
  }
  j["constraints"] = cons;
  j["C"] = polyhedron_to_json(inst.C);
  if (inst.feasible_hrep) j["feasible_hrep"] = polyhedron_to_json(*inst.feasible_hrep);
  json anchors = json::array();
  for (const AnchorSpec& a : inst.anchors) {
    json aj;
    aj["xbar"] = a.xbar;
    json xs = json::array();
    for (const Vec& x : a.xs) xs.push_back(x);
    aj["xs"] = xs;
    anchors.push_back(aj);
  }
  j["anchors"] = anchors;
  json box = json::array();
  for (const auto& [lo, hi] : inst.box) box.push_back(json::array({lo, hi}));
  j["box"] = box;
  return j.dump(2);
}

}  // namespace cba
