// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#include "cba/report.hpp"

#include <sstream>

namespace cba {
namespace {

json cone_fg_json(const ConeFG& c, const std::string& prov) {
  return json{{"rays", tagged(c.rays, prov)}};
}

json cone_h_json(const ConeH& c, const std::string& prov) {
  return json{{"normals", tagged(c.normals, prov)}};
}

json header(const Instance& inst, const std::string& command, const ReportOptions& opt) {
  json j;
  j["instance"] = inst.id.empty() ? "unnamed" : inst.id;
  j["command"] = command;
  j["seed"] = tagged(static_cast<double>(opt.seed), "exact");
  j["tolerances"] = json{{"active", tagged(opt.tol_active, "exact")},
                         {"lp", tagged(kTolLP, "exact")},
                         {"certificate_exact", tagged(kTolCertExact, "exact")},
                         {"certificate_sampled", tagged(kTolCertSampled, "exact")}};
  j["sampler"] = json{{"n_dirs", tagged(static_cast<double>(opt.n_dirs), "exact")},
                      {"note", "contingent acceptance allows perturbations within 10*alpha; "
                               "finite ladders can only falsify limit statements"}};
  return j;
}

const AnchorSpec& anchor_of(const Instance& inst, const ReportOptions& opt) {
  if (opt.anchor < 0 || opt.anchor >= static_cast<int>(inst.anchors.size()))
    throw InputError("anchor index out of range");
  return inst.anchors[static_cast<std::size_t>(opt.anchor)];
}

json certificate_json(const Instance& inst, const Certificate& cert) {
  std::string prov = cert.exact_subdiffs ? "exact" : "sampled";
  json j;
  j["found"] = true;
  j["lambda"] = tagged(Vec(cert.lambda.begin(), cert.lambda.end()), prov);
  j["eta"] = tagged(cert.eta, prov);
  json inert = json::array();
  for (char c : cert.eta_inert) inert.push_back(static_cast<bool>(c));
  j["eta_inert"] = inert;
  j["residual_complementary_slackness"] = tagged(cert.residual_cs, prov);
  j["residual_membership"] = tagged(cert.residual_membership, prov);
  (void)inst;
  return j;
}

}  // namespace

json tagged(double v, const std::string& prov) {
  return json{{"provenance", prov}, {"value", v}};
}

json tagged(const Vec& v, const std::string& prov) {
  return json{{"provenance", prov}, {"value", v}};
}

json tagged(const std::vector<Vec>& vs, const std::string& prov) {
  json arr = json::array();
  for (const Vec& v : vs) arr.push_back(v);
  return json{{"provenance", prov}, {"value", arr}};
}

namespace {

void validate_node(const json& node, bool inside_value, const std::string& path) {
  if (node.is_number()) {
    if (!inside_value)
      throw InputError("report validation: untagged number at " + path);
    return;
  }
  if (node.is_object()) {
    bool has_value = node.contains("value");
    bool has_prov = node.contains("provenance") && node["provenance"].is_string();
    for (const auto& [key, child] : node.items()) {
      bool child_inside = inside_value || (key == "value" && has_prov);
      if (key == "value" && has_value && !has_prov && !inside_value)
        throw InputError("report validation: value without provenance at " + path);
      validate_node(child, child_inside, path + "/" + key);
    }
    return;
  }
  if (node.is_array()) {
    int i = 0;
    for (const auto& child : node) validate_node(child, inside_value, path + "/" + std::to_string(i++));
  }
}

}  // namespace

void validate_report(const json& report) { validate_node(report, false, ""); }

std::string canonical_dump(const json& report, int indent) {
  validate_report(report);
  return report.dump(indent);
}

json subdiff_json(const Instance& inst, const Vec& xbar, const ReportOptions& opt) {
  json out = json::object();
  for (const ConstraintFn& fn : inst.constraints) {
    bool exact = false;
    PolytopeV P = subdiff_at(fn, xbar, opt.n_dirs, &exact);
    out[fn.name] = json{{"vertices", tagged(P.vertices, exact ? "exact" : "sampled")}};
  }
  return out;
}

json report_inspect(const Instance& inst, const ReportOptions& opt, bool* positive) {
  const AnchorSpec& a = anchor_of(inst, opt);
  json j = header(inst, "inspect", opt);
  json aj;
  aj["xbar"] = tagged(a.xbar, "exact");
  Vec gv;
  for (const ConstraintFn& fn : inst.constraints) gv.push_back(fn.eval(a.xbar));
  aj["g_values"] = tagged(gv, "exact");
  json act = json::array();
  for (std::size_t k : active_set(inst.constraints, a.xbar, opt.tol_active))
    act.push_back(inst.constraints[k].name);
  aj["active_set"] = act;
  aj["subdifferentials"] = subdiff_json(inst, a.xbar, opt);
  InstanceValidation v = validate_instance(inst);
  if (!v.notes.empty()) aj["validation_notes"] = v.notes;
  j["anchor"] = aj;
  if (positive) *positive = true;
  return j;
}

json report_cones(const Instance& inst, const ReportOptions& opt, bool* positive) {
  const AnchorSpec& a = anchor_of(inst, opt);
  json j = header(inst, "cones", opt);
  bool exact = false;
  std::vector<PolytopeV> subdiffs =
      active_subdiffs_at(inst, a.xbar, opt.n_dirs, &exact, opt.tol_active);
  std::string prov = exact ? "exact" : "sampled";
  ConeH D = build_D(subdiffs, inst.n);
  ConeFG M = build_M(subdiffs, inst.n);
  json aj;
  aj["xbar"] = tagged(a.xbar, "exact");
  aj["D"] = cone_h_json(D, prov);
  aj["D_rays"] = cone_fg_json(rays_of(D, inst.n), prov);
  aj["M"] = cone_fg_json(M, prov);
  aj["M_polar"] = cone_h_json(polar_fg(M), prov);
  ConeSampleReport T =
      contingent_cone_sample(inst.oracle_feasible(kTolSampling), a.xbar, inst.n == 1 ? 2 : opt.n_dirs);
  aj["T_sampled"] = json{{"accepted", tagged(static_cast<double>(T.n_accepted), "sampled")},
                         {"hull", cone_fg_json(T.hull, "sampled")}};
  aj["d_equals_sampled_t"] = cones_equal(D, T.hull, inst.n, 1e-9);
  j["anchor"] = aj;
  if (positive) *positive = true;
  return j;
}

json report_cq(const Instance& inst, const ReportOptions& opt, bool* positive) {
  const AnchorSpec& a = anchor_of(inst, opt);
  json j = header(inst, "cq", opt);
  bool exact = false;
  std::vector<PolytopeV> subdiffs =
      active_subdiffs_at(inst, a.xbar, opt.n_dirs, &exact, opt.tol_active);
  std::string prov = exact ? "exact" : "sampled";

  NrcqResult nrcq = check_nrcq(subdiffs, inst.n);
  json nj;
  nj["holds"] = nrcq.holds;
  nj["margin"] = tagged(std::isfinite(nrcq.margin) ? nrcq.margin : 1e300, prov);
  if (nrcq.witness) nj["witness"] = tagged(*nrcq.witness, prov);
  j["nrcq"] = nj;

  FeasibilityOracle kt = inst.oracle_feasible(kTolSampling);
  ConeSampleReport T = contingent_cone_sample(kt, a.xbar, inst.n == 1 ? 2 : opt.n_dirs);
  NacqResult nacq = check_nacq(build_D(subdiffs, inst.n), T, kt);
  json qj;
  qj["holds"] = nacq.holds;
  qj["d_rays"] = tagged(nacq.d_rays, prov);
  json accepted = json::array();
  for (char c : nacq.ray_accepted) accepted.push_back(static_cast<bool>(c));
  qj["ray_accepted"] = accepted;
  j["nacq"] = qj;

  FeasibilityOracle k_loose = inst.oracle_K(kTolFeasible);
  ProbeResult ncv =
      nearly_convex_probe(k_loose, a.xbar, default_near_convexity_samples(inst, k_loose, opt.seed));
  json cj;
  cj["pass"] = ncv.pass;
  cj["note"] = "pass means no violation found on the t-ladder";
  if (ncv.witness) cj["witness"] = tagged(*ncv.witness, "sampled");
  j["nearly_convex"] = cj;

  if (positive) *positive = nacq.holds;
  return j;
}

json report_project(const Instance& inst, const ReportOptions& opt, const Vec& x,
                    bool* positive) {
  json j = header(inst, "project", opt);
  ProjectionResult r = project_feasible(inst, x);
  j["x"] = tagged(x, "exact");
  j["projection"] = tagged(r.point, r.exact ? "exact" : "sampled");
  j["tolerance"] = tagged(r.tol, "exact");
  if (positive) *positive = true;
  return j;
}

json report_certify(const Instance& inst, const ReportOptions& opt, const Vec& x,
                    bool* positive) {
  const AnchorSpec& a = anchor_of(inst, opt);
  json j = header(inst, "certify", opt);
  j["x"] = tagged(x, "exact");
  j["xbar"] = tagged(a.xbar, "exact");
  std::optional<Certificate> cert = find_certificate(inst, x, a.xbar, opt.n_dirs);
  if (!cert) {
    j["certificate"] = json{{"found", false}};
    if (positive) *positive = false;
    return j;
  }
  json cj = certificate_json(inst, *cert);
  bool pert = check_certificate_perturbation(inst, *cert, x, a.xbar);
  bool stat = check_certificate_stationarity(inst, *cert, x, a.xbar);
  cj["perturbation_check"] = pert;
  cj["stationarity_check"] = stat;
  j["certificate"] = cj;
  if (positive) *positive = pert && stat;
  return j;
}

json report_chip(const Instance& inst, const ReportOptions& opt, bool* positive) {
  const AnchorSpec& a = anchor_of(inst, opt);
  json j = header(inst, "chip", opt);
  ChipResult r = check_strong_chip(inst, a.xbar, opt.seed);
  json cj;
  cj["holds"] = r.holds;
  cj["lhs"] = cone_fg_json(r.lhs, r.lhs_provenance);
  cj["rhs"] = cone_fg_json(r.rhs, r.rhs_provenance);
  cj["lhs_provenance"] = r.lhs_provenance;
  cj["rhs_provenance"] = r.rhs_provenance;
  if (!r.note.empty()) cj["note"] = r.note;
  j["strong_chip"] = cj;
  if (positive) *positive = r.holds;
  return j;
}

json report_audit(const Instance& inst, const ReportOptions& opt, bool* positive) {
  const AnchorSpec& a = anchor_of(inst, opt);
  json j = header(inst, "audit", opt);

  DualConeAudit dca = audit_dual_cones(inst, a.xbar, opt.seed, opt.n_dirs);
  json tj;
  tj["nearly_convex"] = dca.nearly_convex.pass;
  if (dca.nearly_convex.witness) tj["nearly_convex_witness"] = tagged(*dca.nearly_convex.witness, "sampled");
  tj["nacq"] = dca.nacq;
  tj["sampled_t_subset_d"] = dca.t_subset_d;
  tj["m_in_polar_k"] = dca.m_in_polar_k;
  tj["m_in_polar_ktilde"] = dca.m_in_polar_ktilde;
  tj["polar_k_in_m"] = dca.polar_k_in_m;
  tj["polar_ktilde_in_m"] = dca.polar_ktilde_in_m;
  tj["dual_cone_identity_k"] = dca.identity_k;
  tj["dual_cone_identity_ktilde"] = dca.identity_ktilde;
  tj["M"] = cone_fg_json(dca.M, "exact");
  if (!dca.notes.empty()) tj["notes"] = dca.notes;
  j["dual_cone_audit"] = tj;

  EquivalenceAudit eq = equivalence_audit(inst, a.xbar, a.xs, opt.seed);
  json ej;
  ej["nearly_convex"] = eq.nearly_convex.pass;
  ej["nacq"] = eq.nacq;
  ej["ktilde_convexity_not_falsified"] = eq.ktilde_convex.pass;
  json rows = json::array();
  for (const EquivalenceRow& row : eq.rows) {
    json rj;
    rj["x"] = tagged(row.x, "exact");
    rj["projection_at_anchor"] = row.projection_here;
    rj["certificate_perturbation"] = row.certificate_ok;
    rj["stationarity"] = row.stationarity_ok;
    rj["agree"] = row.agree;
    if (row.cert) rj["certificate"] = certificate_json(inst, *row.cert);
    rows.push_back(rj);
  }
  ej["rows"] = rows;
  ej["all_agree"] = eq.all_agree;
  ej["strong_chip"] = eq.chip.holds;
  ej["chip_implied_by_hypotheses"] = eq.chip_implied_by_hypotheses;
  ej["defect"] = eq.defect;
  if (!eq.notes.empty()) ej["notes"] = eq.notes;
  j["equivalence"] = ej;

  bool ok = eq.all_agree && !eq.defect && eq.chip_implied_by_hypotheses && dca.identity_k &&
            dca.identity_ktilde;
  if (positive) *positive = ok;
  return j;
}

namespace {

void render_node(const json& node, std::ostringstream& out, int depth) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (node.is_object()) {
    if (node.contains("value") && node.contains("provenance")) {
      out << node["value"].dump() << "  [" << node["provenance"].get<std::string>() << "]";
      return;
    }
    out << "\n";
    for (const auto& [key, child] : node.items()) {
      out << pad << key << ": ";
      render_node(child, out, depth + 1);
      if (!out.str().empty() && out.str().back() != '\n') out << "\n";
    }
    return;
  }
  out << node.dump();
}

}  // namespace

std::string render_report_text(const json& report) {
  std::ostringstream out;
  render_node(report, out, 0);
  return out.str();
}

}  // namespace cba
