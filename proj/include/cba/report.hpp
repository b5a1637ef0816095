// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "cba/bestapprox.hpp"
#include "cba/instance.hpp"

namespace cba {

using json = nlohmann::json;

struct ReportOptions {
  int anchor = 0;
  std::uint64_t seed = 20240801;
  int n_dirs = 360;
  double tol_active = kTolActive;
};

// Numeric payloads carry a provenance tag ("exact" | "sampled"); report
// validation rejects any bare number.
json tagged(double v, const std::string& prov);
json tagged(const Vec& v, const std::string& prov);
json tagged(const std::vector<Vec>& vs, const std::string& prov);

// Walks the report; every number must sit beneath a "value" key whose parent
// also carries "provenance". Throws InputError on the first violation.
void validate_report(const json& report);

// Canonical serialization: nlohmann objects are key-sorted maps, so dump()
// is already byte-stable; this wraps validation plus dump.
std::string canonical_dump(const json& report, int indent = 2);

// One report per CLI command. Each returns the report body; verdict-negative
// outcomes (per the exit-code convention) are signaled through *positive.
json report_inspect(const Instance& inst, const ReportOptions& opt, bool* positive);
json report_cones(const Instance& inst, const ReportOptions& opt, bool* positive);
json report_cq(const Instance& inst, const ReportOptions& opt, bool* positive);
json report_project(const Instance& inst, const ReportOptions& opt, const Vec& x, bool* positive);
json report_certify(const Instance& inst, const ReportOptions& opt, const Vec& x, bool* positive);
json report_chip(const Instance& inst, const ReportOptions& opt, bool* positive);
json report_audit(const Instance& inst, const ReportOptions& opt, bool* positive);

// Shared sub-builders (also used by the fixture battery).
json subdiff_json(const Instance& inst, const Vec& xbar, const ReportOptions& opt);
std::string render_report_text(const json& report);

}  // namespace cba
