// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "cba/report.hpp"

namespace cba {

// A built-in worked example: the instance plus an expected-value block that
// pins the values the tool must reproduce. Expected blocks are data so a
// perturbed copy (via --fixtures-dir) flips the comparison.
struct Fixture {
  std::string id;
  std::string instance_json;
  std::string expected_json;
};

const std::vector<Fixture>& builtin_fixtures();

struct FixtureOutcome {
  std::string id;
  bool pass = true;
  std::vector<std::string> mismatches;  // each names the fixture and the path
  json observed;
};

// Runs the full battery (inspect, reconstruction, cones, cq, chip, audit,
// per-query project/certify) and compares the expected block against it.
FixtureOutcome run_fixture(const Fixture& fx);

// The observed battery alone (reused by tests).
json fixture_battery(const Instance& inst, const ReportOptions& opt);

}  // namespace cba
