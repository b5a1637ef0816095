// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: loads JSON instances, runs the analyses, and emits
// human-readable or canonical-JSON reports.
//
// Exit codes: 0 success / verdict positive, 1 verdict negative (a CQ fails,
// no certificate, a fixture mismatch), 2 input or schema error, 3 numerical
// failure or inconclusive sampling.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cba/fixtures.hpp"
#include "cba/report.hpp"

namespace fs = std::filesystem;
using cba::json;

namespace {

struct CommonFlags {
  std::string instance_path;
  int anchor = 0;
  std::string x_text;
  double tol = cba::kTolActive;
  int dirs = 360;
  std::uint64_t seed = 20240801;
  bool as_json = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_instance, bool needs_x) {
  auto* o = cmd->add_option("--instance", f.instance_path, "instance JSON file or built-in id");
  if (needs_instance) o->required();
  cmd->add_option("--anchor", f.anchor, "anchor index (default 0)");
  auto* xo = cmd->add_option("--x", f.x_text, "query point, comma-joined decimals");
  if (needs_x) xo->required();
  cmd->add_option("--tol", f.tol, "active-set / feasibility tolerance");
  cmd->add_option("--dirs", f.dirs, "sampling directions");
  cmd->add_option("--seed", f.seed, "random seed for sampled verdicts");
  cmd->add_flag("--json", f.as_json, "emit canonical JSON on stdout");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cba::InputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cba::Instance load(const CommonFlags& f) {
  // A plain file path wins; otherwise fall back to a built-in fixture id so
  // `--instance ex42` works without materializing files. JSON parse errors
  // surface with nlohmann's line/column diagnostic.
  if (fs::exists(f.instance_path))
    return cba::load_instance_json(read_file(f.instance_path),
                                   fs::path(f.instance_path).stem().string());
  std::string stem = fs::path(f.instance_path).stem().string();
  for (const cba::Fixture& fx : cba::builtin_fixtures())
    if (fx.id == f.instance_path || fx.id == stem)
      return cba::load_instance_json(fx.instance_json, fx.id);
  throw cba::InputError("no such instance file or built-in fixture: " + f.instance_path);
}

cba::ReportOptions options_of(const CommonFlags& f) {
  cba::ReportOptions opt;
  opt.anchor = f.anchor;
  opt.seed = f.seed;
  opt.n_dirs = f.dirs;
  opt.tol_active = f.tol;
  return opt;
}

cba::Vec parse_x(const std::string& text, int dim) {
  cba::Vec x = cba::parse_point_key(text);
  if (static_cast<int>(x.size()) != dim)
    throw cba::InputError("--x has dimension " + std::to_string(x.size()) + ", instance needs " +
                          std::to_string(dim));
  return x;
}

int emit(const json& report, bool as_json, bool positive) {
  if (as_json)
    std::cout << cba::canonical_dump(report) << "\n";
  else
    std::cout << cba::render_report_text(report);
  return positive ? 0 : 1;
}

int run_paper_examples(const std::string& fixtures_dir, const std::string& dump_dir,
                       bool as_json) {
  if (!dump_dir.empty()) {
    fs::create_directories(dump_dir);
    for (const cba::Fixture& fx : cba::builtin_fixtures()) {
      json j;
      j["instance"] = json::parse(fx.instance_json);
      j["expected"] = json::parse(fx.expected_json);
      std::ofstream out(fs::path(dump_dir) / (fx.id + ".json"));
      out << j.dump(2) << "\n";
    }
    std::cout << "wrote " << cba::builtin_fixtures().size() << " fixtures to " << dump_dir
              << "\n";
    return 0;
  }

  std::vector<cba::Fixture> fixtures;
  if (fixtures_dir.empty()) {
    fixtures = cba::builtin_fixtures();
  } else {
    for (const auto& entry : fs::directory_iterator(fixtures_dir)) {
      if (entry.path().extension() != ".json") continue;
      json j = json::parse(read_file(entry.path().string()));
      fixtures.push_back(
          {entry.path().stem().string(), j.at("instance").dump(), j.at("expected").dump()});
    }
    std::sort(fixtures.begin(), fixtures.end(),
              [](const cba::Fixture& a, const cba::Fixture& b) { return a.id < b.id; });
    if (fixtures.empty()) throw cba::InputError("no fixtures found in " + fixtures_dir);
  }

  bool all_pass = true;
  json summary = json::array();
  for (const cba::Fixture& fx : fixtures) {
    cba::FixtureOutcome outcome = cba::run_fixture(fx);
    all_pass = all_pass && outcome.pass;
    json fj;
    fj["fixture"] = outcome.id;
    fj["pass"] = outcome.pass;
    if (!outcome.mismatches.empty()) fj["mismatches"] = outcome.mismatches;
    summary.push_back(fj);
    if (!as_json) {
      std::cout << (outcome.pass ? "[PASS] " : "[FAIL] ") << outcome.id << "\n";
      for (const std::string& m : outcome.mismatches) std::cout << "       " << m << "\n";
    }
  }
  if (as_json) std::cout << json{{"fixtures", summary}, {"all_pass", all_pass}}.dump(2) << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lagrange-multiplier certificates for constrained best approximation"};
  app.require_subcommand(1);

  CommonFlags f;
  std::string fixtures_dir, dump_dir;

  CLI::App* inspect = app.add_subcommand("inspect", "constraint values, active set, subdifferentials");
  add_common(inspect, f, true, false);
  CLI::App* cones = app.add_subcommand("cones", "D, M, sampled contingent cone, polars");
  add_common(cones, f, true, false);
  CLI::App* cq = app.add_subcommand("cq", "constraint-qualification verdicts");
  add_common(cq, f, true, false);
  CLI::App* project = app.add_subcommand("project", "projection onto the feasible set");
  add_common(project, f, true, true);
  CLI::App* certify = app.add_subcommand("certify", "multiplier certificate for a query point");
  add_common(certify, f, true, true);
  CLI::App* chip = app.add_subcommand("chip", "strong CHIP verdict");
  add_common(chip, f, true, false);
  CLI::App* audit = app.add_subcommand("audit", "equivalence and dual-cone audits");
  add_common(audit, f, true, false);
  CLI::App* paper = app.add_subcommand("paper-examples", "replay the built-in worked examples");
  paper->add_option("--fixtures-dir", fixtures_dir, "load fixtures from a directory instead");
  paper->add_option("--dump-fixtures", dump_dir, "write the built-in fixtures to a directory");
  paper->add_flag("--json", f.as_json, "emit canonical JSON on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (paper->parsed()) return run_paper_examples(fixtures_dir, dump_dir, f.as_json);

    cba::Instance inst = load(f);
    cba::ReportOptions opt = options_of(f);
    bool positive = true;
    json report;
    if (inspect->parsed()) report = cba::report_inspect(inst, opt, &positive);
    else if (cones->parsed()) report = cba::report_cones(inst, opt, &positive);
    else if (cq->parsed()) report = cba::report_cq(inst, opt, &positive);
    else if (project->parsed()) report = cba::report_project(inst, opt, parse_x(f.x_text, inst.n), &positive);
    else if (certify->parsed()) report = cba::report_certify(inst, opt, parse_x(f.x_text, inst.n), &positive);
    else if (chip->parsed()) report = cba::report_chip(inst, opt, &positive);
    else if (audit->parsed()) report = cba::report_audit(inst, opt, &positive);
    return emit(report, f.as_json, positive);
  } catch (const json::parse_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const cba::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const cba::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
