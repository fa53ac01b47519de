// Copyright 2026 The weakctx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line frontend. Kept out of the library include tree because it
// pulls in nlohmann/json and CLI11; the tests include it directly.

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "weakctx.hpp"

namespace weakctx::cli {

using nlohmann::json;

enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2 };

// ---------------------------------------------------------------------------
// Scenario files.

inline Complex parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ValidationError("scenario: complex numbers must be [re, im]");
}

inline json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline CVector parse_vector(const json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string("scenario: '") + what + "' must be an array");
  CVector out;
  for (const auto& e : j) out.push_back(parse_complex(e));
  return out;
}

inline Operator parse_matrix(const json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string("scenario: '") + what + "' must be a matrix");
  std::vector<CVector> rows;
  for (const auto& r : j) rows.push_back(parse_vector(r, what));
  return Operator::from_rows(rows);
}

inline json matrix_json(const Operator& a) {
  json rows = json::array();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < a.dim(); ++j) row.push_back(complex_json(a(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Parsed scenario file. `pi` is either a matrix (array of rows of
/// [re, im]) or a list of basis indices spanning the projector.
struct ScenarioFile {
  std::size_t dimension = 0;
  State psi = State::basis(2, 0);
  State phi = State::basis(2, 0);
  std::optional<Operator> pi;
  std::optional<double> sigma;
  std::optional<Operator> observable;

  Scenario scenario(std::optional<double> sigma_override) const {
    if (!pi) throw ValidationError("scenario: missing 'pi'");
    const std::optional<double> s = sigma_override ? sigma_override : sigma;
    if (!s) throw ValidationError("scenario: no sigma given (file or --sigma)");
    return Scenario::make(psi, phi, *pi, *s);
  }
};

inline ScenarioFile parse_scenario(const json& j) {
  if (!j.is_object()) throw ValidationError("scenario: top level must be an object");
  ScenarioFile f;
  if (!j.contains("psi") || !j.contains("phi")) throw ValidationError("scenario: 'psi' and 'phi' are required");
  f.psi = State::from_amplitudes(parse_vector(j.at("psi"), "psi"));
  f.phi = State::from_amplitudes(parse_vector(j.at("phi"), "phi"));
  f.dimension = f.psi.dim();
  if (j.contains("dimension")) {
    if (!j.at("dimension").is_number_unsigned()) throw ValidationError("scenario: 'dimension' must be a positive integer");
    f.dimension = j.at("dimension").get<std::size_t>();
  }
  if (f.psi.dim() != f.dimension || f.phi.dim() != f.dimension) {
    throw ValidationError("scenario: state dimension does not match 'dimension'");
  }
  if (j.contains("pi")) {
    const json& p = j.at("pi");
    if (p.is_array() && std::all_of(p.begin(), p.end(), [](const json& e) { return e.is_number_integer(); })) {
      Operator proj(f.dimension);
      for (const auto& e : p) {
        const auto k = e.get<long long>();
        if (k < 0 || static_cast<std::size_t>(k) >= f.dimension) throw ValidationError("scenario: basis index out of range");
        proj(static_cast<std::size_t>(k), static_cast<std::size_t>(k)) = 1.0;
      }
      f.pi = proj;
    } else {
      f.pi = parse_matrix(p, "pi");
    }
    if (f.pi->dim() != f.dimension) throw ValidationError("scenario: 'pi' dimension mismatch");
    if (!validate_projector(*f.pi)) throw ValidationError("scenario: 'pi' is not a projector");
  }
  if (j.contains("sigma")) {
    if (!j.at("sigma").is_number()) throw ValidationError("scenario: 'sigma' must be a number");
    f.sigma = j.at("sigma").get<double>();
    if (!(*f.sigma > 0.0)) throw ValidationError("scenario: 'sigma' must be positive");
  }
  if (j.contains("observable")) {
    f.observable = parse_matrix(j.at("observable"), "observable");
    if (f.observable->dim() != f.dimension) throw ValidationError("scenario: 'observable' dimension mismatch");
  }
  return f;
}

inline ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("scenario '" + path + "': " + e.what());
  }
  return parse_scenario(j);
}

// ---------------------------------------------------------------------------
// Reports.

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json estimate_json(const Estimate& e) {
  return {{"value", e.value}, {"std_error", e.std_error}, {"n_effective", e.n_effective}};
}

inline json weakvalue_report(const ScenarioFile& f) {
  const bool has_observable = f.observable.has_value();
  if (!has_observable && !f.pi) throw ValidationError("weakvalue: scenario needs 'observable' or 'pi'");
  const Operator& a = has_observable ? *f.observable : *f.pi;
  const AnomalyReport rep = detect_anomaly(a, f.psi, f.phi);
  json projectors = json::array();
  for (const auto& p : rep.projectors) {
    projectors.push_back({{"eigenvalue", p.eigenvalue}, {"weak_value", complex_json(p.weak.value)}});
  }
  json out = {{"observable", has_observable ? "observable" : "pi"},
              {"p_phi", post_selection_probability(f.psi, f.phi)},
              {"weak_value", complex_json(rep.weak_value)},
              {"eigen_range", json::array({rep.a_min, rep.a_max})},
              {"anomalous", rep.anomalous},
              {"projectors", projectors},
              {"witness", nullptr}};
  if (rep.witness) {
    out["witness"] = {{"eigenvalue", rep.witness->eigenvalue},
                      {"weak_value", complex_json(rep.witness->weak.value)},
                      {"projector", matrix_json(rep.witness->projector)}};
  }
  return out;
}

inline json measure_report(const Scenario& s) {
  const PointerMeasurement m = disturbance(s);
  return {{"sigma", m.sigma},
          {"normalization_squared", m.normalization_squared},
          {"delta", m.delta},
          {"p_d", m.p_d},
          {"E_d", matrix_json(m.e_d)},
          {"E_d_is_projector", validate_projector(m.e_d)},
          {"S", matrix_json(m.s)},
          {"decomposition_residual", max_norm_distance(m.s, m.decomposition(s.phi()))}};
}

inline json condition_json(const ConditionReport& r, double tol) {
  json holds = json::array();
  for (double v : r.margins) holds.push_back(v > 0.0);
  return {{"sigma", r.sigma},
          {"p_phi", r.p_phi},
          {"p_d", r.p_d},
          {"p_minus", r.p_minus},
          {"p_minus_conditional", r.p_minus_conditional},
          {"threshold", r.threshold},
          {"noise_residual", r.noise_residual},
          {"disturbance_residual", r.disturbance_residual},
          {"residual_tol", tol},
          {"margins", r.margins},
          {"holds", holds},
          {"all_hold", r.all_hold}};
}

inline json bound_report(const NCBoundProblem& problem, const NCBoundResult& r) {
  json classes = json::array();
  for (std::size_t c = 0; c < r.certificate.classes.size(); ++c) {
    classes.push_back({{"pi", r.certificate.classes[c].pi ? 1 : 0},
                       {"phi", r.certificate.classes[c].phi ? 1 : 0},
                       {"weight", r.certificate.weights[c]},
                       {"responses", r.certificate.responses[c]}});
  }
  json out = {{"bins", problem.num_bins()},
              {"p_phi", problem.p_phi},
              {"p_d", problem.p_d},
              {"ontic_mass", problem.mass == OnticMass::kNormalized ? "normalized" : "proof"},
              {"lp_optimum", r.lp_optimum},
              {"analytic_bound", r.analytic_bound},
              {"quantum_p_minus", nullptr},
              {"gap_to_quantum", nullptr},
              {"certificate", {{"value", r.certificate_value}, {"bin_edges", problem.edges}, {"classes", classes}}},
              {"pivots", r.pivots}};
  if (r.quantum_p_minus) out["quantum_p_minus"] = *r.quantum_p_minus;
  if (r.gap_to_quantum) out["gap_to_quantum"] = *r.gap_to_quantum;
  return out;
}

inline json xcheck_report(const Scenario& s, const PointerQuadrature& q) {
  const PMinus pm = p_minus(s);
  const double pm_quad = p_minus_quadrature(s, q);
  const PointerMeasurement m = disturbance(s);
  const Operator s_quad = s_quadrature(s, q);
  const double weight_quad = post_selection_weight_quadrature(s, q);
  const Operator completeness = povm_completeness_quadrature(s, q);

  const double sigma = s.sigma();
  const double lo = -q.tail_sigmas * sigma;
  const ABCIntegrals k = abc(sigma);
  const double a_quad = integrate([&](double x) { return noise_density(x - 1.0, sigma); }, lo - 1.0, 0.0, q.quadrature);
  const double b_quad = integrate([&](double x) { return noise_density(x, sigma); }, lo, 0.0, q.quadrature);
  const double c_quad = integrate(
      [&](double x) { return std::sqrt(noise_density(x - 1.0, sigma) * noise_density(x, sigma)); }, lo, 0.0,
      q.quadrature);

  return {{"sigma", sigma},
          {"tol", q.quadrature.abs_tol},
          {"tail_sigmas", q.tail_sigmas},
          {"p_minus_exact", pm.exact},
          {"p_minus_quadrature", pm_quad},
          {"p_minus_residual", std::abs(pm.exact - pm_quad)},
          {"post_selection_weight_exact", pm.post_selection_weight / s.p_phi()},
          {"post_selection_weight_quadrature", weight_quad},
          {"post_selection_weight_residual", std::abs(pm.post_selection_weight / s.p_phi() - weight_quad)},
          {"S_residual", max_norm_distance(m.s, s_quad)},
          {"completeness_residual", max_norm_distance(completeness, Operator::identity(s.dim()))},
          {"A_residual", std::abs(k.a - a_quad)},
          {"B_residual", std::abs(k.b - b_quad)},
          {"C_residual", std::abs(k.c - c_quad)}};
}

inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ValidationError("--sigma-grid: cannot parse '" + item + "'");
    }
    if (used != item.size()) throw ValidationError("--sigma-grid: cannot parse '" + item + "'");
    grid.push_back(v);
  }
  return grid;
}

// ---------------------------------------------------------------------------

/// Runs one CLI invocation. Reports go to `out`, diagnostics to `err`.
/// Exit codes: 0 success, 1 validation or usage error, 2 numerical failure.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weak measurements, anomalous weak values and noncontextual bounds", "weakctx"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<double> sigma;
  std::string sigma_grid;
  int bins = 200;
  std::size_t n = 100000;
  std::uint64_t seed = 1;
  std::size_t shards = 1;
  std::optional<double> tol;
  double tail_sigmas = 12.0;
  std::string format;
  std::string ontic_mass = "proof";

  auto add_scenario = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  };
  auto add_sigma = [&](CLI::App* sub) { sub->add_option("--sigma", sigma, "Pointer width (overrides the file)"); };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* weakvalue = app.add_subcommand("weakvalue", "Weak value of the observable (or Pi) and anomaly report");
  add_scenario(weakvalue);
  add_format(weakvalue);

  auto* measure = app.add_subcommand("measure", "Pointer overlap, disturbance probability, E_d and S");
  add_scenario(measure);
  add_sigma(measure);
  add_format(measure);

  auto* check = app.add_subcommand("check", "Evaluate the four contextuality conditions");
  add_scenario(check);
  add_sigma(check);
  check->add_option("--tol", tol, "Residual tolerance for the decomposition conditions");
  add_format(check);

  auto* scan = app.add_subcommand("scan", "Evaluate the conditions over a grid of pointer widths");
  add_scenario(scan);
  scan->add_option("--sigma-grid", sigma_grid, "Comma-separated increasing sigma values")->required();
  scan->add_option("--tol", tol, "Residual tolerance for the decomposition conditions");
  add_format(scan);

  auto* bound = app.add_subcommand("bound", "LP bound on p_minus over noncontextual models");
  add_scenario(bound);
  add_sigma(bound);
  bound->add_option("--bins", bins, "Number of pointer bins");
  bound->add_option("--tail-sigmas", tail_sigmas, "Domain half-width beyond [0, 1] in units of sigma");
  bound->add_option("--ontic-mass", ontic_mass, "Weight constraint on classes failing post-selection")
      ->check(CLI::IsMember({"proof", "normalized"}));
  add_format(bound);

  auto* sample_cmd = app.add_subcommand("sample", "Monte Carlo estimates (json) or raw events (csv)");
  add_scenario(sample_cmd);
  add_sigma(sample_cmd);
  sample_cmd->add_option("--n", n, "Number of runs");
  sample_cmd->add_option("--seed", seed, "64-bit seed");
  sample_cmd->add_option("--shards", shards, "Parallel shards (part of the reproducibility key)");
  add_format(sample_cmd);

  auto* xcheck = app.add_subcommand("xcheck", "Closed forms against direct quadrature");
  add_scenario(xcheck);
  add_sigma(xcheck);
  xcheck->add_option("--tol", tol, "Absolute quadrature tolerance per panel");
  xcheck->add_option("--tail-sigmas", tail_sigmas, "Domain half-width beyond [0, 1] in units of sigma");
  add_format(xcheck);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kValidation;
  }

  auto emit_json = [&](const json& j) { out << j.dump(2) << "\n"; };
  auto require_json = [&](const char* cmd) {
    if (!format.empty() && format != "json") throw ValidationError(std::string(cmd) + ": only --format json is supported");
  };

  try {
    const ScenarioFile file = load_scenario(scenario_path);

    if (weakvalue->parsed()) {
      require_json("weakvalue");
      emit_json(weakvalue_report(file));
    } else if (measure->parsed()) {
      require_json("measure");
      emit_json(measure_report(file.scenario(sigma)));
    } else if (check->parsed()) {
      require_json("check");
      ConditionOptions opts;
      if (tol) opts.residual_tol = *tol;
      emit_json(condition_json(check_conditions(file.scenario(sigma), opts), opts.residual_tol));
    } else if (scan->parsed()) {
      ConditionOptions opts;
      if (tol) opts.residual_tol = *tol;
      if (!file.pi) throw ValidationError("scan: scenario needs 'pi'");
      const ScanResult r = sigma_scan(file.psi, file.phi, *file.pi, parse_grid(sigma_grid), opts);
      if (format == "json") {
        json points = json::array();
        for (const auto& p : r.points) points.push_back(condition_json(p.report, opts.residual_tol));
        json j = {{"points", points}, {"sigma_threshold", nullptr}};
        if (r.sigma_threshold) j["sigma_threshold"] = *r.sigma_threshold;
        emit_json(j);
      } else {
        out << "sigma,p_minus,p_d,threshold,margin,all_hold\n";
        for (const auto& p : r.points) {
          out << fmt_double(p.sigma) << ',' << fmt_double(p.report.p_minus) << ',' << fmt_double(p.report.p_d) << ','
              << fmt_double(p.report.threshold) << ',' << fmt_double(p.report.margins[3]) << ','
              << (p.report.all_hold ? "true" : "false") << '\n';
        }
      }
    } else if (bound->parsed()) {
      require_json("bound");
      NCBoundProblem problem = build_nc_problem(file.scenario(sigma), bins, tail_sigmas);
      problem.mass = ontic_mass == "normalized" ? OnticMass::kNormalized : OnticMass::kProofRelaxation;
      emit_json(bound_report(problem, nc_bound_lp(problem)));
    } else if (sample_cmd->parsed()) {
      const Scenario s = file.scenario(sigma);
      const SampleBatch batch = sample(s, n, seed, shards);
      if (format == "csv") {
        write_csv(batch, out);
      } else {
        const PMinus pm = p_minus(s);
        emit_json({{"n", batch.size()},
                   {"seed", seed},
                   {"shards", shards},
                   {"p_minus", estimate_json(estimate_p_minus(batch, s))},
                   {"p_minus_conditional", estimate_json(estimate_p_minus_conditional(batch))},
                   {"pass_rate", estimate_json(estimate_pass_rate(batch))},
                   {"closed_form",
                    {{"p_minus", pm.exact},
                     {"p_minus_conditional", pm.conditional},
                     {"pass_rate", pm.post_selection_weight}}}});
      }
    } else if (xcheck->parsed()) {
      require_json("xcheck");
      PointerQuadrature q;
      q.tail_sigmas = tail_sigmas;
      if (tol) q.quadrature.abs_tol = *tol;
      emit_json(xcheck_report(file.scenario(sigma), q));
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}

}  // namespace weakctx::cli
