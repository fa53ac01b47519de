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

// Checks the four sufficient conditions for an anomalous weak-value
// experiment to rule out measurement-noncontextual, outcome-deterministic
// models, scans pointer widths for the regime where they hold, and bounds
// the negative-reading probability any such model can produce with a
// linear program over deterministic ontic classes.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "weakctx/errors.hpp"
#include "weakctx/hilbert.hpp"
#include "weakctx/numerics.hpp"
#include "weakctx/pointer.hpp"
#include "weakctx/simplex.hpp"

namespace weakctx {

struct ConditionOptions {
  // Residual allowed in the noise and disturbance decompositions.
  double residual_tol = 1e-10;
  // Pointer positions at which the noise decomposition is verified,
  // spread evenly over [-6 sigma, 1 + 6 sigma].
  int noise_probe_points = 41;
};

struct ConditionReport {
  double sigma = 0.0;
  double p_phi = 0.0;
  double p_d = 0.0;
  double p_minus = 0.0;
  double p_minus_conditional = 0.0;
  // 1/2 + p_d / p_phi
  double threshold = 0.0;
  double noise_residual = 0.0;
  double disturbance_residual = 0.0;
  // Condition k holds iff margins[k - 1] > 0.
  std::array<double, 4> margins{};
  bool all_hold = false;
};

/// Evaluates the four conditions for a scenario. Reports, never throws, for
/// a valid Scenario.
inline ConditionReport check_conditions(const Scenario& s, const ConditionOptions& opts = {}) {
  ConditionReport r;
  r.sigma = s.sigma();
  r.p_phi = s.p_phi();

  // Projector plus unbiased noise: M_x^dagger M_x against p_n(x-1) Pi + p_n(x) (I - Pi),
  // together with the median of p_n sitting at 0.
  double noise = idempotence_residual(s.pi());
  const int probes = std::max(2, opts.noise_probe_points);
  const double lo = -6.0 * s.sigma();
  const double hi = 1.0 + 6.0 * s.sigma();
  for (int k = 0; k < probes; ++k) {
    const double x = lo + (hi - lo) * k / (probes - 1);
    const Operator m = kraus(s, x);
    noise = std::max(noise, max_norm_distance(m.adjoint() * m, povm_element(s, x)));
  }
  noise = std::max(noise, std::abs(gaussian_mass(-std::numeric_limits<double>::infinity(), 0.0, 0.0, s.sigma()) - 0.5));
  r.noise_residual = noise;

  const PointerMeasurement m = disturbance(s);
  r.p_d = m.p_d;
  r.disturbance_residual = std::max(max_norm_distance(m.s, m.decomposition(s.phi())),
                                    std::max(idempotence_residual(m.e_d), m.e_d.is_hermitian() ? 0.0 : 1.0));

  const PMinus pm = p_minus(s);
  r.p_minus = pm.exact;
  r.p_minus_conditional = pm.conditional;
  r.threshold = 0.5 + r.p_d / r.p_phi;

  r.margins = {r.p_phi, opts.residual_tol - r.noise_residual, opts.residual_tol - r.disturbance_residual,
               r.p_minus - r.threshold};
  r.all_hold = std::all_of(r.margins.begin(), r.margins.end(), [](double v) { return v > 0.0; });
  return r;
}

struct ScanPoint {
  double sigma;
  ConditionReport report;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  // Smallest grid sigma at which every condition holds.
  std::optional<double> sigma_threshold;
};

inline ScanResult sigma_scan(const State& psi, const State& phi, const Operator& pi, const std::vector<double>& grid,
                             const ConditionOptions& opts = {}) {
  if (grid.empty()) throw ValidationError("sigma scan: empty grid");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw ValidationError("sigma scan: grid must be strictly increasing");
  }
  ScanResult out;
  out.points.reserve(grid.size());
  for (double sigma : grid) {
    const Scenario s = Scenario::make(psi, phi, pi, sigma);
    ConditionReport rep = check_conditions(s, opts);
    if (rep.all_hold && !out.sigma_threshold) out.sigma_threshold = sigma;
    out.points.push_back({sigma, std::move(rep)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Noncontextual bound.

/// A deterministic ontic class: the outcomes it assigns to the sharp
/// measurements {Pi, I - Pi} and {|phi><phi|, I - |phi><phi|}.
struct OnticClass {
  bool pi = false;
  bool phi = false;
};

inline std::vector<OnticClass> deterministic_classes() {
  return {{false, false}, {true, false}, {false, true}, {true, true}};
}

/// How the weight of the classes failing the post-selection is constrained.
enum class OnticMass {
  // Only bounded by 1, as in the analytic argument; the LP optimum is then
  // 1/2 + p_d / p_phi.
  kProofRelaxation,
  // Total weight 1, so the failing classes carry exactly 1 - p_phi. Gives
  // the sharper 1/2 + (1 - p_phi) p_d / p_phi.
  kNormalized,
};

struct NCBoundProblem {
  // Increasing bin edges, 0 among them.
  std::vector<double> edges;
  // Per-bin mass of the unshifted noise p_n(x) and the shifted noise p_n(x - 1).
  std::vector<double> unshifted_mass;
  std::vector<double> shifted_mass;
  double p_phi = 0.0;
  double p_d = 0.0;
  std::vector<OnticClass> classes = deterministic_classes();
  OnticMass mass = OnticMass::kProofRelaxation;
  // Quantum prediction to compare against, when known.
  std::optional<double> quantum_p_minus;

  std::size_t num_bins() const { return unshifted_mass.size(); }

  /// Bins lying entirely at x < 0.
  std::size_t negative_bins() const {
    std::size_t k = 0;
    while (k < num_bins() && edges[k + 1] <= 0.0) ++k;
    return k;
  }

  void validate() const {
    if (edges.size() < 2 || unshifted_mass.size() + 1 != edges.size() || shifted_mass.size() + 1 != edges.size()) {
      throw ValidationError("nc problem: bin edges and masses disagree in size");
    }
    for (std::size_t k = 1; k < edges.size(); ++k) {
      if (!(edges[k] > edges[k - 1])) throw ValidationError("nc problem: bin edges must increase");
    }
    if (std::find(edges.begin(), edges.end(), 0.0) == edges.end()) {
      throw ValidationError("nc problem: no bin edge at x = 0");
    }
    double sum0 = 0.0;
    double sum1 = 0.0;
    double neg0 = 0.0;
    for (std::size_t b = 0; b < num_bins(); ++b) {
      if (unshifted_mass[b] < 0.0 || shifted_mass[b] < 0.0) throw ValidationError("nc problem: negative mass");
      sum0 += unshifted_mass[b];
      sum1 += shifted_mass[b];
      if (b < negative_bins()) neg0 += unshifted_mass[b];
    }
    if (std::abs(sum0 - 1.0) > 1e-10 || std::abs(sum1 - 1.0) > 1e-10) {
      throw ValidationError("nc problem: noise masses do not sum to 1");
    }
    if (std::abs(neg0 - 0.5) > 1e-10) throw ValidationError("nc problem: unshifted noise median is not at 0");
    if (!(p_phi > 0.0 && p_phi <= 1.0)) throw ValidationError("nc problem: p_phi must lie in (0, 1]");
    if (!(p_d >= 0.0 && p_d <= 1.0)) throw ValidationError("nc problem: p_d must lie in [0, 1]");
    if (classes.empty()) throw ValidationError("nc problem: no ontic classes");
  }
};

/// Discretizes x over [-k sigma, 1 + k sigma] into n_bins bins with an edge
/// pinned at 0, splitting the bins between the two sides by length.
inline NCBoundProblem build_nc_problem(double sigma, double p_phi, double p_d, int n_bins, double tail_sigmas = 12.0) {
  if (n_bins < 4) throw ValidationError("nc problem: need at least 4 bins");
  if (!(sigma > 0.0)) throw ValidationError("nc problem: sigma must be positive");
  const double lo = -tail_sigmas * sigma;
  const double hi = 1.0 + tail_sigmas * sigma;
  const int n_neg = std::clamp(static_cast<int>(std::lround(n_bins * (-lo) / (hi - lo))), 1, n_bins - 1);
  const int n_pos = n_bins - n_neg;

  NCBoundProblem p;
  p.p_phi = p_phi;
  p.p_d = p_d;
  p.edges.reserve(n_bins + 1);
  for (int k = 0; k < n_neg; ++k) p.edges.push_back(lo + (0.0 - lo) * k / n_neg);
  p.edges.push_back(0.0);
  for (int k = 1; k <= n_pos; ++k) p.edges.push_back(k == n_pos ? hi : hi * k / n_pos);

  // The outermost bins absorb the Gaussian tails so each mass vector sums to 1.
  const double inf = std::numeric_limits<double>::infinity();
  for (int b = 0; b < n_bins; ++b) {
    const double a = b == 0 ? -inf : p.edges[b];
    const double z = b + 1 == n_bins ? inf : p.edges[b + 1];
    p.unshifted_mass.push_back(gaussian_mass(a, z, 0.0, sigma));
    p.shifted_mass.push_back(gaussian_mass(a, z, 1.0, sigma));
  }
  return p;
}

inline NCBoundProblem build_nc_problem(const Scenario& s, int n_bins, double tail_sigmas = 12.0) {
  NCBoundProblem p = build_nc_problem(s.sigma(), s.p_phi(), disturbance(s).p_d, n_bins, tail_sigmas);
  p.quantum_p_minus = p_minus(s).exact;
  return p;
}

/// Optimal class weights and per-bin responses p(S_b | class).
struct NCCertificate {
  std::vector<OnticClass> classes;
  std::vector<double> weights;
  std::vector<std::vector<double>> responses;
};

struct NCBoundResult {
  double lp_optimum = 0.0;
  // 1/2 + p_d / p_phi
  double analytic_bound = 0.0;
  std::optional<double> quantum_p_minus;
  std::optional<double> gap_to_quantum;
  // Objective recomputed from the certificate alone.
  double certificate_value = 0.0;
  NCCertificate certificate;
  std::size_t pivots = 0;
};

/// Maximizes the p_phi-normalized probability of a negative reading under
/// post-selection over all measurement-noncontextual models with outcome
/// determinism for the two sharp measurements.
///
/// Model: class weights w_c and responses s_c[b] to the post-selected
/// effect of bin b. Implementing E_b by ignoring the post-selection bounds
/// s_c[b] by p(E_b | c), which implementing it as a noisy Pi measurement
/// fixes to the shifted or unshifted noise mass. Implementing S as a mix
/// of the post-selection and E_d caps sum_b s_c[b] by (1 - p_d)[phi] + p_d.
/// The bilinear objective is linearized with t_c[b] = w_c s_c[b].
inline NCBoundResult nc_bound_lp(const NCBoundProblem& problem, const lp::SimplexOptions& opts = {}) {
  problem.validate();
  const std::size_t nc = problem.classes.size();
  const std::size_t nb = problem.num_bins();
  const std::size_t neg = problem.negative_bins();
  auto w = [](std::size_t c) { return c; };
  auto t = [nc, nb](std::size_t c, std::size_t b) { return nc + c * nb + b; };

  lp::LinearProgram prog(nc + nc * nb);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t b = 0; b < neg; ++b) prog.objective[t(c, b)] = 1.0 / problem.p_phi;

  for (std::size_t c = 0; c < nc; ++c) {
    const OnticClass& k = problem.classes[c];
    const auto& noise = k.pi ? problem.shifted_mass : problem.unshifted_mass;
    for (std::size_t b = 0; b < nb; ++b) {
      prog.add_row({{t(c, b), 1.0}, {w(c), -noise[b]}}, lp::Sense::kLessEqual, 0.0);
    }
    std::vector<std::pair<std::size_t, double>> total;
    total.reserve(nb + 1);
    for (std::size_t b = 0; b < nb; ++b) total.emplace_back(t(c, b), 1.0);
    total.emplace_back(w(c), -((k.phi ? 1.0 - problem.p_d : 0.0) + problem.p_d));
    prog.add_row(std::move(total), lp::Sense::kLessEqual, 0.0);
  }

  std::vector<std::pair<std::size_t, double>> passing;
  std::vector<std::pair<std::size_t, double>> failing;
  for (std::size_t c = 0; c < nc; ++c) (problem.classes[c].phi ? passing : failing).emplace_back(w(c), 1.0);
  if (passing.empty()) throw ValidationError("nc problem: no class passes the post-selection");
  prog.add_row(passing, lp::Sense::kEqual, problem.p_phi);
  if (problem.mass == OnticMass::kNormalized) {
    std::vector<std::pair<std::size_t, double>> all = passing;
    all.insert(all.end(), failing.begin(), failing.end());
    prog.add_row(std::move(all), lp::Sense::kEqual, 1.0);
  } else if (!failing.empty()) {
    prog.add_row(std::move(failing), lp::Sense::kLessEqual, 1.0);
  }

  const lp::Solution sol = lp::solve(prog, opts);
  if (sol.status == lp::Status::kInfeasible) throw NumericalError("nc bound: LP infeasible");
  if (sol.status == lp::Status::kUnbounded) throw NumericalError("nc bound: LP unbounded");

  NCBoundResult r;
  r.lp_optimum = sol.objective;
  r.analytic_bound = 0.5 + problem.p_d / problem.p_phi;
  r.pivots = sol.pivots;
  r.certificate.classes = problem.classes;
  r.certificate.weights.resize(nc);
  r.certificate.responses.assign(nc, std::vector<double>(nb, 0.0));
  double value = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    const double wc = std::max(0.0, sol.x[w(c)]);
    r.certificate.weights[c] = wc;
    for (std::size_t b = 0; b < nb; ++b) {
      const double joint = std::max(0.0, sol.x[t(c, b)]);
      r.certificate.responses[c][b] = wc > 0.0 ? joint / wc : 0.0;
      if (b < neg) value += joint;
    }
  }
  r.certificate_value = value / problem.p_phi;
  if (problem.quantum_p_minus) {
    r.quantum_p_minus = problem.quantum_p_minus;
    r.gap_to_quantum = *problem.quantum_p_minus - r.lp_optimum;
  }
  return r;
}

}  // namespace weakctx
