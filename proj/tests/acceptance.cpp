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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "testing.hpp"
#include "weakctx.hpp"

namespace {

using namespace weakctx;
using testing::make_theta;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome large_weak_value() {
  const auto t = testing::theta_scenario(0.01);
  const Complex zw = weak_value(t.z, t.psi, t.phi).value;
  const AnomalyReport rep = detect_anomaly(t.z, t.psi, t.phi);
  const double witness = rep.witness ? rep.witness->weak.value.real() : std::nan("");
  const bool pass = std::abs(zw - Complex(100.0, 0.0)) <= 1e-9 && rep.anomalous && std::abs(witness + 49.5) <= 1e-9;
  return {pass, fmt("Z_w = %.15g%+.3gi, witness Re(Pi_w) = %.15g", zw.real(), zw.imag(), witness)};
}

Outcome closed_form_vs_quadrature() {
  std::mt19937_64 rng(2024);
  double worst_p = 0.0;
  double worst_s = 0.0;
  int count = 0;
  for (int k = 0; k < 20; ++k) {
    const Scenario base = k < 2 ? make_theta(k == 0 ? 0.5 : 0.01, 1.0) : testing::random_scenario(rng, 1.0);
    for (double sigma : {0.5, 1.0, 10.0, 100.0}) {
      const Scenario s = base.with_sigma(sigma);
      worst_p = std::max(worst_p, std::abs(p_minus(s).exact - p_minus_quadrature(s)));
      worst_s = std::max(worst_s, max_norm_distance(disturbance(s).s, s_quadrature(s)));
      ++count;
    }
  }
  return {worst_p <= 1e-9 && worst_s <= 1e-9,
          fmt("%d cases, max |p_minus - quad| = %.3g, max |S - quad| = %.3g", count, worst_p, worst_s)};
}

Outcome asymptotics() {
  const auto t = testing::theta_scenario(0.5);
  const double re_pi_w = weak_value(t.pi, t.psi, t.phi).value.real();
  double prev = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  std::string trace;
  for (double sigma : {10.0, 100.0, 1000.0}) {
    const double dev = std::abs(sigma * (p_minus(make_theta(0.5, sigma)).exact - 0.5) + re_pi_w / std::sqrt(std::numbers::pi));
    decreasing = decreasing && dev < prev;
    prev = dev;
    trace += fmt("%.3g ", dev);
  }
  const double pd = disturbance(make_theta(0.5, 100.0)).p_d;
  const double lead = std::abs(8.0 * 100.0 * 100.0 * pd - 1.0);
  return {decreasing && lead <= 1e-2, fmt("deviation at sigma 10/100/1000: %s| |8 sigma^2 p_d - 1| = %.3g", trace.c_str(), lead)};
}

Outcome theorem_margin() {
  const ConditionReport r = check_conditions(make_theta(0.5, 10.0));
  const bool pass = r.all_hold && std::abs(r.margins[3] - 0.02322) <= 1e-4;
  return {pass, fmt("all_hold = %s, margin4 = %.10g (expected 0.02322 +- 1e-4)", r.all_hold ? "true" : "false", r.margins[3])};
}

Outcome nc_bound() {
  const Scenario s = make_theta(0.5, 10.0);
  const NCBoundProblem problem = build_nc_problem(s, 200);
  const NCBoundResult r = nc_bound_lp(problem);
  const double analytic = 0.5 + problem.p_d / problem.p_phi;
  const double gap = r.gap_to_quantum.value_or(-1.0);
  const bool pass = std::abs(r.lp_optimum - analytic) <= 1e-6 && gap >= 0.023;
  return {pass, fmt("lp = %.12g, 1/2 + p_d/p_phi = %.12g, gap = %.6g", r.lp_optimum, analytic, gap)};
}

Outcome monte_carlo() {
  const Scenario s = make_theta(0.5, 10.0);
  const SampleBatch b = sample(s, 1000000, 20260101, 4);
  const Estimate pm = estimate_p_minus(b, s);
  const Estimate pass = estimate_pass_rate(b);
  const double s_weight = matrix_element(s.psi(), disturbance(s).s, s.psi()).real();
  const double z_pm = (pm.value - 0.52821) / pm.std_error;
  const double z_pass = (pass.value - s_weight) / pass.std_error;
  return {std::abs(z_pm) <= 4.0 && std::abs(z_pass) <= 4.0,
          fmt("p_minus = %.6f +- %.2g (z = %.2f vs 0.52821), pass = %.6f +- %.2g (z = %.2f vs %.6f)", pm.value,
              pm.std_error, z_pm, pass.value, pass.std_error, z_pass, s_weight)};
}

Outcome property_suites() {
  constexpr int kInstances = 100;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double sigmas[] = {0.5, 1.0, 10.0, 100.0};

  int completeness_fail = 0;
  int idempotence_fail = 0;
  int covariance_fail = 0;
  int sum_rule_fail = 0;
  int soundness_fail = 0;
  for (int k = 0; k < kInstances; ++k) {
    const Scenario s = testing::random_scenario(rng, sigmas[k % 4]);

    const Operator total = povm_completeness_quadrature(s);
    if (max_norm_distance(total, Operator::identity(s.dim())) > 1e-8) ++completeness_fail;

    const Operator e_d = disturbance(s).e_d;
    if ((e_d * e_d - e_d).max_abs() > 1e-10) ++idempotence_fail;

    const Operator a = testing::random_hermitian(rng, s.dim());
    const double alpha = 6.0 * u(rng) - 3.0;
    const double beta = 6.0 * u(rng) - 3.0;
    const Complex lhs = weak_value(alpha * a + beta * Operator::identity(s.dim()), s.psi(), s.phi()).value;
    const Complex rhs = alpha * weak_value(a, s.psi(), s.phi()).value + beta;
    if (std::abs(lhs - rhs) > 1e-10) ++covariance_fail;

    Complex sum = 0.0;
    for (const auto& p : projector_weak_values(a, s.psi(), s.phi())) sum += p.weak.value;
    if (std::abs(sum - 1.0) > 1e-10) ++sum_rule_fail;

    const double p_phi = 0.01 + 0.99 * u(rng);
    const double p_d = 0.5 * u(rng) * u(rng);
    const double sigma = 0.2 + 20.0 * u(rng);
    const NCBoundResult r = nc_bound_lp(build_nc_problem(sigma, p_phi, p_d, 4 + k % 37));
    if (r.lp_optimum > 0.5 + p_d / p_phi + 1e-9) ++soundness_fail;
  }
  const bool pass = completeness_fail + idempotence_fail + covariance_fail + sum_rule_fail + soundness_fail == 0;
  return {pass, fmt("%d instances each; failures: completeness %d, E_d idempotence %d, affine covariance %d, "
                    "sum rule %d, LP soundness %d",
                    kInstances, completeness_fail, idempotence_fail, covariance_fail, sum_rule_fail, soundness_fail)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"large weak value", large_weak_value},
      {"closed form vs quadrature", closed_form_vs_quadrature},
      {"asymptotics", asymptotics},
      {"theorem margin", theorem_margin},
      {"noncontextual bound", nc_bound},
      {"monte carlo", monte_carlo},
      {"property suites", property_suites},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("[%s] %d. %s (%.3f s): %s\n", o.pass ? "PASS" : "FAIL", index, c.name, secs, o.detail.c_str());
  }
  std::printf("%d/%d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
