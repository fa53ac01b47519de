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

// Gaussian-pointer measurement of a projector.
//
// A probe prepared in a Gaussian of width sigma is shifted by one unit of
// length when the system is found in Pi and left alone otherwise. Reading
// the probe position x applies the Kraus operator
//
//   M_x = N exp(-(x - 1)^2 / 2 sigma^2) Pi + N exp(-x^2 / 2 sigma^2) (I - Pi),
//
// with N^2 = (pi sigma^2)^(-1/2). Everything below is a closed form in
// sigma and the weak values of Pi, plus quadrature routines that integrate
// the defining expressions directly and serve as an independent check.

#pragma once

#include <cmath>
#include <numbers>
#include <utility>

#include "weakctx/errors.hpp"
#include "weakctx/hilbert.hpp"
#include "weakctx/numerics.hpp"
#include "weakctx/weakvalues.hpp"

namespace weakctx {

/// Pre-selection psi, post-selection phi, the measured projector Pi and the
/// pointer width sigma.
class Scenario {
 public:
  static Scenario make(State psi, State phi, Operator pi, double sigma) {
    if (psi.dim() != phi.dim() || pi.dim() != psi.dim()) {
      throw ValidationError("scenario: psi, phi and Pi must share a dimension");
    }
    if (!validate_projector(pi)) throw ValidationError("scenario: Pi is not a projector");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("scenario: sigma must be positive and finite");
    const double p_phi = post_selection_probability(psi, phi);
    if (p_phi <= tolerance::kMinPostSelection) {
      throw ValidationError("scenario: pre- and post-selected states are orthogonal");
    }
    return Scenario(std::move(psi), std::move(phi), std::move(pi), sigma, p_phi);
  }

  Scenario with_sigma(double sigma) const { return make(psi_, phi_, pi_, sigma); }

  const State& psi() const { return psi_; }
  const State& phi() const { return phi_; }
  const Operator& pi() const { return pi_; }
  Operator pi_complement() const { return Operator::identity(pi_.dim()) - pi_; }
  double sigma() const { return sigma_; }
  double p_phi() const { return p_phi_; }
  std::size_t dim() const { return psi_.dim(); }

 private:
  Scenario(State psi, State phi, Operator pi, double sigma, double p_phi)
      : psi_(std::move(psi)), phi_(std::move(phi)), pi_(std::move(pi)), sigma_(sigma), p_phi_(p_phi) {}

  State psi_;
  State phi_;
  Operator pi_;
  double sigma_;
  double p_phi_;
};

/// N^2 = (pi sigma^2)^(-1/2)
inline double pointer_normalization_squared(double sigma) {
  return 1.0 / std::sqrt(std::numbers::pi * sigma * sigma);
}

/// Coefficients of Pi and I - Pi in M_x.
inline std::pair<double, double> kraus_coefficients(double sigma, double x) {
  const double n = std::sqrt(pointer_normalization_squared(sigma));
  const double two_var = 2.0 * sigma * sigma;
  return {n * std::exp(-(x - 1.0) * (x - 1.0) / two_var), n * std::exp(-x * x / two_var)};
}

inline Operator kraus(const Scenario& s, double x) {
  const auto [shifted, unshifted] = kraus_coefficients(s.sigma(), x);
  return shifted * s.pi() + unshifted * s.pi_complement();
}

/// E_x = p_n(x - 1) Pi + p_n(x) (I - Pi)
inline Operator povm_element(const Scenario& s, double x) {
  return noise_density(x - 1.0, s.sigma()) * s.pi() + noise_density(x, s.sigma()) * s.pi_complement();
}

struct PointerMeasurement {
  double sigma = 0.0;
  double normalization_squared = 0.0;
  // Overlap of the shifted and unshifted pointer wavefunctions, exp(-1/(4 sigma^2)).
  double delta = 0.0;
  double p_d = 0.0;
  Operator e_d;
  // Post-selection effect averaged over x, built term by term from the
  // blocks of |phi><phi| under Pi and I - Pi.
  Operator s;

  /// (1 - p_d)|phi><phi| + p_d E_d
  Operator decomposition(const State& phi) const { return (1.0 - p_d) * phi.projector() + p_d * e_d; }
};

inline PointerMeasurement disturbance(const Scenario& s) {
  PointerMeasurement m;
  m.sigma = s.sigma();
  m.normalization_squared = pointer_normalization_squared(s.sigma());
  const double exponent = -1.0 / (4.0 * s.sigma() * s.sigma());
  m.delta = std::exp(exponent);
  m.p_d = -0.5 * std::expm1(exponent);

  const CVector in_pi = s.pi().apply(s.phi().amplitudes());
  const CVector out_pi = s.pi_complement().apply(s.phi().amplitudes());
  CVector reflected(in_pi.size());
  for (std::size_t i = 0; i < in_pi.size(); ++i) reflected[i] = in_pi[i] - out_pi[i];

  m.e_d = Operator::outer(reflected, reflected);
  m.s = Operator::outer(in_pi, in_pi) + Operator::outer(out_pi, out_pi) +
        m.delta * (Operator::outer(in_pi, out_pi) + Operator::outer(out_pi, in_pi));
  return m;
}

/// Probabilities of a negative pointer reading: A for the shifted noise,
/// B for the unshifted noise, C for the cross term.
struct ABCIntegrals {
  double a = 0.0;
  double b = 0.5;
  double c = 0.0;
};

inline ABCIntegrals abc(double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("abc: sigma must be positive");
  ABCIntegrals out;
  out.a = 0.5 * std::erfc(1.0 / sigma);
  out.b = 0.5;
  out.c = 0.5 * std::exp(-1.0 / (4.0 * sigma * sigma)) * std::erfc(1.0 / (2.0 * sigma));
  return out;
}

struct PMinus {
  // Negative-reading weight divided by p_phi.
  double exact = 0.0;
  // Same weight divided by the actual post-selection probability <psi|S|psi>.
  double conditional = 0.0;
  // First order in 1/sigma: 1/2 - Re(Pi_w) / (sqrt(pi) sigma).
  double asymptotic = 0.0;
  // <psi|S|psi> = (1 - p_d) p_phi + p_d <psi|E_d|psi>
  double post_selection_weight = 0.0;
  Complex pi_weak{0.0, 0.0};
  Complex complement_weak{0.0, 0.0};
  // The p_phi normalization can push `exact` outside [0, 1]; it is reported,
  // never clamped.
  bool exact_outside_unit_interval = false;
};

inline PMinus p_minus(const Scenario& s) {
  PMinus out;
  out.pi_weak = weak_value(s.pi(), s.psi(), s.phi(), "Pi").value;
  out.complement_weak = weak_value(s.pi_complement(), s.psi(), s.phi(), "I - Pi").value;
  const ABCIntegrals k = abc(s.sigma());
  out.exact = k.a * std::norm(out.pi_weak) + k.b * std::norm(out.complement_weak) +
              2.0 * k.c * (out.pi_weak * std::conj(out.complement_weak)).real();
  out.asymptotic = 0.5 - out.pi_weak.real() / (std::sqrt(std::numbers::pi) * s.sigma());

  const PointerMeasurement m = disturbance(s);
  const double e_d_expectation = matrix_element(s.psi(), m.e_d, s.psi()).real();
  out.post_selection_weight = (1.0 - m.p_d) * s.p_phi() + m.p_d * e_d_expectation;
  out.conditional = out.exact * s.p_phi() / out.post_selection_weight;
  out.exact_outside_unit_interval = out.exact < 0.0 || out.exact > 1.0;
  return out;
}

struct PointerQuadrature {
  QuadratureOptions quadrature{};
  // Half-width of the truncated domain in units of sigma beyond [0, 1].
  double tail_sigmas = 12.0;
};

namespace detail {

// |<phi|M_x|psi>|^2 / p_phi, evaluated through the full Kraus operator.
inline double negative_reading_integrand(const Scenario& s, double x) {
  const CVector m_psi = kraus(s, x).apply(s.psi().amplitudes());
  const double value = std::norm(vdot(s.phi().amplitudes(), m_psi)) / s.p_phi();
  if (!(value >= 0.0)) throw NumericalError("p_minus quadrature: negative or NaN integrand");
  return value;
}

}  // namespace detail

/// Integral of |<phi|M_x|psi>|^2 / p_phi over x < 0 by adaptive quadrature.
inline double p_minus_quadrature(const Scenario& s, const PointerQuadrature& q = {}) {
  const double lo = -q.tail_sigmas * s.sigma();
  return integrate([&](double x) { return detail::negative_reading_integrand(s, x); }, lo, 0.0, q.quadrature);
}

/// The same integrand over the whole line; equals <psi|S|psi> / p_phi.
inline double post_selection_weight_quadrature(const Scenario& s, const PointerQuadrature& q = {}) {
  const double lo = -q.tail_sigmas * s.sigma();
  const double hi = 1.0 + q.tail_sigmas * s.sigma();
  return integrate([&](double x) { return detail::negative_reading_integrand(s, x); }, lo, hi, q.quadrature);
}

/// S = integral of M_x^dagger |phi><phi| M_x dx, by quadrature.
inline Operator s_quadrature(const Scenario& s, const PointerQuadrature& q = {}) {
  const double lo = -q.tail_sigmas * s.sigma();
  const double hi = 1.0 + q.tail_sigmas * s.sigma();
  return integrate(
      [&](double x) {
        const CVector v = kraus(s, x).adjoint().apply(s.phi().amplitudes());
        return Operator::outer(v, v);
      },
      lo, hi, q.quadrature);
}

/// Integral of E_x over the truncated domain; should be the identity.
inline Operator povm_completeness_quadrature(const Scenario& s, const PointerQuadrature& q = {}) {
  const double lo = -q.tail_sigmas * s.sigma();
  const double hi = 1.0 + q.tail_sigmas * s.sigma();
  return integrate([&](double x) { return povm_element(s, x); }, lo, hi, q.quadrature);
}

}  // namespace weakctx
