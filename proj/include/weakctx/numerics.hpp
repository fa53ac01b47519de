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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>

#include "weakctx/errors.hpp"
#include "weakctx/hilbert.hpp"

namespace weakctx {

struct QuadratureOptions {
  // Absolute tolerance handed to each starting panel; halves on every split.
  double abs_tol = 1e-12;
  int min_depth = 2;
  int max_depth = 60;
  int initial_panels = 64;
  // Integrand evaluations allowed per call.
  long long max_evaluations = 4'000'000;
};

inline double quadrature_norm(double v) { return std::abs(v); }
inline double quadrature_norm(const Operator& v) { return v.max_abs(); }

namespace detail {

template <class F, class T>
T simpson_step(const F& f, double a, double b, const T& fa, const T& fm, const T& fb, const T& whole,
               double tol, int depth, const QuadratureOptions& opts, long long& budget) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  budget -= 2;
  const T flm = f(lm);
  const T frm = f(rm);
  const T left = ((m - a) / 6.0) * (fa + 4.0 * flm + fm);
  const T right = ((b - m) / 6.0) * (fm + 4.0 * frm + fb);
  const T both = left + right;
  const T delta = both - whole;
  const double err = quadrature_norm(delta);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * quadrature_norm(both);
  if (depth >= opts.min_depth && err <= 15.0 * std::max(tol, floor)) {
    // Richardson extrapolation.
    return both + (1.0 / 15.0) * delta;
  }
  if (depth >= opts.max_depth || budget <= 0) {
    throw NumericalError("quadrature: tolerance not reached within subdivision budget on [" +
                         std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, opts, budget) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, opts, budget);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b]. The value type only needs
/// +, -, and multiplication by double; Operator and double both qualify.
/// The interval is first cut into `initial_panels` equal panels so narrow
/// peaks inside a wide truncated domain are not skipped.
template <class F>
auto integrate(const F& f, double a, double b, const QuadratureOptions& opts = {}) {
  using T = decltype(f(a));
  if (!(b > a)) throw ValidationError("quadrature: empty or reversed interval");
  const int panels = std::max(1, opts.initial_panels);
  long long budget = opts.max_evaluations;
  const double h = (b - a) / panels;
  T total = 0.0 * f(a);
  T f_lo = f(a);
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h;
    const double hi = (k + 1 == panels) ? b : a + (k + 1) * h;
    const T f_mid = f(0.5 * (lo + hi));
    const T f_hi = f(hi);
    const T whole = ((hi - lo) / 6.0) * (f_lo + 4.0 * f_mid + f_hi);
    total = total + detail::simpson_step(f, lo, hi, f_lo, f_mid, f_hi, whole, opts.abs_tol, 0, opts, budget);
    f_lo = f_hi;
  }
  return total;
}

/// Probability mass on [lo, hi] of the density exp(-(x - center)^2 / sigma^2) / sqrt(pi sigma^2),
/// a normal law with variance sigma^2 / 2. Uses erfc on whichever side keeps
/// the difference free of cancellation.
inline double gaussian_mass(double lo, double hi, double center, double sigma) {
  const double zl = (lo - center) / sigma;
  const double zh = (hi - center) / sigma;
  if (zl >= 0.0) return 0.5 * (std::erfc(zl) - std::erfc(zh));
  if (zh <= 0.0) return 0.5 * (std::erfc(-zh) - std::erfc(-zl));
  return 0.5 * (std::erf(zh) - std::erf(zl));
}

/// The pointer noise density p_n(x) = exp(-x^2 / sigma^2) / sqrt(pi sigma^2).
inline double noise_density(double x, double sigma) {
  return std::exp(-(x * x) / (sigma * sigma)) / std::sqrt(std::numbers::pi * sigma * sigma);
}

}  // namespace weakctx
