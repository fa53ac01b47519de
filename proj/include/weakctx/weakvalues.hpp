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

// Weak values <phi|A|psi> / <phi|psi> and anomaly detection through the
// spectral projectors of A.

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "weakctx/errors.hpp"
#include "weakctx/hilbert.hpp"

namespace weakctx {

namespace tolerance {
// Post-selection probabilities at or below this are treated as orthogonal.
inline constexpr double kMinPostSelection = 1e-15;
inline constexpr double kAnomaly = 1e-12;
inline constexpr double kSumRule = 1e-10;
}  // namespace tolerance

struct WeakValue {
  Complex value;
  std::string label;
};

/// |<phi|psi>|^2, the post-selection probability.
inline double post_selection_probability(const State& psi, const State& phi) {
  return std::norm(inner(phi, psi));
}

inline WeakValue weak_value(const Operator& a, const State& psi, const State& phi, std::string label = "A") {
  if (psi.dim() != phi.dim() || a.dim() != psi.dim()) {
    throw ValidationError("weak value: dimension mismatch");
  }
  const Complex overlap = inner(phi, psi);
  if (std::norm(overlap) <= tolerance::kMinPostSelection) {
    throw ValidationError("weak value: pre- and post-selected states are orthogonal");
  }
  return {matrix_element(phi, a, psi) / overlap, std::move(label)};
}

struct ProjectorWeakValue {
  double eigenvalue;
  WeakValue weak;
  Operator projector;
};

/// Weak value of every spectral projector of the Hermitian operator A, in
/// increasing eigenvalue order. The values sum to 1.
inline std::vector<ProjectorWeakValue> projector_weak_values(const Operator& a, const State& psi,
                                                             const State& phi) {
  const SpectralDecomposition spectrum = spectral_decompose(a);
  std::vector<ProjectorWeakValue> out;
  out.reserve(spectrum.terms.size());
  for (const auto& term : spectrum.terms) {
    auto wv = weak_value(term.projector, psi, phi, "Pi(" + std::to_string(term.eigenvalue) + ")");
    out.push_back({term.eigenvalue, std::move(wv), term.projector});
  }
  return out;
}

struct AnomalyReport {
  double a_min = 0.0;
  double a_max = 0.0;
  Complex weak_value{0.0, 0.0};
  double re_weak_value = 0.0;
  bool anomalous = false;
  std::vector<ProjectorWeakValue> projectors;
  // Present iff anomalous: the spectral projector with the most negative
  // Re(Pi_w), ties going to the smaller eigenvalue.
  std::optional<ProjectorWeakValue> witness;
};

inline AnomalyReport detect_anomaly(const Operator& a, const State& psi, const State& phi) {
  AnomalyReport report;
  report.weak_value = weak_value(a, psi, phi).value;
  report.re_weak_value = report.weak_value.real();
  report.projectors = projector_weak_values(a, psi, phi);
  report.a_min = report.projectors.front().eigenvalue;
  report.a_max = report.projectors.back().eigenvalue;
  report.anomalous = report.re_weak_value < report.a_min - tolerance::kAnomaly ||
                     report.re_weak_value > report.a_max + tolerance::kAnomaly;
  if (!report.anomalous) return report;

  const ProjectorWeakValue* best = nullptr;
  for (const auto& p : report.projectors) {
    if (p.weak.value.real() >= 0.0) continue;
    if (best == nullptr || p.weak.value.real() < best->weak.value.real()) best = &p;
  }
  // Sum rule: Re(A_w) outside [a_min, a_max] forces some Re(Pi_w) < 0.
  if (best == nullptr) {
    throw NumericalError("anomaly detection: anomalous weak value without a negative projector weak value");
  }
  report.witness = *best;
  return report;
}

}  // namespace weakctx
