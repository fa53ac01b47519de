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

// Event-level simulation of the pointer measurement followed by the
// post-selection. Each record is one run: the pointer reading x and
// whether the post-selection succeeded.
//
// Generator: std::mt19937_64 (period 2^19937 - 1), one engine per shard,
// seeded with splitmix64(seed + shard * golden_gamma). Uniforms take the top
// 53 bits; normal variates come from the Marsaglia polar method. Both
// conversions are written out here rather than taken from <random>
// distributions, whose output is implementation-defined, so batches are
// bit-reproducible across standard libraries.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>
#include <vector>

#include "weakctx/errors.hpp"
#include "weakctx/hilbert.hpp"
#include "weakctx/numerics.hpp"
#include "weakctx/pointer.hpp"

namespace weakctx {

struct SampleRecord {
  double x;
  bool passed;
};

struct SampleBatch {
  std::uint64_t seed = 0;
  std::vector<SampleRecord> records;

  std::size_t size() const { return records.size(); }
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_effective = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

  // [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double r2 = 0.0;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      r2 = u * u + v * v;
    } while (r2 >= 1.0 || r2 == 0.0);
    const double f = std::sqrt(-2.0 * std::log(r2) / r2);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Scalars that fully determine the event statistics.
struct EventModel {
  double sigma;
  double shifted_weight;  // <psi|Pi|psi>
  Complex amp_pi;         // <phi|Pi|psi>
  Complex amp_rest;       // <phi|(I - Pi)|psi>

  explicit EventModel(const Scenario& s)
      : sigma(s.sigma()),
        shifted_weight(std::clamp(matrix_element(s.psi(), s.pi(), s.psi()).real(), 0.0, 1.0)),
        amp_pi(matrix_element(s.phi(), s.pi(), s.psi())),
        amp_rest(matrix_element(s.phi(), s.pi_complement(), s.psi())) {}

  // |<phi|M_x|psi>|^2 / <psi|E_x|psi>, with the common Gaussian factor
  // divided out so neither side underflows.
  double pass_probability(double x) const {
    const double two_var = 2.0 * sigma * sigma;
    const double l1 = -(x - 1.0) * (x - 1.0) / two_var;
    const double l0 = -x * x / two_var;
    const double top = std::max(l1, l0);
    const double g1 = std::exp(l1 - top);
    const double g0 = std::exp(l0 - top);
    const double den = g1 * g1 * shifted_weight + g0 * g0 * (1.0 - shifted_weight);
    if (den <= 0.0) return 0.0;
    return std::clamp(std::norm(g1 * amp_pi + g0 * amp_rest) / den, 0.0, 1.0);
  }
};

inline void fill_shard(const EventModel& model, std::uint64_t shard_seed, SampleRecord* out, std::size_t n) {
  NormalSource rng(shard_seed);
  const double spread = model.sigma / std::numbers::sqrt2;  // p_n has variance sigma^2 / 2
  for (std::size_t k = 0; k < n; ++k) {
    const double centre = rng.uniform() < model.shifted_weight ? 1.0 : 0.0;
    const double x = centre + spread * rng.normal();
    const bool passed = rng.uniform() < model.pass_probability(x);
    out[k] = {x, passed};
  }
}

}  // namespace detail

inline std::uint64_t shard_seed(std::uint64_t seed, std::size_t shard) {
  return detail::splitmix64(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(shard));
}

/// Draws n independent runs. Shards run on separate threads; the result
/// depends only on (scenario, n, seed, shards), never on scheduling.
inline SampleBatch sample(const Scenario& s, std::size_t n, std::uint64_t seed, std::size_t shards = 1) {
  if (n == 0) throw ValidationError("sample: n must be at least 1");
  shards = std::clamp<std::size_t>(shards, 1, n);
  const detail::EventModel model(s);
  SampleBatch batch;
  batch.seed = seed;
  batch.records.resize(n);

  std::vector<std::thread> workers;
  std::size_t offset = 0;
  for (std::size_t k = 0; k < shards; ++k) {
    const std::size_t count = n / shards + (k < n % shards ? 1 : 0);
    SampleRecord* dst = batch.records.data() + offset;
    const std::uint64_t sub = shard_seed(seed, k);
    if (shards == 1) {
      detail::fill_shard(model, sub, dst, count);
    } else {
      workers.emplace_back([&model, sub, dst, count] { detail::fill_shard(model, sub, dst, count); });
    }
    offset += count;
  }
  for (auto& w : workers) w.join();
  return batch;
}

namespace detail {

// Binomial estimate of k / n. The variance uses (k + 1/2) / (n + 1) so the
// error stays positive when k is 0 or n.
inline Estimate binomial(std::size_t k, std::size_t n) {
  Estimate e;
  e.n_effective = n;
  if (n == 0) return e;
  e.value = static_cast<double>(k) / static_cast<double>(n);
  const double p = (static_cast<double>(k) + 0.5) / (static_cast<double>(n) + 1.0);
  e.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return e;
}

}  // namespace detail

/// #{x < 0 and passed} / n, divided by the exact p_phi.
inline Estimate estimate_p_minus(const SampleBatch& batch, const Scenario& s) {
  if (batch.size() == 0) throw ValidationError("estimate: empty batch");
  const auto k = static_cast<std::size_t>(
      std::count_if(batch.records.begin(), batch.records.end(), [](const SampleRecord& r) { return r.passed && r.x < 0.0; }));
  Estimate e = detail::binomial(k, batch.size());
  e.value /= s.p_phi();
  e.std_error /= s.p_phi();
  return e;
}

/// #{x < 0 and passed} / #{passed}
inline Estimate estimate_p_minus_conditional(const SampleBatch& batch) {
  std::size_t passed = 0;
  std::size_t negative = 0;
  for (const auto& r : batch.records) {
    if (!r.passed) continue;
    ++passed;
    if (r.x < 0.0) ++negative;
  }
  return detail::binomial(negative, passed);
}

inline Estimate estimate_pass_rate(const SampleBatch& batch) {
  if (batch.size() == 0) throw ValidationError("estimate: empty batch");
  const auto k = static_cast<std::size_t>(
      std::count_if(batch.records.begin(), batch.records.end(), [](const SampleRecord& r) { return r.passed; }));
  return detail::binomial(k, batch.size());
}

/// CDF of the pointer reading without post-selection: a two-component
/// Gaussian mixture centred at 1 (weight <psi|Pi|psi>) and 0.
inline double reading_cdf(const Scenario& s, double x) {
  const double w = std::clamp(matrix_element(s.psi(), s.pi(), s.psi()).real(), 0.0, 1.0);
  const double inf = std::numeric_limits<double>::infinity();
  return w * gaussian_mass(-inf, x, 1.0, s.sigma()) + (1.0 - w) * gaussian_mass(-inf, x, 0.0, s.sigma());
}

/// Kolmogorov-Smirnov distance between the empirical reading distribution
/// and reading_cdf.
inline double ks_statistic(const SampleBatch& batch, const Scenario& s) {
  std::vector<double> xs;
  xs.reserve(batch.size());
  for (const auto& r : batch.records) xs.push_back(r.x);
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = reading_cdf(s, xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

/// CSV with header "x,passed"; x is written with round-trip precision.
inline void write_csv(const SampleBatch& batch, std::ostream& out) {
  out << "x,passed\n";
  char buf[64];
  for (const auto& r : batch.records) {
    std::snprintf(buf, sizeof buf, "%.17g,%d\n", r.x, r.passed ? 1 : 0);
    out << buf;
  }
}

}  // namespace weakctx
