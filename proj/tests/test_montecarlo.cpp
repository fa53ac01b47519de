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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "testing.hpp"
#include "weakctx/montecarlo.hpp"

namespace weakctx {
namespace {

using testing::make_theta;

bool same_batch(const SampleBatch& a, const SampleBatch& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a.records[k].x != b.records[k].x || a.records[k].passed != b.records[k].passed) return false;
  }
  return true;
}

TEST(Sample, Deterministic) {
  const Scenario s = make_theta(0.5, 10.0);
  EXPECT_TRUE(same_batch(sample(s, 5000, 42), sample(s, 5000, 42)));
  EXPECT_TRUE(same_batch(sample(s, 5000, 42, 4), sample(s, 5000, 42, 4)));
  EXPECT_FALSE(same_batch(sample(s, 5000, 42), sample(s, 5000, 43)));
}

TEST(Sample, ShardsPartitionIndependentStreams) {
  const Scenario s = make_theta(0.5, 10.0);
  const SampleBatch sharded = sample(s, 1001, 9, 3);
  ASSERT_EQ(sharded.size(), 1001u);
  // Shard 0 owns the first block.
  const detail::EventModel model(s);
  std::vector<SampleRecord> block(334);
  detail::fill_shard(model, shard_seed(9, 0), block.data(), block.size());
  for (std::size_t k = 0; k < block.size(); ++k) EXPECT_EQ(sharded.records[k].x, block[k].x);
}

TEST(Sample, RejectsEmptyRequest) {
  EXPECT_THROW(sample(make_theta(0.5, 1.0), 0, 1), ValidationError);
}

TEST(Sample, ShardSeedsDiffer) {
  EXPECT_NE(shard_seed(1, 0), shard_seed(1, 1));
  EXPECT_NE(shard_seed(1, 1), shard_seed(2, 0));
}

TEST(Sample, UniformAndNormalMoments) {
  detail::NormalSource src(5);
  const int n = 200000;
  double su = 0.0, sn = 0.0, sn2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double u = src.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = src.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sn / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(sn2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(Sample, PassProbabilityStaysFiniteFarOut) {
  detail::EventModel model(make_theta(0.5, 0.05));
  for (double x : {-1e4, -50.0, 0.0, 0.5, 1.0, 60.0, 1e4}) {
    const double p = model.pass_probability(x);
    EXPECT_TRUE(std::isfinite(p));
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
  // Far right only the shifted branch survives: |<phi|Pi|psi>|^2 / <psi|Pi|psi>.
  EXPECT_NEAR(model.pass_probability(1e4), std::norm(model.amp_pi) / model.shifted_weight, 1e-12);
}

TEST(Estimates, EigenstateAlwaysPasses) {
  const Scenario s = Scenario::make(State::basis(2, 0), State::basis(2, 0), State::basis(2, 1).projector(), 3.0);
  const SampleBatch b = sample(s, 20000, 3);
  EXPECT_EQ(estimate_pass_rate(b).value, 1.0);
  const Estimate e = estimate_p_minus(b, s);
  EXPECT_NEAR(e.value, 0.5, 4.0 * e.std_error);
}

TEST(Estimates, AgreeWithClosedForms) {
  for (double sigma : {1.0, 10.0}) {
    const Scenario s = make_theta(0.5, sigma);
    const SampleBatch b = sample(s, 400000, 17, 4);
    const PMinus pm = p_minus(s);
    const Estimate pass = estimate_pass_rate(b);
    EXPECT_NEAR(pass.value, pm.post_selection_weight, 4.0 * pass.std_error);
    const Estimate e = estimate_p_minus(b, s);
    EXPECT_NEAR(e.value, pm.exact, 4.0 * e.std_error);
    const Estimate c = estimate_p_minus_conditional(b);
    EXPECT_NEAR(c.value, pm.conditional, 4.0 * c.std_error);
    EXPECT_EQ(c.n_effective, static_cast<std::size_t>(std::lround(pass.value * b.size())));
  }
}

TEST(Estimates, RandomScenarios) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 8; ++k) {
    const Scenario s = testing::random_scenario(rng, 0.5 + 5.0 * (k % 3), 0.05);
    const SampleBatch b = sample(s, 100000, 1000 + k, 2);
    const PMinus pm = p_minus(s);
    const Estimate e = estimate_p_minus(b, s);
    EXPECT_NEAR(e.value, pm.exact, 4.5 * e.std_error) << k;
    const Estimate pass = estimate_pass_rate(b);
    EXPECT_NEAR(pass.value, pm.post_selection_weight, 4.5 * pass.std_error) << k;
  }
}

TEST(Estimates, BinomialErrorPositiveAtEdges) {
  EXPECT_GT(detail::binomial(0, 100).std_error, 0.0);
  EXPECT_GT(detail::binomial(100, 100).std_error, 0.0);
  EXPECT_EQ(detail::binomial(0, 0).value, 0.0);
  EXPECT_NEAR(detail::binomial(50, 100).std_error, std::sqrt(0.5 * 0.5 / 100.0), 1e-12);
}

TEST(Estimates, NoPassesGivesZeroConditional) {
  SampleBatch b;
  b.records = {{-1.0, false}, {2.0, false}};
  const Estimate e = estimate_p_minus_conditional(b);
  EXPECT_EQ(e.value, 0.0);
  EXPECT_EQ(e.n_effective, 0u);
  SampleBatch empty;
  EXPECT_THROW(estimate_pass_rate(empty), ValidationError);
}

TEST(Readings, KolmogorovSmirnov) {
  for (double sigma : {0.3, 2.0, 50.0}) {
    const Scenario s = make_theta(0.2, sigma);
    const SampleBatch b = sample(s, 50000, 8);
    EXPECT_LT(ks_statistic(b, s), 1.63 / std::sqrt(50000.0)) << sigma;
  }
}

TEST(Readings, CdfLimits) {
  const Scenario s = make_theta(0.5, 1.0);
  EXPECT_NEAR(reading_cdf(s, -40.0), 0.0, 1e-15);
  EXPECT_NEAR(reading_cdf(s, 41.0), 1.0, 1e-15);
  const double w = matrix_element(s.psi(), s.pi(), s.psi()).real();
  const double q = 0.5 * (1.0 + std::erf(0.5));
  EXPECT_NEAR(reading_cdf(s, 0.5), w * (1.0 - q) + (1.0 - w) * q, 1e-15);
  EXPECT_NEAR(reading_cdf(s, 0.0), w * abc(1.0).a + (1.0 - w) * 0.5, 1e-15);
}

TEST(Csv, HeaderAndRoundTrip) {
  SampleBatch b;
  b.records = {{-0.1, true}, {1.0 / 3.0, false}};
  std::ostringstream os;
  write_csv(b, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "x,passed");
  std::getline(is, line);
  EXPECT_EQ(line, "-0.10000000000000001,1");
  std::getline(is, line);
  EXPECT_EQ(std::stod(line.substr(0, line.find(','))), 1.0 / 3.0);
  EXPECT_EQ(line.back(), '0');
}

}  // namespace
}  // namespace weakctx
