// Copyright 2026 The qudit-bench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "qudit/stats.hpp"

namespace qudit {
namespace {

TEST(Chebyshev, SampleSize) {
  EXPECT_EQ(chebyshev_n(0.1, 0.99), 2498);
  // 1 / (4 * 0.25 * (N + 2)) <= 0.5  ->  N >= 0.
  EXPECT_EQ(chebyshev_n(0.5, 0.5), 0);
  EXPECT_THROW(chebyshev_n(0.1, 1.0), ValidationError);
}

TEST(Dirichlet, DefaultPriorMoments) {
  const auto post = posterior({3, 0, 5});
  const double a0 = 3.0 + 1.0 / 3.0, total = 8.0 + 1.0;
  EXPECT_NEAR(post.concentrations(1), 1.0 / 3.0, 1e-15);
  const auto mv = component_mean_var(post, 0);
  EXPECT_NEAR(mv.mean, a0 / total, 1e-12);
  EXPECT_NEAR(mv.variance, a0 * (total - a0) / (total * total * (total + 1.0)), 1e-12);
}

TEST(Dirichlet, HaldaneDropsEmptyCategories) {
  const auto post = haldane_posterior({2, 0, 6});
  EXPECT_EQ(post.categories, (std::vector<int>{0, 2}));
  EXPECT_NEAR(component_mean_var(post, 1).mean, 0.75, 1e-15);
  EXPECT_THROW(haldane_posterior({0, 0}), ValidationError);
}

TEST(Beta, HeavyAggregation) {
  const std::vector<int> heavy{0, 3};
  const auto b = heavy_posterior({4, 1, 2, 7}, heavy);
  EXPECT_DOUBLE_EQ(b.a, 11.5);
  EXPECT_DOUBLE_EQ(b.b, 3.5);
  EXPECT_NEAR(b.mean(), 11.5 / 15.0, 1e-15);
  EXPECT_NEAR(b.variance(), 11.5 * 3.5 / (15.0 * 15.0 * 16.0), 1e-15);
}

TEST(Bootstrap, ConstantVectorHasZeroSpread) {
  const std::vector<double> v(25, 0.37);
  const auto s = bayesian_bootstrap(v, 500, 4);
  EXPECT_EQ(s.std, 0.0);
  EXPECT_DOUBLE_EQ(s.mean, 0.37);
}

TEST(Bootstrap, SpreadMatchesDirichletVariance) {
  // Var(sum w_i v_i) for w ~ Dir(1..1) is sum (v - mean)^2 / (n (n + 1)).
  std::vector<double> v;
  for (int i = 0; i < 40; ++i) v.push_back(std::sin(0.7 * i) + 0.05 * i);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double expected = std::sqrt(ss / (40.0 * 41.0));
  const auto s = bayesian_bootstrap(v, 20000, 8);
  EXPECT_NEAR(s.std, expected, 0.03 * expected);
  EXPECT_NEAR(s.mean, mean, 0.05 * expected);
  EXPECT_EQ(s.resamples, 20000);
  EXPECT_EQ(bayesian_bootstrap(v, 50, 8).std, bayesian_bootstrap(v, 50, 8).std);
}

TEST(Counts, FoldAndSample) {
  RealVector p(3);
  p << 0.5, 0.3, 0.1;
  const RealVector f = fold_leakage(p);
  ASSERT_EQ(f.size(), 4);
  EXPECT_NEAR(f(3), 0.1, 1e-15);
  std::mt19937_64 rng(5);
  const auto counts = sample_counts(f, 200000, rng);
  EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}), 200000);
  for (int i = 0; i < 4; ++i) {
    const double sd = std::sqrt(200000 * f(i) * (1 - f(i)));
    EXPECT_NEAR(static_cast<double>(counts[i]), 200000 * f(i), 5 * sd) << i;
  }
  EXPECT_THROW(sample_counts(p, 10, rng), ValidationError);
}

}  // namespace
}  // namespace qudit
