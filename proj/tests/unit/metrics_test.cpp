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

#include <sstream>

#include <gtest/gtest.h>

#include "qudit/hilbert.hpp"
#include "qudit/metrics.hpp"

namespace qudit {
namespace {

RealVector vec(std::initializer_list<double> v) {
  RealVector r(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

TEST(Median, OddAndEven) {
  EXPECT_DOUBLE_EQ(median(vec({0.5, 0.1, 0.4})), 0.4);
  EXPECT_DOUBLE_EQ(median(vec({0.1, 0.2, 0.3, 0.4})), 0.25);
}

TEST(HeavySet, StrictlyAboveMedian) {
  EXPECT_EQ(heavy_set(vec({0.1, 0.4, 0.2, 0.3})), (std::vector<int>{1, 3}));
  EXPECT_TRUE(heavy_set(vec({0.25, 0.25, 0.25, 0.25})).empty());
}

TEST(Scores, HandComputedPair) {
  DistributionPair pair{vec({0.1, 0.2, 0.3, 0.4}), vec({0.25, 0.25, 0.25, 0.25})};
  const auto rec = score_pair(pair);
  EXPECT_NEAR(rec.hog_contrib, 0.5, 1e-15);
  EXPECT_NEAR(rec.xeb_inner, 0.25, 1e-15);
  EXPECT_NEAR(rec.qq_inner, 0.30, 1e-15);
  const std::vector<DistributionPair> pairs{pair};
  EXPECT_NEAR(xeb(pairs), 0.0, 1e-15);
  // Self pair: xeb_n = 1.
  const std::vector<DistributionPair> ideal{{pair.q, pair.q}};
  EXPECT_NEAR(xeb(ideal), 0.2, 1e-14);
  EXPECT_NEAR(xeb_normalized(ideal), 1.0, 1e-14);
  EXPECT_NEAR(hog_score(ideal), 0.7, 1e-15);
}

TEST(Scores, LeakageIsNotRenormalized) {
  DistributionPair pair{vec({0.7, 0.3}), vec({0.6, 0.2})};
  EXPECT_NEAR(pair.leakage(), 0.2, 1e-15);
  const auto rec = score_pair(pair);
  EXPECT_NEAR(rec.hog_contrib, 0.6, 1e-15);
  EXPECT_NEAR(rec.leakage, 0.2, 1e-15);
}

TEST(Scores, UniformIdealHasNoNormalization) {
  const std::vector<DistributionPair> flat{{vec({0.5, 0.5}), vec({0.5, 0.5})}};
  EXPECT_THROW(xeb_normalized(flat), ValidationError);
}

TEST(Scores, RejectsMismatchedPairs) {
  DistributionPair bad{vec({0.5, 0.5}), vec({1.0})};
  EXPECT_THROW(bad.validate(), ValidationError);
  DistributionPair neg{vec({0.5, 0.5}), vec({1.2, -0.2})};
  EXPECT_THROW(neg.validate(), ValidationError);
}

TEST(Ideal, FirstColumnPopulations) {
  std::mt19937_64 rng(1);
  const Operator u = haar_unitary(5, rng);
  const RealVector q = ideal_distribution(u);
  EXPECT_NEAR(q.sum(), 1.0, 1e-14);
  EXPECT_NEAR(q(3), std::norm(u(3, 0)), 1e-16);
}

TEST(Csv, GoldenHeader) {
  std::ostringstream out;
  MetricRow row{2, 99, 4, {}};
  row.record.hog_contrib = 0.5;
  const std::vector<MetricRow> rows{row};
  write_metric_csv(out, rows);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "unitary_index,seed,d,hog_contrib,xeb_inner,qq_inner,leakage");
  EXPECT_EQ(text.substr(text.find('\n') + 1, 12), "2,99,4,0.5,0");
}

}  // namespace
}  // namespace qudit
