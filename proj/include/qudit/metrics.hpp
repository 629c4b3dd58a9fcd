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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "qudit/common.hpp"

namespace qudit {

// q_U(x) = |<x|U|0>|^2.
RealVector ideal_distribution(const Operator& u);

// Median of q: middle order statistic for odd d, mean of the two middle ones
// for even d.
double median(const RealVector& q);

// Indices x with q(x) strictly above the median, ascending.
std::vector<int> heavy_set(const RealVector& q);

// Ideal q and measured p over the same d outcomes. p may sum to less than 1;
// the missing mass is leakage out of the qudit block and is never renormalized.
struct DistributionPair {
  RealVector q;
  RealVector p;

  int d() const { return static_cast<int>(q.size()); }
  double leakage() const { return 1.0 - p.sum(); }
  void validate() const;
};

struct MetricRecord {
  double hog_contrib = 0.0;  // sum of p over the heavy set of q
  double xeb_inner = 0.0;    // p . q
  double qq_inner = 0.0;     // q . q
  double leakage = 0.0;
  std::vector<int> heavy;
};

MetricRecord score_pair(const DistributionPair& pair);

// Mean heavy-output probability over the ensemble.
double hog_score(std::span<const DistributionPair> pairs);
// d * mean(p . q) - 1.
double xeb(std::span<const DistributionPair> pairs);
// xeb / (d * mean(q . q) - 1); ValidationError when the denominator is < 1e-12.
double xeb_normalized(std::span<const DistributionPair> pairs);

// Same aggregates from already-scored records (all with dimension d).
double hog_score(std::span<const MetricRecord> records);
double xeb(std::span<const MetricRecord> records, int d);
double xeb_normalized(std::span<const MetricRecord> records, int d);

struct MetricRow {
  std::size_t unitary_index = 0;
  std::uint64_t seed = 0;
  int d = 0;
  MetricRecord record;
};

inline constexpr std::string_view kMetricCsvHeader = "unitary_index,seed,d,hog_contrib,xeb_inner,qq_inner,leakage";

void write_metric_csv(std::ostream& out, std::span<const MetricRow> rows);

}  // namespace qudit
