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

#include "qudit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace qudit {
namespace {

void require_nonempty(std::size_t n) {
  if (n == 0) throw ValidationError("metric needs at least one pair");
}

int common_dimension(std::span<const DistributionPair> pairs) {
  require_nonempty(pairs.size());
  const int d = pairs.front().d();
  for (const auto& p : pairs) {
    if (p.d() != d) throw ValidationError("all pairs must share one dimension");
  }
  return d;
}

double collision_denominator(double mean_qq, int d) {
  const double denom = d * mean_qq - 1.0;
  if (std::abs(denom) < 1e-12) throw ValidationError("degenerate ensemble: d E[q.q] - 1 vanishes");
  return denom;
}

}  // namespace

RealVector ideal_distribution(const Operator& u) {
  if (u.rows() != u.cols() || u.rows() == 0) throw ValidationError("ideal_distribution needs a square matrix");
  if (unitarity_defect(u) > kUnitaryTolerance) throw ValidationError("ideal_distribution input is not unitary");
  return u.col(0).cwiseAbs2();
}

double median(const RealVector& q) {
  if (q.size() == 0) throw ValidationError("median of an empty vector");
  std::vector<double> v(q.data(), q.data() + q.size());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<int> heavy_set(const RealVector& q) {
  const double med = median(q);
  std::vector<int> out;
  for (int i = 0; i < q.size(); ++i) {
    if (q(i) > med) out.push_back(i);
  }
  return out;
}

void DistributionPair::validate() const {
  if (q.size() == 0 || q.size() != p.size()) throw ValidationError("p and q must have equal, nonzero length");
  if (std::abs(q.sum() - 1.0) > 1e-9) throw ValidationError("ideal distribution must sum to 1");
  if (q.minCoeff() < 0.0 || p.minCoeff() < 0.0) throw ValidationError("probabilities must be non-negative");
  if (p.sum() > 1.0 + 1e-9) throw ValidationError("measured distribution exceeds unit mass");
}

MetricRecord score_pair(const DistributionPair& pair) {
  pair.validate();
  MetricRecord r;
  r.heavy = heavy_set(pair.q);
  for (int x : r.heavy) r.hog_contrib += pair.p(x);
  r.xeb_inner = pair.p.dot(pair.q);
  r.qq_inner = pair.q.squaredNorm();
  r.leakage = pair.leakage();
  return r;
}

double hog_score(std::span<const MetricRecord> records) {
  require_nonempty(records.size());
  double sum = 0.0;
  for (const auto& r : records) sum += r.hog_contrib;
  return sum / static_cast<double>(records.size());
}

double xeb(std::span<const MetricRecord> records, int d) {
  require_nonempty(records.size());
  double sum = 0.0;
  for (const auto& r : records) sum += r.xeb_inner;
  return d * sum / static_cast<double>(records.size()) - 1.0;
}

double xeb_normalized(std::span<const MetricRecord> records, int d) {
  require_nonempty(records.size());
  double qq = 0.0;
  for (const auto& r : records) qq += r.qq_inner;
  return xeb(records, d) / collision_denominator(qq / static_cast<double>(records.size()), d);
}

namespace {
std::vector<MetricRecord> score_all(std::span<const DistributionPair> pairs) {
  std::vector<MetricRecord> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(score_pair(p));
  return out;
}
}  // namespace

double hog_score(std::span<const DistributionPair> pairs) {
  common_dimension(pairs);
  return hog_score(std::span<const MetricRecord>(score_all(pairs)));
}

double xeb(std::span<const DistributionPair> pairs) {
  const int d = common_dimension(pairs);
  return xeb(std::span<const MetricRecord>(score_all(pairs)), d);
}

double xeb_normalized(std::span<const DistributionPair> pairs) {
  const int d = common_dimension(pairs);
  return xeb_normalized(std::span<const MetricRecord>(score_all(pairs)), d);
}

void write_metric_csv(std::ostream& out, std::span<const MetricRow> rows) {
  out << kMetricCsvHeader << '\n' << std::setprecision(17);
  for (const auto& row : rows) {
    const auto& r = row.record;
    out << row.unitary_index << ',' << row.seed << ',' << row.d << ',' << r.hog_contrib << ',' << r.xeb_inner << ','
        << r.qq_inner << ',' << r.leakage << '\n';
  }
}

}  // namespace qudit
