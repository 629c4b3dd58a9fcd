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

#include "qudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qudit {

namespace {

void check_counts(const CountVector& counts) {
  if (counts.empty()) throw ValidationError("count vector must be nonempty");
  for (auto c : counts) {
    if (c < 0) throw ValidationError("counts must be non-negative");
  }
}

}  // namespace

DirichletPosterior posterior(const CountVector& counts, double prior_alpha) {
  check_counts(counts);
  const int d = static_cast<int>(counts.size());
  const double alpha = prior_alpha > 0.0 ? prior_alpha : 1.0 / d;
  DirichletPosterior post;
  post.concentrations.resize(d);
  post.categories.resize(d);
  for (int i = 0; i < d; ++i) {
    post.concentrations(i) = alpha + static_cast<double>(counts[i]);
    post.categories[i] = i;
  }
  return post;
}

DirichletPosterior haldane_posterior(const CountVector& counts) {
  check_counts(counts);
  DirichletPosterior post;
  std::vector<double> conc;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) {
      conc.push_back(static_cast<double>(counts[i]));
      post.categories.push_back(static_cast<int>(i));
    }
  }
  if (conc.empty()) throw ValidationError("Haldane posterior needs at least one observation");
  post.concentrations = Eigen::Map<RealVector>(conc.data(), static_cast<Eigen::Index>(conc.size()));
  return post;
}

MeanVar component_mean_var(const DirichletPosterior& post, int i) {
  if (i < 0 || i >= post.concentrations.size()) throw ValidationError("component index out of range");
  const double a = post.concentrations(i);
  const double total = post.total();
  return {a / total, a * (total - a) / (total * total * (total + 1.0))};
}

BetaParams heavy_posterior(const CountVector& counts, std::span<const int> heavy, double alpha) {
  check_counts(counts);
  if (!(alpha > 0.0)) throw ValidationError("Beta prior must be positive");
  std::vector<bool> in_heavy(counts.size(), false);
  for (int i : heavy) {
    if (i < 0 || i >= static_cast<int>(counts.size())) throw ValidationError("heavy index out of range");
    in_heavy[i] = true;
  }
  BetaParams out{alpha, alpha};
  for (std::size_t i = 0; i < counts.size(); ++i) (in_heavy[i] ? out.a : out.b) += static_cast<double>(counts[i]);
  return out;
}

std::int64_t chebyshev_n(double epsilon, double confidence) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must lie in (0, 1)");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ValidationError("confidence must lie in (0, 1)");
  const double x = 1.0 / (4.0 * epsilon * epsilon * (1.0 - confidence));
  // Guard against 2500.0000000003-style rounding of exact decimal inputs.
  const double n = std::ceil(x * (1.0 - 1e-12)) - 2.0;
  return std::max<std::int64_t>(0, static_cast<std::int64_t>(n));
}

BootstrapSummary bayesian_bootstrap(std::span<const double> values, int resamples, std::uint64_t seed) {
  if (values.empty()) throw ValidationError("bootstrap needs at least one value");
  if (resamples < 1) throw ValidationError("bootstrap needs at least one resample");
  // Working relative to the first value keeps constant inputs exactly constant.
  const double center = values.front();
  std::vector<double> stats(resamples);
  std::vector<double> w(values.size());
  std::exponential_distribution<double> expo(1.0);
  for (int r = 0; r < resamples; ++r) {
    std::mt19937_64 rng(split_seed(seed, static_cast<std::uint64_t>(r)));
    double norm = 0.0;
    for (auto& x : w) norm += (x = expo(rng));
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += w[i] * (values[i] - center);
    stats[r] = center + acc / norm;
  }
  BootstrapSummary out;
  out.resamples = resamples;
  out.seed = seed;
  double shift = 0.0;
  for (double s : stats) shift += s - stats.front();
  out.mean = stats.front() + shift / resamples;
  if (resamples > 1) {
    double ss = 0.0;
    for (double s : stats) ss += (s - out.mean) * (s - out.mean);
    out.std = std::sqrt(ss / (resamples - 1));
  }
  return out;
}

RealVector fold_leakage(const RealVector& p) {
  RealVector out(p.size() + 1);
  out.head(p.size()) = p;
  out(p.size()) = std::max(0.0, 1.0 - p.sum());
  return out;
}

CountVector sample_counts(const RealVector& p, std::int64_t n, std::mt19937_64& rng) {
  if (p.size() == 0) throw ValidationError("distribution must be nonempty");
  if (n < 0) throw ValidationError("sample size must be non-negative");
  if (p.minCoeff() < 0.0 || std::abs(p.sum() - 1.0) > 1e-9) throw ValidationError("p must be a distribution");
  CountVector counts(p.size(), 0);
  std::int64_t left = n;
  double mass = 1.0;
  for (Eigen::Index i = 0; i + 1 < p.size() && left > 0; ++i) {
    const double prob = mass > 0.0 ? std::clamp(p(i) / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> bin(left, prob);
    counts[i] = bin(rng);
    left -= counts[i];
    mass -= p(i);
  }
  counts.back() += left;
  return counts;
}

}  // namespace qudit
