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
#include <random>
#include <span>
#include <vector>

#include "qudit/common.hpp"

namespace qudit {

using CountVector = std::vector<std::int64_t>;

// Dirichlet over the retained categories. `categories` maps each
// concentration back to its index in the count vector (all of them unless the
// Haldane variant dropped empty ones).
struct DirichletPosterior {
  RealVector concentrations;
  std::vector<int> categories;

  double total() const { return concentrations.sum(); }
};

// Dir(prior_alpha + x_i). prior_alpha <= 0 selects the default 1/d.
DirichletPosterior posterior(const CountVector& counts, double prior_alpha = 0.0);

// Haldane prior (alpha_i -> 0): categories without observations are dropped.
// Throws ValidationError when there are no observations at all.
DirichletPosterior haldane_posterior(const CountVector& counts);

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;
};

// Marginal Beta moments of component i (index into the posterior).
MeanVar component_mean_var(const DirichletPosterior& post, int i);

struct BetaParams {
  double a = 0.0;
  double b = 0.0;

  double mean() const { return a / (a + b); }
  double variance() const { return a * b / ((a + b) * (a + b) * (a + b + 1.0)); }
};

// Two-category aggregation: Beta(alpha + heavy counts, alpha + light counts).
BetaParams heavy_posterior(const CountVector& counts, std::span<const int> heavy, double alpha = 0.5);

// Smallest N >= 0 with 1 / (4 eps^2 (N + 2)) <= 1 - confidence.
std::int64_t chebyshev_n(double epsilon, double confidence);

struct BootstrapSummary {
  double mean = 0.0;
  double std = 0.0;
  int resamples = 0;
  std::uint64_t seed = 0;
};

inline constexpr int kDefaultResamples = 10000;

// Rubin's Bayesian bootstrap of the mean: weights from a flat Dirichlet (via
// normalized unit exponentials), one generator per resample from
// split_seed(seed, r).
BootstrapSummary bayesian_bootstrap(std::span<const double> values, int resamples = kDefaultResamples,
                                    std::uint64_t seed = 0);

// Appends the leakage mass 1 - sum(p) as an extra category.
RealVector fold_leakage(const RealVector& p);

// Multinomial(N, p) by sequential conditional binomials. p must sum to 1
// within 1e-9 (use fold_leakage first for sub-normalized p).
CountVector sample_counts(const RealVector& p, std::int64_t n, std::mt19937_64& rng);

}  // namespace qudit
