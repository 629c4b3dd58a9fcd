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
#include <random>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "qudit/hilbert.hpp"

namespace qudit {
namespace {

// Reference values from an independent dense matrix exponential at 200 levels.
TEST(Displacement, MatchesFrozenElements) {
  const Operator m = displacement_matrix({0.7, 0.3}, {30, 8});
  EXPECT_NEAR(m(3, 1).real(), 0.2957020479673696, 1e-12);
  EXPECT_NEAR(m(3, 1).imag(), 0.31048715036573804, 1e-12);
  EXPECT_NEAR(m(0, 5).real(), 0.007669488157508366, 1e-12);
  EXPECT_NEAR(m(0, 5).imag(), 0.015729691244309105, 1e-12);
  EXPECT_NEAR(m(4, 4).real(), -0.32636223357274063, 1e-12);
  EXPECT_NEAR(m(7, 2).real(), -0.028632617556260377, 1e-12);
  EXPECT_NEAR(m(7, 2).imag(), 0.05872389713979012, 1e-12);
}

TEST(Displacement, CoherentStatePopulationsArePoissonian) {
  const double alpha = 1.3;
  const Operator m = displacement_matrix(alpha, {40, 8});
  for (int n = 0; n < 10; ++n) {
    const double poisson = std::exp(-alpha * alpha) * std::pow(alpha * alpha, n) / std::tgamma(n + 1.0);
    EXPECT_NEAR(std::norm(m(n, 0)), poisson, 1e-13) << n;
  }
}

TEST(Displacement, LargeCutoffStaysFinite) {
  const Operator m = displacement_matrix({3.0, -2.0}, {400, 8});
  EXPECT_TRUE(m.allFinite());
  // Columns well inside the cutoff are normalized.
  EXPECT_NEAR(m.col(10).norm(), 1.0, 1e-10);
}

TEST(Displacement, GeneratorExponentialAgreesWithClosedForm) {
  const int n = 60;
  const Operator a = annihilation({n, 8});
  const Complex alpha{-1.1, 0.4};
  const Operator generator = alpha * a.adjoint() - std::conj(alpha) * a;
  const Operator reference = generator.exp();
  const Operator closed = displacement_matrix(alpha, {n, 8});
  EXPECT_LT((closed.topLeftCorner(25, 25) - reference.topLeftCorner(25, 25)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((displacement_propagator(alpha, n) - reference).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Displacement, TruncatedPropagatorFrozenValues) {
  const Operator t = displacement_propagator(1.2, 10);
  EXPECT_NEAR(t(9, 0).real(), 0.004729083936965811, 1e-13);
  EXPECT_NEAR(t(9, 0).imag(), 0.0, 1e-13);
  EXPECT_NEAR(t(5, 3).real(), 0.046015630483457075, 1e-13);
  EXPECT_LT(unitarity_defect(t), 1e-12);
}

TEST(Displacement, ApplyMatchesMatrix) {
  const auto& td = truncated_displacement(20);
  StateVector psi = StateVector::Random(20);
  psi.normalize();
  EXPECT_LT((td.apply(0.8, psi) - td.matrix(0.8) * psi).norm(), 1e-13);
}

TEST(Ladder, CommutatorIsIdentityAwayFromCutoff) {
  const int n = 30;
  const Operator a = annihilation({n, 4});
  const Operator comm = a * a.adjoint() - a.adjoint() * a;
  EXPECT_LT((comm.topLeftCorner(n - 1, n - 1) - Operator::Identity(n - 1, n - 1)).norm(), 1e-12);
  EXPECT_NEAR(a(2, 3).real(), std::sqrt(3.0), 1e-15);
}

TEST(FockSpace, RejectsBadDimensions) {
  EXPECT_THROW((FockSpaceConfig{4, 5}.validate()), ValidationError);
  EXPECT_THROW((FockSpaceConfig{4, 0}.validate()), ValidationError);
  EXPECT_NO_THROW((FockSpaceConfig{4, 4}.validate()));
}

TEST(Gates, SnapAndGivens) {
  const std::vector<double> th{0.1, -0.4};
  const Operator s = snap_matrix(th, {4, 2});
  EXPECT_NEAR(std::arg(s(1, 1)), -0.4, 1e-15);
  EXPECT_EQ(s(3, 3), Complex(1.0, 0.0));
  const Operator g = givens_matrix(1, 0.3, 4);
  EXPECT_NEAR(g(1, 2).real(), -std::sin(0.3), 1e-15);
  EXPECT_NEAR(g(2, 1).real(), std::sin(0.3), 1e-15);
  EXPECT_NEAR(g(0, 0).real(), 1.0, 1e-15);
}

TEST(Haar, UnitaryAndDeterministic) {
  std::mt19937_64 r1(5), r2(5);
  const Operator u = haar_unitary(6, r1);
  EXPECT_LT(unitarity_defect(u), 1e-12);
  EXPECT_EQ(u, haar_unitary(6, r2));
  const auto e1 = haar_ensemble(3, 8, 11, 1);
  const auto e2 = haar_ensemble(3, 8, 11, 3);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(e1.members[i], e2.members[i]);
}

TEST(Haar, FirstMomentOfEntries) {
  // E|U_00|^2 = 1/d and E|U_00|^4 = 2/(d(d+1)).
  const int d = 5, count = 20000;
  const auto ens = haar_ensemble(d, count, 3);
  double m2 = 0.0, m4 = 0.0;
  for (const auto& u : ens.members) {
    const double p = std::norm(u(0, 0));
    m2 += p;
    m4 += p * p;
  }
  m2 /= count;
  m4 /= count;
  EXPECT_NEAR(m2, 1.0 / d, 0.006);
  EXPECT_NEAR(m4, 2.0 / (d * (d + 1.0)), 0.004);
}

TEST(FramePotential, SingleMemberUsesSelfPair) {
  const auto ens = haar_ensemble(3, 1, 1);
  EXPECT_NEAR(frame_potential(ens, 2), std::pow(3.0, 4), 1e-9);
}

TEST(FramePotential, DistinctPairsNearFactorial) {
  const auto ens = haar_ensemble(4, 300, 9);
  EXPECT_NEAR(frame_potential(ens, 1), 1.0, 0.15);
  EXPECT_NEAR(frame_potential(ens, 2), 2.0, 0.4);
  // The all-pairs estimator carries the d^{2t}/|E| self-pair bias.
  FramePotentialOptions all;
  all.pairs = PairSelection::kAll;
  EXPECT_GT(frame_potential(ens, 2, all), frame_potential(ens, 2));
}

TEST(Truncation, FrozenValueAndMonotoneInCutoff) {
  EXPECT_NEAR(truncation_error(1.5, 6, 12, 24), 0.0037591016724886, 1e-10);
  double prev = 1.0;
  for (int n : {10, 14, 18, 24}) {
    const double e = truncation_error(1.5, 6, n);
    EXPECT_LT(e, prev);
    prev = e;
  }
}

TEST(Serialization, EnsembleRoundTrip) {
  const auto ens = haar_ensemble(3, 4, 21);
  const auto back = ensemble_from_json(ensemble_to_json(ens));
  ASSERT_EQ(back.count(), 4);
  EXPECT_EQ(back.seed, 21u);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(back.members[i], ens.members[i]);
  nlohmann::json bad = operator_to_json(Operator::Identity(2, 2));
  bad["entries"].erase(0);
  EXPECT_THROW(operator_from_json(bad), ValidationError);
}

}  // namespace
}  // namespace qudit
