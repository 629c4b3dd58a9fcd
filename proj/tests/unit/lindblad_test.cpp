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

#include <gtest/gtest.h>

#include "qudit/lindblad.hpp"
#include "qudit/pulse.hpp"

namespace qudit {
namespace {

PulseSchedule idle(double duration) {
  PulseSchedule s;
  s.total_duration = duration;
  return s;
}

DensityMatrix product_state(int n, int level, Complex g, Complex e) {
  StateVector psi = StateVector::Zero(2 * n);
  psi(2 * level) = g;
  psi(2 * level + 1) = e;
  return pure_density(psi.normalized());
}

TEST(Noise, Rates) {
  const NoiseModel m{100e-6, 150e-6};
  EXPECT_DOUBLE_EQ(m.gamma1(), 1e4);
  EXPECT_NEAR(m.gamma_phi(), 1.0 / 150e-6 - 0.5e4, 1e-9);
  EXPECT_NEAR(m.dephasing_rate(), 0.5 * m.gamma_phi(), 1e-9);
  EXPECT_TRUE(NoiseModel{}.noiseless());
  EXPECT_THROW((NoiseModel{10e-6, 30e-6}.validate()), ValidationError);
  EXPECT_THROW((NoiseModel{10e-6, kNoDecay}.validate()), ValidationError);
  EXPECT_NO_THROW((NoiseModel{10e-6, 20e-6}.validate()));
  EXPECT_EQ(collapse_operators(NoiseModel{10e-6, 20e-6}, {4, 2}).size(), 1u);
}

TEST(Evolve, AmplitudeDampingFollowsExponential) {
  const int n = 4;
  TrajectoryRecorder rec(10e-6);
  const auto rho = evolve(product_state(n, 0, 0.0, 1.0), idle(100e-6), NoiseModel{150e-6, 300e-6}, {}, &rec);
  EXPECT_NEAR(rho(1, 1).real(), std::exp(-100.0 / 150.0), 1e-6);
  EXPECT_NEAR(rho(0, 0).real(), 1.0 - std::exp(-100.0 / 150.0), 1e-6);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-9);
  ASSERT_GE(rec.samples().size(), 5u);
  EXPECT_LT(rec.samples().back().excited, rec.samples().front().excited);
}

TEST(Evolve, PureDephasingCoherence) {
  const int n = 4;
  const double t2 = 40e-6, t = 30e-6;
  const auto rho = evolve(product_state(n, 0, 1.0, 1.0), idle(t), NoiseModel{kNoDecay, t2}, {});
  EXPECT_NEAR(std::abs(rho(0, 1)), 0.5 * std::exp(-t / t2), 1e-7);
  EXPECT_NEAR(rho(1, 1).real(), 0.5, 1e-9);

  NoiseModel literal{kNoDecay, t2, true};
  const auto rho_lit = evolve(product_state(n, 0, 1.0, 1.0), idle(t), literal, {});
  EXPECT_NEAR(std::abs(rho_lit(0, 1)), 0.5 * std::exp(-4.0 * t / t2), 1e-7);
}

TEST(Evolve, DispersivePhaseInRotatingFrame) {
  const int n = 4;
  const double t = 0.3e-6;
  const auto rho = evolve(product_state(n, 1, 1.0, 1.0), idle(t), NoiseModel{}, {});
  const Complex expected = 0.5 * std::polar(1.0, kDefaultChi * t);
  EXPECT_LT(std::abs(rho(2, 3) - expected), 1e-7);
}

TEST(Evolve, MixedEqualsPureWhenNoiseless) {
  const int n = 10;
  PulseSchedule s = displacement_schedule({0.5, 0.2});
  const std::vector<double> th{0.0, 0.9};
  s.append(snap_schedule(th, kDefaultChi));
  StateVector psi0 = StateVector::Zero(2 * n);
  psi0(0) = 1.0;
  const StateVector psi = evolve_pure(psi0, s);
  const DensityMatrix rho = evolve(pure_density(psi0), s, NoiseModel{});
  EXPECT_LT((rho - pure_density(psi)).norm(), 1e-6);
  EXPECT_NO_THROW(validate_density_matrix(rho));
}

TEST(Evolve, FixedStepAgreesWithAdaptive) {
  const int n = 8;
  const auto s = displacement_schedule({0.7, 0.0});
  IntegratorConfig rk4;
  rk4.method = IntegratorMethod::kFixedRK4;
  rk4.max_step = 0.5e-9;
  const NoiseModel noise{20e-6, 30e-6};
  const auto a = evolve(ground_state({n, 3}), s, noise);
  const auto b = evolve(ground_state({n, 3}), s, noise, rk4);
  EXPECT_LT((a - b).norm(), 1e-7);
  IntegratorConfig bad = rk4;
  bad.max_step = 0.0;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Evolve, StepBudgetExhaustionIsRuntimeFailure) {
  IntegratorConfig tiny;
  tiny.max_steps = 3;
  EXPECT_THROW(evolve(ground_state({6, 3}), displacement_schedule(1.0), NoiseModel{}, tiny), RuntimeFailure);
}

TEST(Reduction, PartialTraceAndLeakage) {
  const int n = 5;
  StateVector psi = StateVector::Zero(2 * n);
  psi(2 * 0 + 0) = std::sqrt(0.5);
  psi(2 * 1 + 1) = std::sqrt(0.3);
  psi(2 * 3 + 0) = std::sqrt(0.2);
  const auto rc = trace_out_qubit(pure_density(psi), {n, 2});
  EXPECT_NEAR(rc(1, 1).real(), 0.3, 1e-15);
  EXPECT_NEAR(std::abs(rc(0, 1)), 0.0, 1e-15);  // orthogonal qubit states
  EXPECT_NEAR(std::abs(rc(0, 3)), std::sqrt(0.1), 1e-15);
  const auto fd = fock_distribution(rc, 2);
  EXPECT_NEAR(fd.probs(0), 0.5, 1e-15);
  EXPECT_NEAR(fd.leakage, 0.2, 1e-15);
}

TEST(Validation, RejectsNonPhysical) {
  Operator rho = Operator::Zero(2, 2);
  rho(0, 0) = 1.2;
  rho(1, 1) = -0.2;
  EXPECT_THROW(validate_density_matrix(rho), ValidationError);
  rho(0, 0) = 0.5;
  rho(1, 1) = 0.5;
  rho(0, 1) = 0.1;
  EXPECT_THROW(validate_density_matrix(rho), ValidationError);
}

}  // namespace
}  // namespace qudit
