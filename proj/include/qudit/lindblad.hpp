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

#include <limits>
#include <string>
#include <vector>

#include "qudit/common.hpp"
#include "qudit/hilbert.hpp"
#include "qudit/pulse.hpp"

namespace qudit {

// Density matrix on cavity (x) qubit (index 2*n + q) or on the cavity alone.
using DensityMatrix = Operator;

// Throws ValidationError unless rho is Hermitian (herm_tol), has unit trace
// (trace_tol) and no eigenvalue below -eig_tol.
void validate_density_matrix(const DensityMatrix& rho, double herm_tol = 1e-10, double trace_tol = 1e-8,
                             double eig_tol = 1e-8);

DensityMatrix pure_density(const StateVector& psi);
// |0, g><0, g| on the product space.
DensityMatrix ground_state(const FockSpaceConfig& cfg);

inline constexpr double kNoDecay = std::numeric_limits<double>::infinity();

// Qubit T1/T2. Infinite times disable the corresponding channel.
struct NoiseModel {
  double t1 = kNoDecay;  // s
  double t2 = kNoDecay;  // s
  // false: sigma_z collapse operator sqrt(gamma_phi / 2) sigma_z, so coherences
  // decay at exactly 1/T2. true: rate 2 gamma_phi on D[sigma_z], so coherences
  // decay at gamma_1/2 + 4 gamma_phi.
  bool double_gamma_phi = false;

  void validate() const;
  double gamma1() const;
  double gamma_phi() const;
  // Rate multiplying D[sigma_z].
  double dephasing_rate() const;
  bool noiseless() const { return gamma1() == 0.0 && dephasing_rate() == 0.0; }
};

// {sqrt(gamma1) sigma-, sqrt(dephasing_rate) sigma_z} on cavity (x) qubit,
// skipping disabled channels. Throws ValidationError when T2 > 2 T1.
std::vector<Operator> collapse_operators(const NoiseModel& noise, const FockSpaceConfig& cfg);

enum class IntegratorMethod { kAdaptiveRK, kFixedRK4 };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::kAdaptiveRK;
  double rtol = 1e-8;
  double atol = 1e-10;
  // Adaptive: upper bound on the step (<= 0 means unbounded).
  // Fixed RK4: the step itself.
  double max_step = 0.0;
  long long max_steps = 20'000'000;

  void validate() const;
};

// Optional per-step diagnostics: time, qubit excited population, mean photon
// number and purity.
class TrajectoryRecorder {
 public:
  explicit TrajectoryRecorder(double sample_interval = 0.0) : interval_(sample_interval) {}
  void record(double t, const DensityMatrix& rho_rotating_frame, int n_cavity);
  bool due(double t) const { return samples_.empty() || t >= samples_.back().t + interval_; }
  void write_csv(const std::string& path) const;

  struct Sample {
    double t;
    double excited;
    double photons;
    double purity;
  };
  const std::vector<Sample>& samples() const { return samples_; }

 private:
  double interval_;
  std::vector<Sample> samples_;
};

// Integrates d rho/dt = -i[H'(t), rho] + gamma1 D[sigma-] rho + rate D[sigma_z] rho
// from 0 to schedule.total_duration and returns rho in the rotating frame of
// H'. The free term chi a^dag a |e><e| is handled exactly in its interaction
// picture and the drive is applied through its sparse ladder structure.
// Throws RuntimeFailure if the step budget runs out.
DensityMatrix evolve(const DensityMatrix& rho0, const PulseSchedule& schedule, const NoiseModel& noise,
                     const IntegratorConfig& icfg = {}, TrajectoryRecorder* recorder = nullptr);

// Noiseless Schroedinger evolution of a pure state under the same Hamiltonian.
StateVector evolve_pure(const StateVector& psi0, const PulseSchedule& schedule, const IntegratorConfig& icfg = {});

// Partial trace over the qubit of a cavity (x) qubit density matrix.
DensityMatrix trace_out_qubit(const DensityMatrix& rho, const FockSpaceConfig& cfg);

struct FockDistribution {
  RealVector probs;     // first d diagonal entries clamped to [0, 1]
  double leakage = 0.0; // 1 - sum(probs)
};

// Computational-block populations. Not renormalized: population outside the
// block is reported as leakage.
FockDistribution fock_distribution(const DensityMatrix& rho_cavity, int d);

}  // namespace qudit
