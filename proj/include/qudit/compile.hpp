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
#include <vector>

#include "qudit/common.hpp"
#include "qudit/gates.hpp"

namespace qudit {

struct CompilationResult {
  GateSequence sequence;
  double infidelity = 1.0;  // recomputed from the emitted sequence
  int iterations = 0;
  bool converged = false;
};

// 1 - |<target|actual>|^2 with the shorter vector zero-padded.
double state_infidelity(const StateVector& target, const StateVector& actual);

// 1 - |Tr(U^dag V_d)/d|^2 where V_d is the first d columns of `actual`
// (d = target.rows(), actual may be a larger space). When those columns are
// orthonormal the value is formed without cancellation, so it stays accurate
// down to ~1e-30.
double unitary_infidelity(const Operator& target, const Operator& actual);

// F = <psi|rho|psi>, psi zero-padded to rho's dimension.
double state_fidelity(const Operator& rho, const StateVector& psi);

// Triangularizes U column by column (last column first): a SNAP removes the
// phases of the column, then Givens rotations on levels 0..j-1 push its weight
// onto level j. Emits d SNAPs and d(d-1)/2 Givens rotations (identities kept)
// whose product is U exactly. Throws ValidationError for non-unitary input.
GateSequence exact_compile(const Operator& u);

// m repetitions of V_k(a) = D(a) R D(-2a) R D(a), a = theta / (4 m sqrt(k+1)),
// R = SNAP with phase pi on levels 0..k. Adjacent displacements are merged.
// `d` is the qudit dimension recorded on the sequence (default k + 2).
GateSequence givens_to_native(int k, double theta, int m, int d = 0);

// Infidelity of givens_to_native(k, theta, m) against G_k(theta) on the first
// d levels of an n_cavity truncation.
double givens_error(int k, double theta, int m, int d, int n_cavity = 60);

// Constant c in the single-step model givens_error(k, theta, 1, d) ~ c theta^6,
// measured once per (k, d, n_cavity) and cached.
double givens_error_constant(int k, int d, int n_cavity = 60);

struct NativeCompilation {
  GateSequence sequence;
  std::vector<int> repetitions;       // m per non-trivial Givens rotation, in emission order
  double predicted_infidelity = 0.0;  // sum of c theta^6 / m^4 over rotations
  double measured_infidelity = 0.0;   // unitary_infidelity of the emitted sequence
  std::size_t displacements = 0;
  std::size_t snaps = 0;
  std::size_t native_gates() const { return displacements + snaps; }
};

// exact_compile followed by givens_to_native on every rotation. m repetitions
// of a step with error c (theta/m)^6 add coherently (c theta^6 / m^4), and
// different rotations are modelled as adding incoherently; the m values are the
// cheapest integer allocation meeting the budget under that model. The emitted
// sequence is then checked against U and the model target tightened until the
// measured infidelity is within budget (RuntimeFailure if that fails).
// Identity elements are dropped, adjacent SNAPs and displacements merged.
NativeCompilation native_compile(const Operator& u, double error_budget, int n_cavity = 60);

struct OptimizerConfig {
  int restarts = 16;
  int max_iterations = 400;
  double gradient_step = 1e-6;    // central differences
  double gradient_tol = 1e-9;
  double threshold = 0.01;        // converged = infidelity < threshold
  double good_enough = 1e-4;      // skip remaining restarts below this
  double alpha_init = 1.0;        // alpha ~ U(-alpha_init, alpha_init)
  int n_cavity = 60;

  void validate() const;
};

// Multi-start BFGS over D(a_{k+1}) S(theta_k) ... S(theta_1) D(a_1) |0> with
// real a and length-d SNAP vectors. Restart r draws its start point from
// split_seed(seed, r). Never throws on poor convergence; converged tells.
CompilationResult variational_state_prep(const StateVector& target, int layers, const OptimizerConfig& opt,
                                         std::uint64_t seed);

// The ansatz sequence for a flat parameter vector (a_1..a_{k+1}, theta_1, ..., theta_k).
GateSequence ansatz_sequence(const std::vector<double>& params, int layers, int d);

}  // namespace qudit
