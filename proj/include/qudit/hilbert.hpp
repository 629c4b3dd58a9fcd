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

#include <nlohmann/json.hpp>

#include "qudit/common.hpp"

namespace qudit {

// Truncation of the cavity Fock space and the qudit block living inside it.
struct FockSpaceConfig {
  int n_cavity = 60;
  int d = 8;

  // Throws ValidationError unless 1 <= d <= n_cavity.
  void validate() const;
};

// Ladder operator a with (a)_{n-1,n} = sqrt(n), size n_cavity.
Operator annihilation(const FockSpaceConfig& cfg);

// Fock-basis matrix elements <m|D(alpha)|n> of the untruncated displacement
// operator, restricted to the first n_cavity levels. Elements come from the
// associated-Laguerre closed form, evaluated as a normalized three-term
// recurrence with log-space factorial prefactors so n_cavity in the hundreds
// neither overflows nor underflows.
Operator displacement_matrix(Complex alpha, const FockSpaceConfig& cfg);

// exp(alpha a^dag - alpha^* a) for the ladder operators truncated to
// `n_cavity` levels. This is the unitary a resonant cavity drive produces in a
// truncated simulation, and differs from displacement_matrix only near the
// cutoff.
//
// The generator K = a^dag - a is diagonalized once; every alpha afterwards
// costs two dense products (or two matrix-vector products via apply()).
class TruncatedDisplacement {
 public:
  explicit TruncatedDisplacement(int n_cavity);

  int n_cavity() const { return n_cavity_; }
  Operator matrix(Complex alpha) const;
  // D(alpha) psi for real alpha.
  StateVector apply(double alpha, const StateVector& psi) const;

  // Eigenbasis access for callers that chain many real displacements:
  // D(r) = V diag(exp(-i r lambda)) V^dag.
  const Operator& eigenvectors() const { return vecs_; }
  const RealVector& eigenvalues() const { return vals_; }

 private:
  int n_cavity_;
  Operator vecs_;
  RealVector vals_;
};

// Convenience wrapper over TruncatedDisplacement. Caches one decomposition per
// n_cavity (thread safe).
Operator displacement_propagator(Complex alpha, int n_cavity);
const TruncatedDisplacement& truncated_displacement(int n_cavity);

// Diagonal SNAP: e^{i theta_j} on levels j < thetas.size(), 1 above.
Operator snap_matrix(std::span<const double> thetas, const FockSpaceConfig& cfg);

// SO(2) rotation on the {|k>, |k+1>} plane of a `dim`-level space:
// [[cos, -sin], [sin, cos]].
Operator givens_matrix(int k, double angle, int dim);

// Haar-distributed d x d unitary from QR of a complex Ginibre matrix with the
// phases of R's diagonal folded back into Q.
Operator haar_unitary(int d, std::mt19937_64& rng);

struct UnitaryEnsemble {
  std::vector<Operator> members;
  std::uint64_t seed = 0;

  int dim() const { return members.empty() ? 0 : static_cast<int>(members.front().rows()); }
  int count() const { return static_cast<int>(members.size()); }
  void validate() const;
};

// Member i is drawn from its own generator seeded with split_seed(seed, i), so
// the ensemble does not depend on `workers`.
UnitaryEnsemble haar_ensemble(int d, int count, std::uint64_t seed, int workers = 1);

enum class PairSelection {
  kDistinct,  // U != V only: unbiased for the Haar expectation
  kAll,       // every ordered pair including U == V, as the double sum reads
};

struct FramePotentialOptions {
  PairSelection pairs = PairSelection::kDistinct;
  // When > 0 and smaller than the number of eligible pairs, estimate from this
  // many uniformly drawn ordered pairs instead.
  std::int64_t max_pairs = 0;
  std::uint64_t seed = 0;
};

// F^(t) = mean over pairs of |Tr[U^dag V]|^{2t}. A single-member ensemble has
// only its self pair, whatever the selection.
double frame_potential(const UnitaryEnsemble& ensemble, int t,
                       const FramePotentialOptions& options = {});

// Frobenius norm of the difference between the top-left d x d blocks of the
// truncated-generator displacement at `n_cavity` and at `n_reference` levels.
// n_reference <= 0 selects 2 * n_cavity.
double truncation_error(Complex alpha, int d, int n_cavity, int n_reference = 0);

nlohmann::json ensemble_to_json(const UnitaryEnsemble& ensemble);
UnitaryEnsemble ensemble_from_json(const nlohmann::json& j);

// Row-major interleaved re/im encoding used by every JSON container here.
nlohmann::json operator_to_json(const Operator& op);
Operator operator_from_json(const nlohmann::json& j);

}  // namespace qudit
