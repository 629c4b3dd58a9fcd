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

#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "qudit/common.hpp"

namespace qudit {

struct Displacement {
  Complex alpha;
};

struct Snap {
  std::vector<double> thetas;  // phases on levels 0..thetas.size()-1
};

// SO(2) rotation on {|level>, |level+1>}.
struct Givens {
  int level = 0;
  double angle = 0.0;
};

using GateElement = std::variant<Displacement, Snap, Givens>;

// Gates in application order: elements.front() acts first, so the sequence
// implements elements.back() * ... * elements.front().
struct GateSequence {
  std::vector<GateElement> elements;
  int d = 0;  // target qudit dimension

  void validate() const;
  std::size_t count_displacements() const;
  std::size_t count_snaps() const;
  std::size_t count_givens() const;
  std::size_t size() const { return elements.size(); }
};

// Matrix of the whole sequence on a `dim`-level space. Displacements use the
// truncated-generator exponential (what a cavity drive produces at that
// truncation); SNAP and Givens are exact.
Operator sequence_matrix(const GateSequence& seq, int dim);

// sequence_matrix(seq, psi.size()) * psi without forming the matrix.
StateVector apply_sequence(const GateSequence& seq, const StateVector& psi);

nlohmann::json sequence_to_json(const GateSequence& seq);
GateSequence sequence_from_json(const nlohmann::json& j);

}  // namespace qudit
