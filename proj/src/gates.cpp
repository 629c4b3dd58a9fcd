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

#include "qudit/gates.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qudit/hilbert.hpp"

namespace qudit {

void GateSequence::validate() const {
  if (d < 1) throw ValidationError("gate sequence needs a qudit dimension d >= 1");
  for (const auto& element : elements) {
    if (const auto* snap = std::get_if<Snap>(&element)) {
      if (static_cast<int>(snap->thetas.size()) > d) throw ValidationError("SNAP vector longer than d");
      for (double th : snap->thetas) {
        if (!std::isfinite(th)) throw ValidationError("non-finite SNAP phase");
      }
    } else if (const auto* g = std::get_if<Givens>(&element)) {
      if (g->level < 0 || g->level > d - 2) throw ValidationError("Givens level outside [0, d-2]");
      if (!std::isfinite(g->angle)) throw ValidationError("non-finite Givens angle");
    } else {
      const auto& a = std::get<Displacement>(element).alpha;
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw ValidationError("non-finite displacement");
    }
  }
}

namespace {
template <typename T>
std::size_t count_of(const std::vector<GateElement>& elements) {
  return static_cast<std::size_t>(
      std::count_if(elements.begin(), elements.end(), [](const auto& e) { return std::holds_alternative<T>(e); }));
}
}  // namespace

std::size_t GateSequence::count_displacements() const { return count_of<Displacement>(elements); }
std::size_t GateSequence::count_snaps() const { return count_of<Snap>(elements); }
std::size_t GateSequence::count_givens() const { return count_of<Givens>(elements); }

Operator sequence_matrix(const GateSequence& seq, int dim) {
  if (dim < seq.d) throw ValidationError("sequence_matrix dimension smaller than d");
  Operator acc = Operator::Identity(dim, dim);
  for (const auto& element : seq.elements) {
    if (const auto* disp = std::get_if<Displacement>(&element)) {
      acc = displacement_propagator(disp->alpha, dim) * acc;
    } else if (const auto* snap = std::get_if<Snap>(&element)) {
      for (std::size_t j = 0; j < snap->thetas.size(); ++j) acc.row(j) *= std::polar(1.0, snap->thetas[j]);
    } else {
      const auto& g = std::get<Givens>(element);
      if (g.level + 1 >= dim) throw ValidationError("Givens level outside the matrix");
      const double c = std::cos(g.angle), s = std::sin(g.angle);
      const Eigen::RowVectorXcd top = acc.row(g.level), bottom = acc.row(g.level + 1);
      acc.row(g.level) = c * top - s * bottom;
      acc.row(g.level + 1) = s * top + c * bottom;
    }
  }
  return acc;
}

StateVector apply_sequence(const GateSequence& seq, const StateVector& psi) {
  const int dim = static_cast<int>(psi.size());
  if (dim < seq.d) throw ValidationError("state shorter than the qudit dimension");
  const auto& disp = truncated_displacement(dim);
  StateVector out = psi;
  for (const auto& element : seq.elements) {
    if (const auto* d = std::get_if<Displacement>(&element)) {
      if (d->alpha.imag() == 0.0) {
        out = disp.apply(d->alpha.real(), out);
      } else {
        out = disp.matrix(d->alpha) * out;
      }
    } else if (const auto* snap = std::get_if<Snap>(&element)) {
      for (std::size_t j = 0; j < snap->thetas.size(); ++j) out(j) *= std::polar(1.0, snap->thetas[j]);
    } else {
      const auto& g = std::get<Givens>(element);
      if (g.level + 1 >= dim) throw ValidationError("Givens level outside the state");
      const double c = std::cos(g.angle), s = std::sin(g.angle);
      const Complex top = out(g.level), bottom = out(g.level + 1);
      out(g.level) = c * top - s * bottom;
      out(g.level + 1) = s * top + c * bottom;
    }
  }
  return out;
}

nlohmann::json sequence_to_json(const GateSequence& seq) {
  nlohmann::json elements = nlohmann::json::array();
  for (const auto& element : seq.elements) {
    if (const auto* disp = std::get_if<Displacement>(&element)) {
      elements.push_back({{"type", "displacement"}, {"re", disp->alpha.real()}, {"im", disp->alpha.imag()}});
    } else if (const auto* snap = std::get_if<Snap>(&element)) {
      elements.push_back({{"type", "snap"}, {"thetas", snap->thetas}});
    } else {
      const auto& g = std::get<Givens>(element);
      elements.push_back({{"type", "givens"}, {"level", g.level}, {"angle", g.angle}});
    }
  }
  return {{"d", seq.d}, {"elements", elements}};
}

GateSequence sequence_from_json(const nlohmann::json& j) {
  GateSequence seq;
  seq.d = j.at("d").get<int>();
  for (const auto& e : j.at("elements")) {
    const auto type = e.at("type").get<std::string>();
    if (type == "displacement") {
      seq.elements.emplace_back(Displacement{Complex(e.at("re").get<double>(), e.value("im", 0.0))});
    } else if (type == "snap") {
      seq.elements.emplace_back(Snap{e.at("thetas").get<std::vector<double>>()});
    } else if (type == "givens") {
      seq.elements.emplace_back(Givens{e.at("level").get<int>(), e.at("angle").get<double>()});
    } else {
      throw ValidationError("unknown gate type '" + type + "'");
    }
  }
  seq.validate();
  return seq;
}

}  // namespace qudit
