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

#include "qudit/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

namespace qudit {

void FockSpaceConfig::validate() const {
  if (n_cavity < 1) throw ValidationError("n_cavity must be >= 1");
  if (d < 1) throw ValidationError("qudit dimension d must be >= 1");
  if (d > n_cavity) {
    throw ValidationError("qudit dimension d=" + std::to_string(d) +
                          " exceeds n_cavity=" + std::to_string(n_cavity));
  }
}

Operator annihilation(const FockSpaceConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_cavity;
  Operator a = Operator::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

namespace {

// Fills f[n] = sqrt(n!/(n+k)!) x^{k/2} e^{-x/2} L_n^k(x) for n = 0..count-1.
// These are the moduli-with-sign of <n+k|D|n>; they stay bounded by 1, which
// keeps the recurrence free of overflow for large n.
void normalized_laguerre_column(int k, double x, int count, std::vector<double>& f) {
  f.assign(count, 0.0);
  if (count == 0) return;
  const double log_f0 = 0.5 * (k * std::log(x) - std::lgamma(k + 1.0)) - 0.5 * x;
  f[0] = std::exp(log_f0);
  if (count == 1) return;
  f[1] = (1.0 + k - x) / std::sqrt(1.0 + k) * f[0];
  for (int n = 1; n + 1 < count; ++n) {
    const double a = (2.0 * n + 1.0 + k - x) / std::sqrt((n + 1.0) * (n + k + 1.0));
    const double b = std::sqrt(n * (n + static_cast<double>(k)) / ((n + 1.0) * (n + k + 1.0)));
    f[n + 1] = a * f[n] - b * f[n - 1];
  }
}

}  // namespace

Operator displacement_matrix(Complex alpha, const FockSpaceConfig& cfg) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw ValidationError("displacement amplitude must be finite");
  }
  if (cfg.n_cavity < 1) throw ValidationError("n_cavity must be >= 1");
  const int dim = cfg.n_cavity;
  Operator out = Operator::Identity(dim, dim);
  const double r = std::abs(alpha);
  if (r == 0.0) return out;
  const double x = r * r;
  const double phi = std::arg(alpha);

  std::vector<double> f;
  for (int k = 0; k < dim; ++k) {
    normalized_laguerre_column(k, x, dim - k, f);
    const Complex below = std::polar(1.0, k * phi);
    // <m|D(a)|n> = conj(<n|D(-a)|m>) supplies the upper triangle.
    const Complex above = (k % 2 == 0 ? 1.0 : -1.0) * std::conj(below);
    for (int n = 0; n + k < dim; ++n) {
      out(n + k, n) = below * f[n];
      if (k > 0) out(n, n + k) = above * f[n];
    }
  }
  return out;
}

TruncatedDisplacement::TruncatedDisplacement(int n_cavity) : n_cavity_(n_cavity) {
  if (n_cavity < 1) throw ValidationError("n_cavity must be >= 1");
  // i (a^dag - a) is Hermitian; D(r) = exp(r K) = exp(-i r (iK)).
  Operator h = Operator::Zero(n_cavity, n_cavity);
  for (int k = 1; k < n_cavity; ++k) {
    const double s = std::sqrt(static_cast<double>(k));
    h(k, k - 1) = Complex(0.0, s);
    h(k - 1, k) = Complex(0.0, -s);
  }
  Eigen::SelfAdjointEigenSolver<Operator> eig(h);
  vecs_ = eig.eigenvectors();
  vals_ = eig.eigenvalues();
}

Operator TruncatedDisplacement::matrix(Complex alpha) const {
  const double r = std::abs(alpha);
  const double phi = std::arg(alpha);
  Eigen::VectorXcd phases(n_cavity_);
  for (int j = 0; j < n_cavity_; ++j) phases(j) = std::polar(1.0, -r * vals_(j));
  Operator real_disp = vecs_ * phases.asDiagonal() * vecs_.adjoint();
  if (phi == 0.0) return real_disp;
  // exp(alpha a^dag - alpha^* a) = R exp(r K) R^dag with R = exp(i phi a^dag a).
  Eigen::VectorXcd rot(n_cavity_);
  for (int n = 0; n < n_cavity_; ++n) rot(n) = std::polar(1.0, n * phi);
  return rot.asDiagonal() * real_disp * rot.conjugate().asDiagonal();
}

StateVector TruncatedDisplacement::apply(double alpha, const StateVector& psi) const {
  StateVector coeffs = vecs_.adjoint() * psi;
  for (int j = 0; j < n_cavity_; ++j) coeffs(j) *= std::polar(1.0, -alpha * vals_(j));
  return vecs_ * coeffs;
}

const TruncatedDisplacement& truncated_displacement(int n_cavity) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<TruncatedDisplacement>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n_cavity];
  if (!slot) slot = std::make_unique<TruncatedDisplacement>(n_cavity);
  return *slot;
}

Operator displacement_propagator(Complex alpha, int n_cavity) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw ValidationError("displacement amplitude must be finite");
  }
  return truncated_displacement(n_cavity).matrix(alpha);
}

Operator snap_matrix(std::span<const double> thetas, const FockSpaceConfig& cfg) {
  if (static_cast<int>(thetas.size()) > cfg.n_cavity) {
    throw ValidationError("SNAP phase vector longer than the cavity truncation");
  }
  if (cfg.d > 0 && static_cast<int>(thetas.size()) > cfg.d) {
    throw ValidationError("SNAP phase vector length " + std::to_string(thetas.size()) +
                          " exceeds qudit dimension " + std::to_string(cfg.d));
  }
  Operator s = Operator::Identity(cfg.n_cavity, cfg.n_cavity);
  for (std::size_t j = 0; j < thetas.size(); ++j) s(j, j) = std::polar(1.0, thetas[j]);
  return s;
}

Operator givens_matrix(int k, double angle, int dim) {
  if (k < 0 || k + 1 >= dim) throw ValidationError("Givens level out of range");
  Operator g = Operator::Identity(dim, dim);
  const double c = std::cos(angle), s = std::sin(angle);
  g(k, k) = c;
  g(k, k + 1) = -s;
  g(k + 1, k) = s;
  g(k + 1, k + 1) = c;
  return g;
}

Operator haar_unitary(int d, std::mt19937_64& rng) {
  if (d < 1) throw ValidationError("Haar dimension must be >= 1");
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Operator z(d, d);
  // Column-major fill order is part of the replay contract.
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(r, c) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<Operator> qr(z);
  Operator q = qr.householderQ();
  const auto& packed = qr.matrixQR();
  for (int j = 0; j < d; ++j) {
    const Complex rjj = packed(j, j);
    const double mag = std::abs(rjj);
    q.col(j) *= (mag > 0.0 ? rjj / mag : Complex(1.0));
  }
  return q;
}

void UnitaryEnsemble::validate() const {
  if (members.empty()) throw ValidationError("ensemble is empty");
  const auto dim = members.front().rows();
  for (const auto& m : members) {
    if (m.rows() != dim || m.cols() != dim) throw ValidationError("ensemble members differ in size");
    if (unitarity_defect(m) >= kUnitaryTolerance) throw ValidationError("ensemble member is not unitary");
  }
}

UnitaryEnsemble haar_ensemble(int d, int count, std::uint64_t seed, int workers) {
  if (count < 1) throw ValidationError("ensemble count must be >= 1");
  UnitaryEnsemble out;
  out.seed = seed;
  out.members.resize(count);
  auto draw = [&](int begin, int stride) {
    for (int i = begin; i < count; i += stride) {
      std::mt19937_64 rng(split_seed(seed, static_cast<std::uint64_t>(i)));
      out.members[i] = haar_unitary(d, rng);
    }
  };
  workers = std::clamp(workers, 1, count);
  if (workers == 1) {
    draw(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(draw, w, workers);
  }
  return out;
}

double frame_potential(const UnitaryEnsemble& ensemble, int t, const FramePotentialOptions& options) {
  if (t < 1) throw ValidationError("frame potential order t must be >= 1");
  if (ensemble.members.empty()) throw ValidationError("frame potential of an empty ensemble");
  const int n = ensemble.count();
  const int dim = ensemble.dim();
  auto power = [t](double abs_trace) { return std::pow(abs_trace * abs_trace, t); };

  // Column i holds vec(U_i); Gram(i, j) = Tr[U_i^dag U_j].
  Operator flat(static_cast<Eigen::Index>(dim) * dim, n);
  for (int i = 0; i < n; ++i) {
    flat.col(i) = Eigen::Map<const Eigen::VectorXcd>(ensemble.members[i].data(), flat.rows());
  }
  if (n == 1) return power(std::abs(flat.col(0).squaredNorm()));

  const bool distinct = options.pairs == PairSelection::kDistinct;
  const std::int64_t eligible = distinct ? static_cast<std::int64_t>(n) * (n - 1)
                                         : static_cast<std::int64_t>(n) * n;
  if (options.max_pairs > 0 && options.max_pairs < eligible) {
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    double acc = 0.0;
    for (std::int64_t s = 0; s < options.max_pairs; ++s) {
      int i = pick(rng), j = pick(rng);
      while (distinct && i == j) j = pick(rng);
      acc += power(std::abs(flat.col(i).dot(flat.col(j))));
    }
    return acc / static_cast<double>(options.max_pairs);
  }

  const Operator gram = flat.adjoint() * flat;
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (distinct && i == j) continue;
      acc += power(std::abs(gram(i, j)));
    }
  }
  return acc / static_cast<double>(eligible);
}

double truncation_error(Complex alpha, int d, int n_cavity, int n_reference) {
  if (n_reference <= 0) n_reference = 2 * n_cavity;
  if (d < 1 || d > n_cavity || n_cavity >= n_reference) {
    throw ValidationError("truncation_error needs 1 <= d <= n_cavity < n_reference");
  }
  const Operator small = displacement_propagator(alpha, n_cavity);
  const Operator big = displacement_propagator(alpha, n_reference);
  return (small.topLeftCorner(d, d) - big.topLeftCorner(d, d)).norm();
}

nlohmann::json operator_to_json(const Operator& op) {
  std::vector<double> entries;
  entries.reserve(2 * op.size());
  for (Eigen::Index r = 0; r < op.rows(); ++r) {
    for (Eigen::Index c = 0; c < op.cols(); ++c) {
      entries.push_back(op(r, c).real());
      entries.push_back(op(r, c).imag());
    }
  }
  return {{"dim", op.rows()}, {"entries", entries}};
}

Operator operator_from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  const auto entries = j.at("entries").get<std::vector<double>>();
  if (dim < 1 || entries.size() != 2ULL * dim * dim) {
    throw ValidationError("operator JSON: entry count does not match dim");
  }
  Operator op(dim, dim);
  std::size_t p = 0;
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c, p += 2) op(r, c) = Complex(entries[p], entries[p + 1]);
  }
  if (!op.allFinite()) throw ValidationError("operator JSON: non-finite entry");
  return op;
}

nlohmann::json ensemble_to_json(const UnitaryEnsemble& ensemble) {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : ensemble.members) members.push_back(operator_to_json(m)["entries"]);
  return {{"dim", ensemble.dim()},
          {"seed", ensemble.seed},
          {"count", ensemble.count()},
          {"members", members}};
}

UnitaryEnsemble ensemble_from_json(const nlohmann::json& j) {
  UnitaryEnsemble out;
  out.seed = j.at("seed").get<std::uint64_t>();
  const int dim = j.at("dim").get<int>();
  for (const auto& entries : j.at("members")) {
    out.members.push_back(operator_from_json({{"dim", dim}, {"entries", entries}}));
  }
  if (j.contains("count") && j.at("count").get<int>() != out.count()) {
    throw ValidationError("ensemble JSON: count does not match member list");
  }
  out.validate();
  return out;
}

}  // namespace qudit
