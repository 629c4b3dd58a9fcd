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

#include "qudit/compile.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>
#include <random>
#include <tuple>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "qudit/hilbert.hpp"

namespace qudit {
namespace {

constexpr double kNullEntry = 1e-14;
constexpr double kEliminationTolerance = 1e-12;
constexpr double kRowTolerance = 1e-8;
constexpr double kCalibrationAngle = 0.1;
constexpr int kMaxTightening = 12;

bool is_zero_phase(double th) { return std::abs(std::remainder(th, kTwoPi)) < 1e-12; }

// Appends with merging of equal-type neighbours; merged identities vanish.
void push_merged(GateSequence& seq, const GateElement& element) {
  if (!seq.elements.empty()) {
    auto& last = seq.elements.back();
    const auto* d_new = std::get_if<Displacement>(&element);
    auto* d_last = std::get_if<Displacement>(&last);
    if (d_new && d_last && d_new->alpha.imag() == 0.0 && d_last->alpha.imag() == 0.0) {
      d_last->alpha += d_new->alpha;
      if (std::abs(d_last->alpha) < kNullEntry) seq.elements.pop_back();
      return;
    }
    const auto* s_new = std::get_if<Snap>(&element);
    auto* s_last = std::get_if<Snap>(&last);
    if (s_new && s_last) {
      auto& th = s_last->thetas;
      if (th.size() < s_new->thetas.size()) th.resize(s_new->thetas.size(), 0.0);
      for (std::size_t i = 0; i < s_new->thetas.size(); ++i) th[i] += s_new->thetas[i];
      if (std::all_of(th.begin(), th.end(), is_zero_phase)) seq.elements.pop_back();
      return;
    }
  }
  seq.elements.push_back(element);
}

// Fidelity objective for the layered ansatz, evaluated in the eigenbasis of
// the displacement generator: four matrix-vector products for k = 2.
class AnsatzObjective {
 public:
  AnsatzObjective(const StateVector& target, int layers, int d, int n_cavity)
      : layers_(layers), d_(d), disp_(truncated_displacement(n_cavity)) {
    StateVector padded = StateVector::Zero(n_cavity);
    padded.head(target.size()) = target;
    target_eig_ = disp_.eigenvectors().adjoint() * padded;
    vacuum_eig_ = disp_.eigenvectors().row(0).adjoint();
    work_.resize(n_cavity);
    fock_.resize(n_cavity);
  }

  int size() const { return layers_ + 1 + layers_ * d_; }

  double operator()(const double* x) const {
    const auto& vecs = disp_.eigenvectors();
    const auto& vals = disp_.eigenvalues();
    const int n = static_cast<int>(vals.size());
    for (int j = 0; j < n; ++j) work_(j) = vacuum_eig_(j) * std::polar(1.0, -x[0] * vals(j));
    for (int l = 0; l < layers_; ++l) {
      fock_.noalias() = vecs * work_;
      const double* th = x + layers_ + 1 + l * d_;
      for (int i = 0; i < d_; ++i) fock_(i) *= std::polar(1.0, th[i]);
      work_.noalias() = vecs.adjoint() * fock_;
      for (int j = 0; j < n; ++j) work_(j) *= std::polar(1.0, -x[l + 1] * vals(j));
    }
    const Complex overlap = target_eig_.dot(work_);
    return std::max(0.0, 1.0 - std::norm(overlap));
  }

 private:
  int layers_;
  int d_;
  const TruncatedDisplacement& disp_;
  StateVector target_eig_;
  StateVector vacuum_eig_;
  mutable StateVector work_;
  mutable StateVector fock_;
};

struct GslContext {
  const AnsatzObjective* objective;
  double step;
  std::vector<double> scratch;
};

double gsl_f(const gsl_vector* v, void* params) {
  auto* ctx = static_cast<GslContext*>(params);
  for (std::size_t i = 0; i < v->size; ++i) ctx->scratch[i] = gsl_vector_get(v, i);
  return (*ctx->objective)(ctx->scratch.data());
}

void gsl_df(const gsl_vector* v, void* params, gsl_vector* grad) {
  auto* ctx = static_cast<GslContext*>(params);
  auto& x = ctx->scratch;
  for (std::size_t i = 0; i < v->size; ++i) x[i] = gsl_vector_get(v, i);
  for (std::size_t i = 0; i < v->size; ++i) {
    const double keep = x[i];
    x[i] = keep + ctx->step;
    const double up = (*ctx->objective)(x.data());
    x[i] = keep - ctx->step;
    const double down = (*ctx->objective)(x.data());
    x[i] = keep;
    gsl_vector_set(grad, i, (up - down) / (2.0 * ctx->step));
  }
}

void gsl_fdf(const gsl_vector* v, void* params, double* f, gsl_vector* grad) {
  *f = gsl_f(v, params);
  gsl_df(v, params, grad);
}

void disable_gsl_abort() {
  static std::once_flag flag;
  std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

struct LocalResult {
  std::vector<double> x;
  double value;
  int iterations;
};

LocalResult minimize(const AnsatzObjective& objective, std::vector<double> x0, const OptimizerConfig& opt) {
  const std::size_t n = x0.size();
  GslContext ctx{&objective, opt.gradient_step, std::vector<double>(n)};
  gsl_multimin_function_fdf fn{&gsl_f, &gsl_df, &gsl_fdf, n, &ctx};
  gsl_vector* x = gsl_vector_alloc(n);
  for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x, i, x0[i]);
  gsl_multimin_fdfminimizer* s = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n);
  gsl_multimin_fdfminimizer_set(s, &fn, x, 0.01, 0.1);
  int iter = 0;
  while (iter < opt.max_iterations) {
    ++iter;
    if (gsl_multimin_fdfminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_gradient(s->gradient, opt.gradient_tol) == GSL_SUCCESS) break;
  }
  LocalResult out{std::vector<double>(n), s->f, iter};
  for (std::size_t i = 0; i < n; ++i) out.x[i] = gsl_vector_get(s->x, i);
  gsl_multimin_fdfminimizer_free(s);
  gsl_vector_free(x);
  return out;
}

}  // namespace

double state_infidelity(const StateVector& target, const StateVector& actual) {
  const Eigen::Index n = std::min(target.size(), actual.size());
  const Complex overlap = target.head(n).dot(actual.head(n));
  return std::clamp(1.0 - std::norm(overlap), 0.0, 1.0);
}

double unitary_infidelity(const Operator& target, const Operator& actual) {
  const Eigen::Index d = target.rows();
  if (target.cols() != d || actual.rows() < d || actual.cols() < d) {
    throw ValidationError("unitary_infidelity: incompatible dimensions");
  }
  const Operator a = actual.leftCols(d);
  const double defect = (a.adjoint() * a - Operator::Identity(d, d)).norm();
  if (defect > 1e-8) {
    const Complex tr = (target.adjoint() * a.topRows(d)).trace();
    return std::clamp(1.0 - std::norm(tr / static_cast<double>(d)), 0.0, 1.0);
  }
  Operator delta = a;
  delta.topRows(d) -= target;
  const Complex t = (target.adjoint() * delta.topRows(d)).trace();
  const double s = delta.squaredNorm() - std::norm(t) / static_cast<double>(d);
  return std::clamp(s / static_cast<double>(d), 0.0, 1.0);
}

double state_fidelity(const Operator& rho, const StateVector& psi) {
  if (psi.size() > rho.rows() || rho.rows() != rho.cols()) {
    throw ValidationError("state_fidelity: state longer than the density matrix");
  }
  const Eigen::Index n = psi.size();
  return std::max(0.0, psi.dot(rho.topLeftCorner(n, n) * psi).real());
}

GateSequence exact_compile(const Operator& u) {
  const int d = static_cast<int>(u.rows());
  if (d < 1 || u.cols() != d || !u.allFinite()) throw ValidationError("exact_compile needs a square matrix");
  if (unitarity_defect(u) > kUnitaryTolerance) throw ValidationError("exact_compile input is not unitary");

  Operator w = u;
  std::vector<std::vector<double>> snaps(d);
  std::vector<std::vector<double>> angles(d);
  for (int j = d - 1; j >= 0; --j) {
    auto& th = snaps[j];
    th.resize(j + 1);
    for (int i = 0; i <= j; ++i) {
      th[i] = std::abs(w(i, j)) < kNullEntry ? 0.0 : -std::arg(w(i, j));
      w.row(i) *= std::polar(1.0, th[i]);
    }
    auto& al = angles[j];
    al.resize(j);
    for (int i = 0; i < j; ++i) {
      const double a = w(i, j).real(), b = w(i + 1, j).real();
      const double angle = (std::abs(a) < kNullEntry && std::abs(b) < kNullEntry) ? 0.0 : std::atan2(a, b);
      al[i] = angle;
      const double c = std::cos(angle), s = std::sin(angle);
      const Eigen::RowVectorXcd top = w.row(i), bottom = w.row(i + 1);
      w.row(i) = c * top - s * bottom;
      w.row(i + 1) = s * top + c * bottom;
      if (std::abs(w(i, j)) > kEliminationTolerance) throw RuntimeFailure("Givens elimination left a residual");
    }
    for (int i = 0; i < j; ++i) {
      if (std::abs(w(j, i)) > kRowTolerance) throw RuntimeFailure("row not cleared after column elimination");
    }
  }

  GateSequence seq;
  seq.d = d;
  for (int j = 0; j < d; ++j) {
    for (int i = j - 1; i >= 0; --i) seq.elements.emplace_back(Givens{i, -angles[j][i]});
    std::vector<double> th(snaps[j].size());
    for (std::size_t i = 0; i < th.size(); ++i) th[i] = -snaps[j][i];
    seq.elements.emplace_back(Snap{std::move(th)});
  }
  return seq;
}

GateSequence givens_to_native(int k, double theta, int m, int d) {
  if (k < 0) throw ValidationError("Givens level must be non-negative");
  if (m < 1) throw ValidationError("repetition count must be >= 1");
  if (!std::isfinite(theta)) throw ValidationError("Givens angle must be finite");
  if (d <= 0) d = k + 2;
  if (d < k + 2) throw ValidationError("qudit dimension too small for the Givens level");
  const double a = theta / (4.0 * m * std::sqrt(k + 1.0));
  const Snap reflect{std::vector<double>(k + 1, kPi)};
  GateSequence seq;
  seq.d = d;
  seq.elements.emplace_back(Displacement{a});
  for (int r = 0; r < m; ++r) {
    seq.elements.emplace_back(reflect);
    seq.elements.emplace_back(Displacement{-2.0 * a});
    seq.elements.emplace_back(reflect);
    seq.elements.emplace_back(Displacement{r + 1 < m ? 2.0 * a : a});
  }
  return seq;
}

double givens_error(int k, double theta, int m, int d, int n_cavity) {
  if (d < k + 2 || d > n_cavity) throw ValidationError("givens_error: need k + 2 <= d <= n_cavity");
  const Operator v = sequence_matrix(givens_to_native(k, theta, m, d), n_cavity);
  const Operator g = givens_matrix(k, theta, d);
  return unitary_infidelity(g, v);
}

double givens_error_constant(int k, int d, int n_cavity) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, double> cache;
  const auto key = std::make_tuple(k, d, n_cavity);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double c = givens_error(k, kCalibrationAngle, 1, d, n_cavity) / std::pow(kCalibrationAngle, 6);
  std::lock_guard lock(mutex);
  cache.emplace(key, c);
  return c;
}

NativeCompilation native_compile(const Operator& u, double error_budget, int n_cavity) {
  if (!(error_budget > 0.0)) throw ValidationError("error budget must be positive");
  const GateSequence exact = exact_compile(u);
  const int d = exact.d;
  if (d > n_cavity) throw ValidationError("qudit dimension exceeds n_cavity");

  // Model error c theta^6 / m^4 per rotation.
  std::vector<double> weight;
  for (const auto& e : exact.elements) {
    if (const auto* g = std::get_if<Givens>(&e); g && std::abs(g->angle) > kNullEntry) {
      weight.push_back(givens_error_constant(g->level, d, n_cavity) * std::pow(g->angle, 6));
    }
  }

  // Greedy integer allocation: every extra repetition costs the same number of
  // native gates, so repeatedly refine the rotation with the largest error
  // reduction until the modelled total fits the target.
  const auto allocate = [&](double target) {
    std::vector<int> m(weight.size(), 1);
    double total = 0.0;
    for (double w : weight) total += w;
    const auto gain = [&](std::size_t r) {
      return weight[r] * (std::pow(m[r], -4.0) - std::pow(m[r] + 1, -4.0));
    };
    std::priority_queue<std::pair<double, std::size_t>> queue;
    for (std::size_t r = 0; r < weight.size(); ++r) queue.emplace(gain(r), r);
    while (total > target && !queue.empty()) {
      const auto [g, r] = queue.top();
      queue.pop();
      total -= g;
      ++m[r];
      queue.emplace(gain(r), r);
    }
    return std::make_pair(m, total);
  };

  const auto build = [&](const std::vector<int>& reps, double predicted) {
    NativeCompilation out;
    out.sequence.d = d;
    out.repetitions = reps;
    out.predicted_infidelity = predicted;
    std::size_t r = 0;
    for (const auto& e : exact.elements) {
      if (const auto* g = std::get_if<Givens>(&e)) {
        if (std::abs(g->angle) <= kNullEntry) continue;
        for (const auto& native : givens_to_native(g->level, g->angle, reps[r++], d).elements) {
          push_merged(out.sequence, native);
        }
      } else if (const auto* s = std::get_if<Snap>(&e)) {
        if (std::all_of(s->thetas.begin(), s->thetas.end(), is_zero_phase)) continue;
        push_merged(out.sequence, e);
      }
    }
    out.displacements = out.sequence.count_displacements();
    out.snaps = out.sequence.count_snaps();
    out.measured_infidelity = unitary_infidelity(u, sequence_matrix(out.sequence, n_cavity));
    return out;
  };

  // Rotations are not perfectly incoherent; tighten the modelled target until
  // the compiled product itself meets the budget.
  double target = error_budget;
  for (int attempt = 0;; ++attempt) {
    auto [reps, predicted] = allocate(target);
    auto out = build(reps, predicted);
    if (out.measured_infidelity <= error_budget || attempt == kMaxTightening) {
      if (out.measured_infidelity > error_budget) throw RuntimeFailure("native_compile could not meet the budget");
      return out;
    }
    target *= 0.8 * error_budget / out.measured_infidelity;
  }
}

void OptimizerConfig::validate() const {
  if (restarts < 1 || max_iterations < 1) throw ValidationError("optimizer needs restarts and iterations >= 1");
  if (!(gradient_step > 0.0) || !(threshold > 0.0)) throw ValidationError("optimizer step and threshold must be > 0");
  if (n_cavity < 1) throw ValidationError("n_cavity must be >= 1");
}

GateSequence ansatz_sequence(const std::vector<double>& params, int layers, int d) {
  if (static_cast<int>(params.size()) != layers + 1 + layers * d) {
    throw ValidationError("ansatz parameter vector has the wrong length");
  }
  GateSequence seq;
  seq.d = d;
  seq.elements.emplace_back(Displacement{params[0]});
  for (int l = 0; l < layers; ++l) {
    const auto first = params.begin() + layers + 1 + l * d;
    seq.elements.emplace_back(Snap{std::vector<double>(first, first + d)});
    seq.elements.emplace_back(Displacement{params[l + 1]});
  }
  return seq;
}

CompilationResult variational_state_prep(const StateVector& target, int layers, const OptimizerConfig& opt,
                                         std::uint64_t seed) {
  opt.validate();
  const int d = static_cast<int>(target.size());
  if (layers < 1) throw ValidationError("ansatz needs at least one layer");
  if (d < 1 || d > opt.n_cavity) throw ValidationError("target dimension must lie in [1, n_cavity]");
  if (!target.allFinite() || std::abs(target.norm() - 1.0) > 1e-8) throw ValidationError("target must be normalized");
  disable_gsl_abort();

  const AnsatzObjective objective(target, layers, d, opt.n_cavity);
  const int n_params = objective.size();
  std::vector<double> best(n_params, 0.0);
  double best_value = objective(best.data());
  int iterations = 0;
  if (best_value > opt.good_enough) {
    for (int r = 0; r < opt.restarts; ++r) {
      std::mt19937_64 rng(split_seed(seed, static_cast<std::uint64_t>(r)));
      std::uniform_real_distribution<double> ua(-opt.alpha_init, opt.alpha_init);
      std::uniform_real_distribution<double> ut(-kPi, kPi);
      std::vector<double> x0(n_params);
      for (int i = 0; i < n_params; ++i) x0[i] = i <= layers ? ua(rng) : ut(rng);
      const auto local = minimize(objective, std::move(x0), opt);
      iterations += local.iterations;
      if (local.value < best_value) {
        best_value = local.value;
        best = local.x;
      }
      if (best_value <= opt.good_enough) break;
    }
  }
  // Fold SNAP phases into (-pi, pi] for readability; physics is unchanged.
  for (int i = layers + 1; i < n_params; ++i) best[i] = std::remainder(best[i], kTwoPi);

  CompilationResult result;
  result.sequence = ansatz_sequence(best, layers, d);
  StateVector vacuum = StateVector::Zero(opt.n_cavity);
  vacuum(0) = 1.0;
  StateVector padded = StateVector::Zero(opt.n_cavity);
  padded.head(d) = target;
  result.infidelity = state_infidelity(padded, apply_sequence(result.sequence, vacuum));
  result.iterations = iterations;
  result.converged = result.infidelity < opt.threshold;
  return result;
}

}  // namespace qudit
