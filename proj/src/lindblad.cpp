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

#include "qudit/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>

#include <boost/numeric/odeint.hpp>

namespace qudit {
namespace {

namespace odeint = boost::numeric::odeint;

constexpr double kTimeEpsilon = 1e-16;  // s

// Sparse interaction-picture generator. Rows are indexed 2*k + q; every row
// couples to at most three others: (k-1, q), (k+1, q) and (k, 1-q).
class Generator {
 public:
  Generator(int n_cavity, double chi, std::span<const DriveSegment> active)
      : n_(n_cavity), dim_(2 * n_cavity), chi_(chi), active_(active), down_(dim_), up_(dim_), flip_(dim_),
        phase_(n_cavity), sqrt_(n_cavity + 1) {
    for (int k = 0; k <= n_; ++k) sqrt_[k] = std::sqrt(static_cast<double>(k));
    for (const auto& seg : active_) (seg.channel == Channel::kCavity ? cavity_ : qubit_) = true;
  }

  int dim() const { return dim_; }
  bool cavity() const { return cavity_; }
  bool qubit() const { return qubit_; }
  // e^{i chi k t} for the last prepared time.
  Complex phase(int k) const { return phase_[k]; }

  void prepare(double t) {
    for (int k = 0; k < n_; ++k) phase_[k] = std::polar(1.0, chi_ * k * t);
    const auto c = drive_coefficients(t, active_);
    for (int k = 0; k < n_; ++k) {
      const int g = 2 * k, e = g + 1;
      if (cavity_) {
        const Complex ce = c.cavity * phase_[1];
        down_[g] = k > 0 ? c.cavity * sqrt_[k] : Complex{};
        down_[e] = k > 0 ? ce * sqrt_[k] : Complex{};
        up_[g] = k + 1 < n_ ? std::conj(c.cavity) * sqrt_[k + 1] : Complex{};
        up_[e] = k + 1 < n_ ? std::conj(ce) * sqrt_[k + 1] : Complex{};
      }
      if (qubit_) {
        flip_[e] = c.qubit * phase_[k];
        flip_[g] = std::conj(flip_[e]);
      }
    }
  }

  // out = H_I(t) * in for a column of length dim (prepare(t) must precede).
  void apply(const Complex* in, Complex* out) const {
    for (int r = 0; r < dim_; ++r) {
      Complex acc{};
      if (cavity_) {
        if (r >= 2) acc += down_[r] * in[r - 2];
        if (r + 2 < dim_) acc += up_[r] * in[r + 2];
      }
      if (qubit_) acc += flip_[r] * in[r ^ 1];
      out[r] = acc;
    }
  }

  // drho = -i [H_I, rho] + dissipator for column-major rho, evaluated column
  // by column: (rho H)(r, l) only touches columns l - 2, l + 2 and l ^ 1, and
  // the jump term reads column l + 1.
  template <bool Cavity, bool Qubit, bool Noise>
  void lindblad(const Complex* rho, Complex* drho, double gamma1, double dephasing) const {
    const double half = 0.5 * gamma1;
    const double deph = 2.0 * dephasing;
    const std::size_t stride = dim_;
    for (int l = 0; l < dim_; ++l) {
      const int ql = l & 1;
      const Complex* c = rho + l * stride;
      Complex* out = drho + l * stride;
      const Complex* cl_down = (Cavity && l >= 2) ? c - 2 * stride : nullptr;
      const Complex* cl_up = (Cavity && l + 2 < dim_) ? c + 2 * stride : nullptr;
      const Complex* cl_flip = rho + (l ^ 1) * stride;
      const Complex cd = cl_down ? std::conj(down_[l]) : Complex{};
      const Complex cu = cl_up ? std::conj(up_[l]) : Complex{};
      const Complex cf = Qubit ? std::conj(flip_[l]) : Complex{};
      const double rate_g = half * ql + (ql ? deph : 0.0);
      const double rate_e = half * (1 + ql) + (ql ? 0.0 : deph);
      const Complex feed = (Noise && ql == 0) ? gamma1 * phase_[l / 2] : Complex{};
      const Complex* cn = c + stride;
      for (int k = 0; k < n_; ++k) {
        const int g = 2 * k, e = g + 1;
        Complex ag{}, ae{};
        if constexpr (Cavity) {
          if (k > 0) {
            ag += down_[g] * c[g - 2];
            ae += down_[e] * c[e - 2];
          }
          if (k + 1 < n_) {
            ag += up_[g] * c[g + 2];
            ae += up_[e] * c[e + 2];
          }
          if (cl_down) {
            ag -= cl_down[g] * cd;
            ae -= cl_down[e] * cd;
          }
          if (cl_up) {
            ag -= cl_up[g] * cu;
            ae -= cl_up[e] * cu;
          }
        }
        if constexpr (Qubit) {
          ag += flip_[g] * c[e] - cl_flip[g] * cf;
          ae += flip_[e] * c[g] - cl_flip[e] * cf;
        }
        Complex vg{ag.imag(), -ag.real()};
        Complex ve{ae.imag(), -ae.real()};
        if constexpr (Noise) {
          vg -= rate_g * c[g];
          ve -= rate_e * c[e];
          if (ql == 0) vg += std::conj(phase_[k]) * feed * cn[e];
        }
        out[g] = vg;
        out[e] = ve;
      }
    }
  }

  template <bool Noise>
  void lindblad(const Complex* rho, Complex* drho, double gamma1, double dephasing) const {
    if (cavity_ && qubit_) return lindblad<true, true, Noise>(rho, drho, gamma1, dephasing);
    if (cavity_) return lindblad<true, false, Noise>(rho, drho, gamma1, dephasing);
    if (qubit_) return lindblad<false, true, Noise>(rho, drho, gamma1, dephasing);
    lindblad<false, false, Noise>(rho, drho, gamma1, dephasing);
  }

 private:
  int n_;
  int dim_;
  double chi_;
  std::span<const DriveSegment> active_;
  bool cavity_ = false;
  bool qubit_ = false;
  std::vector<Complex> down_, up_, flip_, phase_;
  std::vector<double> sqrt_;
};

// odeint sees interleaved (re, im) doubles so its error norm stays real.
using State = std::vector<double>;

inline const Complex* as_complex(const State& s) { return reinterpret_cast<const Complex*>(s.data()); }
inline Complex* as_complex(State& s) { return reinterpret_cast<Complex*>(s.data()); }

class LindbladSystem {
 public:
  LindbladSystem(Generator& gen, double gamma1, double dephasing) : gen_(gen), g1_(gamma1), gd_(dephasing) {}

  void operator()(const State& rho, State& drho, double t) {
    gen_.prepare(t);
    if (g1_ == 0.0 && gd_ == 0.0) {
      gen_.lindblad<false>(as_complex(rho), as_complex(drho), 0.0, 0.0);
    } else {
      gen_.lindblad<true>(as_complex(rho), as_complex(drho), g1_, gd_);
    }
  }

 private:
  Generator& gen_;
  double g1_;
  double gd_;
};

class SchroedingerSystem {
 public:
  explicit SchroedingerSystem(Generator& gen) : gen_(gen) {}

  void operator()(const State& psi, State& dpsi, double t) {
    gen_.prepare(t);
    Complex* out = as_complex(dpsi);
    gen_.apply(as_complex(psi), out);
    for (int r = 0; r < gen_.dim(); ++r) out[r] = Complex{out[r].imag(), -out[r].real()};
  }

 private:
  Generator& gen_;
};

// Interval boundaries where the right-hand side is not smooth.
std::vector<double> breakpoints(const PulseSchedule& schedule) {
  std::vector<double> pts{0.0, schedule.total_duration};
  for (const auto& seg : schedule.segments) {
    pts.push_back(seg.start);
    pts.push_back(seg.end());
    for (double k : seg.envelope.kinks()) pts.push_back(seg.start + k);
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double p : pts) {
    p = std::clamp(p, 0.0, schedule.total_duration);
    if (out.empty() || p - out.back() > kTimeEpsilon) out.push_back(p);
  }
  if (out.back() < schedule.total_duration) out.push_back(schedule.total_duration);
  return out;
}

std::vector<DriveSegment> active_segments(const PulseSchedule& schedule, double a, double b) {
  std::vector<DriveSegment> out;
  for (const auto& seg : schedule.segments) {
    if (seg.start < b - kTimeEpsilon && seg.end() > a + kTimeEpsilon) out.push_back(seg);
  }
  return out;
}

// Drives `system` across [t0, t1]; `after_step` runs on every accepted step.
template <class System, class AfterStep>
void integrate_interval(System& system, State& x, double t0, double t1, const IntegratorConfig& icfg,
                        double& dt_hint, long long& budget, AfterStep&& after_step) {
  if (icfg.method == IntegratorMethod::kFixedRK4) {
    odeint::runge_kutta4<State> stepper;
    const auto steps = static_cast<long long>(std::ceil((t1 - t0) / icfg.max_step - 1e-9));
    const long long count = std::max<long long>(steps, 1);
    const double h = (t1 - t0) / static_cast<double>(count);
    for (long long i = 0; i < count; ++i) {
      if (--budget < 0) throw RuntimeFailure("integrator step budget exhausted");
      stepper.do_step(std::ref(system), x, t0 + i * h, h);
      after_step(x, t0 + (i + 1) * h);
    }
    return;
  }
  auto stepper = odeint::make_controlled(icfg.atol, icfg.rtol, odeint::runge_kutta_dopri5<State>());
  double t = t0;
  double dt = dt_hint;
  while (t1 - t > kTimeEpsilon) {
    if (icfg.max_step > 0.0) dt = std::min(dt, icfg.max_step);
    const bool last = dt >= t1 - t;
    double step = last ? t1 - t : dt;
    const double proposed = step;
    if (--budget < 0) throw RuntimeFailure("integrator step budget exhausted");
    if (stepper.try_step(std::ref(system), x, t, step) == odeint::success) {
      if (last) t = t1;
      after_step(x, t);
      // A truncated final step should not shrink the next interval's first step.
      dt = last ? std::max(step, dt_hint) : step;
      dt_hint = dt;
    } else {
      dt = step;
      if (!std::isfinite(dt) || dt <= 0.0 || dt < proposed * 1e-12) {
        throw RuntimeFailure("integrator step size underflow");
      }
    }
  }
}

void symmetrize(State& state, int dim) {
  Complex* rho = as_complex(state);
  for (int l = 0; l < dim; ++l) {
    const std::size_t d = l + static_cast<std::size_t>(l) * dim;
    rho[d] = Complex{rho[d].real(), 0.0};
    for (int r = l + 1; r < dim; ++r) {
      const std::size_t a = r + static_cast<std::size_t>(l) * dim;
      const std::size_t b = l + static_cast<std::size_t>(r) * dim;
      const Complex avg = 0.5 * (rho[a] + std::conj(rho[b]));
      rho[a] = avg;
      rho[b] = std::conj(avg);
    }
  }
}

void check_schedule(const PulseSchedule& schedule) {
  schedule.validate();
  if (!std::isfinite(schedule.total_duration) || schedule.total_duration < 0.0) {
    throw ValidationError("schedule duration must be finite and non-negative");
  }
}

double initial_step(const IntegratorConfig& icfg) {
  return icfg.max_step > 0.0 ? std::min(1e-10, icfg.max_step) : 1e-10;
}

}  // namespace

void validate_density_matrix(const DensityMatrix& rho, double herm_tol, double trace_tol, double eig_tol) {
  if (rho.rows() == 0 || rho.rows() != rho.cols()) throw ValidationError("density matrix must be square");
  if (!rho.allFinite()) throw ValidationError("density matrix has non-finite entries");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > herm_tol) {
    throw ValidationError("density matrix is not Hermitian");
  }
  if (std::abs(rho.trace() - 1.0) > trace_tol) throw ValidationError("density matrix trace differs from 1");
  const Operator h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> solver(h, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -eig_tol) {
    throw ValidationError("density matrix has a negative eigenvalue");
  }
}

DensityMatrix pure_density(const StateVector& psi) { return psi * psi.adjoint(); }

DensityMatrix ground_state(const FockSpaceConfig& cfg) {
  cfg.validate();
  DensityMatrix rho = DensityMatrix::Zero(2 * cfg.n_cavity, 2 * cfg.n_cavity);
  rho(0, 0) = 1.0;
  return rho;
}

void NoiseModel::validate() const {
  if (std::isnan(t1) || std::isnan(t2) || t1 <= 0.0 || t2 <= 0.0) {
    throw ValidationError("T1 and T2 must be positive");
  }
  if (std::isinf(t2) && !std::isinf(t1)) throw ValidationError("T2 > 2 T1 is unphysical");
  if (!std::isinf(t2) && t2 > 2.0 * t1 * (1.0 + 1e-12)) throw ValidationError("T2 > 2 T1 is unphysical");
}

double NoiseModel::gamma1() const { return std::isinf(t1) ? 0.0 : 1.0 / t1; }

double NoiseModel::gamma_phi() const {
  const double g2 = std::isinf(t2) ? 0.0 : 1.0 / t2;
  return std::max(0.0, g2 - 0.5 * gamma1());
}

double NoiseModel::dephasing_rate() const { return (double_gamma_phi ? 2.0 : 0.5) * gamma_phi(); }

std::vector<Operator> collapse_operators(const NoiseModel& noise, const FockSpaceConfig& cfg) {
  noise.validate();
  cfg.validate();
  const int dim = 2 * cfg.n_cavity;
  std::vector<Operator> ops;
  if (noise.gamma1() > 0.0) {
    Operator lower = Operator::Zero(dim, dim);
    for (int k = 0; k < cfg.n_cavity; ++k) lower(2 * k, 2 * k + 1) = std::sqrt(noise.gamma1());
    ops.push_back(std::move(lower));
  }
  if (noise.dephasing_rate() > 0.0) {
    Operator z = Operator::Zero(dim, dim);
    const double s = std::sqrt(noise.dephasing_rate());
    for (int k = 0; k < cfg.n_cavity; ++k) {
      z(2 * k + 1, 2 * k + 1) = s;
      z(2 * k, 2 * k) = -s;
    }
    ops.push_back(std::move(z));
  }
  return ops;
}

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw ValidationError("integrator tolerances must be positive");
  if (method == IntegratorMethod::kFixedRK4 && !(max_step > 0.0)) {
    throw ValidationError("fixed-step RK4 needs max_step > 0");
  }
  if (max_steps < 1) throw ValidationError("max_steps must be positive");
}

void TrajectoryRecorder::record(double t, const DensityMatrix& rho, int n_cavity) {
  Sample s{t, 0.0, 0.0, 0.0};
  for (int k = 0; k < n_cavity; ++k) {
    const double pg = rho(2 * k, 2 * k).real();
    const double pe = rho(2 * k + 1, 2 * k + 1).real();
    s.excited += pe;
    s.photons += k * (pg + pe);
  }
  s.purity = rho.cwiseAbs2().sum();
  samples_.push_back(s);
}

void TrajectoryRecorder::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw RuntimeFailure("cannot open trajectory file " + path);
  out << "t,excited,photons,purity\n" << std::setprecision(17);
  for (const auto& s : samples_) out << s.t << ',' << s.excited << ',' << s.photons << ',' << s.purity << '\n';
  if (!out) throw RuntimeFailure("failed writing trajectory file " + path);
}

DensityMatrix evolve(const DensityMatrix& rho0, const PulseSchedule& schedule, const NoiseModel& noise,
                     const IntegratorConfig& icfg, TrajectoryRecorder* recorder) {
  if (rho0.rows() < 2 || rho0.rows() % 2 != 0) throw ValidationError("state must live on cavity x qubit");
  validate_density_matrix(rho0);
  noise.validate();
  icfg.validate();
  check_schedule(schedule);

  const int dim = static_cast<int>(rho0.rows());
  const int n = dim / 2;
  State x(2 * rho0.size());
  std::copy(rho0.data(), rho0.data() + rho0.size(), as_complex(x));
  if (recorder) recorder->record(0.0, rho0, n);

  const auto pts = breakpoints(schedule);
  double dt_hint = initial_step(icfg);
  long long budget = icfg.max_steps;
  const double rate = noise.dephasing_rate();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto active = active_segments(schedule, pts[i], pts[i + 1]);
    Generator gen(n, schedule.chi, active);
    LindbladSystem system(gen, noise.gamma1(), rate);
    integrate_interval(system, x, pts[i], pts[i + 1], icfg, dt_hint, budget, [&](State& s, double t) {
      symmetrize(s, dim);
      if (recorder && recorder->due(t)) {
        recorder->record(t, Eigen::Map<const Operator>(as_complex(s), dim, dim), n);
      }
    });
  }

  // Back to the rotating frame: rho_kl *= exp(-i (E_k - E_l) T), E_(k,q) = chi k q.
  DensityMatrix rho = Eigen::Map<const Operator>(as_complex(x), dim, dim);
  const double T = schedule.total_duration;
  std::vector<Complex> ph(dim);
  for (int r = 0; r < dim; ++r) ph[r] = std::polar(1.0, -schedule.chi * (r / 2) * (r & 1) * T);
  for (int l = 0; l < dim; ++l) {
    for (int r = 0; r < dim; ++r) rho(r, l) *= ph[r] * std::conj(ph[l]);
  }
  return rho;
}

StateVector evolve_pure(const StateVector& psi0, const PulseSchedule& schedule, const IntegratorConfig& icfg) {
  if (psi0.size() < 2 || psi0.size() % 2 != 0) throw ValidationError("state must live on cavity x qubit");
  if (std::abs(psi0.norm() - 1.0) > 1e-8) throw ValidationError("state must be normalized");
  icfg.validate();
  check_schedule(schedule);

  const int dim = static_cast<int>(psi0.size());
  const int n = dim / 2;
  State x(2 * psi0.size());
  std::copy(psi0.data(), psi0.data() + psi0.size(), as_complex(x));
  const auto pts = breakpoints(schedule);
  double dt_hint = initial_step(icfg);
  long long budget = icfg.max_steps;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto active = active_segments(schedule, pts[i], pts[i + 1]);
    Generator gen(n, schedule.chi, active);
    SchroedingerSystem system(gen);
    integrate_interval(system, x, pts[i], pts[i + 1], icfg, dt_hint, budget, [](State&, double) {});
  }
  StateVector psi = Eigen::Map<const StateVector>(as_complex(x), dim);
  const double T = schedule.total_duration;
  for (int r = 0; r < dim; ++r) psi(r) *= std::polar(1.0, -schedule.chi * (r / 2) * (r & 1) * T);
  return psi;
}

DensityMatrix trace_out_qubit(const DensityMatrix& rho, const FockSpaceConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_cavity;
  if (rho.rows() != 2 * n || rho.cols() != 2 * n) throw ValidationError("dimension mismatch in trace_out_qubit");
  DensityMatrix out(n, n);
  for (int l = 0; l < n; ++l) {
    for (int r = 0; r < n; ++r) out(r, l) = rho(2 * r, 2 * l) + rho(2 * r + 1, 2 * l + 1);
  }
  return out;
}

FockDistribution fock_distribution(const DensityMatrix& rho_cavity, int d) {
  if (d < 1 || d > rho_cavity.rows()) throw ValidationError("d must lie in [1, dim]");
  FockDistribution out;
  out.probs.resize(d);
  for (int i = 0; i < d; ++i) out.probs(i) = std::clamp(rho_cavity(i, i).real(), 0.0, 1.0);
  out.leakage = 1.0 - out.probs.sum();
  return out;
}

}  // namespace qudit
