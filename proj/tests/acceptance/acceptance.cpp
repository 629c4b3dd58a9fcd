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

// Acceptance suite. Usage: acceptance [N ...]  (default: all criteria).
// Prints one PASS/FAIL line per criterion; exit status 1 if any failed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "qudit/bench.hpp"
#include "qudit/compile.hpp"
#include "qudit/gates.hpp"
#include "qudit/hilbert.hpp"
#include "qudit/lindblad.hpp"
#include "qudit/metrics.hpp"
#include "qudit/pulse.hpp"
#include "qudit/stats.hpp"

namespace {

using namespace qudit;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Outcome exact_round_trip() {
  double worst = 0.0;
  bool counts_ok = true;
  for (int d : {2, 4, 8}) {
    const auto ens = haar_ensemble(d, 50, 1000 + d);
    for (const auto& u : ens.members) {
      const auto seq = exact_compile(u);
      worst = std::max(worst, (sequence_matrix(seq, d) - u).norm());
      counts_ok = counts_ok && seq.count_snaps() == static_cast<std::size_t>(d) &&
                  seq.count_givens() == static_cast<std::size_t>(d * (d - 1) / 2) && seq.count_displacements() == 0;
    }
  }
  return {worst < 1e-9 && counts_ok, fmt("max Frobenius error %.2e, gate counts %s", worst, counts_ok ? "exact" : "WRONG")};
}

Outcome givens_native() {
  const std::vector<double> thetas{0.01, 0.02, 0.05, 0.1, 0.2};
  std::vector<double> slopes;
  for (int k : {0, 3}) {
    std::vector<double> err;
    for (double th : thetas) err.push_back(givens_error(k, th, 1, 8));
    slopes.push_back(loglog_slope(thetas, err));
  }
  // Gate-count scaling of full native compilation at a 1e-3 infidelity budget,
  // averaged over a few Haar unitaries per dimension.
  const double budget = 1e-3;
  const std::vector<double> dims{2, 4, 8, 16};
  std::vector<double> gates;
  double worst_infid = 0.0;
  for (double dd : dims) {
    const int d = static_cast<int>(dd);
    const auto ens = haar_ensemble(d, 3, 2000 + d);
    double total = 0.0;
    for (const auto& u : ens.members) {
      const auto nc = native_compile(u, budget);
      total += static_cast<double>(nc.native_gates());
      worst_infid = std::max(worst_infid, nc.measured_infidelity);
    }
    gates.push_back(total / ens.count());
  }
  const double exponent = loglog_slope(dims, gates);
  const bool pass = std::abs(slopes[0] - 6.0) <= 0.3 && std::abs(slopes[1] - 6.0) <= 0.3 && exponent <= 2.7 &&
                    worst_infid <= budget;
  return {pass, fmt("slope k=0 %.3f, k=3 %.3f; gate-count exponent %.2f at budget %.0e (gates %.0f/%.0f/%.0f/%.0f, "
                    "max infidelity %.1e)",
                    slopes[0], slopes[1], exponent, budget, gates[0], gates[1], gates[2], gates[3], worst_infid)};
}

Outcome displacement_oracle() {
  const int n = 60, block = 25;
  const Operator a = annihilation({n, block});
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uni(-5.0, 5.0);
  double worst = 0.0, worst_alpha = 0.0, largest_ok = 0.0;
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    const double alpha = uni(rng);
    const Operator reference = (alpha * (a.adjoint() - a)).eval().exp();
    const Operator closed = displacement_matrix(alpha, {n, block});
    const double err = (closed.topLeftCorner(block, block) - reference.topLeftCorner(block, block)).cwiseAbs().maxCoeff();
    if (err > worst) {
      worst = err;
      worst_alpha = alpha;
    }
    if (err >= 1e-8) {
      ++failures;
    } else {
      largest_ok = std::max(largest_ok, std::abs(alpha));
    }
  }
  return {failures == 0,
          fmt("max entry error %.2e at alpha=%.3f; %d/100 samples above 1e-8 (truncated-generator exponential at 60 "
              "levels; largest passing |alpha| %.2f)",
              worst, worst_alpha, failures, largest_ok)};
}

Outcome frame_potential_check() {
  std::string detail;
  bool pass = true;
  for (int d : {4, 8}) {
    const auto ens = haar_ensemble(d, 500, 4000 + d);
    for (int t = 1; t <= 4; ++t) {
      const double ratio = frame_potential(ens, t) / std::tgamma(t + 1.0);
      pass = pass && std::abs(ratio - 1.0) <= 0.25;
      detail += fmt("%sd=%d,t=%d:%.3f", detail.empty() ? "" : " ", d, t, ratio);
    }
  }
  return {pass, "F/t! " + detail};
}

Outcome collision() {
  const int d = 16;
  const auto ens = haar_ensemble(d, 1000, 5016);
  double qq = 0.0;
  for (const auto& u : ens.members) qq += ideal_distribution(u).squaredNorm();
  const double value = d * qq / ens.count() - 1.0;
  const double expected = (d - 1.0) / (d + 1.0);
  return {std::abs(value - expected) <= 0.05, fmt("d*E[q.q]-1 = %.4f (expected %.4f)", value, expected)};
}

Outcome hog_calibration() {
  const int d = 32;
  const auto ens = haar_ensemble(d, 500, 6032);
  std::vector<DistributionPair> ideal, flat;
  for (const auto& u : ens.members) {
    const RealVector q = ideal_distribution(u);
    ideal.push_back({q, q});
    flat.push_back({q, RealVector::Constant(d, 1.0 / d)});
  }
  const double hog_ideal = hog_score(ideal), hog_flat = hog_score(flat);
  const double target = (1.0 + std::log(2.0)) / 2.0;
  return {std::abs(hog_ideal - target) <= 0.05 && std::abs(hog_flat - 0.5) <= 0.02,
          fmt("p=q: %.4f (target %.4f); uniform p: %.4f", hog_ideal, target, hog_flat)};
}

Outcome lindblad_oracle() {
  const int n = 60;
  const FockSpaceConfig cfg{n, 8};
  double drift = 0.0;
  auto track = [&](const DensityMatrix& rho) { drift = std::max(drift, std::abs(rho.trace().real() - 1.0)); };

  PulseSchedule idle;
  idle.total_duration = 100e-6;
  DensityMatrix excited = DensityMatrix::Zero(2 * n, 2 * n);
  excited(1, 1) = 1.0;
  const auto decayed = evolve(excited, idle, NoiseModel{150e-6, 300e-6});
  track(decayed);
  const double pop = decayed(1, 1).real();
  const double pop_err = std::abs(pop - std::exp(-2.0 / 3.0));

  // Pure dephasing: T1 = inf, T2 = 40 us, coherence 0.5 exp(-t/T2).
  const double t2 = 40e-6, t = 50e-6;
  PulseSchedule wait;
  wait.total_duration = t;
  StateVector plus = StateVector::Zero(2 * n);
  plus(0) = plus(1) = std::sqrt(0.5);
  const auto dephased = evolve(pure_density(plus), wait, NoiseModel{kNoDecay, t2});
  track(dephased);
  const double coh_err = std::abs(std::abs(dephased(0, 1)) - 0.5 * std::exp(-t / t2));

  // Driven run with both channels for the trace check.
  PulseSchedule driven = displacement_schedule({0.8, 0.3});
  const std::vector<double> th{0.4, -1.0, 2.0};
  driven.append(snap_schedule(th, kDefaultChi));
  track(evolve(ground_state(cfg), driven, NoiseModel{20e-6, 25e-6}));

  return {pop_err <= 1e-3 && coh_err <= 1e-3 && drift < 1e-7,
          fmt("excited pop %.6f (err %.1e); coherence err %.1e; max trace drift %.1e", pop, pop_err, coh_err, drift)};
}

Outcome pulse_fidelity() {
  const int n = 60;
  StateVector vac = StateVector::Zero(2 * n);
  vac(0) = 1.0;
  const StateVector psi = evolve_pure(vac, displacement_schedule(1.0));
  const StateVector exact = displacement_matrix(1.0, {n, 8}).col(0);
  Complex overlap{};
  for (int k = 0; k < n; ++k) overlap += std::conj(exact(k)) * psi(2 * k);
  const double disp_fid = std::norm(overlap);

  const std::vector<int> levels{1};
  const std::vector<double> th{kPi / 2};
  SnapPulseConfig snap;
  snap.weak_drive_ratio = 10.0;
  const auto sched = selective_snap_schedule(levels, th, kDefaultChi, snap);
  StateVector one = StateVector::Zero(2 * n);
  one(2) = 1.0;
  const StateVector out = evolve_pure(one, sched);
  const double phase_err = std::abs(std::remainder(std::arg(out(2)) - kPi / 2, kTwoPi));
  const double leakage = 1.0 - std::norm(out(2));
  return {disp_fid >= 0.999 && phase_err < 0.05 && leakage < 1e-2,
          fmt("D(1) fidelity %.6f; SNAP phase error %.2e rad, leakage %.2e", disp_fid, phase_err, leakage)};
}

Outcome statistics() {
  const auto n = chebyshev_n(0.1, 0.99);
  const auto post = posterior({5, 2, 0, 9}, 0.5);
  const auto mv = component_mean_var(post, 3);
  const double a = 9.5, total = 18.0;
  const double dir_err =
      std::max(std::abs(mv.mean - a / total), std::abs(mv.variance - a * (total - a) / (total * total * (total + 1))));
  const std::vector<int> heavy{0, 3};
  const auto beta = heavy_posterior({5, 2, 0, 9}, heavy, 0.5);
  const double beta_err = std::max(std::abs(beta.mean() - 14.5 / 17.0),
                                   std::abs(beta.variance() - 14.5 * 2.5 / (17.0 * 17.0 * 18.0)));
  const std::vector<double> constant(50, 0.731);
  const double boot_std = bayesian_bootstrap(constant, 2000, 3).std;
  return {n == 2498 && dir_err < 1e-12 && beta_err < 1e-12 && boot_std == 0.0,
          fmt("chebyshev_n=%lld; Dirichlet err %.1e; Beta err %.1e; constant bootstrap std %.1e",
              static_cast<long long>(n), dir_err, beta_err, boot_std)};
}

Outcome paper_trends() {
  ExperimentConfig c;
  c.mode = SimulationMode::kPulse;
  c.n_unitaries = 50;
  c.seed = 2024;
  c.bootstrap_resamples = 2000;
  c.validate();

  const auto ens8 = compile_ensemble(c, 8);
  std::vector<double> hog;
  std::string detail = fmt("d=8 accepted %zu/%zu; HOG vs T1:", ens8.accepted, ens8.candidates.size());
  for (double t1 : {10e-6, 25e-6, 50e-6, 100e-6}) {
    const auto r = evaluate_ensemble(c, ens8, t1, 2.0 * t1);
    hog.push_back(r.hog.value);
    detail += fmt(" %.4f", r.hog.value);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < hog.size(); ++i) monotone = monotone && hog[i] >= hog[i - 1];
  bool pass = monotone && hog.back() > 2.0 / 3.0 && ens8.accepted == 50;

  const auto ens4 = compile_ensemble(c, 4);
  pass = pass && ens4.accepted == 50;
  for (const auto* ens : {&ens4, &ens8}) {
    const auto weak = evaluate_ensemble(c, *ens, 150e-6, 300e-6);
    const auto strong = evaluate_ensemble(c, *ens, 150e-6, 35e-6);
    pass = pass && weak.hog.value >= strong.hog.value && weak.xeb_normalized.value >= strong.xeb_normalized.value;
    detail += fmt("; d=%d T2=300/35us HOG %.4f/%.4f XEB_n %.4f/%.4f", ens->d, weak.hog.value, strong.hog.value,
                  weak.xeb_normalized.value, strong.xeb_normalized.value);
  }
  return {pass, detail};
}

Outcome gate_level_sanity() {
  ExperimentConfig c;
  c.d_values = {4};
  c.mode = SimulationMode::kGate;
  c.n_unitaries = 100;
  c.seed = 77;
  c.bootstrap_resamples = 2000;
  const auto ens = compile_ensemble(c, 4);
  const auto rec = evaluate_ensemble(c, ens, kNoDecay, kNoDecay);
  std::vector<DistributionPair> ideal;
  for (const auto& cand : ens.candidates) {
    if (!cand.accepted) continue;
    const RealVector q = ideal_distribution(cand.unitary);
    ideal.push_back({q, q});
  }
  const double hog_ideal = hog_score(ideal);
  return {rec.xeb_normalized.value >= 0.95 && std::abs(rec.hog.value - hog_ideal) <= 0.02 && rec.accepted == 100,
          fmt("accepted %zu/%zu; XEB_n %.4f; HOG %.4f vs exact %.4f", rec.accepted, rec.candidates,
              rec.xeb_normalized.value, rec.hog.value, hog_ideal)};
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

const std::map<int, Criterion>& criteria() {
  static const std::map<int, Criterion> all{
      {1, {"exact compiler round trip", 30, exact_round_trip}},
      {2, {"native Givens decomposition", 300, givens_native}},
      {3, {"displacement oracle equivalence", 120, displacement_oracle}},
      {4, {"frame potential", 300, frame_potential_check}},
      {5, {"Haar collision statistic", 60, collision}},
      {6, {"HOG calibration", 60, hog_calibration}},
      {7, {"Lindblad oracle", 60, lindblad_oracle}},
      {8, {"noiseless pulse-level gates", 300, pulse_fidelity}},
      {9, {"statistics", 60, statistics}},
      {10, {"pulse-level noise trends", 5400, paper_trends}},
      {11, {"gate-level end-to-end", 600, gate_level_sanity}},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
  if (selected.empty()) {
    for (const auto& [id, c] : criteria()) selected.push_back(id);
  }
  int failed = 0;
  for (int id : selected) {
    const auto it = criteria().find(id);
    if (it == criteria().end()) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    const auto& c = it->second;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = out.pass && in_time;
    if (!pass) ++failed;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << " (" << c.name << "): " << out.detail << " ["
              << fmt("%.1f", secs) << " s of " << c.budget_seconds << " s" << (in_time ? "" : ", OVER BUDGET") << "]"
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
