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

#include "qudit/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/crc.hpp>
#include <yaml-cpp/yaml.h>

#include "qudit/hilbert.hpp"
#include "qudit/stats.hpp"

#ifndef QUDIT_VERSION
#define QUDIT_VERSION "0.0.0"
#endif

namespace qudit {
namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads. The first exception
// thrown by any task is rethrown after all threads join.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  if (n == 0) return;
  const std::size_t threads = std::min<std::size_t>(std::max(workers, 1), n);
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

std::string time_text(double t) {
  if (t == kTiedT2) return "2*t1";
  if (std::isinf(t)) return "inf";
  std::ostringstream s;
  s << std::setprecision(17) << t;
  return s.str();
}

nlohmann::json time_json(double t) {
  if (t == kTiedT2 || std::isinf(t)) return time_text(t);
  return t;
}

double time_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kNoDecay;
    if (s == "2*t1") return kTiedT2;
    throw ValidationError("bad time value '" + s + "'");
  }
  return j.get<double>();
}

// Microsecond label for file names.
std::string time_label(double t) {
  if (std::isinf(t)) return "inf";
  std::ostringstream s;
  s << std::setprecision(6) << t * 1e6 << "us";
  return s.str();
}

const char* mode_name(SimulationMode m) { return m == SimulationMode::kGate ? "gate" : "pulse"; }
const char* post_name(PostSelection p) { return p == PostSelection::kGate ? "gate" : "pulse"; }

SimulationMode parse_mode(const std::string& s) {
  if (s == "gate") return SimulationMode::kGate;
  if (s == "pulse") return SimulationMode::kPulse;
  throw ValidationError("mode must be 'gate' or 'pulse', got '" + s + "'");
}

PostSelection parse_post(const std::string& s) {
  if (s == "gate") return PostSelection::kGate;
  if (s == "pulse") return PostSelection::kPulse;
  throw ValidationError("post_select must be 'gate' or 'pulse', got '" + s + "'");
}

EnvelopeShape parse_shape(const std::string& s) {
  if (s == "gaussian") return EnvelopeShape::kGaussian;
  if (s == "flat_top") return EnvelopeShape::kFlatTop;
  throw ValidationError("envelope shape must be 'gaussian' or 'flat_top', got '" + s + "'");
}

const char* shape_text(EnvelopeShape s) { return s == EnvelopeShape::kGaussian ? "gaussian" : "flat_top"; }

// ---- YAML -------------------------------------------------------------------

void reject_unknown(const YAML::Node& node, std::initializer_list<const char*> known, const std::string& where) {
  if (!node.IsMap()) throw ValidationError(where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) == known.end()) {
      throw ValidationError("unknown config key '" + where + key + "'");
    }
  }
}

double yaml_time(const YAML::Node& n, bool allow_tied) {
  const auto s = n.as<std::string>();
  if (s == "inf" || s == "infinity" || s == ".inf") return kNoDecay;
  if (allow_tied && s == "2*t1") return kTiedT2;
  return n.as<double>();
}

std::vector<double> yaml_times(const YAML::Node& n, bool allow_tied) {
  std::vector<double> out;
  if (n.IsSequence()) {
    for (const auto& e : n) out.push_back(yaml_time(e, allow_tied));
  } else {
    out.push_back(yaml_time(n, allow_tied));
  }
  return out;
}

template <class T>
void read(const YAML::Node& node, const char* key, T& field) {
  if (node[key]) field = node[key].as<T>();
}

ExperimentConfig config_from_node(const YAML::Node& root) {
  ExperimentConfig c;
  if (!root || root.IsNull()) return c;
  reject_unknown(root,
                 {"d_values", "t1_values", "t2_values", "n_unitaries", "max_candidates", "chi", "n_cavity", "layers",
                  "infidelity_threshold", "post_select", "mode", "seed", "workers", "double_gamma_phi", "shots",
                  "bootstrap_resamples", "optimizer", "integrator", "snap", "displacement", "buffer"},
                 "");
  if (root["d_values"]) {
    c.d_values.clear();
    if (root["d_values"].IsSequence()) {
      for (const auto& e : root["d_values"]) c.d_values.push_back(e.as<int>());
    } else {
      c.d_values.push_back(root["d_values"].as<int>());
    }
  }
  if (root["t1_values"]) c.t1_values = yaml_times(root["t1_values"], false);
  if (root["t2_values"]) c.t2_values = yaml_times(root["t2_values"], true);
  read(root, "n_unitaries", c.n_unitaries);
  read(root, "max_candidates", c.max_candidates);
  read(root, "chi", c.chi);
  read(root, "n_cavity", c.n_cavity);
  read(root, "layers", c.layers);
  read(root, "infidelity_threshold", c.infidelity_threshold);
  if (root["post_select"]) c.post_select = parse_post(root["post_select"].as<std::string>());
  if (root["mode"]) c.mode = parse_mode(root["mode"].as<std::string>());
  read(root, "seed", c.seed);
  read(root, "workers", c.workers);
  read(root, "double_gamma_phi", c.double_gamma_phi);
  read(root, "shots", c.shots);
  read(root, "bootstrap_resamples", c.bootstrap_resamples);
  read(root, "buffer", c.schedule.buffer);
  if (const auto o = root["optimizer"]) {
    reject_unknown(o, {"restarts", "max_iterations", "gradient_step", "gradient_tol", "good_enough", "alpha_init"},
                   "optimizer.");
    read(o, "restarts", c.optimizer.restarts);
    read(o, "max_iterations", c.optimizer.max_iterations);
    read(o, "gradient_step", c.optimizer.gradient_step);
    read(o, "gradient_tol", c.optimizer.gradient_tol);
    read(o, "good_enough", c.optimizer.good_enough);
    read(o, "alpha_init", c.optimizer.alpha_init);
  }
  if (const auto i = root["integrator"]) {
    reject_unknown(i, {"method", "rtol", "atol", "max_step", "max_steps"}, "integrator.");
    if (i["method"]) {
      const auto m = i["method"].as<std::string>();
      if (m == "adaptive") {
        c.integrator.method = IntegratorMethod::kAdaptiveRK;
      } else if (m == "rk4") {
        c.integrator.method = IntegratorMethod::kFixedRK4;
      } else {
        throw ValidationError("integrator.method must be 'adaptive' or 'rk4'");
      }
    }
    read(i, "rtol", c.integrator.rtol);
    read(i, "atol", c.integrator.atol);
    read(i, "max_step", c.integrator.max_step);
    read(i, "max_steps", c.integrator.max_steps);
  }
  if (const auto s = root["snap"]) {
    reject_unknown(s, {"shape", "truncation", "rise_fraction", "weak_drive_ratio", "base_pi_duration"}, "snap.");
    if (s["shape"]) c.schedule.snap.shape = parse_shape(s["shape"].as<std::string>());
    read(s, "truncation", c.schedule.snap.truncation);
    read(s, "rise_fraction", c.schedule.snap.rise_fraction);
    read(s, "weak_drive_ratio", c.schedule.snap.weak_drive_ratio);
    read(s, "base_pi_duration", c.schedule.snap.base_pi_duration);
  }
  if (const auto d = root["displacement"]) {
    reject_unknown(d, {"shape", "duration", "rise", "truncation"}, "displacement.");
    if (d["shape"]) c.schedule.displacement_envelope.shape = parse_shape(d["shape"].as<std::string>());
    read(d, "duration", c.schedule.displacement_envelope.duration);
    read(d, "rise", c.schedule.displacement_envelope.rise);
    read(d, "truncation", c.schedule.displacement_envelope.truncation);
  }
  c.optimizer.n_cavity = c.n_cavity;
  c.validate();
  return c;
}

// ---- evaluation helpers -----------------------------------------------------

StateVector vacuum(int n) {
  StateVector v = StateVector::Zero(n);
  v(0) = 1.0;
  return v;
}

StateVector padded(const StateVector& target, int n) {
  StateVector v = StateVector::Zero(n);
  v.head(target.size()) = target;
  return v;
}

// Noiseless pulse-level fidelity of the prepared cavity state (qubit traced out).
double pulse_fidelity(const GateSequence& seq, const StateVector& target, const ExperimentConfig& config) {
  const int n = config.n_cavity;
  const auto schedule = schedule_for_sequence(seq, config.chi, config.schedule);
  StateVector psi0 = StateVector::Zero(2 * n);
  psi0(0) = 1.0;
  const StateVector psi = evolve_pure(psi0, schedule, config.integrator);
  Complex on_g{}, on_e{};
  for (int k = 0; k < target.size(); ++k) {
    on_g += std::conj(target(k)) * psi(2 * k);
    on_e += std::conj(target(k)) * psi(2 * k + 1);
  }
  return std::norm(on_g) + std::norm(on_e);
}

std::uint64_t dimension_seed(const ExperimentConfig& config, int d) {
  return split_seed(config.seed, static_cast<std::uint64_t>(d));
}

std::uint32_t crc_of(const std::string& bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot open " + path.string() + " for writing");
  out << bytes;
  out.close();
  if (!out) throw RuntimeFailure("failed writing " + path.string());
}

nlohmann::json aggregate_json(const Aggregate& a) {
  const auto num = [](double v) -> nlohmann::json { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  return {{"value", num(a.value)}, {"err", num(a.err)}};
}

Aggregate aggregate_from_json(const nlohmann::json& j) {
  const auto num = [](const nlohmann::json& v) { return v.is_null() ? std::nan("") : v.get<double>(); };
  return {num(j.at("value")), num(j.at("err"))};
}

}  // namespace

// ---- config -----------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (d_values.empty()) throw ValidationError("d_values must be nonempty");
  for (int d : d_values) {
    if (d < 1 || d > n_cavity) throw ValidationError("every d must lie in [1, n_cavity]");
  }
  if (t1_values.empty() || t2_values.empty()) throw ValidationError("t1_values and t2_values must be nonempty");
  for (double t1 : t1_values) {
    if (!(t1 > 0.0)) throw ValidationError("T1 values must be positive");
    for (double t2 : t2_values) {
      if (t2 == kTiedT2) continue;
      if (!(t2 > 0.0)) throw ValidationError("T2 values must be positive");
      NoiseModel{t1, t2}.validate();
    }
  }
  if (n_unitaries < 1) throw ValidationError("n_unitaries must be >= 1");
  if (!std::isfinite(chi) || chi == 0.0) throw ValidationError("chi must be finite and nonzero");
  if (n_cavity < 2) throw ValidationError("n_cavity must be >= 2");
  if (layers < 1) throw ValidationError("layers must be >= 1");
  if (!(infidelity_threshold > 0.0 && infidelity_threshold <= 1.0)) {
    throw ValidationError("infidelity_threshold must lie in (0, 1]");
  }
  if (workers < 1) throw ValidationError("workers must be >= 1");
  if (shots < 0) throw ValidationError("shots must be >= 0");
  if (bootstrap_resamples < 1) throw ValidationError("bootstrap_resamples must be >= 1");
  optimizer.validate();
  integrator.validate();
  schedule.displacement_envelope.validate();
  if (schedule.buffer < 0.0) throw ValidationError("buffer must be non-negative");
}

std::vector<std::pair<double, double>> ExperimentConfig::noise_grid() const {
  if (mode == SimulationMode::kGate) return {{kNoDecay, kNoDecay}};
  std::vector<std::pair<double, double>> grid;
  for (double t1 : t1_values) {
    for (double t2 : t2_values) grid.emplace_back(t1, t2 == kTiedT2 ? 2.0 * t1 : t2);
  }
  return grid;
}

ExperimentConfig config_from_yaml_text(const std::string& text) {
  try {
    return config_from_node(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return config_from_yaml_text(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json t1 = nlohmann::json::array(), t2 = nlohmann::json::array();
  for (double t : c.t1_values) t1.push_back(time_json(t));
  for (double t : c.t2_values) t2.push_back(time_json(t));
  const auto& o = c.optimizer;
  const auto& i = c.integrator;
  const auto& s = c.schedule.snap;
  const auto& e = c.schedule.displacement_envelope;
  return {{"d_values", c.d_values},
          {"t1_values", t1},
          {"t2_values", t2},
          {"n_unitaries", c.n_unitaries},
          {"max_candidates", c.max_candidates},
          {"chi", c.chi},
          {"n_cavity", c.n_cavity},
          {"layers", c.layers},
          {"infidelity_threshold", c.infidelity_threshold},
          {"post_select", post_name(c.post_select)},
          {"mode", mode_name(c.mode)},
          {"seed", c.seed},
          {"workers", c.workers},
          {"double_gamma_phi", c.double_gamma_phi},
          {"shots", c.shots},
          {"bootstrap_resamples", c.bootstrap_resamples},
          {"buffer", c.schedule.buffer},
          {"optimizer",
           {{"restarts", o.restarts},
            {"max_iterations", o.max_iterations},
            {"gradient_step", o.gradient_step},
            {"gradient_tol", o.gradient_tol},
            {"good_enough", o.good_enough},
            {"alpha_init", o.alpha_init}}},
          {"integrator",
           {{"method", i.method == IntegratorMethod::kAdaptiveRK ? "adaptive" : "rk4"},
            {"rtol", i.rtol},
            {"atol", i.atol},
            {"max_step", i.max_step},
            {"max_steps", i.max_steps}}},
          {"snap",
           {{"shape", shape_text(s.shape)},
            {"truncation", s.truncation},
            {"rise_fraction", s.rise_fraction},
            {"weak_drive_ratio", s.weak_drive_ratio},
            {"base_pi_duration", s.base_pi_duration}}},
          {"displacement",
           {{"shape", shape_text(e.shape)}, {"duration", e.duration}, {"rise", e.rise}, {"truncation", e.truncation}}}};
}

// ---- pipeline ---------------------------------------------------------------

CompiledEnsemble compile_ensemble(const ExperimentConfig& config, int d) {
  config.validate();
  OptimizerConfig opt = config.optimizer;
  opt.n_cavity = config.n_cavity;
  opt.threshold = config.infidelity_threshold;
  const bool need_pulse = config.mode == SimulationMode::kPulse || config.post_select == PostSelection::kPulse;
  const std::size_t wanted = static_cast<std::size_t>(config.n_unitaries);
  const std::size_t cap =
      config.max_candidates > 0 ? static_cast<std::size_t>(config.max_candidates) : 4 * wanted;
  const std::uint64_t base = dimension_seed(config, d);

  CompiledEnsemble ens;
  ens.d = d;
  while (ens.passed < wanted && ens.candidates.size() < cap) {
    // Batches never exceed what could still be needed, so the candidate list
    // (and hence the accepted set) is independent of the worker count.
    const std::size_t begin = ens.candidates.size();
    const std::size_t batch = std::min(cap - begin, wanted - ens.passed);
    ens.candidates.resize(begin + batch);
    parallel_for(batch, config.workers, [&](std::size_t k) {
      auto& c = ens.candidates[begin + k];
      c.index = begin + k;
      c.seed = split_seed(base, c.index);
      std::mt19937_64 rng(c.seed);
      c.unitary = haar_unitary(d, rng);
      const StateVector target = c.unitary.col(0);
      c.compiled = variational_state_prep(target, config.layers, opt, split_seed(c.seed, 1));
      if (need_pulse) c.pulse_infidelity = std::max(0.0, 1.0 - pulse_fidelity(c.compiled.sequence, target, config));
      const double judged = config.post_select == PostSelection::kGate ? c.compiled.infidelity : c.pulse_infidelity;
      c.passed = judged < config.infidelity_threshold;
    });
    for (std::size_t k = begin; k < ens.candidates.size(); ++k) {
      if (ens.candidates[k].passed) ++ens.passed;
    }
  }
  for (auto& c : ens.candidates) {
    if (c.passed && ens.accepted < wanted) {
      c.accepted = true;
      ++ens.accepted;
    }
  }
  return ens;
}

ExperimentRecord evaluate_ensemble(const ExperimentConfig& config, const CompiledEnsemble& ensemble, double t1,
                                   double t2) {
  const auto start = std::chrono::steady_clock::now();
  const int d = ensemble.d;
  const int n = config.n_cavity;
  NoiseModel noise{t1, t2, config.double_gamma_phi};
  if (config.mode == SimulationMode::kPulse) noise.validate();

  std::vector<const CompiledUnitary*> members;
  for (const auto& c : ensemble.candidates) {
    if (c.accepted) members.push_back(&c);
  }

  ExperimentRecord rec;
  rec.d = d;
  rec.t1 = config.mode == SimulationMode::kPulse ? t1 : kNoDecay;
  rec.t2 = config.mode == SimulationMode::kPulse ? t2 : kNoDecay;
  rec.mode = config.mode;
  rec.candidates = ensemble.candidates.size();
  rec.accepted = members.size();
  rec.pass_rate = ensemble.pass_rate();
  rec.rows.resize(members.size());
  std::vector<double> fidelity(members.size());

  parallel_for(members.size(), config.workers, [&](std::size_t i) {
    const auto& c = *members[i];
    const StateVector target = c.unitary.col(0);
    DistributionPair pair;
    pair.q = ideal_distribution(c.unitary);
    if (config.mode == SimulationMode::kGate) {
      const StateVector psi = apply_sequence(c.compiled.sequence, vacuum(n));
      pair.p = psi.head(d).cwiseAbs2();
      fidelity[i] = 1.0 - state_infidelity(padded(target, n), psi);
    } else {
      const auto schedule = schedule_for_sequence(c.compiled.sequence, config.chi, config.schedule);
      const DensityMatrix rho = evolve(ground_state({n, d}), schedule, noise, config.integrator);
      const DensityMatrix cavity = trace_out_qubit(rho, {n, d});
      pair.p = fock_distribution(cavity, d).probs;
      fidelity[i] = state_fidelity(cavity, target);
    }
    if (config.shots > 0) {
      std::mt19937_64 rng(split_seed(c.seed, 2));
      RealVector folded = fold_leakage(pair.p);
      folded /= folded.sum();
      const auto counts = sample_counts(folded, config.shots, rng);
      for (int x = 0; x < d; ++x) pair.p(x) = static_cast<double>(counts[x]) / static_cast<double>(config.shots);
    }
    rec.rows[i] = MetricRow{c.index, c.seed, d, score_pair(pair)};
  });

  if (members.empty()) {
    const double nan = std::nan("");
    rec.hog = rec.xeb = rec.xeb_normalized = Aggregate{nan, nan};
    rec.mean_leakage = rec.mean_state_fidelity = nan;
  } else {
    std::vector<MetricRecord> records;
    std::vector<double> hog, inner;
    for (const auto& row : rec.rows) {
      records.push_back(row.record);
      hog.push_back(row.record.hog_contrib);
      inner.push_back(row.record.xeb_inner);
    }
    double leak = 0.0, fid = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      leak += rec.rows[i].record.leakage;
      fid += fidelity[i];
    }
    rec.mean_leakage = leak / static_cast<double>(members.size());
    rec.mean_state_fidelity = fid / static_cast<double>(members.size());

    const std::uint64_t boot_seed = split_seed(dimension_seed(config, d), 0xB0075712ULL);
    const auto hog_boot = bayesian_bootstrap(hog, config.bootstrap_resamples, boot_seed);
    const auto inner_boot = bayesian_bootstrap(inner, config.bootstrap_resamples, boot_seed);
    rec.hog = {hog_score(std::span<const MetricRecord>(records)), hog_boot.std};
    rec.xeb = {xeb(std::span<const MetricRecord>(records), d), d * inner_boot.std};
    try {
      const double xn = xeb_normalized(std::span<const MetricRecord>(records), d);
      rec.xeb_normalized = {xn, std::abs(xn / rec.xeb.value) * rec.xeb.err};
      if (!std::isfinite(rec.xeb_normalized.err)) rec.xeb_normalized.err = std::nan("");
    } catch (const ValidationError&) {
      rec.xeb_normalized = {std::nan(""), std::nan("")};
    }
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<ExperimentRecord> run_sweep(const ExperimentConfig& config) {
  config.validate();
  std::vector<ExperimentRecord> out;
  for (int d : config.d_values) {
    const auto start = std::chrono::steady_clock::now();
    const auto ensemble = compile_ensemble(config, d);
    const double compile_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool first = true;
    for (const auto& [t1, t2] : config.noise_grid()) {
      auto rec = evaluate_ensemble(config, ensemble, t1, t2);
      if (first) rec.wall_seconds += compile_seconds;
      first = false;
      out.push_back(std::move(rec));
    }
  }
  return out;
}

// ---- t-design check -----------------------------------------------------------

TDesignReport run_tdesign_check(int d, int count, int t_max, std::uint64_t seed, const TDesignOptions& options) {
  if (d < 1 || count < 1 || t_max < 1) throw ValidationError("tdesign needs d, count, t_max >= 1");
  TDesignReport rep;
  rep.d = d;
  rep.count = count;
  const auto ens = haar_ensemble(d, count, seed, options.workers);
  auto factorial = [](int t) { return std::tgamma(t + 1.0); };

  if (count == 1) {
    rep.degenerate = true;
    for (int t = 1; t <= t_max; ++t) {
      rep.raw_ratio.push_back(frame_potential(ens, t) / factorial(t));
      rep.raw_band.push_back(0.0);
    }
    return rep;
  }

  // |Tr(U_i^dag U_j)|^2 with the self pairs removed.
  Operator flat(static_cast<Eigen::Index>(d) * d, count);
  for (int i = 0; i < count; ++i) {
    flat.col(i) = Eigen::Map<const Eigen::VectorXcd>(ens.members[i].data(), flat.rows());
  }
  Eigen::MatrixXd overlap = (flat.adjoint() * flat).cwiseAbs2();
  overlap.diagonal().setZero();

  auto weighted = [&](const Eigen::MatrixXd& g, const RealVector& w) {
    const double denom = w.sum() * w.sum() - w.squaredNorm();
    return w.dot(g * w) / denom;
  };

  std::vector<bool> selected(count, true);
  if (options.compile) {
    OptimizerConfig opt = options.optimizer;
    opt.threshold = options.infidelity_threshold;
    parallel_for(static_cast<std::size_t>(count), options.workers, [&](std::size_t i) {
      const StateVector target = ens.members[i].col(0);
      const auto res = variational_state_prep(target, options.layers, opt, split_seed(seed, 1'000'000 + i));
      selected[i] = res.converged;
    });
  }
  RealVector sel_w(count);
  for (int i = 0; i < count; ++i) sel_w(i) = selected[i] ? 1.0 : 0.0;
  rep.selected = static_cast<std::size_t>(sel_w.sum());

  Eigen::MatrixXd power = Eigen::MatrixXd::Ones(count, count);
  power.diagonal().setZero();
  std::exponential_distribution<double> expo(1.0);
  for (int t = 1; t <= t_max; ++t) {
    power = power.cwiseProduct(overlap);
    const double f = factorial(t);
    rep.raw_ratio.push_back(weighted(power, RealVector::Ones(count)) / f);
    std::vector<double> draws(options.bootstrap_resamples);
    for (int r = 0; r < options.bootstrap_resamples; ++r) {
      std::mt19937_64 rng(split_seed(seed, 0x7D0000ULL + r));
      RealVector w(count);
      for (int i = 0; i < count; ++i) w(i) = expo(rng);
      draws[r] = weighted(power, w) / f;
    }
    double mean = 0.0, ss = 0.0;
    for (double x : draws) mean += x;
    mean /= static_cast<double>(draws.size());
    for (double x : draws) ss += (x - mean) * (x - mean);
    const double band = draws.size() > 1 ? std::sqrt(ss / static_cast<double>(draws.size() - 1)) : 0.0;
    rep.raw_band.push_back(band);
    if (options.compile) {
      const double sel = rep.selected >= 2 ? weighted(power, sel_w) / f : std::nan("");
      rep.selected_ratio.push_back(sel);
      rep.biased.push_back(!(std::abs(sel - rep.raw_ratio.back()) <= 2.0 * band));
    }
  }
  return rep;
}

// ---- persistence ------------------------------------------------------------

std::string software_version() { return std::string("qudit-bench ") + QUDIT_VERSION; }

std::filesystem::path output_directory(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv("QUDIT_BENCH_OUT"); env && *env) return env;
  return fallback;
}

void emit(const std::vector<ExperimentRecord>& records, const ExperimentConfig& config,
          const std::filesystem::path& out_dir) {
  if (records.empty()) throw ValidationError("nothing to emit: empty record set");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw RuntimeFailure("cannot create " + out_dir.string() + ": " + ec.message());

  nlohmann::json files = nlohmann::json::array();
  nlohmann::json recs = nlohmann::json::array();
  std::ostringstream summary;
  summary << "d,t1,t2,metric,value,err\n" << std::setprecision(17);
  for (const auto& r : records) {
    std::ostringstream name;
    name << "pairs_d" << r.d << "_t1-" << time_label(r.t1) << "_t2-" << time_label(r.t2) << ".csv";
    std::ostringstream csv;
    write_metric_csv(csv, r.rows);
    write_file(out_dir / name.str(), csv.str());
    files.push_back({{"path", name.str()}, {"crc32", crc_of(csv.str())}});

    const auto line = [&](const char* metric, double value, double err) {
      summary << r.d << ',' << time_text(r.t1) << ',' << time_text(r.t2) << ',' << metric << ',' << value << ','
              << err << '\n';
    };
    line("hog", r.hog.value, r.hog.err);
    line("xeb", r.xeb.value, r.xeb.err);
    line("xeb_normalized", r.xeb_normalized.value, r.xeb_normalized.err);
    line("leakage", r.mean_leakage, 0.0);
    line("state_fidelity", r.mean_state_fidelity, 0.0);
    line("pass_rate", r.pass_rate, 0.0);

    recs.push_back({{"d", r.d},
                    {"t1", time_json(r.t1)},
                    {"t2", time_json(r.t2)},
                    {"mode", mode_name(r.mode)},
                    {"hog", aggregate_json(r.hog)},
                    {"xeb", aggregate_json(r.xeb)},
                    {"xeb_normalized", aggregate_json(r.xeb_normalized)},
                    {"mean_leakage", r.mean_leakage},
                    {"mean_state_fidelity", r.mean_state_fidelity},
                    {"candidates", r.candidates},
                    {"accepted", r.accepted},
                    {"pass_rate", r.pass_rate},
                    {"wall_seconds", r.wall_seconds},
                    {"pairs_file", name.str()}});
  }
  write_file(out_dir / "summary.csv", summary.str());
  files.push_back({{"path", "summary.csv"}, {"crc32", crc_of(summary.str())}});

  const nlohmann::json manifest = {{"software", software_version()},
                                   {"config", config_to_json(config)},
                                   {"records", recs},
                                   {"files", files}};
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<ExperimentRecord> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeFailure("cannot read manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  std::vector<ExperimentRecord> out;
  try {
    for (const auto& r : j.at("records")) {
      ExperimentRecord rec;
      rec.d = r.at("d").get<int>();
      rec.t1 = time_from_json(r.at("t1"));
      rec.t2 = time_from_json(r.at("t2"));
      rec.mode = parse_mode(r.at("mode").get<std::string>());
      rec.hog = aggregate_from_json(r.at("hog"));
      rec.xeb = aggregate_from_json(r.at("xeb"));
      rec.xeb_normalized = aggregate_from_json(r.at("xeb_normalized"));
      const auto num = [](const nlohmann::json& v) { return v.is_null() ? std::nan("") : v.get<double>(); };
      rec.mean_leakage = num(r.at("mean_leakage"));
      rec.mean_state_fidelity = num(r.at("mean_state_fidelity"));
      rec.candidates = r.at("candidates").get<std::size_t>();
      rec.accepted = r.at("accepted").get<std::size_t>();
      rec.pass_rate = r.at("pass_rate").get<double>();
      rec.wall_seconds = r.at("wall_seconds").get<double>();
      rec.pairs_file = r.at("pairs_file").get<std::string>();
      out.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": malformed manifest: " + e.what());
  }
  return out;
}

}  // namespace qudit
