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
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qudit/compile.hpp"
#include "qudit/lindblad.hpp"
#include "qudit/metrics.hpp"
#include "qudit/pulse.hpp"
#include "qudit/stats.hpp"

namespace qudit {

enum class SimulationMode { kGate, kPulse };
enum class PostSelection { kGate, kPulse };

// A t2 entry with this value means "T2 = 2 T1" (no pure dephasing) at every T1.
inline constexpr double kTiedT2 = -1.0;

struct ExperimentConfig {
  std::vector<int> d_values{8};
  std::vector<double> t1_values{kNoDecay};  // s
  std::vector<double> t2_values{kTiedT2};   // s, or kTiedT2
  int n_unitaries = 50;
  // Candidates drawn per d before giving up on filling n_unitaries
  // (<= 0 means 4 * n_unitaries).
  int max_candidates = 0;
  double chi = kDefaultChi;
  int n_cavity = 60;
  int layers = 2;
  double infidelity_threshold = 0.01;
  PostSelection post_select = PostSelection::kGate;
  SimulationMode mode = SimulationMode::kGate;
  std::uint64_t seed = 1;
  int workers = 1;
  bool double_gamma_phi = false;
  // 0: metrics from exact p. > 0: p estimated from this many multinomial shots.
  std::int64_t shots = 0;
  int bootstrap_resamples = kDefaultResamples;
  OptimizerConfig optimizer;
  IntegratorConfig integrator;
  ScheduleOptions schedule;

  void validate() const;
  // (t1, t2) grid with kTiedT2 resolved; a single noiseless point in gate mode.
  std::vector<std::pair<double, double>> noise_grid() const;
};

// YAML keys mirror the field names; times are seconds, "inf" is allowed and a
// t2 entry "2*t1" ties T2 to twice T1. Unknown keys are rejected.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_yaml_text(const std::string& text);
nlohmann::json config_to_json(const ExperimentConfig& config);

// One Haar candidate after state-prep compilation.
struct CompiledUnitary {
  std::size_t index = 0;      // candidate index within its d
  std::uint64_t seed = 0;     // sub-seed that drew U and seeded the optimizer
  Operator unitary;
  CompilationResult compiled;
  bool passed = false;
  double pulse_infidelity = -1.0;  // noiseless pulse-level value, < 0 when not simulated
  bool accepted = false;
};

struct CompiledEnsemble {
  int d = 0;
  std::vector<CompiledUnitary> candidates;  // in index order
  std::size_t passed = 0;    // candidates meeting the infidelity threshold
  std::size_t accepted = 0;  // members used downstream (first n_unitaries passes)
  double pass_rate() const {
    return candidates.empty() ? 0.0 : static_cast<double>(passed) / static_cast<double>(candidates.size());
  }
};

struct Aggregate {
  double value = 0.0;
  double err = 0.0;
};

struct ExperimentRecord {
  int d = 0;
  double t1 = kNoDecay;
  double t2 = kNoDecay;
  SimulationMode mode = SimulationMode::kGate;
  std::vector<MetricRow> rows;
  Aggregate hog;
  Aggregate xeb;
  Aggregate xeb_normalized;
  double mean_leakage = 0.0;
  double mean_state_fidelity = 1.0;  // <psi_target| rho |psi_target> averaged
  std::size_t candidates = 0;
  std::size_t accepted = 0;
  double pass_rate = 0.0;
  std::string pairs_file;  // set by emit / load_manifest
  double wall_seconds = 0.0;
};

// Draws, compiles and post-selects candidates for one dimension until
// n_unitaries are accepted or the candidate cap is hit.
CompiledEnsemble compile_ensemble(const ExperimentConfig& config, int d);

// Scores an accepted ensemble at one noise point.
ExperimentRecord evaluate_ensemble(const ExperimentConfig& config, const CompiledEnsemble& ensemble, double t1,
                                   double t2);

// Full grid: compile once per d, evaluate every (t1, t2) point on the same ensemble.
std::vector<ExperimentRecord> run_sweep(const ExperimentConfig& config);

struct TDesignReport {
  int d = 0;
  int count = 0;
  std::size_t selected = 0;              // members passing post-selection
  std::vector<double> raw_ratio;         // F^(t) / t! for t = 1..t_max
  std::vector<double> raw_band;          // bootstrap std of the raw ratio
  std::vector<double> selected_ratio;    // empty when compilation was skipped
  std::vector<bool> biased;              // |selected - raw| > 2 * band
  bool degenerate = false;               // count == 1
};

struct TDesignOptions {
  bool compile = false;  // also test the post-selected subset
  int layers = 2;
  double infidelity_threshold = 0.01;
  OptimizerConfig optimizer;
  int bootstrap_resamples = 200;
  int workers = 1;
};

TDesignReport run_tdesign_check(int d, int count, int t_max, std::uint64_t seed, const TDesignOptions& options = {});

// Writes one pair CSV per record, summary.csv in long format
// (d,t1,t2,metric,value,err) and manifest.json (config, version, aggregates,
// file checksums). Throws ValidationError on empty input, RuntimeFailure with
// the offending path on I/O errors.
void emit(const std::vector<ExperimentRecord>& records, const ExperimentConfig& config,
          const std::filesystem::path& out_dir);

// Aggregates recorded in a manifest, in emission order.
std::vector<ExperimentRecord> load_manifest(const std::filesystem::path& manifest);

std::string software_version();

// Output directory: QUDIT_BENCH_OUT when set, else `fallback`.
std::filesystem::path output_directory(const std::filesystem::path& fallback);

}  // namespace qudit
