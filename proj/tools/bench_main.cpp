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

// Command-line front end: sweep, tdesign, compile, truncation.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>

#include <CLI11.hpp>

#include "qudit/bench.hpp"
#include "qudit/compile.hpp"
#include "qudit/gates.hpp"
#include "qudit/hilbert.hpp"

namespace {

using namespace qudit;

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

int run_sweep_cmd(const std::string& config_path, const std::string& mode, std::optional<std::uint64_t> seed,
                  std::optional<int> workers, const std::string& out) {
  ExperimentConfig config = load_config(config_path);
  if (!mode.empty()) config.mode = mode == "gate" ? SimulationMode::kGate : SimulationMode::kPulse;
  if (seed) config.seed = *seed;
  if (workers) config.workers = *workers;
  config.validate();
  const auto records = run_sweep(config);
  const auto dir = output_directory(out);
  emit(records, config, dir);
  std::cout << std::setprecision(6);
  for (const auto& r : records) {
    std::cout << "d=" << r.d << " t1=" << r.t1 << " t2=" << r.t2 << " accepted=" << r.accepted << "/"
              << r.candidates << " hog=" << r.hog.value << "+-" << r.hog.err << " xeb_n=" << r.xeb_normalized.value
              << "+-" << r.xeb_normalized.err << "\n";
  }
  std::cout << "wrote " << (dir / "manifest.json").string() << "\n";
  return 0;
}

int run_tdesign_cmd(int d, int count, int tmax, std::uint64_t seed, bool compile, int workers) {
  TDesignOptions opts;
  opts.compile = compile;
  opts.workers = workers;
  const auto rep = run_tdesign_check(d, count, tmax, seed, opts);
  std::cout << "t,raw_ratio,raw_band";
  if (compile) std::cout << ",selected_ratio,biased";
  std::cout << "\n" << std::setprecision(10);
  for (int t = 1; t <= tmax; ++t) {
    std::cout << t << "," << rep.raw_ratio[t - 1] << "," << rep.raw_band[t - 1];
    if (compile) std::cout << "," << rep.selected_ratio[t - 1] << "," << (rep.biased[t - 1] ? 1 : 0);
    std::cout << "\n";
  }
  if (rep.degenerate) std::cout << "# degenerate: single-member ensemble\n";
  if (compile) std::cout << "# selected " << rep.selected << "/" << rep.count << "\n";
  return 0;
}

int run_compile_cmd(const std::string& path, const std::string& method, double budget, int layers,
                    std::uint64_t seed) {
  const Operator u = operator_from_json(read_json(path));
  nlohmann::json out;
  if (method == "exact") {
    const auto seq = exact_compile(u);
    out = {{"method", method},
           {"infidelity", unitary_infidelity(u, sequence_matrix(seq, static_cast<int>(u.rows())))},
           {"sequence", sequence_to_json(seq)}};
  } else if (method == "native") {
    const auto nc = native_compile(u, budget);
    out = {{"method", method},
           {"budget", budget},
           {"measured_infidelity", nc.measured_infidelity},
           {"predicted_infidelity", nc.predicted_infidelity},
           {"displacements", nc.displacements},
           {"snaps", nc.snaps},
           {"repetitions", nc.repetitions},
           {"sequence", sequence_to_json(nc.sequence)}};
  } else {
    const auto res = variational_state_prep(u.col(0), layers, OptimizerConfig{}, seed);
    out = {{"method", method},
           {"layers", layers},
           {"infidelity", res.infidelity},
           {"converged", res.converged},
           {"sequence", sequence_to_json(res.sequence)}};
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_truncation_cmd(int d, int ncav, int samples, int nref, double alpha_max, std::uint64_t seed) {
  if (samples < 1) throw ValidationError("samples must be >= 1");
  if (!(alpha_max > 0.0)) throw ValidationError("alpha-max must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-alpha_max, alpha_max);
  std::cout << "alpha,error\n" << std::setprecision(10);
  for (int i = 0; i < samples; ++i) {
    const double a = uni(rng);
    std::cout << a << "," << truncation_error(a, d, ncav, nref) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qudit random-circuit benchmarking harness"};
  app.set_version_flag("--version", software_version());
  app.require_subcommand(1);

  auto* sweep = app.add_subcommand("sweep", "Run an ensemble sweep from a YAML config");
  std::string config_path, mode, out = "bench_out";
  std::optional<std::uint64_t> sweep_seed;
  std::optional<int> sweep_workers;
  sweep->add_option("--config", config_path, "YAML config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--mode", mode, "gate or pulse")->check(CLI::IsMember({"gate", "pulse"}));
  sweep->add_option("--seed", sweep_seed, "Override the config seed");
  sweep->add_option("--workers", sweep_workers, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out, "Output directory (QUDIT_BENCH_OUT overrides)");

  auto* tdesign = app.add_subcommand("tdesign", "Frame-potential check of a Haar ensemble");
  int td_d = 0, td_count = 0, td_tmax = 0, td_workers = 1;
  std::uint64_t td_seed = 1;
  bool td_compile = false;
  tdesign->add_option("--d", td_d)->required();
  tdesign->add_option("--count", td_count)->required();
  tdesign->add_option("--tmax", td_tmax)->required();
  tdesign->add_option("--seed", td_seed);
  tdesign->add_option("--workers", td_workers)->check(CLI::PositiveNumber);
  tdesign->add_flag("--compile", td_compile, "Also check the post-selected compiled subset");

  auto* compile = app.add_subcommand("compile", "Compile a unitary given as JSON {dim, entries}");
  std::string unitary_path, method = "exact";
  double budget = 1e-4;
  int layers = 2;
  std::uint64_t c_seed = 1;
  compile->add_option("--unitary", unitary_path)->required()->check(CLI::ExistingFile);
  compile->add_option("--method", method)->check(CLI::IsMember({"exact", "native", "variational"}));
  compile->add_option("--budget", budget, "Infidelity budget for native compilation");
  compile->add_option("--layers", layers, "Ansatz layers for variational state prep");
  compile->add_option("--seed", c_seed);

  auto* trunc = app.add_subcommand("truncation", "Fock truncation error of random displacements");
  int tr_d = 0, tr_ncav = 0, tr_samples = 0, tr_nref = 0;
  double tr_alpha = 3.0;
  std::uint64_t tr_seed = 1;
  trunc->add_option("--d", tr_d)->required();
  trunc->add_option("--ncav", tr_ncav)->required();
  trunc->add_option("--samples", tr_samples)->required();
  trunc->add_option("--nref", tr_nref, "Reference cutoff (default 2*ncav)");
  trunc->add_option("--alpha-max", tr_alpha);
  trunc->add_option("--seed", tr_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*sweep) return run_sweep_cmd(config_path, mode, sweep_seed, sweep_workers, out);
    if (*tdesign) return run_tdesign_cmd(td_d, td_count, td_tmax, td_seed, td_compile, td_workers);
    if (*compile) return run_compile_cmd(unitary_path, method, budget, layers, c_seed);
    if (*trunc) return run_truncation_cmd(tr_d, tr_ncav, tr_samples, tr_nref, tr_alpha, tr_seed);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
