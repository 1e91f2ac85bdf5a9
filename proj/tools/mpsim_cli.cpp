// Copyright 2026 The mpsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpsim/common.hpp"
#include "mpsim/experiments.hpp"
#include "mpsim/sampler.hpp"
#include "mpsim/version.hpp"

namespace fs = std::filesystem;
using namespace mpsim;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct Options {
  ExperimentConfig cfg;
  std::string out = ".";
  std::string format = "csv";
  std::string method = "variational";
  std::string extraction = "mean";
  std::size_t sweeps = 2;

  // crk-distance
  std::vector<int> ks = {1, 2, 3, 4, 5, 6, 7, 8};
  bool uniform_angles = false;

  // sample
  std::string circuit_file;
  std::size_t depth = 10;
  std::optional<std::size_t> sites;

  // utils
  std::optional<double> epsilon;
  std::optional<double> m_value;
  std::optional<double> n_value;
  std::optional<double> chi_value;
};

std::ofstream open_out(const Options& o, const std::string& name) {
  fs::create_directories(o.out);
  const fs::path p = fs::path(o.out) / name;
  std::ofstream f(p);
  if (!f) throw std::invalid_argument("cannot write " + p.string());
  return f;
}

void finish_config(Options& o) {
  if (o.method == "zipup") {
    o.cfg.method = ZipUp{};
  } else {
    Variational v;
    v.sweeps = o.sweeps;
    o.cfg.method = v;
  }
  o.cfg.extraction = o.extraction == "argmax" ? Extraction::ArgmaxPair : Extraction::RandomizedMean;
}

void write_record(const Options& o, const RunRecord& r) {
  if (o.format == "json") {
    auto f = open_out(o, "results.json");
    write_results_json(f, r);
  } else {
    auto f = open_out(o, "results.csv");
    write_results_csv(f, r);
  }
  auto meta = open_out(o, "meta.json");
  write_meta_json(meta, r);
  for (const auto& s : r.summary())
    std::cout << s.experiment << "  chi=" << s.chi << "  mean=" << s.mean << "  std=" << s.stddev
              << "  n=" << s.count << '\n';
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--qubits", o.cfg.qubits, "Number of system qubits")->check(CLI::PositiveNumber);
  app->add_option("--chi", o.cfg.chis, "Bond dimensions, comma separated")->delimiter(',');
  app->add_option("--reps", o.cfg.reps, "Repetitions (seeds seed..seed+reps-1)");
  app->add_option("--seed", o.cfg.seed, "Base seed");
  app->add_option("--out", o.out, "Output directory");
  app->add_option("--format", o.format, "Result format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--workers", o.cfg.workers, "Worker threads");
  app->add_option("--method", o.method, "MPO application")
      ->check(CLI::IsMember({"variational", "zipup"}));
  app->add_option("--sweeps", o.sweeps, "Variational sweeps");
}

void add_fourier(CLI::App* app, Options& o) {
  app->add_option("--layers", o.cfg.prep_layers, "Random-preparation layers");
  app->add_flag("--full-chi-prep", o.cfg.full_chi_prep, "Prepare the random state without truncation");
  app->add_flag("--no-final-swaps", [&o](std::int64_t) { o.cfg.final_swaps = false; },
                "Omit the SWAP layer of the QFT");
}

void add_grover(CLI::App* app, Options& o) {
  app->add_option("--num-marked", o.cfg.num_marked, "Marked items drawn per repetition");
  app->add_option("--marked", o.cfg.marked, "Fixed marked items (basis-state values)")
      ->delimiter(',');
}

int run_utils(const Options& o) {
  nlohmann::json j;
  if (o.epsilon) j["aux_qubits"] = aux_qubits(*o.epsilon);
  if (o.m_value && o.n_value) {
    j["delta_m"] = delta_m(*o.m_value, *o.n_value, o.cfg.n_read);
    if (*o.m_value >= 1) j["optimal_iterations"] = optimal_iterations(*o.n_value, *o.m_value);
  }
  if (o.chi_value) j["hilbert_fraction"] = hilbert_fraction(o.cfg.qubits, *o.chi_value);
  if (j.empty()) throw std::invalid_argument("utils: give --epsilon, --m with --n, or --chi-value");
  std::cout << j.dump(2) << '\n';
  return 0;
}

int run_crk(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord r;
  r.config = o.cfg;
  Rng rng(o.cfg.seed);
  for (int k : o.ks) {
    const auto s = crk_distance_stats(k, o.cfg.samples, rng, o.uniform_angles);
    const std::string tag = "/k=" + std::to_string(k);
    r.rows.push_back({"crk-max" + tag, 0, 0, s.max});
    r.rows.push_back({"crk-mean" + tag, 0, 0, s.mean});
    r.rows.push_back({"crk-median" + tag, 0, 0, s.median});
  }
  r.sort_rows();
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_record(o, r);
  return 0;
}

int run_entropy(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  o.cfg.validate();
  const auto run = entropy_map_run(o.cfg);
  {
    auto f = open_out(o, "entropy_map.csv");
    write_entropy_csv(f, run.entropy);
  }
  {
    auto f = open_out(o, "phases.csv");
    f << "phase,layer\n";
    for (const auto& m : run.entropy.markers) f << m.name << ',' << m.layer << '\n';
  }
  RunRecord r;
  r.config = o.cfg;
  const std::size_t center = o.cfg.qubits / 2 - (o.cfg.qubits > 1 ? 1 : 0);
  double best = 0;
  std::size_t best_layer = 0;
  for (const auto& row : run.entropy.rows)
    if (!row.entropies.empty() && row.entropies[center] > best) {
      best = row.entropies[center];
      best_layer = row.layer;
    }
  const std::size_t chi = o.cfg.chis.front();
  r.rows.push_back({"entropy-center-max", chi, 0, best});
  r.rows.push_back({"entropy-center-argmax-layer", chi, 0, static_cast<double>(best_layer)});
  r.max_discarded_weight = r.mean_discarded_weight = run.discarded_weight;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_record(o, r);
  return 0;
}

int run_sample(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  if (o.cfg.samples < 1) throw std::invalid_argument("--samples must be >= 1");
  Circuit c(1);
  if (!o.circuit_file.empty()) {
    std::ifstream in(o.circuit_file);
    if (!in) throw std::invalid_argument("cannot read " + o.circuit_file);
    c = read_circuit(in);
  } else {
    c = build_random_state_circuit(o.cfg.qubits, o.depth, o.cfg.seed);
  }
  TruncationPolicy policy = TruncationPolicy::exact();
  if (o.cfg.chis.size() == 1) policy = o.cfg.policy(o.cfg.chis.front());
  else if (o.cfg.chis.size() > 1) throw std::invalid_argument("sample takes a single --chi");
  policy.method = o.cfg.method;
  const std::vector<int> zeros(c.n_qubits(), 0);
  const auto run = run_circuit(product_state(std::span<const int>(zeros)), c, policy);
  Rng rng(o.cfg.seed);
  const Histogram h = sample_histogram(run.state, o.cfg.samples, rng, o.sites, o.cfg.workers);
  {
    auto f = open_out(o, "histogram.csv");
    write_histogram_csv(f, h);
  }
  nlohmann::json meta;
  meta["circuit"] = o.circuit_file.empty() ? "random" : o.circuit_file;
  meta["qubits"] = c.n_qubits();
  meta["gates"] = c.size();
  meta["samples"] = o.cfg.samples;
  meta["seed"] = o.cfg.seed;
  meta["discarded_weight"] = run.discarded_weight;
  meta["versions"] = {{"mpsim", kVersion}};
  meta["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto f = open_out(o, "meta.json");
  f << meta.dump(2) << '\n';
  std::cout << h.counts().size() << " distinct outcomes from " << h.total() << " samples\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix product state quantum circuit simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;

  auto* qft = app.add_subcommand("qft-fidelity", "QFT round-trip fidelity versus chi");
  add_common(qft, o);
  add_fourier(qft, o);

  auto* aqft = app.add_subcommand("aqft-fidelity", "AQFT round-trip fidelity versus cutoff and chi");
  add_common(aqft, o);
  add_fourier(aqft, o);
  aqft->add_option("--cutoff-l", o.cfg.cutoffs, "AQFT cutoffs (default 2..N)")->delimiter(',');

  auto* grover = app.add_subcommand("grover", "Grover success probability versus chi");
  add_common(grover, o);
  add_grover(grover, o);

  auto* counting = app.add_subcommand("counting", "Quantum counting estimate versus chi");
  add_common(counting, o);
  add_grover(counting, o);
  counting->add_option("--n-top", o.cfg.n_top, "Counting register size");
  counting->add_option("--n-read", o.cfg.n_read, "Readout qubits");
  counting->add_option("--samples", o.cfg.samples, "Samples per histogram");
  counting->add_option("--draws", o.cfg.draws, "Draws of the randomized estimator");
  counting->add_option("--cutoff-l", o.cfg.cutoffs, "Inverse AQFT cutoffs (0 = full QFT)")
      ->delimiter(',');
  counting->add_option("--extraction", o.extraction, "Estimator")
      ->check(CLI::IsMember({"mean", "argmax"}));

  auto* entropy = app.add_subcommand("entropy-map", "Bond entropies through a QFT round trip");
  add_common(entropy, o);
  add_fourier(entropy, o);
  entropy->add_option("--cutoff-l", o.cfg.cutoffs, "Inverse AQFT cutoff")->delimiter(',');

  auto* crk = app.add_subcommand("crk-distance", "Distance of CR_k from the identity");
  crk->add_option("--k", o.ks, "Values of k")->delimiter(',');
  crk->add_option("--samples", o.cfg.samples, "Random states per k");
  crk->add_option("--seed", o.cfg.seed, "Seed");
  crk->add_option("--out", o.out, "Output directory");
  crk->add_option("--format", o.format, "Result format")->check(CLI::IsMember({"csv", "json"}));
  crk->add_flag("--uniform-angles", o.uniform_angles, "Uniform angles instead of Haar states");

  auto* sample = app.add_subcommand("sample", "Sample bitstrings from a circuit's output state");
  add_common(sample, o);
  sample->add_option("--circuit", o.circuit_file, "Circuit text file (random circuit if omitted)");
  sample->add_option("--depth", o.depth, "Depth of the random circuit");
  sample->add_option("--samples", o.cfg.samples, "Number of samples");
  sample->add_option("--sites", o.sites, "Sample only the first qubits");

  auto* utils = app.add_subcommand("utils", "Closed-form helper formulas");
  utils->add_option("--epsilon", o.epsilon, "Failure probability for aux_qubits");
  utils->add_option("--m", o.m_value, "Marked items for delta_m");
  utils->add_option("--n", o.n_value, "Search-space size for delta_m");
  utils->add_option("--n-read", o.cfg.n_read, "Readout qubits for delta_m");
  utils->add_option("--qubits", o.cfg.qubits, "Qubits for hilbert_fraction");
  utils->add_option("--chi-value", o.chi_value, "Bond dimension for hilbert_fraction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    finish_config(o);
    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    o.cfg.kind = name;
    if (name == "utils") return run_utils(o);
    if (name == "crk-distance") return run_crk(o);
    if (name == "entropy-map") return run_entropy(o);
    if (name == "sample") {
      if (sub->count("--chi") == 0) o.cfg.chis.clear();
      return run_sample(o);
    }
    RunRecord r;
    if (name == "qft-fidelity") r = qft_fidelity_sweep(o.cfg);
    if (name == "aqft-fidelity") r = aqft_fidelity_sweep(o.cfg);
    if (name == "grover") r = grover_sweep(o.cfg);
    if (name == "counting") r = counting_experiment(o.cfg);
    write_record(o, r);
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const InvalidState& e) {
    std::cerr << "invalid state: " << e.what() << '\n';
    return kNumericalError;
  }
}
