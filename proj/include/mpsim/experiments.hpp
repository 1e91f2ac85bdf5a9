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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mpsim/circuit.hpp"
#include "mpsim/rng.hpp"
#include "mpsim/sampler.hpp"
#include "mpsim/truncation.hpp"

namespace mpsim {

enum class Extraction { RandomizedMean, ArgmaxPair };

struct ExperimentConfig {
  std::string kind;
  std::size_t qubits = 12;
  std::vector<std::size_t> chis = {2, 4, 8, 16, 32, 64};
  std::size_t reps = 10;
  std::uint64_t seed = 1;

  /// Random-state preparation.
  std::size_t prep_layers = 20;
  bool full_chi_prep = false;
  bool final_swaps = true;

  /// AQFT cutoffs; for counting an empty list means the full inverse QFT.
  std::vector<int> cutoffs;

  /// Grover and counting.
  std::size_t num_marked = 1;
  std::vector<std::uint64_t> marked;  ///< fixed items; drawn per rep when empty
  std::size_t n_top = 6;
  std::size_t n_read = 4;
  std::uint64_t samples = 10000;
  std::uint64_t draws = 1000;
  Extraction extraction = Extraction::RandomizedMean;

  ApplicationMethod method = Variational{};
  unsigned workers = 1;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  TruncationPolicy policy(std::size_t chi) const;
};

/// One long-format result line.
struct ResultRow {
  std::string experiment;
  std::size_t chi = 0;
  std::size_t rep = 0;
  double value = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct SummaryRow {
  std::string experiment;
  std::size_t chi = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
};

struct RunRecord {
  ExperimentConfig config;
  std::vector<ResultRow> rows;
  double wall_seconds = 0.0;
  double max_discarded_weight = 0.0;
  double mean_discarded_weight = 0.0;

  /// Rows sorted by (experiment, chi, rep).
  void sort_rows();
  /// Mean and sample standard deviation per (experiment, chi).
  std::vector<SummaryRow> summary() const;
};

/// Runs `job(i)` for i in [0, n) on up to `workers` threads; the first
/// exception is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)>& job);

/// Random state of the sweep pipeline: `prep_layers` random layers from
/// |0...0> with seed base_seed + rep.
Circuit random_prep_circuit(const ExperimentConfig& cfg, std::size_t rep);

/// Random prep, QFT, inverse QFT with phase markers.
Circuit qft_roundtrip_circuit(const ExperimentConfig& cfg, std::size_t rep,
                              int inverse_cutoff = 0);

RunRecord qft_fidelity_sweep(const ExperimentConfig& cfg);
/// Rows "aqft-fidelity/l=<l>" for each cutoff (l = N gives the full QFT).
RunRecord aqft_fidelity_sweep(const ExperimentConfig& cfg);

struct CrkStats {
  double max = 0.0;
  double mean = 0.0;
  double median = 0.0;
};

/// |<Psi|CR_k|Psi>|^2 in the angle parametrization of a general two-qubit
/// state; independent of the relative phases.
double crk_overlap(double phi1, double phi2, double phi3, int k);
/// Largest distance 1 - overlap over all states, sin^2(pi / 2^k).
double crk_max_distance(int k);
CrkStats crk_distance_stats(int k, std::size_t n_samples, Rng& rng,
                            bool uniform_angles = false);

RunRecord grover_sweep(const ExperimentConfig& cfg);

/// Smallest swept chi whose mean value for `experiment` reaches `target`.
std::optional<std::size_t> required_chi(const RunRecord& record,
                                        const std::string& experiment,
                                        double target);

/// Phase estimate of a readout value y on n_read bits, folded to [0, pi/2].
double folded_alpha(std::uint64_t y, std::size_t n_read);
double estimate_m(const Histogram& h, double n, std::size_t n_read,
                  std::uint64_t draws, Rng& rng);
/// Uses only the most frequent outcome.
double estimate_m_argmax(const Histogram& h, double n, std::size_t n_read);

/// Rows "counting-mhat[/l=<l>]" and "counting-ratio[/l=<l>]".
RunRecord counting_experiment(const ExperimentConfig& cfg);

std::size_t aux_qubits(double epsilon);
double delta_m(double m, double n, std::size_t n_read);
double hilbert_fraction(std::size_t n_qubits, double chi);

/// Entropy map of one QFT round trip (rep 0) at the first swept chi.
RunResult entropy_map_run(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Output

void write_results_csv(std::ostream& out, const RunRecord& r);
void write_results_json(std::ostream& out, const RunRecord& r);
void write_meta_json(std::ostream& out, const RunRecord& r);
void write_entropy_csv(std::ostream& out, const EntropyMap& map);

}  // namespace mpsim
