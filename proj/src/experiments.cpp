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

#include "mpsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace mpsim {
namespace {

constexpr double kPi = std::numbers::pi;

Mps zero_state(std::size_t n) {
  const std::vector<int> bits(n, 0);
  return product_state(std::span<const int>(bits));
}

std::string with_cutoff(const std::string& base, int l) {
  return l > 0 ? base + "/l=" + std::to_string(l) : base;
}

// Collects per-job results; jobs write disjoint slots.
struct JobResults {
  std::vector<std::vector<ResultRow>> rows;
  std::vector<double> discarded;

  explicit JobResults(std::size_t n) : rows(n), discarded(n, 0.0) {}

  RunRecord finish(const ExperimentConfig& cfg,
                   std::chrono::steady_clock::time_point start) {
    RunRecord r;
    r.config = cfg;
    for (auto& v : rows) r.rows.insert(r.rows.end(), v.begin(), v.end());
    r.sort_rows();
    if (!discarded.empty()) {
      r.max_discarded_weight = *std::max_element(discarded.begin(), discarded.end());
      double s = 0;
      for (double d : discarded) s += d;
      r.mean_discarded_weight = s / static_cast<double>(discarded.size());
    }
    r.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }
};

// Random prep, then QFT, each under its policy. Returns the prepared
// reference state and the state after the QFT.
struct Prepared {
  Mps reference;
  Mps transformed;
  double discarded = 0.0;
};

Prepared prepare_and_transform(const ExperimentConfig& cfg, std::size_t rep,
                               const TruncationPolicy& policy) {
  const TruncationPolicy prep_policy =
      cfg.full_chi_prep ? TruncationPolicy{TruncationPolicy::kUnbounded, 0.0, cfg.method}
                        : policy;
  auto prep = run_circuit(zero_state(cfg.qubits), random_prep_circuit(cfg, rep), prep_policy);
  auto qft = run_circuit(prep.state, build_qft(cfg.qubits, {0, cfg.final_swaps}), policy);
  return {std::move(prep.state), std::move(qft.state), prep.discarded_weight + qft.discarded_weight};
}

Circuit inverse_transform(const ExperimentConfig& cfg, int l) {
  const int n = static_cast<int>(cfg.qubits);
  if (l <= 0 || l >= n) return invert(build_qft(cfg.qubits, {0, cfg.final_swaps}));
  return invert(build_aqft(cfg.qubits, l, cfg.final_swaps));
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration and records

void ExperimentConfig::validate() const {
  if (qubits < 1) throw std::invalid_argument("--qubits must be >= 1");
  if (chis.empty()) throw std::invalid_argument("chi sweep is empty");
  for (std::size_t i = 0; i < chis.size(); ++i) {
    if (chis[i] < 1) throw std::invalid_argument("chi values must be >= 1");
    if (i && chis[i] <= chis[i - 1])
      throw std::invalid_argument("chi sweep must be strictly increasing");
  }
  if (reps < 1) throw std::invalid_argument("--reps must be >= 1");
  for (int l : cutoffs)
    if (l < 0 || l == 1) throw std::invalid_argument("AQFT cutoff must be >= 2");
  if (n_read < 1 || n_read > n_top)
    throw std::invalid_argument("need 1 <= n_read <= n_top");
  if (samples < 1) throw std::invalid_argument("--samples must be >= 1");
  if (draws < 1) throw std::invalid_argument("--draws must be >= 1");
  if (workers < 1) throw std::invalid_argument("--workers must be >= 1");
  if (const auto* v = std::get_if<Variational>(&method); v && v->sweeps < 1)
    throw std::invalid_argument("variational sweeps must be >= 1");
}

TruncationPolicy ExperimentConfig::policy(std::size_t chi) const {
  TruncationPolicy p = TruncationPolicy::with_chi(chi);
  p.method = method;
  return p;
}

void RunRecord::sort_rows() {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.experiment, a.chi, a.rep) < std::tie(b.experiment, b.chi, b.rep);
  });
}

std::vector<SummaryRow> RunRecord::summary() const {
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> groups;
  for (const auto& r : rows) groups[{r.experiment, r.chi}].push_back(r.value);
  std::vector<SummaryRow> out;
  for (const auto& [key, values] : groups) {
    SummaryRow s{key.first, key.second, 0.0, 0.0, values.size()};
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
      double ss = 0;
      for (double v : values) ss += (v - s.mean) * (v - s.mean);
      s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    out.push_back(s);
  }
  return out;
}

void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)>& job) {
  workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; !failed && (i = next++) < n;) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Fourier experiments

Circuit random_prep_circuit(const ExperimentConfig& cfg, std::size_t rep) {
  if (cfg.qubits < 2) return Circuit(cfg.qubits);
  return build_random_state_circuit(cfg.qubits, cfg.prep_layers, cfg.seed + rep);
}

Circuit qft_roundtrip_circuit(const ExperimentConfig& cfg, std::size_t rep,
                              int inverse_cutoff) {
  Circuit c(cfg.qubits);
  c.mark("random prep").append(random_prep_circuit(cfg, rep));
  c.mark("QFT").append(build_qft(cfg.qubits, {0, cfg.final_swaps}));
  c.mark(inverse_cutoff > 0 ? "inverse AQFT" : "inverse QFT")
      .append(inverse_transform(cfg, inverse_cutoff));
  return c;
}

RunRecord qft_fidelity_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n_jobs = cfg.reps * cfg.chis.size();
  JobResults results(n_jobs);
  const Circuit inverse = inverse_transform(cfg, 0);
  parallel_for(n_jobs, cfg.workers, [&](std::size_t job) {
    const std::size_t rep = job / cfg.chis.size(), chi = cfg.chis[job % cfg.chis.size()];
    const auto policy = cfg.policy(chi);
    auto prepared = prepare_and_transform(cfg, rep, policy);
    auto back = run_circuit(std::move(prepared.transformed), inverse, policy);
    results.rows[job].push_back(
        {"qft-fidelity", chi, rep, fidelity(back.state, prepared.reference)});
    results.discarded[job] = prepared.discarded + back.discarded_weight;
  });
  return results.finish(cfg, start);
}

RunRecord aqft_fidelity_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<int> cutoffs = cfg.cutoffs;
  if (cutoffs.empty())
    for (int l = 2; l <= static_cast<int>(cfg.qubits); ++l) cutoffs.push_back(l);
  std::vector<Circuit> inverses;
  for (int l : cutoffs) inverses.push_back(inverse_transform(cfg, l));

  const std::size_t n_jobs = cfg.reps * cfg.chis.size();
  JobResults results(n_jobs);
  parallel_for(n_jobs, cfg.workers, [&](std::size_t job) {
    const std::size_t rep = job / cfg.chis.size(), chi = cfg.chis[job % cfg.chis.size()];
    const auto policy = cfg.policy(chi);
    auto prepared = prepare_and_transform(cfg, rep, policy);
    double discarded = prepared.discarded;
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
      auto back = run_circuit(prepared.transformed, inverses[i], policy);
      results.rows[job].push_back({"aqft-fidelity/l=" + std::to_string(cutoffs[i]), chi, rep,
                                   fidelity(back.state, prepared.reference)});
      discarded = std::max(discarded, prepared.discarded + back.discarded_weight);
    }
    results.discarded[job] = discarded;
  });
  return results.finish(cfg, start);
}

RunResult entropy_map_run(const ExperimentConfig& cfg) {
  cfg.validate();
  const int l = cfg.cutoffs.empty() ? 0 : cfg.cutoffs.front();
  const Circuit c = qft_roundtrip_circuit(cfg, 0, l);
  const auto policy = cfg.policy(cfg.chis.front());
  if (!cfg.full_chi_prep) return run_circuit(zero_state(cfg.qubits), c, policy, true);

  // Unbounded prep, then the transforms under the sweep policy.
  const std::size_t prep_len = random_prep_circuit(cfg, 0).size();
  Circuit prep(cfg.qubits), rest(cfg.qubits);
  for (std::size_t i = 0; i < c.size(); ++i) (i < prep_len ? prep : rest).add(c.gates()[i]);
  TruncationPolicy unbounded = policy;
  unbounded.chi_max = TruncationPolicy::kUnbounded;
  auto first = run_circuit(zero_state(cfg.qubits), prep, unbounded, true);
  auto second = run_circuit(std::move(first.state), rest, policy, true);
  RunResult out;
  out.state = std::move(second.state);
  out.discarded_weight = first.discarded_weight + second.discarded_weight;
  out.entropy.markers = c.markers();
  out.entropy.rows = std::move(first.entropy.rows);
  for (std::size_t i = 1; i < second.entropy.rows.size(); ++i) {
    auto row = std::move(second.entropy.rows[i]);
    row.layer += prep_len;
    out.entropy.rows.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Controlled-rotation distance

double crk_overlap(double phi1, double phi2, double phi3, int k) {
  const double s1 = std::sin(phi1), s2 = std::sin(phi2), s3 = std::sin(phi3);
  const double c1 = std::cos(phi1), c2 = std::cos(phi2), c3 = std::cos(phi3);
  const double p = s1 * s1 * s2 * s2 * s3 * s3;
  const double angle = 2 * kPi / std::ldexp(1.0, k);
  const double re = c1 * c1 + s1 * s1 * c2 * c2 + s1 * s1 * s2 * s2 * c3 * c3 + p * std::cos(angle);
  const double im = p * std::sin(angle);
  return re * re + im * im;
}

double crk_max_distance(int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const double s = std::sin(kPi / std::ldexp(1.0, k));
  return s * s;
}

CrkStats crk_distance_stats(int k, std::size_t n_samples, Rng& rng, bool uniform_angles) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  std::vector<double> d(n_samples);
  for (auto& x : d) {
    double phi1, phi2, phi3;
    if (uniform_angles) {
      phi1 = kPi * rng.uniform();
      phi2 = kPi * rng.uniform();
      phi3 = 2 * kPi * rng.uniform();
    } else {
      // Haar state: normalized complex Gaussian vector, mapped to the angles.
      double r[4];
      double norm2 = 0;
      for (double& v : r) {
        const double a = rng.normal(), b = rng.normal();
        v = a * a + b * b;
        norm2 += v;
      }
      const double r00 = std::sqrt(r[0] / norm2), r01 = std::sqrt(r[1] / norm2);
      const double r10 = std::sqrt(r[2] / norm2), r11 = std::sqrt(r[3] / norm2);
      phi1 = std::acos(std::clamp(r00, 0.0, 1.0));
      phi2 = std::atan2(std::hypot(r10, r11), r01);
      phi3 = std::atan2(r11, r10);
    }
    x = 1.0 - crk_overlap(phi1, phi2, phi3, k);
  }
  CrkStats s;
  s.max = crk_max_distance(k);
  for (double x : d) s.mean += x;
  s.mean /= static_cast<double>(n_samples);
  std::sort(d.begin(), d.end());
  const std::size_t h = n_samples / 2;
  s.median = n_samples % 2 ? d[h] : 0.5 * (d[h - 1] + d[h]);
  return s;
}

// ---------------------------------------------------------------------------
// Grover

namespace {

GroverProblem problem_for(const ExperimentConfig& cfg, std::size_t rep) {
  if (!cfg.marked.empty()) return GroverProblem(cfg.qubits, cfg.marked);
  Rng rng = Rng(cfg.seed + rep).split(0x6d61726b);
  return GroverProblem::random(cfg.qubits, cfg.num_marked, rng);
}

}  // namespace

RunRecord grover_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n_jobs = cfg.reps * cfg.chis.size();
  JobResults results(n_jobs);
  parallel_for(n_jobs, cfg.workers, [&](std::size_t job) {
    const std::size_t rep = job / cfg.chis.size(), chi = cfg.chis[job % cfg.chis.size()];
    const GroverProblem p = problem_for(cfg, rep);
    const std::size_t r = optimal_iterations(p.n_items(), static_cast<double>(p.m()));
    auto res = run_circuit(zero_state(p.n_qubits), build_grover_circuit(p, r), cfg.policy(chi));
    double f = 0;
    for (auto w : p.marked) f += std::norm(amplitude(res.state, w));
    results.rows[job].push_back({"grover-fidelity/m=" + std::to_string(p.m()), chi, rep, f});
    results.discarded[job] = res.discarded_weight;
  });
  return results.finish(cfg, start);
}

std::optional<std::size_t> required_chi(const RunRecord& record,
                                        const std::string& experiment, double target) {
  bool any = false;
  std::optional<std::size_t> best;
  for (const auto& s : record.summary()) {
    if (s.experiment != experiment) continue;
    any = true;
    if (s.mean >= target && (!best || s.chi < *best)) best = s.chi;
  }
  if (!any) throw std::invalid_argument("record has no rows for '" + experiment + "'");
  return best;
}

// ---------------------------------------------------------------------------
// Counting

double folded_alpha(std::uint64_t y, std::size_t n_read) {
  const double theta = 2 * kPi * static_cast<double>(y) / std::ldexp(1.0, static_cast<int>(n_read));
  return std::min(theta, 2 * kPi - theta) / 2;
}

double estimate_m(const Histogram& h, double n, std::size_t n_read, std::uint64_t draws,
                  Rng& rng) {
  if (h.empty()) throw std::invalid_argument("estimate_m: empty histogram");
  if (draws < 1) throw std::invalid_argument("estimate_m: need at least one draw");
  std::vector<std::uint64_t> cumulative;
  std::vector<double> estimate;
  std::uint64_t acc = 0;
  for (const auto& [key, count] : h.counts()) {
    acc += count;
    cumulative.push_back(acc);
    const double s = std::sin(folded_alpha(from_bitstring(key), n_read));
    estimate.push_back(n * s * s);
  }
  double sum = 0;
  for (std::uint64_t d = 0; d < draws; ++d) {
    const std::uint64_t u = rng.below(h.total());
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    sum += estimate[static_cast<std::size_t>(it - cumulative.begin())];
  }
  return sum / static_cast<double>(draws);
}

double estimate_m_argmax(const Histogram& h, double n, std::size_t n_read) {
  if (h.empty()) throw std::invalid_argument("estimate_m: empty histogram");
  auto best = h.counts().begin();
  for (auto it = h.counts().begin(); it != h.counts().end(); ++it)
    if (it->second > best->second) best = it;
  const double s = std::sin(folded_alpha(from_bitstring(best->first), n_read));
  return n * s * s;
}

RunRecord counting_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<int> variants = cfg.cutoffs;
  if (variants.empty()) variants.push_back(0);
  std::vector<Circuit> inverses;
  for (int l : variants) {
    const bool full = l == 0 || l >= static_cast<int>(cfg.n_top);
    Circuit c(cfg.n_top + cfg.qubits);
    c.mark(full ? "inverse QFT" : "inverse AQFT")
        .append(invert(full ? build_qft(cfg.n_top) : build_aqft(cfg.n_top, l)));
    inverses.push_back(std::move(c));
  }

  const std::size_t n_jobs = cfg.reps * cfg.chis.size();
  JobResults results(n_jobs);
  parallel_for(n_jobs, cfg.workers, [&](std::size_t job) {
    const std::size_t rep = job / cfg.chis.size(), chi = cfg.chis[job % cfg.chis.size()];
    const GroverProblem p = problem_for(cfg, rep);
    const auto policy = cfg.policy(chi);
    auto pre = run_circuit(zero_state(cfg.n_top + p.n_qubits),
                           build_counting_prefix(cfg.n_top, p), policy);
    double discarded = pre.discarded_weight;
    Rng rng = Rng(cfg.seed + rep).split(0x636f756e74 + chi);
    for (std::size_t v = 0; v < variants.size(); ++v) {
      auto out = run_circuit(pre.state, inverses[v], policy);
      discarded = std::max(discarded, pre.discarded_weight + out.discarded_weight);
      const Histogram h = sample_histogram(out.state, cfg.samples, rng, cfg.n_read);
      const double m_hat = cfg.extraction == Extraction::ArgmaxPair
                               ? estimate_m_argmax(h, p.n_items(), cfg.n_read)
                               : estimate_m(h, p.n_items(), cfg.n_read, cfg.draws, rng);
      results.rows[job].push_back({with_cutoff("counting-mhat", variants[v]), chi, rep, m_hat});
      results.rows[job].push_back({with_cutoff("counting-ratio", variants[v]), chi, rep,
                                   m_hat / static_cast<double>(p.m())});
    }
    results.discarded[job] = discarded;
  });
  return results.finish(cfg, start);
}

// ---------------------------------------------------------------------------
// Closed-form utilities

std::size_t aux_qubits(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  return static_cast<std::size_t>(std::ceil(std::log2(2.0 + 1.0 / (2.0 * epsilon))));
}

double delta_m(double m, double n, std::size_t n_read) {
  if (!(m >= 0) || !(n > 0)) throw std::invalid_argument("delta_m: need m >= 0 and n > 0");
  const double scale = std::ldexp(1.0, static_cast<int>(n_read));
  return (std::sqrt(2.0 * m * n) + n / (2.0 * scale)) / scale;
}

double hilbert_fraction(std::size_t n_qubits, double chi) {
  if (n_qubits < 1 || !(chi >= 1)) throw std::invalid_argument("hilbert_fraction: bad arguments");
  return 2.0 * static_cast<double>(n_qubits) * chi * chi /
         std::ldexp(1.0, static_cast<int>(n_qubits));
}

}  // namespace mpsim
