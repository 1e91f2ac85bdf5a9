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

#include <charconv>
#include <chrono>
#include <ctime>
#include <ostream>

#include <json.hpp>

#include "mpsim/experiments.hpp"
#include "mpsim/version.hpp"

namespace mpsim {
namespace {

std::string num(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

const char* extraction_name(Extraction e) {
  return e == Extraction::ArgmaxPair ? "argmax" : "mean";
}

nlohmann::json config_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["kind"] = c.kind;
  j["qubits"] = c.qubits;
  j["chi"] = c.chis;
  j["reps"] = c.reps;
  j["seed"] = c.seed;
  j["prep_layers"] = c.prep_layers;
  j["full_chi_prep"] = c.full_chi_prep;
  j["final_swaps"] = c.final_swaps;
  j["cutoffs"] = c.cutoffs;
  j["num_marked"] = c.num_marked;
  j["marked"] = c.marked;
  j["n_top"] = c.n_top;
  j["n_read"] = c.n_read;
  j["n_aux"] = c.n_top - c.n_read;
  j["samples"] = c.samples;
  j["draws"] = c.draws;
  j["extraction"] = extraction_name(c.extraction);
  if (const auto* v = std::get_if<Variational>(&c.method)) {
    j["method"] = {{"name", "variational"}, {"sweeps", v->sweeps}, {"tolerance", v->tolerance}};
  } else {
    j["method"] = {{"name", "zipup"}};
  }
  j["workers"] = c.workers;
  return j;
}

nlohmann::json summary_json(const RunRecord& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : r.summary())
    rows.push_back({{"experiment", s.experiment}, {"chi", s.chi}, {"mean", s.mean},
                    {"std", s.stddev}, {"count", s.count}});
  return rows;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void write_results_csv(std::ostream& out, const RunRecord& r) {
  out << "experiment,chi,rep,value\n";
  for (const auto& row : r.rows)
    out << row.experiment << ',' << row.chi << ',' << row.rep << ',' << num(row.value) << '\n';
}

void write_results_json(std::ostream& out, const RunRecord& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"experiment", row.experiment}, {"chi", row.chi}, {"rep", row.rep},
                    {"value", row.value}});
  out << nlohmann::json{{"rows", rows}, {"summary", summary_json(r)}}.dump(2) << '\n';
}

void write_meta_json(std::ostream& out, const RunRecord& r) {
  nlohmann::json j;
  j["config"] = config_json(r.config);
  j["seed"] = r.config.seed;
  j["versions"] = {{"mpsim", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__}};
  j["wall_seconds"] = r.wall_seconds;
  j["timestamp"] = utc_timestamp();
  j["discarded_weight"] = {{"max", r.max_discarded_weight}, {"mean", r.mean_discarded_weight}};
  j["summary"] = summary_json(r);
  out << j.dump(2) << '\n';
}

void write_entropy_csv(std::ostream& out, const EntropyMap& map) {
  out << "layer,bond,entropy\n";
  for (const auto& row : map.rows)
    for (std::size_t b = 0; b < row.entropies.size(); ++b)
      out << row.layer << ',' << b + 1 << ',' << num(row.entropies[b]) << '\n';
}

}  // namespace mpsim
