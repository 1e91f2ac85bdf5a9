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
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mpsim/circuit.hpp"

namespace mpsim {
namespace {

std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("cannot format double");
  return std::string(buf, end);
}

const char* base_name(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::Z: return "Z";
    case GateKind::Rk: return "RK";
    case GateKind::RkDagger: return "RKDG";
    case GateKind::Unitary: return "U";
    case GateKind::Swap: return "SWAP";
  }
  return "?";
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw std::invalid_argument("circuit line " + std::to_string(line) + ": " + what);
}

std::size_t parse_index(const std::string& tok, std::size_t line) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || v == 0)
    parse_error(line, "bad qubit index '" + tok + "'");
  return v - 1;
}

double parse_double(const std::string& tok, std::size_t line) {
  double v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    parse_error(line, "bad number '" + tok + "'");
  return v;
}

}  // namespace

void write_circuit(std::ostream& out, const Circuit& c) {
  out << "QUBITS " << c.n_qubits() << '\n';
  std::size_t next_marker = 0;
  const auto& markers = c.markers();
  auto flush_markers = [&](std::size_t layer) {
    while (next_marker < markers.size() && markers[next_marker].layer == layer)
      out << "#phase " << markers[next_marker++].name << '\n';
  };
  for (std::size_t i = 0; i < c.size(); ++i) {
    flush_markers(i);
    const Gate& g = c.gates()[i];
    const bool ctrl = !g.controls.empty();
    const bool multi_prefix = ctrl && (g.kind == GateKind::H || g.kind == GateKind::X ||
                                       g.kind == GateKind::Z || g.kind == GateKind::Unitary);
    out << (multi_prefix ? "MC" : "") << base_name(g.kind);
    if (g.kind == GateKind::Rk || g.kind == GateKind::RkDagger) out << ' ' << g.k;
    if (g.kind == GateKind::Swap) {
      out << ' ' << g.target + 1 << ' ' << g.target2 + 1 << '\n';
      continue;
    }
    if (!ctrl) {
      out << ' ' << g.target + 1;
    } else {
      out << (g.controls.size() == 1 ? " CONTROL " : " CONTROLS ");
      for (std::size_t j = 0; j < g.controls.size(); ++j)
        out << (j ? "," : "") << g.controls[j] + 1;
      out << " TARGET " << g.target + 1;
    }
    if (g.kind == GateKind::Unitary)
      for (int e = 0; e < 4; ++e)
        out << ' ' << format_double(g.matrix(e / 2, e % 2).real()) << ' '
            << format_double(g.matrix(e / 2, e % 2).imag());
    out << '\n';
  }
  flush_markers(c.size());
}

Circuit read_circuit(std::istream& in) {
  static const std::map<std::string, std::pair<GateKind, bool>> kinds = {
      {"H", {GateKind::H, false}},         {"X", {GateKind::X, false}},
      {"Z", {GateKind::Z, false}},         {"U", {GateKind::Unitary, false}},
      {"MCH", {GateKind::H, true}},        {"MCX", {GateKind::X, true}},
      {"MCZ", {GateKind::Z, true}},        {"MCU", {GateKind::Unitary, true}},
      {"RK", {GateKind::Rk, false}},       {"RKDG", {GateKind::RkDagger, false}},
      {"SWAP", {GateKind::Swap, false}},
  };
  std::string text;
  std::size_t line_no = 0;
  std::optional<Circuit> c;
  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.rfind("#phase ", 0) == 0) {
      if (!c) parse_error(line_no, "phase marker before QUBITS");
      c->mark(text.substr(7));
      continue;
    }
    std::istringstream ls(text);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok[0] == "QUBITS") {
      if (c) parse_error(line_no, "duplicate QUBITS header");
      if (tok.size() != 2) parse_error(line_no, "expected QUBITS <n>");
      c.emplace(parse_index(tok[1], line_no) + 1);
      continue;
    }
    if (!c) parse_error(line_no, "gate before QUBITS header");
    auto it = kinds.find(tok[0]);
    if (it == kinds.end()) parse_error(line_no, "unknown gate '" + tok[0] + "'");
    Gate g;
    g.kind = it->second.first;
    std::size_t pos = 1;
    auto need = [&](std::size_t n) {
      if (pos + n > tok.size()) parse_error(line_no, "missing operands");
    };
    if (g.kind == GateKind::Rk || g.kind == GateKind::RkDagger) {
      need(1);
      g.k = static_cast<int>(parse_index(tok[pos++], line_no) + 1);
    }
    if (g.kind == GateKind::Swap) {
      need(2);
      g.target = parse_index(tok[pos++], line_no);
      g.target2 = parse_index(tok[pos++], line_no);
    } else if (pos < tok.size() && (tok[pos] == "CONTROL" || tok[pos] == "CONTROLS")) {
      need(4);
      std::istringstream cs(tok[pos + 1]);
      for (std::string part; std::getline(cs, part, ',');)
        g.controls.push_back(parse_index(part, line_no));
      if (tok[pos + 2] != "TARGET") parse_error(line_no, "expected TARGET");
      g.target = parse_index(tok[pos + 3], line_no);
      pos += 4;
    } else {
      if (it->second.second) parse_error(line_no, "expected CONTROLS");
      need(1);
      g.target = parse_index(tok[pos++], line_no);
    }
    if (g.kind == GateKind::Unitary) {
      need(8);
      for (int e = 0; e < 4; ++e) {
        const double re = parse_double(tok[pos++], line_no);
        const double im = parse_double(tok[pos++], line_no);
        g.matrix(e / 2, e % 2) = cplx(re, im);
      }
    }
    if (pos != tok.size()) parse_error(line_no, "trailing tokens");
    try {
      c->add(std::move(g));
    } catch (const std::exception& e) {
      parse_error(line_no, e.what());
    }
  }
  if (!c) throw std::invalid_argument("circuit text has no QUBITS header");
  return std::move(*c);
}

std::string to_text(const Circuit& c) {
  std::ostringstream out;
  write_circuit(out, c);
  return out.str();
}

Circuit from_text(const std::string& text) {
  std::istringstream in(text);
  return read_circuit(in);
}

}  // namespace mpsim
