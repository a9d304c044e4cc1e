// Copyright 2026 The circformer Authors
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

// Line-based circuit text format:
//
//   class bounded|semi|unbounded
//   gate <idx> input <k>
//   gate <idx> const <rational>
//   gate <idx> output <from>
//   gate <idx> plus|times <from>...
//   gate <idx> sign <from>
//   gate <idx> ext <name> <from>...
//
// Predecessors are listed in alpha order. Output labels follow ascending gate
// index. '#' starts a comment.

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "circformer/circuit.hpp"

namespace circformer {

namespace detail {

inline std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream is{std::string(line)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline std::size_t parse_index(const std::string& tok, std::size_t line_no) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError("line " + std::to_string(line_no) + ": expected a positive integer, got '" + tok + "'");
  try {
    return std::stoull(tok);
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": integer out of range '" + tok + "'");
  }
}

inline std::string strip_comment(std::string_view line) {
  auto hash = line.find('#');
  return std::string(hash == std::string_view::npos ? line : line.substr(0, hash));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

}  // namespace detail

inline CircuitClass parse_circuit_class(std::string_view name) {
  if (name == "bounded") return CircuitClass::kBounded;
  if (name == "semi" || name == "semi_unbounded") return CircuitClass::kSemiUnbounded;
  if (name == "unbounded") return CircuitClass::kUnbounded;
  throw ParseError("unknown circuit class '" + std::string(name) + "'");
}

inline Circuit parse_circuit(std::string_view text) {
  Circuit c;
  std::vector<std::pair<GateIndex, GateIndex>> output_edges;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  bool seen_class = false;
  while (std::getline(in, raw)) {
    ++line_no;
    auto tok = detail::split_ws(detail::strip_comment(raw));
    if (tok.empty()) continue;
    auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
    if (tok[0] == "class") {
      if (tok.size() != 2 || seen_class) throw ParseError(where() + "malformed class header");
      c.declared_class = parse_circuit_class(tok[1]);
      seen_class = true;
      continue;
    }
    if (tok[0] != "gate" || tok.size() < 3) throw ParseError(where() + "expected 'gate <idx> <type> ...'");
    const GateIndex idx = detail::parse_index(tok[1], line_no);
    const std::string& type = tok[2];
    auto operands = [&](std::size_t first) {
      std::vector<GateIndex> out;
      for (std::size_t k = first; k < tok.size(); ++k) out.push_back(detail::parse_index(tok[k], line_no));
      return out;
    };
    auto add_edges = [&](const std::vector<GateIndex>& from) {
      for (std::size_t a = 0; a < from.size(); ++a) c.edges.push_back({from[a], idx, a + 1});
    };
    if (type == "input") {
      if (tok.size() != 4) throw ParseError(where() + "input takes exactly one label");
      c.gates.push_back({idx, InputGate{detail::parse_index(tok[3], line_no)}});
    } else if (type == "const") {
      if (tok.size() != 4) throw ParseError(where() + "const takes exactly one value");
      try {
        c.gates.push_back({idx, ConstantGate{Rational::parse(tok[3])}});
      } catch (const ParseError& e) {
        throw ParseError(where() + e.what());
      }
    } else if (type == "output") {
      if (tok.size() != 4) throw ParseError(where() + "output takes exactly one predecessor");
      c.gates.push_back({idx, OutputGate{0}});
      add_edges(operands(3));
    } else if (type == "plus") {
      c.gates.push_back({idx, PlusGate{}});
      add_edges(operands(3));
    } else if (type == "times") {
      c.gates.push_back({idx, TimesGate{}});
      add_edges(operands(3));
    } else if (type == "sign") {
      if (tok.size() != 4) throw ParseError(where() + "sign takes exactly one predecessor");
      c.gates.push_back({idx, SignGate{}});
      add_edges(operands(3));
    } else if (type == "ext") {
      if (tok.size() < 4) throw ParseError(where() + "ext needs a name");
      auto from = operands(4);
      if (tok[3] == "sign")
        c.gates.push_back({idx, SignGate{}});
      else
        c.gates.push_back({idx, ExtensionGate{tok[3], from.size()}});
      add_edges(from);
    } else {
      throw ParseError(where() + "unknown gate type '" + type + "'");
    }
  }
  // Output labels follow ascending gate index.
  std::vector<Gate*> outs;
  for (auto& g : c.gates)
    if (std::holds_alternative<OutputGate>(g.label)) outs.push_back(&g);
  std::sort(outs.begin(), outs.end(), [](const Gate* a, const Gate* b) { return a->index < b->index; });
  for (std::size_t k = 0; k < outs.size(); ++k) std::get<OutputGate>(outs[k]->label).k = k + 1;
  return c;
}

inline Circuit load_circuit(const std::string& path) { return parse_circuit(detail::read_file(path)); }

inline std::string format_circuit(const Circuit& c) {
  std::ostringstream os;
  os << "class " << to_string(c.declared_class) << "\n";
  auto preds = predecessors(c);
  std::vector<const Gate*> order;
  for (const auto& g : c.gates) order.push_back(&g);
  std::sort(order.begin(), order.end(), [](const Gate* a, const Gate* b) { return a->index < b->index; });
  std::size_t note = 0;
  for (const Gate* g : order) {
    while (note < c.notes.size() && c.notes[note].first <= g->index) os << "# " << c.notes[note++].second << "\n";
    os << "gate " << g->index << " ";
    std::visit(
        [&](const auto& label) {
          using T = std::decay_t<decltype(label)>;
          if constexpr (std::is_same_v<T, ConstantGate>) os << "const " << label.value;
          else if constexpr (std::is_same_v<T, InputGate>) os << "input " << label.k;
          else if constexpr (std::is_same_v<T, OutputGate>) os << "output";
          else if constexpr (std::is_same_v<T, PlusGate>) os << "plus";
          else if constexpr (std::is_same_v<T, TimesGate>) os << "times";
          else if constexpr (std::is_same_v<T, SignGate>) os << "sign";
          else os << "ext " << label.name;
        },
        g->label);
    for (auto p : preds[g->index - 1]) os << " " << p;
    os << "\n";
  }
  return os.str();
}

}  // namespace circformer
