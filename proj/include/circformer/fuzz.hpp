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

// Differential testing of the constructions against direct evaluation, and a
// greedy shrinker for failing cases.

#pragma once

#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "circformer/constructions.hpp"
#include "circformer/random_circuit.hpp"

namespace circformer {

struct FuzzCase {
  Circuit circuit;
  std::vector<Rational> inputs;
};

/// Circuit class and extension whitelist whose random circuits `kind` admits.
inline RandomCircuitSpec admissible_spec(const ConstructionKind& kind, std::uint64_t seed, std::size_t max_depth = 4,
                                         std::size_t max_gates = 30) {
  RandomCircuitSpec spec;
  spec.seed = seed;
  spec.max_depth = max_depth;
  spec.max_gates = max_gates;
  switch (kind.kind) {
    case Kind::kGen:
    case Kind::kFac: spec.cls = CircuitClass::kUnbounded; break;
    case Kind::kFsac: spec.cls = CircuitClass::kSemiUnbounded; break;
    case Kind::kFnc: spec.cls = CircuitClass::kBounded; break;
    case Kind::kExt:
      spec.cls = CircuitClass::kSemiUnbounded;
      spec.extension_whitelist = kind.basis;
      break;
    case Kind::kSign:
      spec.cls = CircuitClass::kSemiUnbounded;
      spec.extension_whitelist = {"sign"};
      break;
  }
  return spec;
}

/// n rationals p/q with p in [-9, 9], q in [1, 9].
inline std::vector<Rational> random_inputs(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> num(-9, 9), den(1, 9);
  std::vector<Rational> u;
  for (std::size_t k = 0; k < n; ++k) u.emplace_back(num(rng), den(rng));
  return u;
}

inline FuzzCase random_case(const ConstructionKind& kind, std::uint64_t seed, std::size_t max_depth = 4,
                            std::size_t max_gates = 30, const ExtensionRegistry& registry = default_registry()) {
  FuzzCase fc;
  fc.circuit = random_circuit(admissible_spec(kind, seed, max_depth, max_gates), registry);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  fc.inputs = random_inputs(fc.circuit.input_count(), rng);
  return fc;
}

/// Empty when simulate and evaluate agree, otherwise a description.
inline std::string oracle_mismatch(const ConstructionKind& kind, const FuzzCase& fc, const BuildOptions& options = {},
                                   const ExtensionRegistry& registry = default_registry()) {
  try {
    const auto got = simulate(kind, fc.circuit, fc.inputs, options, TraceMode::kNone, registry).outputs;
    const auto want = evaluate(fc.circuit, fc.inputs, registry);
    if (got == want) return {};
    std::ostringstream os;
    os << "transformer";
    for (const auto& r : got) os << " " << r;
    os << " vs direct";
    for (const auto& r : want) os << " " << r;
    return os.str();
  } catch (const AdmissibilityError&) {
    throw;
  } catch (const std::exception& e) {
    return std::string("exception: ") + e.what();
  }
}

namespace detail {

/// Drops gates that reach no output, renumbers the rest in their old order,
/// and relabels the surviving inputs 1..m (dropping unused input values).
inline FuzzCase prune(const FuzzCase& fc) {
  const Circuit& c = fc.circuit;
  const std::size_t n = c.gates.size();
  std::vector<std::vector<GateIndex>> pred(n + 1);
  for (const auto& e : c.edges) pred[e.to].push_back(e.from);
  std::vector<bool> live(n + 1, false);
  std::vector<GateIndex> stack;
  for (const auto& g : c.gates)
    if (std::holds_alternative<OutputGate>(g.label)) stack.push_back(g.index);
  while (!stack.empty()) {
    const GateIndex v = stack.back();
    stack.pop_back();
    if (live[v]) continue;
    live[v] = true;
    for (auto p : pred[v]) stack.push_back(p);
  }
  std::vector<const Gate*> by_index(n + 1);
  for (const auto& g : c.gates) by_index[g.index] = &g;
  std::vector<GateIndex> remap(n + 1, 0);
  FuzzCase out;
  out.circuit.declared_class = c.declared_class;
  std::size_t next_input = 0;
  for (GateIndex i = 1; i <= n; ++i) {
    if (!live[i]) continue;
    remap[i] = out.circuit.gates.size() + 1;
    GateLabel label = by_index[i]->label;
    if (auto* in = std::get_if<InputGate>(&label)) {
      out.inputs.push_back(fc.inputs.at(in->k - 1));
      in->k = ++next_input;
    }
    out.circuit.gates.push_back({remap[i], std::move(label)});
  }
  for (const auto& e : c.edges)
    if (live[e.to]) out.circuit.edges.push_back({remap[e.from], remap[e.to], e.alpha});
  std::size_t k = 0;
  for (auto& g : out.circuit.gates)
    if (auto* o = std::get_if<OutputGate>(&g.label)) o->k = ++k;
  return out;
}

inline std::vector<FuzzCase> shrink_candidates(const FuzzCase& fc) {
  std::vector<FuzzCase> out;
  const Circuit& c = fc.circuit;
  // Drop one output.
  if (c.output_count() > 1)
    for (const auto& g : c.gates)
      if (std::holds_alternative<OutputGate>(g.label)) {
        FuzzCase t = fc;
        std::erase_if(t.circuit.edges, [&](const Edge& e) { return e.to == g.index; });
        std::erase_if(t.circuit.gates, [&](const Gate& x) { return x.index == g.index; });
        for (auto& e : t.circuit.edges) e.to -= e.to > g.index, e.from -= e.from > g.index;
        for (auto& x : t.circuit.gates) x.index -= x.index > g.index;
        out.push_back(prune(t));
      }
  // Bypass an internal gate with one of its predecessors.
  for (const auto& g : c.gates) {
    if (is_source(g.label) || std::holds_alternative<OutputGate>(g.label)) continue;
    for (const auto& in_edge : c.edges) {
      if (in_edge.to != g.index) continue;
      FuzzCase t = fc;
      bool clash = false;
      for (auto& e : t.circuit.edges)
        if (e.from == g.index) {
          for (const auto& f : fc.circuit.edges)
            if (f.to == e.to && f.from == in_edge.from) clash = true;
          e.from = in_edge.from;
        }
      if (!clash) out.push_back(prune(t));
    }
  }
  // Drop one incoming edge of a wide gate.
  for (const auto& g : c.gates) {
    std::vector<Edge> ins;
    for (const auto& e : c.edges)
      if (e.to == g.index) ins.push_back(e);
    if (ins.size() < 2 || std::holds_alternative<ExtensionGate>(g.label)) continue;
    for (const auto& drop : ins) {
      FuzzCase t = fc;
      std::erase_if(t.circuit.edges, [&](const Edge& e) { return e.to == drop.to && e.alpha == drop.alpha; });
      for (auto& e : t.circuit.edges)
        if (e.to == drop.to && e.alpha > drop.alpha) --e.alpha;
      out.push_back(prune(t));
    }
  }
  // Simpler input values, ranked 0 < 1 < -1 < anything else.
  const Rational simple[] = {Rational(0), Rational(1), Rational(-1)};
  for (std::size_t k = 0; k < fc.inputs.size(); ++k)
    for (const Rational& r : simple) {
      if (fc.inputs[k] == r) break;
      FuzzCase t = fc;
      t.inputs[k] = r;
      out.push_back(std::move(t));
    }
  return out;
}

}  // namespace detail

/// Greedily applies size-reducing edits while `still_fails` holds. Candidates
/// that are not valid circuits are skipped; a passing input is returned as is.
inline FuzzCase shrink(FuzzCase fc, const std::function<bool(const FuzzCase&)>& still_fails,
                       const ExtensionRegistry& registry = default_registry()) {
  if (auto pruned = detail::prune(fc); still_fails(pruned)) fc = std::move(pruned);
  for (bool progress = true; progress;) {
    progress = false;
    for (auto& cand : detail::shrink_candidates(fc)) {
      if (!validate(cand.circuit, std::nullopt, registry).ok()) continue;
      if (!still_fails(cand)) continue;
      fc = std::move(cand);
      progress = true;
      break;
    }
  }
  return fc;
}

inline std::string format_case(const FuzzCase& fc, const std::string& header = {}) {
  std::ostringstream os;
  if (!header.empty()) os << "# " << header << "\n";
  os << "# inputs:";
  for (std::size_t k = 0; k < fc.inputs.size(); ++k) os << (k ? "," : " ") << fc.inputs[k];
  os << "\n" << format_circuit(fc.circuit);
  return os.str();
}

}  // namespace circformer
