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

// Seeded generator of valid random circuits, used as test input.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "circformer/circuit.hpp"

namespace circformer {

struct RandomCircuitSpec {
  CircuitClass cls = CircuitClass::kUnbounded;
  std::size_t max_depth = 3;
  std::size_t max_gates = 20;
  // Names from the extension registry ("sign" selects Sign gates).
  std::vector<std::string> extension_whitelist;
  std::uint64_t seed = 0;
  std::optional<std::size_t> inputs;
  std::optional<std::size_t> outputs;
  std::size_t max_fan_in = 4;
};

/// Plus/Times gates get fan-in >= 1; in bounded circuits exactly 2, and Times
/// in semi-unbounded circuits exactly 2, so every result is admissible for the
/// matching construction. Gate indices are shuffled.
inline Circuit random_circuit(const RandomCircuitSpec& spec,
                              const ExtensionRegistry& registry = default_registry()) {
  if (spec.max_depth < 1) throw std::invalid_argument("random_circuit: max_depth must be >= 1");
  if (spec.max_gates < 2) throw std::invalid_argument("random_circuit: max_gates must be >= 2");
  std::mt19937_64 rng(spec.seed);
  auto uniform = [&](std::size_t lo, std::size_t hi) {  // inclusive
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };

  std::size_t n_in = spec.inputs.value_or(uniform(1, 3));
  std::size_t n_out = spec.outputs.value_or(uniform(1, 2));
  if (n_in < 1 || n_out < 1) throw std::invalid_argument("random_circuit: need at least one input and output");
  if (n_in + n_out > spec.max_gates) {
    if (spec.inputs || spec.outputs)
      throw std::invalid_argument("random_circuit: max_gates " + std::to_string(spec.max_gates) +
                                  " < inputs + outputs");
    n_in = 1;
    n_out = 1;
  }
  std::size_t n_const = std::min<std::size_t>(uniform(0, 2), spec.max_gates - n_in - n_out);
  const std::size_t budget = spec.max_gates - n_in - n_out - n_const;
  const std::size_t n_internal = spec.max_depth >= 2 ? uniform(budget / 2, budget) : 0;

  struct Node {
    GateLabel label;
    std::vector<std::size_t> preds;
    std::size_t level = 0;
  };
  std::vector<Node> nodes;
  for (std::size_t k = 1; k <= n_in; ++k) nodes.push_back({InputGate{k}, {}, 0});
  for (std::size_t k = 0; k < n_const; ++k) {
    const auto num = static_cast<std::int64_t>(uniform(0, 18)) - 9;
    const auto den = static_cast<std::int64_t>(uniform(1, 9));
    nodes.push_back({ConstantGate{Rational(num, den)}, {}, 0});
  }

  struct Kind {
    GateLabel label;
    std::size_t min_arity, max_arity;
  };
  std::vector<Kind> kinds;
  const std::size_t wide = std::max<std::size_t>(spec.max_fan_in, 1);
  switch (spec.cls) {
    case CircuitClass::kBounded:
      kinds = {{PlusGate{}, 2, 2}, {TimesGate{}, 2, 2}};
      break;
    case CircuitClass::kSemiUnbounded:
      kinds = {{PlusGate{}, 1, wide}, {TimesGate{}, 2, 2}};
      break;
    case CircuitClass::kUnbounded:
      kinds = {{PlusGate{}, 1, wide}, {TimesGate{}, 1, wide}};
      break;
  }
  for (const auto& name : spec.extension_whitelist) {
    const Extension& ext = registry.at(name);
    if (ext.is_sign)
      kinds.push_back({SignGate{}, 1, 1});
    else
      kinds.push_back({ExtensionGate{ext.name, ext.arity}, ext.arity, ext.arity});
  }

  // Internal gates stay at level <= max_depth - 1 so outputs fit in max_depth.
  for (std::size_t g = 0; g < n_internal; ++g) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].level + 2 <= spec.max_depth) candidates.push_back(i);
    const Kind& kind = kinds[uniform(0, kinds.size() - 1)];
    if (candidates.size() < kind.min_arity) continue;
    const std::size_t arity = uniform(kind.min_arity, std::min(kind.max_arity, candidates.size()));
    // Bias toward recent gates to build depth.
    std::vector<std::size_t> chosen;
    while (chosen.size() < arity) {
      std::size_t pick;
      if (uniform(0, 1) == 0) {
        const std::size_t window = std::min<std::size_t>(candidates.size(), 4);
        pick = candidates[candidates.size() - 1 - uniform(0, window - 1)];
      } else {
        pick = candidates[uniform(0, candidates.size() - 1)];
      }
      if (std::find(chosen.begin(), chosen.end(), pick) == chosen.end()) chosen.push_back(pick);
    }
    std::size_t level = 0;
    for (auto p : chosen) level = std::max(level, nodes[p].level + 1);
    nodes.push_back({kind.label, std::move(chosen), level});
  }

  const std::size_t n_body = nodes.size();
  for (std::size_t k = 1; k <= n_out; ++k) {
    // Prefer the last few gates, which tend to be the deepest.
    const std::size_t window = std::min<std::size_t>(n_body, 3);
    const std::size_t pred = uniform(0, 2) == 0 ? uniform(0, n_body - 1) : n_body - 1 - uniform(0, window - 1);
    nodes.push_back({OutputGate{k}, {pred}, nodes[pred].level + 1});
  }

  // Random gate numbering; output labels are then reassigned by ascending index.
  std::vector<GateIndex> perm(nodes.size());
  std::iota(perm.begin(), perm.end(), GateIndex{1});
  std::shuffle(perm.begin(), perm.end(), rng);
  Circuit c;
  c.declared_class = spec.cls;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    c.gates.push_back({perm[i], nodes[i].label});
    for (std::size_t a = 0; a < nodes[i].preds.size(); ++a) c.edges.push_back({perm[nodes[i].preds[a]], perm[i], a + 1});
  }
  std::sort(c.gates.begin(), c.gates.end(), [](const Gate& a, const Gate& b) { return a.index < b.index; });
  std::size_t k = 0;
  for (auto& g : c.gates)
    if (auto* out = std::get_if<OutputGate>(&g.label)) out->k = ++k;
  std::sort(c.edges.begin(), c.edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.to, a.alpha) < std::tie(b.to, b.alpha);
  });
  return c;
}

}  // namespace circformer
