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

#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "circformer/circuit.hpp"

namespace circformer {

/// Handle to a gate inside a CircuitBuilder.
struct Wire {
  GateIndex id = 0;
  friend bool operator==(Wire, Wire) = default;
};

/// Incremental circuit construction. Gates are numbered in creation order;
/// output gates are appended at finish() so their indices ascend with their
/// labels. A gate never receives two edges from the same predecessor: the
/// builder routes repeats through a unary-plus copy.
class CircuitBuilder {
 public:
  explicit CircuitBuilder(CircuitClass cls = CircuitClass::kUnbounded) { circuit_.declared_class = cls; }

  Wire input() { return add(InputGate{++inputs_}, {}); }

  Wire constant(const Rational& value) {
    if (auto it = constants_.find(value); it != constants_.end()) return it->second;
    Wire w = add(ConstantGate{value}, {});
    constants_.emplace(value, w);
    return w;
  }

  Wire plus(std::span<const Wire> in) { return add(PlusGate{}, in); }
  Wire plus(std::initializer_list<Wire> in) { return plus(std::span<const Wire>(in.begin(), in.size())); }
  Wire times(Wire a, Wire b) {
    const Wire in[] = {a, b};
    return add(TimesGate{}, in);
  }
  /// Unbounded product; only legal in unbounded circuits.
  Wire times(std::span<const Wire> in) { return add(TimesGate{}, in); }
  Wire sign(Wire a) {
    const Wire in[] = {a};
    return add(SignGate{}, in);
  }
  Wire extension(const std::string& name, std::span<const Wire> in) {
    if (name == "sign") return sign(in[0]);
    return add(ExtensionGate{name, in.size()}, in);
  }
  Wire copy(Wire a) {
    const Wire in[] = {a};
    return add(PlusGate{}, in);
  }

  // Derived arithmetic.
  Wire neg(Wire a) { return times(constant(-1), a); }
  Wire sub(Wire a, Wire b) { return plus({a, neg(b)}); }
  Wire scale(const Rational& k, Wire a) { return times(constant(k), a); }
  Wire square(Wire a) { return times(a, a); }

  void output(Wire w) { pending_outputs_.push_back(w); }

  /// Attaches a provenance comment to the next gate created.
  void note(std::string text) { circuit_.notes.emplace_back(circuit_.gates.size() + 1, std::move(text)); }

  std::size_t size() const { return circuit_.gates.size(); }

  Circuit finish() && {
    for (std::size_t k = 0; k < pending_outputs_.size(); ++k) {
      const Wire in[] = {pending_outputs_[k]};
      add(OutputGate{k + 1}, in);
    }
    pending_outputs_.clear();
    return std::move(circuit_);
  }

 private:
  Wire add(GateLabel label, std::span<const Wire> in) {
    std::vector<Wire> preds(in.begin(), in.end());
    for (std::size_t a = 0; a < preds.size(); ++a)
      for (std::size_t b = 0; b < a; ++b)
        if (preds[a] == preds[b]) {
          preds[a] = copy(preds[a]);
          break;
        }
    const GateIndex idx = circuit_.gates.size() + 1;
    circuit_.gates.push_back({idx, std::move(label)});
    for (std::size_t a = 0; a < preds.size(); ++a) circuit_.edges.push_back({preds[a].id, idx, a + 1});
    return Wire{idx};
  }

  Circuit circuit_;
  std::size_t inputs_ = 0;
  std::vector<Wire> pending_outputs_;
  std::unordered_map<Rational, Wire> constants_;
};

}  // namespace circformer
