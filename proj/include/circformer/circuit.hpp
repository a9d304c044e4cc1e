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

// Arithmetic circuits C = (V, E, alpha, beta): data model, validation against
// a fan-in discipline, exact evaluation and size/depth metrics.

#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "circformer/numerics.hpp"
#include "circformer/rational.hpp"

namespace circformer {

class CircuitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using GateIndex = std::size_t;

enum class CircuitClass { kBounded, kSemiUnbounded, kUnbounded };

inline const char* to_string(CircuitClass c) {
  switch (c) {
    case CircuitClass::kBounded: return "bounded";
    case CircuitClass::kSemiUnbounded: return "semi";
    case CircuitClass::kUnbounded: return "unbounded";
  }
  return "?";
}

struct ConstantGate {
  Rational value;
};
struct InputGate {
  std::size_t k = 0;
};
struct OutputGate {
  std::size_t k = 0;
};
struct PlusGate {};
struct TimesGate {};
struct SignGate {};
struct ExtensionGate {
  std::string name;
  std::size_t arity = 0;
};

using GateLabel =
    std::variant<ConstantGate, InputGate, OutputGate, PlusGate, TimesGate, SignGate, ExtensionGate>;

inline bool is_source(const GateLabel& l) {
  return std::holds_alternative<ConstantGate>(l) || std::holds_alternative<InputGate>(l);
}

struct Gate {
  GateIndex index = 0;
  GateLabel label;
};

struct Edge {
  GateIndex from = 0;
  GateIndex to = 0;
  std::size_t alpha = 0;
};

struct Circuit {
  CircuitClass declared_class = CircuitClass::kUnbounded;
  std::vector<Gate> gates;
  std::vector<Edge> edges;
  // Provenance comments emitted by the text writer before the given gate.
  std::vector<std::pair<GateIndex, std::string>> notes;

  std::size_t input_count() const {
    return static_cast<std::size_t>(std::count_if(gates.begin(), gates.end(), [](const Gate& g) {
      return std::holds_alternative<InputGate>(g.label);
    }));
  }
  std::size_t output_count() const {
    return static_cast<std::size_t>(std::count_if(gates.begin(), gates.end(), [](const Gate& g) {
      return std::holds_alternative<OutputGate>(g.label);
    }));
  }
};

// ---------------------------------------------------------------------------
// Extension functions f : Q^k -> Q. "sign" is always present and backs the
// distinguished Sign gate; everything else is registered by name.

struct Extension {
  std::string name;
  std::size_t arity = 0;
  std::function<Rational(std::span<const Rational>)> fn;
  // Registration ordinal among non-sign extensions; the encoding maps it to a
  // type constant.
  std::size_t ordinal = 0;
  bool is_sign = false;
};

class ExtensionRegistry {
 public:
  ExtensionRegistry() {
    Extension s{"sign", 1, [](std::span<const Rational> a) { return sign(a[0]); }, 0, true};
    entries_.push_back(std::move(s));
  }

  const Extension& add(std::string name, std::size_t arity,
                       std::function<Rational(std::span<const Rational>)> fn) {
    if (arity == 0) throw std::invalid_argument("extension '" + name + "' needs arity >= 1");
    if (find(name)) throw std::invalid_argument("extension '" + name + "' already registered");
    std::size_t ordinal = entries_.size() - 1;
    entries_.push_back(Extension{std::move(name), arity, std::move(fn), ordinal, false});
    return entries_.back();
  }

  const Extension* find(std::string_view name) const {
    for (const auto& e : entries_)
      if (e.name == name) return &e;
    return nullptr;
  }

  const Extension& at(std::string_view name) const {
    if (const auto* e = find(name)) return *e;
    throw CircuitError("unregistered extension '" + std::string(name) + "'");
  }

  const std::vector<Extension>& entries() const { return entries_; }

 private:
  std::vector<Extension> entries_;
};

/// sign plus a few pure host functions used by the tests and samples:
/// relu/1, max/2, min/2 and mux/3 (a if c > 0 else b).
inline const ExtensionRegistry& default_registry() {
  static const ExtensionRegistry registry = [] {
    ExtensionRegistry r;
    r.add("relu", 1, [](std::span<const Rational> a) { return relu(a[0]); });
    r.add("max", 2, [](std::span<const Rational> a) { return std::max(a[0], a[1]); });
    r.add("min", 2, [](std::span<const Rational> a) { return std::min(a[0], a[1]); });
    r.add("mux", 3, [](std::span<const Rational> a) { return a[0].sign() > 0 ? a[1] : a[2]; });
    return r;
  }();
  return registry;
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string rule;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view rule) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.rule == rule; });
  }
  std::string str() const {
    std::ostringstream os;
    for (const auto& v : violations) os << v.rule << ": " << v.detail << "\n";
    return os.str();
  }
};

namespace detail {

inline std::string gate_name(GateIndex i) { return "gate " + std::to_string(i); }

// Kahn's algorithm over positions 0..n-1; returns nullopt on a cycle.
inline std::optional<std::vector<std::size_t>> topological_order(
    std::size_t n, const std::vector<std::vector<std::size_t>>& succ) {
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& s : succ)
    for (auto t : s) ++indeg[t];
  std::vector<std::size_t> order, stack;
  order.reserve(n);
  for (std::size_t i = n; i-- > 0;)
    if (indeg[i] == 0) stack.push_back(i);
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (auto t : succ[v])
      if (--indeg[t] == 0) stack.push_back(t);
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

}  // namespace detail

/// Checks every structural invariant under `cls` (the circuit's declared
/// class unless given). Violations are reported, never thrown.
inline ValidationReport validate(const Circuit& c, std::optional<CircuitClass> cls = std::nullopt,
                                 const ExtensionRegistry& registry = default_registry()) {
  ValidationReport report;
  auto add = [&](std::string rule, std::string detail) {
    report.violations.push_back({std::move(rule), std::move(detail)});
  };
  const CircuitClass klass = cls.value_or(c.declared_class);
  const std::size_t n = c.gates.size();

  std::vector<const Gate*> by_index(n + 1, nullptr);
  for (const auto& g : c.gates) {
    if (g.index < 1 || g.index > n) {
      add("index contiguity", detail::gate_name(g.index) + " outside 1.." + std::to_string(n));
      continue;
    }
    if (by_index[g.index]) {
      add("duplicate index", detail::gate_name(g.index));
      continue;
    }
    by_index[g.index] = &g;
  }
  for (std::size_t i = 1; i <= n; ++i)
    if (!by_index[i] && report.ok()) add("index contiguity", "missing " + detail::gate_name(i));

  std::vector<std::vector<std::size_t>> alphas(n + 1);
  std::vector<std::size_t> fan_out(n + 1, 0);
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::pair<GateIndex, GateIndex>> pairs;
  pairs.reserve(c.edges.size());
  bool edges_ok = true;
  for (const auto& e : c.edges) {
    if (e.from < 1 || e.from > n || !by_index[e.from] || e.to < 1 || e.to > n || !by_index[e.to]) {
      add("dangling edge", std::to_string(e.from) + "->" + std::to_string(e.to));
      edges_ok = false;
      continue;
    }
    pairs.emplace_back(e.from, e.to);
    alphas[e.to].push_back(e.alpha);
    ++fan_out[e.from];
    succ[e.from - 1].push_back(e.to - 1);
  }
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t k = 1; k < pairs.size(); ++k)
    if (pairs[k] == pairs[k - 1] && (k < 2 || pairs[k - 2] != pairs[k]))
      add("duplicate edge", std::to_string(pairs[k].first) + "->" + std::to_string(pairs[k].second));
  if (edges_ok && !detail::topological_order(n, succ)) add("acyclic", "edge relation has a cycle");

  for (std::size_t i = 1; i <= n; ++i) {
    if (!by_index[i]) continue;
    auto a = alphas[i];
    std::sort(a.begin(), a.end());
    for (std::size_t k = 0; k < a.size(); ++k)
      if (a[k] != k + 1) {
        add("alpha contiguity", detail::gate_name(i) + " incoming alpha values are not 1.." +
                                    std::to_string(a.size()));
        break;
      }
  }

  std::vector<std::size_t> input_ks, output_ks;
  std::vector<std::pair<GateIndex, std::size_t>> outputs;
  for (std::size_t i = 1; i <= n; ++i) {
    const Gate* g = by_index[i];
    if (!g) continue;
    const std::size_t fan_in = alphas[i].size();
    const std::string name = detail::gate_name(i);
    std::visit(
        [&](const auto& label) {
          using T = std::decay_t<decltype(label)>;
          if constexpr (std::is_same_v<T, ConstantGate>) {
            if (fan_in != 0) add("source fan-in", name + " constant gate has fan-in " + std::to_string(fan_in));
          } else if constexpr (std::is_same_v<T, InputGate>) {
            if (fan_in != 0) add("source fan-in", name + " input gate has fan-in " + std::to_string(fan_in));
            input_ks.push_back(label.k);
          } else if constexpr (std::is_same_v<T, OutputGate>) {
            if (fan_in != 1) add("output fan-in", name + " output gate has fan-in " + std::to_string(fan_in));
            if (fan_out[i] != 0) add("output fan-out", name + " output gate has fan-out " + std::to_string(fan_out[i]));
            output_ks.push_back(label.k);
            outputs.emplace_back(i, label.k);
          } else if constexpr (std::is_same_v<T, PlusGate>) {
            if (klass == CircuitClass::kBounded && fan_in > 2)
              add("fan-in discipline", name + " plus fan-in " + std::to_string(fan_in) + " exceeds 2 (bounded)");
          } else if constexpr (std::is_same_v<T, TimesGate>) {
            if (klass == CircuitClass::kBounded && fan_in > 2)
              add("fan-in discipline", name + " times fan-in " + std::to_string(fan_in) + " exceeds 2 (bounded)");
            if (klass == CircuitClass::kSemiUnbounded && fan_in != 2)
              add("fan-in discipline", name + " times fan-in " + std::to_string(fan_in) + " must be 2 (semi)");
          } else if constexpr (std::is_same_v<T, SignGate>) {
            if (fan_in != 1) add("sign fan-in", name + " sign gate has fan-in " + std::to_string(fan_in));
          } else if constexpr (std::is_same_v<T, ExtensionGate>) {
            const Extension* ext = registry.find(label.name);
            if (!ext) {
              add("unknown extension", name + " uses '" + label.name + "'");
            } else if (ext->arity != label.arity || fan_in != label.arity) {
              add("extension arity", name + " '" + label.name + "' has fan-in " + std::to_string(fan_in) +
                                         ", arity " + std::to_string(ext->arity));
            }
          }
        },
        g->label);
  }

  auto check_labels = [&](std::vector<std::size_t> ks, const char* what) {
    std::sort(ks.begin(), ks.end());
    for (std::size_t k = 0; k < ks.size(); ++k)
      if (ks[k] != k + 1) {
        add(std::string(what) + " labels", std::string(what) + " labels are not exactly 1.." + std::to_string(ks.size()));
        return;
      }
  };
  check_labels(input_ks, "input");
  check_labels(output_ks, "output");
  // Output gates appear in ascending index order of their label.
  for (std::size_t k = 1; k < outputs.size(); ++k)
    if (outputs[k].second < outputs[k - 1].second) {
      add("output order", "output gate indices are not ascending in their label");
      break;
    }
  return report;
}

// ---------------------------------------------------------------------------
// Evaluation

/// Preprocessed evaluator for a valid circuit; reusable across inputs.
class Evaluator {
 public:
  explicit Evaluator(const Circuit& c, const ExtensionRegistry& registry = default_registry())
      : registry_(&registry) {
    if (auto report = validate(c, std::nullopt, registry); !report.ok())
      throw CircuitError("invalid circuit:\n" + report.str());
    const std::size_t n = c.gates.size();
    labels_.resize(n);
    for (const auto& g : c.gates) labels_[g.index - 1] = g.label;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> preds(n);
    std::vector<std::vector<std::size_t>> succ(n);
    for (const auto& e : c.edges) {
      preds[e.to - 1].emplace_back(e.alpha, e.from - 1);
      succ[e.from - 1].push_back(e.to - 1);
    }
    offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::sort(preds[i].begin(), preds[i].end());
      offsets_[i + 1] = offsets_[i] + preds[i].size();
    }
    pred_.reserve(offsets_[n]);
    for (const auto& p : preds)
      for (const auto& [alpha, from] : p) pred_.push_back(from);
    order_ = *detail::topological_order(n, succ);
    for (std::size_t i = 0; i < n; ++i) {
      if (auto* in = std::get_if<InputGate>(&labels_[i])) {
        if (inputs_.size() < in->k) inputs_.resize(in->k);
        inputs_[in->k - 1] = i;
      } else if (auto* out = std::get_if<OutputGate>(&labels_[i])) {
        if (outputs_.size() < out->k) outputs_.resize(out->k);
        outputs_[out->k - 1] = i;
      } else if (auto* ext = std::get_if<ExtensionGate>(&labels_[i])) {
        registry.at(ext->name);
      }
    }
  }

  std::size_t input_count() const { return inputs_.size(); }
  std::size_t output_count() const { return outputs_.size(); }

  std::vector<Rational> operator()(std::span<const Rational> u) const {
    if (u.size() != inputs_.size())
      throw CircuitError("circuit expects " + std::to_string(inputs_.size()) + " inputs, got " +
                         std::to_string(u.size()));
    std::vector<Rational> value(labels_.size());
    std::vector<Rational> args;
    for (auto v : order_) {
      std::span<const std::size_t> in(pred_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]);
      std::visit(
          [&](const auto& label) {
            using T = std::decay_t<decltype(label)>;
            if constexpr (std::is_same_v<T, ConstantGate>) {
              value[v] = label.value;
            } else if constexpr (std::is_same_v<T, InputGate>) {
              value[v] = u[label.k - 1];
            } else if constexpr (std::is_same_v<T, OutputGate>) {
              value[v] = value[in[0]];
            } else if constexpr (std::is_same_v<T, PlusGate>) {
              Rational acc;
              for (auto p : in) acc += value[p];
              value[v] = std::move(acc);
            } else if constexpr (std::is_same_v<T, TimesGate>) {
              Rational acc(1);
              for (auto p : in) acc *= value[p];
              value[v] = std::move(acc);
            } else if constexpr (std::is_same_v<T, SignGate>) {
              value[v] = sign(value[in[0]]);
            } else {
              args.clear();
              for (auto p : in) args.push_back(value[p]);
              value[v] = registry_->at(label.name).fn(args);
            }
          },
          labels_[v]);
    }
    std::vector<Rational> out;
    out.reserve(outputs_.size());
    for (auto o : outputs_) out.push_back(value[o]);
    return out;
  }

 private:
  const ExtensionRegistry* registry_;
  std::vector<GateLabel> labels_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> pred_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> inputs_;
  std::vector<std::size_t> outputs_;
};

/// (f_{C,out_1}(u), ..., f_{C,out_n}(u)).
inline std::vector<Rational> evaluate(const Circuit& c, std::span<const Rational> u,
                                      const ExtensionRegistry& registry = default_registry()) {
  return Evaluator(c, registry)(u);
}

// ---------------------------------------------------------------------------
// Metrics

struct CircuitMetrics {
  std::size_t size = 0;
  std::size_t depth = 0;
  std::size_t fan_in_max_plus = 0;
  std::size_t fan_in_max_times = 0;
};

/// Longest path (in edges) from a fan-in-0 gate to each gate, by gate index - 1.
inline std::vector<std::size_t> gate_levels(const Circuit& c) {
  const std::size_t n = c.gates.size();
  std::vector<std::vector<std::size_t>> succ(n), pred(n);
  for (const auto& e : c.edges) {
    succ[e.from - 1].push_back(e.to - 1);
    pred[e.to - 1].push_back(e.from - 1);
  }
  auto order = detail::topological_order(n, succ);
  if (!order) throw CircuitError("gate_levels on a cyclic circuit");
  std::vector<std::size_t> level(n, 0);
  for (auto v : *order)
    for (auto p : pred[v]) level[v] = std::max(level[v], level[p] + 1);
  return level;
}

inline CircuitMetrics metrics(const Circuit& c) {
  CircuitMetrics m;
  m.size = c.gates.size();
  if (c.gates.empty()) return m;
  const auto level = gate_levels(c);
  std::vector<std::size_t> fan_in(c.gates.size(), 0);
  for (const auto& e : c.edges) ++fan_in[e.to - 1];
  for (const auto& g : c.gates) {
    const auto i = g.index - 1;
    if (std::holds_alternative<OutputGate>(g.label)) m.depth = std::max(m.depth, level[i]);
    if (std::holds_alternative<PlusGate>(g.label)) m.fan_in_max_plus = std::max(m.fan_in_max_plus, fan_in[i]);
    if (std::holds_alternative<TimesGate>(g.label)) m.fan_in_max_times = std::max(m.fan_in_max_times, fan_in[i]);
  }
  return m;
}

/// Renumbers gates: old index i becomes new_index[i - 1]. Labels (including
/// output k) are kept, so callers must keep outputs ascending themselves.
inline Circuit relabel_gates(const Circuit& c, const std::vector<GateIndex>& new_index) {
  if (new_index.size() != c.gates.size()) throw std::invalid_argument("relabel_gates: permutation size mismatch");
  Circuit out;
  out.declared_class = c.declared_class;
  out.gates.resize(c.gates.size());
  for (const auto& g : c.gates) out.gates[new_index[g.index - 1] - 1] = Gate{new_index[g.index - 1], g.label};
  out.edges.reserve(c.edges.size());
  for (const auto& e : c.edges) out.edges.push_back({new_index[e.from - 1], new_index[e.to - 1], e.alpha});
  return out;
}

/// Predecessors of every gate ordered by alpha, by gate index - 1.
inline std::vector<std::vector<GateIndex>> predecessors(const Circuit& c) {
  std::vector<std::vector<std::pair<std::size_t, GateIndex>>> tmp(c.gates.size());
  for (const auto& e : c.edges) tmp[e.to - 1].emplace_back(e.alpha, e.from);
  std::vector<std::vector<GateIndex>> out(c.gates.size());
  for (std::size_t i = 0; i < tmp.size(); ++i) {
    std::sort(tmp[i].begin(), tmp[i].end());
    for (const auto& [a, f] : tmp[i]) out[i].push_back(f);
  }
  return out;
}

}  // namespace circformer
