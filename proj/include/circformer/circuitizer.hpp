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

// Unrolls a transformer at a fixed sequence length into one arithmetic
// circuit with sign gates. Inputs are the n input vectors flattened
// position-major; outputs likewise for the final sequence.

#pragma once

#include <string>
#include <vector>

#include "circformer/circuit_builder.hpp"
#include "circformer/engine.hpp"
#include "circformer/gadgets.hpp"

namespace circformer {

inline std::vector<Rational> flatten(const Sequence& seq) {
  std::vector<Rational> out;
  for (const auto& x : seq) out.insert(out.end(), x.begin(), x.end());
  return out;
}

inline Sequence unflatten(std::span<const Rational> flat, std::size_t dim) {
  if (dim == 0 || flat.size() % dim != 0) throw std::invalid_argument("unflatten: length is not a multiple of dim");
  Sequence out;
  for (std::size_t i = 0; i < flat.size(); i += dim) out.emplace_back(flat.begin() + i, flat.begin() + i + dim);
  return out;
}

/// Class the compiled circuit is declared with: semi-unbounded unless a WP
/// head or a host circuit needs an unbounded product.
inline CircuitClass compiled_class(const TransformerConfig& cfg) {
  auto wide_times = [](const std::shared_ptr<const GadgetCircuit>& g) {
    return g && metrics(g->body()).fan_in_max_times > 2;
  };
  if (cfg.input_embedding.kind == InputEmbedding::Kind::kCircuit && wide_times(cfg.input_embedding.gadget))
    return CircuitClass::kUnbounded;
  for (const auto& layer : cfg.layers) {
    for (const auto& h : layer.heads) {
      if (h.pooling.family == PoolFamily::kWP) return CircuitClass::kUnbounded;
      if (const auto* hc = std::get_if<HostCircuit>(&h.attention); hc && wide_times(hc->gadget))
        return CircuitClass::kUnbounded;
    }
    if (const auto* hc = std::get_if<HostCircuit>(&layer.activation); hc && wide_times(hc->gadget))
      return CircuitClass::kUnbounded;
  }
  return CircuitClass::kSemiUnbounded;
}

namespace detail {

using gadgets::Wires;

inline std::vector<Wires> attention_scores(CircuitBuilder& b, const AttentionSpec& spec, const std::vector<Wires>& y,
                                           std::size_t dim) {
  const std::size_t n = y.size();
  std::vector<Wires> a(n, Wires(n));
  auto dot_product = [&](const DotProductAttention& dpa) {
    // Ax and By once per position, then one product per pair and row.
    std::vector<std::vector<std::optional<Wire>>> ax(n), by(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t r = 0; r < dim; ++r) {
        ax[i].push_back(gadgets::linear(b, dpa.a[r], y[i]));
        by[i].push_back(gadgets::linear(b, dpa.b[r], y[i]));
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Wires terms;
        for (std::size_t r = 0; r < dim; ++r)
          if (ax[i][r] && by[j][r]) terms.push_back(b.times(*ax[i][r], *by[j][r]));
        a[i][j] = terms.empty() ? b.constant(0) : terms.size() == 1 ? terms[0] : b.plus(terms);
      }
  };
  std::visit(
      [&](const auto& att) {
        using T = std::decay_t<decltype(att)>;
        if constexpr (std::is_same_v<T, BuiltinAttention>) {
          if (auto dpa = dot_product_realization(att, dim)) {
            dot_product(*dpa);
            return;
          }
          const Component from = att.kind == BuiltinAttentionKind::kEEq ? kP : kS;
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a[i][j] = gadgets::eq(b, y[i][from], y[j][kS]);
        } else if constexpr (std::is_same_v<T, DotProductAttention>) {
          dot_product(att);
        } else {
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
              Wires in = y[i];
              in.insert(in.end(), y[j].begin(), y[j].end());
              a[i][j] = gadgets::splice(b, att.gadget->body(), in).at(0);
            }
        }
      },
      spec);
  return a;
}

}  // namespace detail

/// Circuit computing run(cfg, .) on length-n inputs.
inline Circuit compile(const TransformerConfig& cfg, std::size_t n,
                       const ExtensionRegistry& registry = default_registry()) {
  using gadgets::Wires;
  check_config(cfg, registry);
  if (n < 1) throw std::invalid_argument("compile: sequence length must be >= 1");
  const Charfin chi = cfg.chi();
  const std::size_t d = cfg.dim;
  const std::size_t d_in = cfg.input_dim();
  CircuitBuilder b(compiled_class(cfg));

  b.note("inputs: " + std::to_string(n) + " positions x " + std::to_string(d_in) + " components");
  std::vector<Wires> x(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < d_in; ++c) x[i].push_back(b.input());

  std::vector<Wires> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    b.note("embedding, position " + std::to_string(i + 1));
    switch (cfg.input_embedding.kind) {
      case InputEmbedding::Kind::kIdentity: y[i] = x[i]; break;
      case InputEmbedding::Kind::kCircuit: y[i] = gadgets::splice(b, cfg.input_embedding.gadget->body(), x[i]); break;
      default: {
        y[i] = x[i];
        if (d >= 7) {
          y[i].push_back(b.constant(1));
          y[i].push_back(b.square(x[i][kS]));
        }
        if (d >= 8) y[i].push_back(b.square(x[i][kI]));
        if (d >= 9) y[i].push_back(gadgets::charfin(b, chi, types::kOutput, x[i][kT]));
      }
    }
    if (auto it = cfg.positional.find({i + 1, n}); it != cfg.positional.end())
      for (std::size_t c = 0; c < d; ++c)
        if (!it->second[c].is_zero()) y[i][c] = b.plus({y[i][c], b.constant(it->second[c])});
  }

  for (std::size_t k = 0; k < cfg.layers.size(); ++k) {
    const Layer& layer = cfg.layers[k];
    const std::string at = "layer " + std::to_string(k + 1);
    std::vector<std::vector<Wires>> pooled(layer.heads.size());
    for (std::size_t h = 0; h < layer.heads.size(); ++h) {
      const Head& head = layer.heads[h];
      const std::string where = at + " head " + std::to_string(h + 1);
      b.note(where + ": attention scores");
      const auto scores = detail::attention_scores(b, head.attention, y, d);
      for (std::size_t i = 0; i < n; ++i) {
        b.note(where + ": pooling, position " + std::to_string(i + 1));
        const Wires w = gadgets::transform(b, head.pooling.transform, scores[i]);
        pooled[h].push_back(gadgets::pool(b, head.pooling.family, w, y));
      }
    }
    std::vector<Wires> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      b.note(at + ": activation, position " + std::to_string(i + 1));
      std::vector<Wires> args{y[i]};
      for (auto& p : pooled) args.push_back(p[i]);
      std::visit(
          [&](const auto& act) {
            using T = std::decay_t<decltype(act)>;
            if constexpr (std::is_same_v<T, BuiltinActivation>) {
              next[i] = gadgets::builtin_activation(b, act, args, chi, registry);
            } else {
              Wires flat;
              for (const auto& a : args) flat.insert(flat.end(), a.begin(), a.end());
              next[i] = gadgets::splice(b, act.gadget->body(), flat);
            }
          },
          layer.activation);
    }
    y = std::move(next);
  }

  b.note("outputs: " + std::to_string(n) + " positions x " + std::to_string(d) + " components");
  for (const auto& v : y)
    for (Wire w : v) b.output(w);
  return std::move(b).finish();
}

}  // namespace circformer
