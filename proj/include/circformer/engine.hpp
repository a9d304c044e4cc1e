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

// Generalized transformer over Q: input embedding, then per layer and head an
// attention matrix, a score transform and a pooling, then one activation.

#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "circformer/builtins.hpp"
#include "circformer/encoding.hpp"
#include "circformer/gadget_circuit.hpp"

namespace circformer {

/// A function given as a circuit file.
struct HostCircuit {
  std::shared_ptr<const GadgetCircuit> gadget;

  friend bool operator==(const HostCircuit& a, const HostCircuit& b) { return a.gadget == b.gadget; }
};

using AttentionSpec = std::variant<BuiltinAttention, DotProductAttention, HostCircuit>;
using ActivationSpec = std::variant<BuiltinActivation, HostCircuit>;

enum class PoolFamily { kWS, kWP };
enum class ScoreTransform { kId, kAvg, kHardLeft, kHardRight };

struct PoolingSpec {
  PoolFamily family = PoolFamily::kWS;
  ScoreTransform transform = ScoreTransform::kId;

  friend bool operator==(const PoolingSpec&, const PoolingSpec&) = default;
};

inline const char* to_string(PoolFamily f) { return f == PoolFamily::kWS ? "WS" : "WP"; }

inline const char* to_string(ScoreTransform t) {
  switch (t) {
    case ScoreTransform::kId: return "id";
    case ScoreTransform::kAvg: return "avg";
    case ScoreTransform::kHardLeft: return "hardleft";
    case ScoreTransform::kHardRight: return "hardright";
  }
  return "?";
}

struct Head {
  AttentionSpec attention;
  PoolingSpec pooling;
};

struct Layer {
  std::vector<Head> heads;
  ActivationSpec activation;
};

struct InputEmbedding {
  enum class Kind { kIdentity, kEmbed7, kEmbed8, kEmbed9, kCircuit };
  Kind kind = Kind::kIdentity;
  std::shared_ptr<const GadgetCircuit> gadget;  // kCircuit only
};

inline const char* to_string(InputEmbedding::Kind k) {
  switch (k) {
    case InputEmbedding::Kind::kIdentity: return "identity";
    case InputEmbedding::Kind::kEmbed7: return "embed7";
    case InputEmbedding::Kind::kEmbed8: return "embed8";
    case InputEmbedding::Kind::kEmbed9: return "embed9";
    case InputEmbedding::Kind::kCircuit: return "circuit";
  }
  return "?";
}

/// Finite lookup (i, n) -> vector, 1-based i; missing entries are zero. An
/// empty table is the constant-zero embedding.
using PositionalTable = std::map<std::pair<std::size_t, std::size_t>, Vec>;

struct TransformerConfig {
  std::size_t dim = 5;
  InputEmbedding input_embedding;
  PositionalTable positional;
  std::vector<Layer> layers;
  CharfinMode charfin_mode = CharfinMode::kZero;
  // Support T' of the characteristic functions used by builtin activations.
  std::vector<Rational> types = types::base_support();

  Charfin chi() const { return Charfin(charfin_mode, types); }

  /// Dimension of raw input vectors.
  std::size_t input_dim() const {
    switch (input_embedding.kind) {
      case InputEmbedding::Kind::kIdentity: return dim;
      case InputEmbedding::Kind::kCircuit: return input_embedding.gadget->ports_in().size();
      default: return 5;
    }
  }
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Checks dimensions and arities; throws ConfigError on the first problem.
inline void check_config(const TransformerConfig& cfg, const ExtensionRegistry& registry = default_registry()) {
  const std::size_t d = cfg.dim;
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  switch (cfg.input_embedding.kind) {
    case InputEmbedding::Kind::kEmbed7:
      if (d != 7) fail("embed7 requires dim 7");
      break;
    case InputEmbedding::Kind::kEmbed8:
      if (d != 8) fail("embed8 requires dim 8");
      break;
    case InputEmbedding::Kind::kEmbed9:
      if (d != 9) fail("embed9 requires dim 9");
      break;
    case InputEmbedding::Kind::kCircuit:
      if (!cfg.input_embedding.gadget) fail("circuit input embedding without a circuit");
      if (cfg.input_embedding.gadget->ports_out().size() != d)
        fail("input embedding circuit must have " + std::to_string(d) + " outputs");
      break;
    case InputEmbedding::Kind::kIdentity: break;
  }
  for (const auto& [key, v] : cfg.positional)
    if (v.size() != d) fail("positional entry of wrong dimension");
  if (cfg.layers.empty()) fail("config has no layers");
  for (std::size_t k = 0; k < cfg.layers.size(); ++k) {
    const Layer& layer = cfg.layers[k];
    const std::string where = "layer " + std::to_string(k + 1);
    if (layer.heads.empty()) fail(where + " has no heads");
    for (std::size_t h = 0; h < layer.heads.size(); ++h) {
      const std::string at = where + " head " + std::to_string(h + 1);
      std::visit(
          [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, BuiltinAttention>) {
              if (d < required_dim(a)) fail(at + ": " + to_string(a) + " needs dim >= " + std::to_string(required_dim(a)));
            } else if constexpr (std::is_same_v<T, DotProductAttention>) {
              if (a.a.size() != d || a.b.size() != d) fail(at + ": matrices must be " + std::to_string(d) + "x" + std::to_string(d));
              for (std::size_t r = 0; r < d; ++r)
                if (a.a[r].size() != d || a.b[r].size() != d) fail(at + ": ragged matrix");
            } else {
              if (!a.gadget || a.gadget->ports_in().size() != 2 * d || a.gadget->ports_out().size() != 1)
                fail(at + ": attention circuit needs " + std::to_string(2 * d) + " inputs and 1 output");
            }
          },
          layer.heads[h].attention);
    }
    const std::size_t h_count = layer.heads.size();
    std::visit(
        [&](const auto& act) {
          using T = std::decay_t<decltype(act)>;
          if constexpr (std::is_same_v<T, BuiltinActivation>) {
            const auto ar = activation_arity(act, registry);
            if (h_count + 1 < ar.minimum || (ar.exact && h_count + 1 != ar.minimum))
              fail(where + ": " + to_string(act) + " takes " + std::to_string(ar.minimum - 1) + " heads, layer has " +
                   std::to_string(h_count));
            if (d < activation_min_dim(act)) fail(where + ": " + to_string(act) + " needs a larger dimension");
            for (const auto& b : act.basis) {
              if (!registry.find(b)) fail(where + ": unknown extension '" + b + "'");
            }
          } else {
            if (!act.gadget || act.gadget->ports_in().size() != (h_count + 1) * d || act.gadget->ports_out().size() != d)
              fail(where + ": activation circuit needs " + std::to_string((h_count + 1) * d) + " inputs and " +
                   std::to_string(d) + " outputs");
          }
        },
        layer.activation);
  }
}

// ---------------------------------------------------------------------------
// Score transforms and pooling

/// Indices of the maximal entries, ascending.
inline std::vector<std::size_t> argmax_set(std::span<const Rational> a) {
  if (a.empty()) throw std::invalid_argument("argmax of an empty score sequence");
  std::vector<std::size_t> m{0};
  for (std::size_t i = 1; i < a.size(); ++i) {
    const auto c = a[i] <=> a[m.front()];
    if (c > 0) m.assign(1, i);
    else if (c == 0) m.push_back(i);
  }
  return m;
}

inline std::vector<Rational> score_transform(ScoreTransform f, std::span<const Rational> a) {
  if (a.empty()) throw std::invalid_argument("score transform of an empty sequence");
  if (f == ScoreTransform::kId) return {a.begin(), a.end()};
  const auto m = argmax_set(a);
  std::vector<Rational> w(a.size());
  switch (f) {
    case ScoreTransform::kAvg: {
      const Rational share(1, static_cast<std::int64_t>(m.size()));
      for (auto i : m) w[i] = share;
      break;
    }
    case ScoreTransform::kHardLeft: w[m.front()] = 1; break;
    case ScoreTransform::kHardRight: w[m.back()] = 1; break;
    case ScoreTransform::kId: break;
  }
  return w;
}

/// Pools already-transformed weights.
inline Vec pool_weights(PoolFamily family, std::span<const Vec> x, std::span<const Rational> w) {
  if (x.size() != w.size()) throw std::invalid_argument("pool: sequence and weights differ in length");
  if (x.empty()) throw std::invalid_argument("pool: empty sequence");
  const std::size_t d = x[0].size();
  if (family == PoolFamily::kWS) {
    Vec out(d);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (w[i].is_zero()) continue;
      for (std::size_t c = 0; c < d; ++c)
        if (!x[i][c].is_zero()) out[c] += w[i] * x[i][c];
    }
    return out;
  }
  Vec out(d, Rational(1));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (w[i].is_zero()) continue;
    for (std::size_t c = 0; c < d; ++c) out[c] *= w[i] * x[i][c];
  }
  return out;
}

inline Vec pool(const PoolingSpec& spec, std::span<const Vec> x, std::span<const Rational> a) {
  if (x.size() != a.size()) throw std::invalid_argument("pool: sequence and scores differ in length");
  const auto w = score_transform(spec.transform, a);
  return pool_weights(spec.family, x, w);
}

// ---------------------------------------------------------------------------
// Execution

enum class TraceMode { kFull, kLastLayer, kNone };

struct LayerTrace {
  std::size_t layer = 0;  // 1-based
  // attention[h][i][j] = f_att(Y_i, Y_j): i is the query, j the key.
  std::vector<std::vector<std::vector<Rational>>> attention;
  std::vector<Sequence> pooled;
  Sequence output;
};

struct ExecutionTrace {
  Sequence initial;  // Y^0
  std::vector<LayerTrace> layers;
};

struct RunResult {
  Sequence output;
  ExecutionTrace trace;
};

inline Rational attention_score(const AttentionSpec& spec, const Vec& x, const Vec& y) {
  return std::visit(
      [&](const auto& a) -> Rational {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, BuiltinAttention>) {
          return builtin_attention(a, x, y);
        } else if constexpr (std::is_same_v<T, DotProductAttention>) {
          return dot_product_attention(a, x, y);
        } else {
          std::vector<Rational> in(x);
          in.insert(in.end(), y.begin(), y.end());
          return (*a.gadget)(in)[0];
        }
      },
      spec);
}

inline Vec apply_activation(const ActivationSpec& spec, std::span<const Vec* const> in, const Charfin& chi,
                            const ExtensionRegistry& registry = default_registry()) {
  return std::visit(
      [&](const auto& act) -> Vec {
        using T = std::decay_t<decltype(act)>;
        if constexpr (std::is_same_v<T, BuiltinActivation>) {
          return builtin_activation(act, in, chi, registry);
        } else {
          std::vector<Rational> flat;
          for (const Vec* v : in) flat.insert(flat.end(), v->begin(), v->end());
          return (*act.gadget)(flat);
        }
      },
      spec);
}

/// Y^0: f_in(x_i) + f_pos(i, n).
inline Sequence initial_sequence(const TransformerConfig& cfg, const Sequence& input, const Charfin& chi) {
  const std::size_t n = input.size();
  Sequence y;
  y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& x = input[i];
    if (x.size() != cfg.input_dim())
      throw DimensionError("input vector " + std::to_string(i + 1) + " has dimension " + std::to_string(x.size()) +
                           ", expected " + std::to_string(cfg.input_dim()));
    Vec v;
    switch (cfg.input_embedding.kind) {
      case InputEmbedding::Kind::kIdentity: v = x; break;
      case InputEmbedding::Kind::kEmbed7: v = embed_vector(x, 7, chi); break;
      case InputEmbedding::Kind::kEmbed8: v = embed_vector(x, 8, chi); break;
      case InputEmbedding::Kind::kEmbed9: v = embed_vector(x, 9, chi); break;
      case InputEmbedding::Kind::kCircuit: v = (*cfg.input_embedding.gadget)(x); break;
    }
    if (auto it = cfg.positional.find({i + 1, n}); it != cfg.positional.end())
      for (std::size_t c = 0; c < v.size(); ++c) v[c] += it->second[c];
    y.push_back(std::move(v));
  }
  return y;
}

inline RunResult run(const TransformerConfig& cfg, const Sequence& input, TraceMode mode = TraceMode::kFull,
                     const ExtensionRegistry& registry = default_registry()) {
  check_config(cfg, registry);
  if (input.empty()) throw std::invalid_argument("run: empty input sequence");
  const Charfin chi = cfg.chi();
  const std::size_t n = input.size();

  RunResult result;
  Sequence y = initial_sequence(cfg, input, chi);
  if (mode == TraceMode::kFull) result.trace.initial = y;

  std::vector<Rational> scores(n);
  for (std::size_t k = 0; k < cfg.layers.size(); ++k) {
    const Layer& layer = cfg.layers[k];
    const bool keep = mode == TraceMode::kFull || (mode == TraceMode::kLastLayer && k + 1 == cfg.layers.size());
    LayerTrace lt;
    lt.layer = k + 1;
    const std::size_t heads = layer.heads.size();
    std::vector<Sequence> pooled(heads, Sequence(n));
    for (std::size_t h = 0; h < heads; ++h) {
      const Head& head = layer.heads[h];
      std::vector<std::vector<Rational>> matrix;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) scores[j] = attention_score(head.attention, y[i], y[j]);
        pooled[h][i] = pool(head.pooling, y, scores);
        if (keep) matrix.push_back(scores);
      }
      if (keep) lt.attention.push_back(std::move(matrix));
    }
    Sequence next(n);
    std::vector<const Vec*> args(heads + 1);
    for (std::size_t i = 0; i < n; ++i) {
      args[0] = &y[i];
      for (std::size_t h = 0; h < heads; ++h) args[h + 1] = &pooled[h][i];
      next[i] = apply_activation(layer.activation, args, chi, registry);
      if (next[i].size() != cfg.dim) throw DimensionError("activation produced a vector of the wrong dimension");
    }
    y = std::move(next);
    if (keep) {
      lt.pooled = std::move(pooled);
      lt.output = y;
      result.trace.layers.push_back(std::move(lt));
    }
  }
  result.output = std::move(y);
  return result;
}

inline RunResult run(const TransformerConfig& cfg, const EncodedSequence& input, TraceMode mode = TraceMode::kFull,
                     const ExtensionRegistry& registry = default_registry()) {
  if (input.dim != cfg.input_dim())
    throw DimensionError("sequence has dimension " + std::to_string(input.dim) + ", config expects " +
                         std::to_string(cfg.input_dim()));
  return run(cfg, input.vectors, mode, registry);
}

}  // namespace circformer
