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

// Transformers that simulate circuits of bounded depth. Each kind is a
// two-layer block (fetch predecessor values, then combine them per gate)
// stacked K times.

#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "circformer/engine.hpp"

namespace circformer {

class AdmissibilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Kind { kGen, kFac, kFsac, kFnc, kExt, kSign };

struct ConstructionKind {
  Kind kind = Kind::kFac;
  std::size_t depth_bound = 1;     // K
  std::vector<std::string> basis;  // kExt only

  friend bool operator==(const ConstructionKind&, const ConstructionKind&) = default;
};

/// gen | fac | fsac | fnc | ext:<name,...> | sign (long names accepted too).
inline ConstructionKind parse_kind(std::string_view name, std::size_t depth_bound = 1,
                                   const ExtensionRegistry& registry = default_registry()) {
  ConstructionKind k;
  k.depth_bound = depth_bound;
  if (name == "gen" || name == "generalized") k.kind = Kind::kGen;
  else if (name == "fac" || name == "avg_fac") k.kind = Kind::kFac;
  else if (name == "fsac" || name == "avg_fsac") k.kind = Kind::kFsac;
  else if (name == "fnc" || name == "hard_fnc") k.kind = Kind::kFnc;
  else if (name == "sign" || name == "avg_sign") k.kind = Kind::kSign;
  else if (name.starts_with("ext:") || name.starts_with("avg_ext:")) {
    k.kind = Kind::kExt;
    std::string rest(name.substr(name.find(':') + 1));
    std::istringstream in(rest);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (item.empty()) continue;
      if (!registry.find(item)) throw AdmissibilityError("unknown extension '" + item + "' in basis");
      if (std::find(k.basis.begin(), k.basis.end(), item) == k.basis.end()) k.basis.push_back(item);
    }
    if (k.basis.empty()) throw ParseError("ext kind needs at least one basis function");
  } else {
    throw ParseError("unknown construction kind '" + std::string(name) + "'");
  }
  return k;
}

inline std::string to_string(const ConstructionKind& k) {
  switch (k.kind) {
    case Kind::kGen: return "gen";
    case Kind::kFac: return "fac";
    case Kind::kFsac: return "fsac";
    case Kind::kFnc: return "fnc";
    case Kind::kSign: return "sign";
    case Kind::kExt: {
      std::string s = "ext:";
      for (std::size_t i = 0; i < k.basis.size(); ++i) s += (i ? "," : "") + k.basis[i];
      return s;
    }
  }
  return "?";
}

struct BuildOptions {
  CharfinMode charfin = CharfinMode::kZero;
  // Score transform of the fnc heads; hardleft, hardright and avg all work.
  ScoreTransform fnc_transform = ScoreTransform::kHardLeft;
};

namespace detail {

inline Head unused_head() { return {BuiltinAttention{BuiltinAttentionKind::kEEq}, {PoolFamily::kWS, ScoreTransform::kId}}; }

inline Head head(BuiltinAttentionKind a, PoolFamily f, ScoreTransform t, std::size_t n = 0) {
  return {BuiltinAttention{a, n}, {f, t}};
}

}  // namespace detail

/// The 2K-layer config for `kind`.
inline TransformerConfig build(const ConstructionKind& kind, const BuildOptions& options = {},
                               const ExtensionRegistry& registry = default_registry()) {
  using A = BuiltinAttentionKind;
  using Act = BuiltinActivationKind;
  using detail::head;
  if (kind.depth_bound < 1) throw std::invalid_argument("depth bound must be >= 1");
  constexpr auto WS = PoolFamily::kWS;
  constexpr auto WP = PoolFamily::kWP;
  constexpr auto avg = ScoreTransform::kAvg;
  constexpr auto id = ScoreTransform::kId;

  TransformerConfig cfg;
  cfg.charfin_mode = options.charfin;
  Layer fetch, combine;
  switch (kind.kind) {
    case Kind::kGen:
      cfg.dim = 5;
      cfg.input_embedding.kind = InputEmbedding::Kind::kIdentity;
      fetch = {{head(A::kEEq, WS, id), detail::unused_head()}, BuiltinActivation{Act::kEGen}};
      combine = {{head(A::kVEq, WS, id), head(A::kVEq, WP, id)}, BuiltinActivation{Act::kVGen}};
      break;
    case Kind::kFac:
      cfg.dim = 7;
      cfg.input_embedding.kind = InputEmbedding::Kind::kEmbed7;
      fetch = {{head(A::kEDp, WS, avg), head(A::kVDp, WS, avg)}, BuiltinActivation{Act::kEAvg}};
      combine = {{head(A::kVDp, WS, avg), head(A::kVDp, WP, avg)}, BuiltinActivation{Act::kVAvg}};
      break;
    case Kind::kFsac:
      cfg.dim = 8;
      cfg.input_embedding.kind = InputEmbedding::Kind::kEmbed8;
      fetch = {{head(A::kEDp, WS, avg), head(A::kVDp, WS, avg), detail::unused_head()}, BuiltinActivation{Act::kESemi}};
      combine = {{head(A::kVDp, WS, avg), head(A::kB, WS, avg, 1), head(A::kB, WS, avg, 2)},
                 BuiltinActivation{Act::kVSemi}};
      break;
    case Kind::kFnc: {
      cfg.dim = 8;
      cfg.input_embedding.kind = InputEmbedding::Kind::kEmbed8;
      const auto t = options.fnc_transform;
      fetch = {{head(A::kEDp, WS, t), detail::unused_head()}, BuiltinActivation{Act::kEFnc}};
      combine = {{head(A::kB, WS, t, 1), head(A::kB, WS, t, 2)}, BuiltinActivation{Act::kVFnc}};
      break;
    }
    case Kind::kExt: {
      cfg.dim = 8;
      cfg.input_embedding.kind = InputEmbedding::Kind::kEmbed8;
      for (const auto& b : kind.basis) {
        const Extension* ext = registry.find(b);
        if (!ext) throw AdmissibilityError("unknown extension '" + b + "' in basis");
        if (ext->arity < 1) throw AdmissibilityError("extension '" + b + "' has arity 0");
        cfg.types.push_back(types::of_extension(*ext));
      }
      const std::size_t m = basis_heads(kind.basis, registry);
      fetch.heads = {head(A::kEDp, WS, avg), head(A::kVDp, WS, avg)};
      for (std::size_t h = 1; h < m; ++h) fetch.heads.push_back(detail::unused_head());
      fetch.activation = BuiltinActivation{Act::kEExt, kind.basis};
      combine.heads = {head(A::kVDp, WS, avg)};
      for (std::size_t b = 1; b <= m; ++b) combine.heads.push_back(head(A::kB, WS, avg, b));
      combine.activation = BuiltinActivation{Act::kVExt, kind.basis};
      break;
    }
    case Kind::kSign:
      cfg.dim = 9;
      cfg.input_embedding.kind = InputEmbedding::Kind::kEmbed9;
      cfg.types.push_back(types::kSign);
      fetch.heads = {head(A::kEDp, WS, avg), head(A::kVDp, WS, avg)};
      for (int h = 0; h < 4; ++h) fetch.heads.push_back(detail::unused_head());
      fetch.activation = BuiltinActivation{Act::kEExt, {"sign"}};
      combine = {{head(A::kVDp, WS, avg), head(A::kB, WS, avg, 1), head(A::kB, WS, avg, 2), head(A::kZPlus, WS, avg),
                  head(A::kZMinus, WS, avg), head(A::kSign, WS, avg)},
                 BuiltinActivation{Act::kVSign}};
      break;
  }
  for (std::size_t k = 0; k < kind.depth_bound; ++k) {
    cfg.layers.push_back(fetch);
    cfg.layers.push_back(combine);
  }
  return cfg;
}

/// Longest source-to-output path, in edges.
inline std::size_t circuit_depth(const Circuit& c) { return metrics(c).depth; }

/// Reasons `c` cannot be simulated by `kind`; empty when admissible.
inline std::vector<std::string> admissibility_problems(const ConstructionKind& kind, const Circuit& c,
                                                       const ExtensionRegistry& registry = default_registry()) {
  std::vector<std::string> problems;
  if (auto report = validate(c, std::nullopt, registry); !report.ok()) {
    problems.push_back("invalid circuit:\n" + report.str());
    return problems;
  }
  if (c.gates.size() < 2) problems.push_back("circuit needs at least two gates");
  const std::size_t depth = circuit_depth(c);
  if (depth > kind.depth_bound)
    problems.push_back("circuit depth " + std::to_string(depth) + " exceeds depth bound " +
                       std::to_string(kind.depth_bound));
  std::vector<std::size_t> fan_in(c.gates.size() + 1);
  for (const auto& e : c.edges) ++fan_in[e.to];
  const bool binary_plus = kind.kind == Kind::kFnc;
  const bool binary_times = kind.kind != Kind::kGen && kind.kind != Kind::kFac;
  for (const auto& g : c.gates) {
    const std::string where = "gate " + std::to_string(g.index);
    const std::size_t k = fan_in[g.index];
    if (std::holds_alternative<PlusGate>(g.label)) {
      if (k < 1) problems.push_back(where + ": plus gate without predecessors");
      else if (binary_plus && k != 2) problems.push_back(where + ": plus gate needs fan-in 2 for " + to_string(kind));
    } else if (std::holds_alternative<TimesGate>(g.label)) {
      if (k < 1) problems.push_back(where + ": times gate without predecessors");
      else if (binary_times && k != 2) problems.push_back(where + ": times gate needs fan-in 2 for " + to_string(kind));
    } else if (std::holds_alternative<SignGate>(g.label)) {
      const bool ok = kind.kind == Kind::kSign ||
                      (kind.kind == Kind::kExt && std::find(kind.basis.begin(), kind.basis.end(), "sign") != kind.basis.end());
      if (!ok) problems.push_back(where + ": sign gates are not supported by " + to_string(kind));
    } else if (const auto* ext = std::get_if<ExtensionGate>(&g.label)) {
      const bool ok = kind.kind == Kind::kExt &&
                      std::find(kind.basis.begin(), kind.basis.end(), ext->name) != kind.basis.end();
      if (!ok) problems.push_back(where + ": extension '" + ext->name + "' is not in the basis of " + to_string(kind));
    }
  }
  return problems;
}

inline void check_admissible(const ConstructionKind& kind, const Circuit& c,
                             const ExtensionRegistry& registry = default_registry()) {
  auto problems = admissibility_problems(kind, c, registry);
  if (problems.empty()) return;
  std::string msg = "circuit not admissible for " + to_string(kind) + ":";
  for (const auto& p : problems) msg += "\n  " + p;
  throw AdmissibilityError(msg);
}

struct SimulationResult {
  std::vector<Rational> outputs;
  ExecutionTrace trace;
};

/// Runs the construction on an already encoded (possibly reordered) sequence.
inline SimulationResult simulate_encoded(const ConstructionKind& kind, const Circuit& c, const EncodedSequence& seq,
                                         const BuildOptions& options = {}, TraceMode mode = TraceMode::kNone,
                                         const ExtensionRegistry& registry = default_registry()) {
  check_admissible(kind, c, registry);
  const TransformerConfig cfg = build(kind, options, registry);
  RunResult r = run(cfg, seq, mode, registry);
  return {decode_outputs(c.output_count(), r.output), std::move(r.trace)};
}

/// encode, embed, run, decode.
inline SimulationResult simulate(const ConstructionKind& kind, const Circuit& c, std::span<const Rational> u,
                                 const BuildOptions& options = {}, TraceMode mode = TraceMode::kNone,
                                 const ExtensionRegistry& registry = default_registry()) {
  check_admissible(kind, c, registry);
  return simulate_encoded(kind, c, encode(c, u, registry), options, mode, registry);
}

}  // namespace circformer
