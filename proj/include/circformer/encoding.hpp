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

// Circuit-to-sequence encoding: one 5-vector (s, p, i, t, v) per constant or
// input gate and one per edge, plus the decoder for output-edge values and
// the input embeddings that append (one, ssq, isq, bin).

#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "circformer/circuit.hpp"
#include "circformer/circuit_io.hpp"
#include "circformer/numerics.hpp"

namespace circformer {

using Vec = std::vector<Rational>;
using Sequence = std::vector<Vec>;

/// Component positions inside encoded vectors.
enum Component : std::size_t { kS = 0, kP, kI, kT, kV, kOne, kSsq, kIsq, kBin };

namespace types {
inline const Rational kConst{1};
inline const Rational kInput{2};
inline const Rational kOutput{3};
inline const Rational kPlus{4};
inline const Rational kTimes{5};
inline const Rational kSign{6};

/// 7, 8, ... in registration order for non-sign extensions.
inline Rational of_extension(const Extension& ext) {
  return ext.is_sign ? kSign : Rational(static_cast<std::int64_t>(7 + ext.ordinal));
}

inline Rational of_extension(std::string_view name, const ExtensionRegistry& registry = default_registry()) {
  return of_extension(registry.at(name));
}

/// {t_const, ..., t_times}.
inline std::vector<Rational> base_support() { return {kConst, kInput, kOutput, kPlus, kTimes}; }

inline Rational of_label(const GateLabel& label, const ExtensionRegistry& registry = default_registry()) {
  return std::visit(
      [&](const auto& l) -> Rational {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ConstantGate>) return kConst;
        else if constexpr (std::is_same_v<T, InputGate>) return kInput;
        else if constexpr (std::is_same_v<T, OutputGate>) return kOutput;
        else if constexpr (std::is_same_v<T, PlusGate>) return kPlus;
        else if constexpr (std::is_same_v<T, TimesGate>) return kTimes;
        else if constexpr (std::is_same_v<T, SignGate>) return kSign;
        else return of_extension(l.name, registry);
      },
      label);
}
}  // namespace types

struct EncodedSequence {
  std::size_t dim = 5;
  Sequence vectors;

  friend bool operator==(const EncodedSequence&, const EncodedSequence&) = default;
};

/// E_C(c, u), in canonical order: node vectors by gate index, then edge
/// vectors by (successor, alpha).
inline EncodedSequence encode(const Circuit& c, std::span<const Rational> u,
                              const ExtensionRegistry& registry = default_registry()) {
  if (auto report = validate(c, std::nullopt, registry); !report.ok())
    throw CircuitError("cannot encode an invalid circuit:\n" + report.str());
  if (u.size() != c.input_count())
    throw CircuitError("circuit expects " + std::to_string(c.input_count()) + " inputs, got " +
                       std::to_string(u.size()));
  std::vector<const Gate*> by_index(c.gates.size() + 1);
  for (const auto& g : c.gates) by_index[g.index] = &g;

  EncodedSequence seq;
  for (std::size_t i = 1; i < by_index.size(); ++i) {
    const GateLabel& label = by_index[i]->label;
    const Rational s(static_cast<std::int64_t>(i));
    if (const auto* k = std::get_if<ConstantGate>(&label)) {
      seq.vectors.push_back({s, 0, 0, types::kConst, k->value});
    } else if (const auto* in = std::get_if<InputGate>(&label)) {
      seq.vectors.push_back({s, 0, 0, types::kInput, u[in->k - 1]});
    }
  }
  std::vector<Edge> edges = c.edges;
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.to, a.alpha) < std::tie(b.to, b.alpha); });
  for (const auto& e : edges)
    seq.vectors.push_back({Rational(static_cast<std::int64_t>(e.to)), Rational(static_cast<std::int64_t>(e.from)),
                           Rational(static_cast<std::int64_t>(e.alpha)),
                           types::of_label(by_index[e.to]->label, registry), 0});
  return seq;
}

/// Values of the output-edge vectors, ordered by ascending successor index.
inline std::vector<Rational> decode_outputs(std::size_t n_outputs, const Sequence& final_seq) {
  std::vector<const Vec*> outs;
  for (const auto& x : final_seq)
    if (x.size() > kV && x[kT] == types::kOutput) outs.push_back(&x);
  if (outs.size() != n_outputs)
    throw CircuitError("expected " + std::to_string(n_outputs) + " output vectors, found " +
                       std::to_string(outs.size()));
  std::stable_sort(outs.begin(), outs.end(), [](const Vec* a, const Vec* b) { return (*a)[kS] < (*b)[kS]; });
  std::vector<Rational> values;
  for (const Vec* x : outs) values.push_back((*x)[kV]);
  return values;
}

inline std::vector<Rational> decode_outputs(std::size_t n_outputs, const EncodedSequence& final_seq) {
  return decode_outputs(n_outputs, final_seq.vectors);
}

/// f_in for one vector: appends one; ssq; isq; bin per target dimension.
inline Vec embed_vector(const Vec& x, std::size_t target_dim, const Charfin& chi = {}) {
  if (x.size() != 5) throw std::invalid_argument("embed expects a 5-dimensional vector");
  if (target_dim < 5 || target_dim > 9 || target_dim == 6)
    throw std::invalid_argument("unsupported embedding dimension " + std::to_string(target_dim));
  Vec y = x;
  if (target_dim >= 7) {
    y.push_back(Rational(1));
    y.push_back(x[kS] * x[kS]);
  }
  if (target_dim >= 8) y.push_back(x[kI] * x[kI]);
  if (target_dim >= 9) y.push_back(chi(types::kOutput, x[kT]));
  return y;
}

inline EncodedSequence embed(const EncodedSequence& seq, std::size_t target_dim, const Charfin& chi = {}) {
  if (seq.dim != 5) throw std::invalid_argument("embed expects a dim-5 sequence");
  EncodedSequence out;
  out.dim = target_dim;
  for (const auto& x : seq.vectors) out.vectors.push_back(embed_vector(x, target_dim, chi));
  return out;
}

// ---------------------------------------------------------------------------
// Sequence file: "dim <d>" then one vector per line.

inline std::string format_sequence(const Sequence& seq, std::size_t dim) {
  std::ostringstream os;
  os << "dim " << dim << "\n";
  for (const auto& x : seq) {
    for (std::size_t k = 0; k < x.size(); ++k) os << (k ? " " : "") << x[k];
    os << "\n";
  }
  return os.str();
}

inline std::string format_sequence(const EncodedSequence& seq) { return format_sequence(seq.vectors, seq.dim); }

inline EncodedSequence parse_sequence(std::string_view text) {
  EncodedSequence seq;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  bool have_dim = false;
  while (std::getline(in, raw)) {
    ++line_no;
    auto tok = detail::split_ws(detail::strip_comment(raw));
    if (tok.empty()) continue;
    if (!have_dim) {
      if (tok.size() != 2 || tok[0] != "dim") throw ParseError("line " + std::to_string(line_no) + ": expected 'dim <d>'");
      seq.dim = detail::parse_index(tok[1], line_no);
      have_dim = true;
      continue;
    }
    if (tok.size() != seq.dim)
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(seq.dim) + " components");
    Vec x;
    for (const auto& t : tok) {
      try {
        x.push_back(Rational::parse(t));
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    seq.vectors.push_back(std::move(x));
  }
  if (!have_dim) throw ParseError("sequence file has no 'dim' header");
  return seq;
}

inline EncodedSequence load_sequence(const std::string& path) { return parse_sequence(detail::read_file(path)); }

}  // namespace circformer
