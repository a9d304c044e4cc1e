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

// Constant-depth circuit fragments over {+, x, sign} for the pieces of a
// transformer: indicator tests, argmax sets, score transforms, pooling and
// the builtin activations.
//
// Every fragment has the same shape for every sequence length n (no special
// cases for n = 1), so a compiled transformer's depth does not depend on n.

#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "circformer/builtins.hpp"
#include "circformer/circuit_builder.hpp"
#include "circformer/engine.hpp"

namespace circformer::gadgets {

using Wires = std::vector<Wire>;

/// 1 - sign(x^2): 1 iff x = 0.
inline Wire zero(CircuitBuilder& b, Wire x) { return b.sub(b.constant(1), b.sign(b.square(x))); }

inline Wire eq(CircuitBuilder& b, Wire x, Wire y) { return zero(b, b.sub(x, y)); }

/// 1 iff x > y: (sign(x - y)^2 + sign(x - y)) / 2.
inline Wire gt(CircuitBuilder& b, Wire x, Wire y) {
  const Wire s = b.sign(b.sub(x, y));
  return b.scale(Rational(1, 2), b.plus({b.square(s), s}));
}

/// (x + x sign(x)) / 2.
inline Wire relu(CircuitBuilder& b, Wire x) { return b.scale(Rational(1, 2), b.plus({x, b.times(x, b.sign(x))})); }

/// Balanced binary product; the empty product is the constant 1.
inline Wire product(CircuitBuilder& b, Wires factors) {
  if (factors.empty()) return b.constant(1);
  while (factors.size() > 1) {
    Wires next;
    for (std::size_t k = 0; k + 1 < factors.size(); k += 2) next.push_back(b.times(factors[k], factors[k + 1]));
    if (factors.size() % 2) next.push_back(factors.back());
    factors = std::move(next);
  }
  return factors[0];
}

inline Wire lagrange(CircuitBuilder& b, const LagrangeTable& table, Wire x) {
  Wires factors;
  Rational scale(1);
  for (std::size_t k = 0; k < table.others().size(); ++k) {
    factors.push_back(b.sub(x, b.constant(table.others()[k])));
    scale *= table.denominators()[k];
  }
  if (factors.empty()) return b.constant(1);
  return b.scale(scale, product(b, std::move(factors)));
}

inline Wire charfin(CircuitBuilder& b, const Charfin& chi, const Rational& target, Wire x) {
  if (chi.mode() == CharfinMode::kZero) return eq(b, x, b.constant(target));
  return lagrange(b, chi.table(target), x);
}

/// is_max_j = 1 - sign(sum_l gt(a_l, a_j)). The l = j term is kept (it is 0)
/// so the sum has the same shape for every n.
inline Wires is_max(CircuitBuilder& b, std::span<const Wire> a) {
  Wires out;
  for (std::size_t j = 0; j < a.size(); ++j) {
    Wires terms;
    for (std::size_t l = 0; l < a.size(); ++l) terms.push_back(gt(b, a[l], a[j]));
    out.push_back(b.sub(b.constant(1), b.sign(b.plus(terms))));
  }
  return out;
}

inline Wire card(CircuitBuilder& b, std::span<const Wire> max_flags) { return b.plus(max_flags); }

/// sum_{m=1..n} (1/m) eq(k, m): 1/k for k in 1..n.
inline Wire recip(CircuitBuilder& b, Wire k, std::size_t n) {
  Wires terms;
  for (std::size_t m = 1; m <= n; ++m) {
    const Rational r(1, static_cast<std::int64_t>(m));
    terms.push_back(b.scale(r, eq(b, k, b.constant(Rational(static_cast<std::int64_t>(m))))));
  }
  return b.plus(terms);
}

/// Weights of a score transform.
inline Wires transform(CircuitBuilder& b, ScoreTransform f, std::span<const Wire> a) {
  if (a.empty()) throw std::invalid_argument("score transform of an empty sequence");
  if (f == ScoreTransform::kId) return {a.begin(), a.end()};
  const Wires m = is_max(b, a);
  const std::size_t n = a.size();
  Wires w;
  switch (f) {
    case ScoreTransform::kAvg: {
      const Wire r = recip(b, card(b, m), n);
      for (std::size_t j = 0; j < n; ++j) w.push_back(b.times(m[j], r));
      break;
    }
    case ScoreTransform::kHardLeft:
    case ScoreTransform::kHardRight: {
      // Count of maxima strictly before (after) j, written as a sum that
      // includes m_j and its negation so its shape is uniform.
      const bool left = f == ScoreTransform::kHardLeft;
      for (std::size_t j = 0; j < n; ++j) {
        Wires terms;
        if (left)
          for (std::size_t l = 0; l <= j; ++l) terms.push_back(m[l]);
        else
          for (std::size_t l = j; l < n; ++l) terms.push_back(m[l]);
        terms.push_back(b.neg(m[j]));
        w.push_back(b.times(m[j], zero(b, b.plus(terms))));
      }
      break;
    }
    case ScoreTransform::kId: break;
  }
  return w;
}

/// Pooled vector over rows x (each of dimension d) with weights w.
inline Wires pool(CircuitBuilder& b, PoolFamily family, std::span<const Wire> w, std::span<const Wires> x) {
  if (w.size() != x.size() || x.empty()) throw std::invalid_argument("pool gadget: shape mismatch");
  const std::size_t d = x[0].size();
  Wires out;
  if (family == PoolFamily::kWS) {
    for (std::size_t c = 0; c < d; ++c) {
      Wires terms;
      for (std::size_t j = 0; j < x.size(); ++j) terms.push_back(b.times(w[j], x[j][c]));
      out.push_back(b.plus(terms));
    }
    return out;
  }
  // Zero weights contribute the factor 1: w X + (1 - sign(w^2)).
  Wires skip;
  for (std::size_t j = 0; j < x.size(); ++j) skip.push_back(zero(b, w[j]));
  for (std::size_t c = 0; c < d; ++c) {
    Wires factors;
    for (std::size_t j = 0; j < x.size(); ++j) factors.push_back(b.plus({b.times(w[j], x[j][c]), skip[j]}));
    out.push_back(b.times(std::span<const Wire>(factors)));
  }
  return out;
}

/// Copies `body` into the builder, wiring its inputs to `in`; returns its
/// outputs in label order.
inline Wires splice(CircuitBuilder& b, const Circuit& body, std::span<const Wire> in) {
  const std::size_t n = body.gates.size();
  std::vector<const Gate*> by_index(n + 1);
  for (const auto& g : body.gates) by_index[g.index] = &g;
  const auto preds = predecessors(body);
  std::vector<std::vector<std::size_t>> succ(n);
  for (const auto& e : body.edges) succ[e.from - 1].push_back(e.to - 1);
  auto order = detail::topological_order(n, succ);
  if (!order) throw CircuitError("cannot splice a cyclic circuit");
  std::vector<Wire> map(n + 1);
  std::vector<std::pair<std::size_t, Wire>> outs;
  for (auto v : *order) {
    const GateIndex i = v + 1;
    Wires from;
    for (auto p : preds[v]) from.push_back(map[p]);
    std::visit(
        [&](const auto& label) {
          using T = std::decay_t<decltype(label)>;
          if constexpr (std::is_same_v<T, ConstantGate>) map[i] = b.constant(label.value);
          else if constexpr (std::is_same_v<T, InputGate>) {
            if (label.k < 1 || label.k > in.size()) throw CircuitError("splice: input label out of range");
            map[i] = in[label.k - 1];
          } else if constexpr (std::is_same_v<T, OutputGate>) outs.emplace_back(label.k, from.at(0));
          else if constexpr (std::is_same_v<T, PlusGate>) map[i] = b.plus(from);
          else if constexpr (std::is_same_v<T, TimesGate>) map[i] = from.size() == 2 ? b.times(from[0], from[1]) : b.times(from);
          else if constexpr (std::is_same_v<T, SignGate>) map[i] = b.sign(from.at(0));
          else map[i] = b.extension(label.name, from);
        },
        by_index[i]->label);
  }
  std::sort(outs.begin(), outs.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  Wires result;
  for (auto& [k, w] : outs) result.push_back(w);
  return result;
}

/// Linear form sum_c row[c] * x[c]; nullopt when the row is zero.
inline std::optional<Wire> linear(CircuitBuilder& b, const Vec& row, std::span<const Wire> x) {
  Wires terms;
  for (std::size_t c = 0; c < row.size(); ++c) {
    if (row[c].is_zero()) continue;
    terms.push_back(row[c] == Rational(1) ? x[c] : b.scale(row[c], x[c]));
  }
  if (terms.empty()) return std::nullopt;
  if (terms.size() == 1) return terms[0];
  return b.plus(terms);
}

/// Circuit form of a builtin activation; mirrors builtin_activation.
inline Wires builtin_activation(CircuitBuilder& b, const BuiltinActivation& act, std::span<const Wires> in,
                                const Charfin& chi, const ExtensionRegistry& registry = default_registry()) {
  using K = BuiltinActivationKind;
  const auto arity = activation_arity(act, registry);
  if (in.size() < arity.minimum || (arity.exact && in.size() != arity.minimum))
    throw DimensionError(to_string(act) + " takes " + std::to_string(arity.minimum) + " vectors");
  const Wires& x = in[0];
  if (act.kind == K::kProject) return x;

  auto is = [&](const Rational& type) { return charfin(b, chi, type, x[kT]); };
  auto sum = [&](std::initializer_list<Wire> ws) { return b.plus(ws); };
  auto mul = [&](Wire p, Wire q) { return b.times(p, q); };
  auto v_of = [&](std::size_t h) { return in[h][kV]; };
  // 2 i - 1
  auto count = [&](std::size_t h) { return b.sub(b.scale(2, in[h][kI]), b.constant(1)); };
  const Wire keep = sum({is(types::kInput), is(types::kConst)});
  const Wire kept = mul(keep, x[kV]);

  Wire v{};
  switch (act.kind) {
    case K::kEGen:
    case K::kEFnc:
      v = sum({kept, mul(sum({is(types::kOutput), is(types::kPlus), is(types::kTimes)}), v_of(1))});
      break;
    case K::kVGen: {
      const Wire first = zero(b, b.sub(x[kI], b.constant(1)));
      const Wire val = sum({mul(sum({is(types::kOutput), is(types::kPlus)}), v_of(1)), mul(is(types::kTimes), v_of(2))});
      v = sum({kept, mul(first, val)});
      break;
    }
    case K::kEAvg:
      v = sum({kept, mul(mul(sum({is(types::kOutput), is(types::kPlus), is(types::kTimes)}), count(2)), v_of(1))});
      break;
    case K::kVAvg:
      v = sum({kept, mul(sum({is(types::kOutput), is(types::kPlus)}), v_of(1)), mul(is(types::kTimes), v_of(2))});
      break;
    case K::kESemi:
      v = sum({kept, mul(mul(sum({is(types::kOutput), is(types::kPlus)}), count(2)), v_of(1)),
               mul(is(types::kTimes), v_of(1))});
      break;
    case K::kVSemi:
      v = sum({kept, mul(sum({is(types::kOutput), is(types::kPlus)}), v_of(1)),
               mul(is(types::kTimes), mul(v_of(2), v_of(3)))});
      break;
    case K::kVFnc:
      v = sum({kept, mul(is(types::kOutput), v_of(1)), mul(is(types::kPlus), sum({v_of(1), v_of(2)})),
               mul(is(types::kTimes), mul(v_of(1), v_of(2)))});
      break;
    case K::kEExt: {
      Wires single{is(types::kTimes)};
      for (const auto& name : act.basis) single.push_back(is(types::of_extension(registry.at(name))));
      v = sum({kept, mul(mul(sum({is(types::kOutput), is(types::kPlus)}), count(2)), v_of(1)),
               mul(b.plus(single), v_of(1))});
      break;
    }
    case K::kVExt: {
      Wires terms{kept, mul(sum({is(types::kOutput), is(types::kPlus)}), v_of(1)),
                  mul(is(types::kTimes), mul(v_of(2), v_of(3)))};
      for (const auto& name : act.basis) {
        const Extension& ext = registry.at(name);
        Wires args;
        for (std::size_t k = 0; k < ext.arity; ++k) args.push_back(v_of(2 + k));
        terms.push_back(mul(is(types::of_extension(ext)), b.extension(ext.name, args)));
      }
      v = b.plus(terms);
      break;
    }
    case K::kVSign: {
      const Wire one = b.constant(1);
      const Wire zero_v = b.scale(4, mul(b.sub(in[4][kS], one), b.sub(in[5][kS], one)));
      const Wire sign_v = mul(b.sub(one, zero_v), b.sub(b.scale(2, in[6][kBin]), one));
      v = sum({kept, mul(sum({is(types::kOutput), is(types::kPlus)}), v_of(1)),
               mul(is(types::kTimes), mul(v_of(2), v_of(3))), mul(is(types::kSign), sign_v)});
      break;
    }
    case K::kProject: break;
  }
  Wires out = x;
  out[kV] = v;
  return out;
}

// ---------------------------------------------------------------------------
// Standalone gadget evaluation

struct GadgetSpec {
  std::string name;           // eq gt relu zero is_max card recip avg hardleft hardright charfin lagrange
  std::size_t n = 0;          // sequence length for the n-ary gadgets
  std::size_t index = 1;      // 1-based component for the vector-valued ones
  std::vector<Rational> support;  // charfin / lagrange
  Rational target;                // charfin / lagrange
};

inline const std::vector<std::string>& gadget_names() {
  static const std::vector<std::string> names = {"eq",  "gt",       "relu",      "zero",    "is_max",  "card",
                                                 "recip", "avg",    "hardleft", "hardright", "charfin", "lagrange"};
  return names;
}

inline std::size_t gadget_arity(const GadgetSpec& spec) {
  const auto& s = spec.name;
  if (s == "eq" || s == "gt") return 2;
  if (s == "relu" || s == "zero" || s == "recip" || s == "charfin" || s == "lagrange") return 1;
  if (s == "is_max" || s == "card" || s == "avg" || s == "hardleft" || s == "hardright") return spec.n;
  throw std::invalid_argument("unknown gadget '" + s + "'");
}

/// The gadget as a standalone circuit with gadget_arity inputs and 1 output.
inline Circuit gadget_circuit(const GadgetSpec& spec) {
  const std::size_t arity = gadget_arity(spec);
  const auto& s = spec.name;
  if ((s == "is_max" || s == "avg" || s == "hardleft" || s == "hardright") && (spec.index < 1 || spec.index > spec.n))
    throw std::invalid_argument("gadget index out of range");
  if (arity == 0) throw std::invalid_argument("gadget '" + s + "' needs n >= 1");
  CircuitBuilder b(CircuitClass::kSemiUnbounded);
  Wires in;
  for (std::size_t k = 0; k < arity; ++k) in.push_back(b.input());
  Wire out{};
  if (s == "eq") out = eq(b, in[0], in[1]);
  else if (s == "gt") out = gt(b, in[0], in[1]);
  else if (s == "relu") out = relu(b, in[0]);
  else if (s == "zero") out = zero(b, in[0]);
  else if (s == "recip") out = recip(b, in[0], spec.n);
  else if (s == "charfin") out = charfin(b, Charfin(CharfinMode::kZero, spec.support), spec.target, in[0]);
  else if (s == "lagrange") out = lagrange(b, LagrangeTable(spec.support, spec.target), in[0]);
  else if (s == "is_max") out = is_max(b, in)[spec.index - 1];
  else if (s == "card") out = card(b, is_max(b, in));
  else if (s == "avg") out = transform(b, ScoreTransform::kAvg, in)[spec.index - 1];
  else if (s == "hardleft") out = transform(b, ScoreTransform::kHardLeft, in)[spec.index - 1];
  else if (s == "hardright") out = transform(b, ScoreTransform::kHardRight, in)[spec.index - 1];
  b.output(out);
  return std::move(b).finish();
}

inline Rational gadget_eval_check(const GadgetSpec& spec, std::span<const Rational> args) {
  if (args.size() != gadget_arity(spec))
    throw std::invalid_argument("gadget '" + spec.name + "' takes " + std::to_string(gadget_arity(spec)) + " arguments");
  return evaluate(gadget_circuit(spec), args)[0];
}

}  // namespace circformer::gadgets
