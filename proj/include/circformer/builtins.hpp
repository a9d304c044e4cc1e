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

// Named attention and activation functions used by the simulating
// transformers, evaluated directly over Q. Their circuit realizations live in
// gadgets.hpp; the dot-product ones also have explicit (A, B) matrices here.

#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "circformer/circuit.hpp"
#include "circformer/encoding.hpp"
#include "circformer/numerics.hpp"

namespace circformer {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Attention

enum class BuiltinAttentionKind { kEEq, kVEq, kEDp, kVDp, kB, kZPlus, kZMinus, kSign };

struct BuiltinAttention {
  BuiltinAttentionKind kind = BuiltinAttentionKind::kEEq;
  std::size_t n = 0;  // only for att_B(n)

  friend bool operator==(const BuiltinAttention&, const BuiltinAttention&) = default;
};

inline std::string to_string(const BuiltinAttention& a) {
  switch (a.kind) {
    case BuiltinAttentionKind::kEEq: return "att_E_eq";
    case BuiltinAttentionKind::kVEq: return "att_V_eq";
    case BuiltinAttentionKind::kEDp: return "att_E_dp";
    case BuiltinAttentionKind::kVDp: return "att_V_dp";
    case BuiltinAttentionKind::kB: return "att_B(" + std::to_string(a.n) + ")";
    case BuiltinAttentionKind::kZPlus: return "att_z_plus";
    case BuiltinAttentionKind::kZMinus: return "att_z_minus";
    case BuiltinAttentionKind::kSign: return "att_sign";
  }
  return "?";
}

inline std::optional<BuiltinAttention> parse_builtin_attention(std::string_view name) {
  using K = BuiltinAttentionKind;
  if (name == "att_E_eq") return BuiltinAttention{K::kEEq};
  if (name == "att_V_eq") return BuiltinAttention{K::kVEq};
  if (name == "att_E_dp") return BuiltinAttention{K::kEDp};
  if (name == "att_V_dp") return BuiltinAttention{K::kVDp};
  if (name == "att_z_plus") return BuiltinAttention{K::kZPlus};
  if (name == "att_z_minus") return BuiltinAttention{K::kZMinus};
  if (name == "att_sign") return BuiltinAttention{K::kSign};
  if (name.starts_with("att_B(") && name.ends_with(")")) {
    auto digits = name.substr(6, name.size() - 7);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string_view::npos) return std::nullopt;
    std::size_t n = std::stoull(std::string(digits));
    if (n == 0) return std::nullopt;
    return BuiltinAttention{K::kB, n};
  }
  return std::nullopt;
}

/// Smallest vector dimension the function reads.
inline std::size_t required_dim(const BuiltinAttention& a) {
  switch (a.kind) {
    case BuiltinAttentionKind::kEEq:
    case BuiltinAttentionKind::kVEq: return 5;
    case BuiltinAttentionKind::kEDp:
    case BuiltinAttentionKind::kVDp: return 7;
    case BuiltinAttentionKind::kB:
    case BuiltinAttentionKind::kZPlus:
    case BuiltinAttentionKind::kZMinus: return 8;
    case BuiltinAttentionKind::kSign: return 9;
  }
  return 9;
}

/// Score f(x, y) for query x and key y.
inline Rational builtin_attention(const BuiltinAttention& a, const Vec& x, const Vec& y) {
  if (x.size() < required_dim(a) || y.size() != x.size())
    throw DimensionError(to_string(a) + " needs dimension >= " + std::to_string(required_dim(a)) + ", got " +
                         std::to_string(x.size()) + "/" + std::to_string(y.size()));
  switch (a.kind) {
    case BuiltinAttentionKind::kEEq:
      return zero_fn(x[kP] - y[kS]);
    case BuiltinAttentionKind::kVEq:
      return zero_fn(x[kS] - y[kS]);
    case BuiltinAttentionKind::kEDp:
      // p_x^2 - (s_y - p_x)^2 with s_y^2 read from the ssq component
      return Rational(2) * y[kS] * x[kP] - x[kOne] * y[kSsq];
    case BuiltinAttentionKind::kVDp:
      return Rational(2) * x[kS] * y[kS] - x[kOne] * y[kSsq];
    case BuiltinAttentionKind::kB: {
      const Rational n(static_cast<std::int64_t>(a.n));
      return Rational(2) * x[kS] * y[kS] - x[kOne] * y[kSsq] + Rational(2) * n * x[kOne] * y[kI] -
             x[kOne] * y[kIsq];
    }
    case BuiltinAttentionKind::kZPlus:
    case BuiltinAttentionKind::kZMinus: {
      // +-v_x s_y + 9/4 - (s_y - 3/2)^2 + 1/4 - (i_y - 1/2)^2, completed squares expanded
      const Rational probe = x[kV] * y[kS];
      const Rational rest = Rational(3) * x[kOne] * y[kS] - x[kOne] * y[kSsq] + x[kOne] * y[kI] - x[kOne] * y[kIsq];
      return (a.kind == BuiltinAttentionKind::kZPlus ? probe : -probe) + rest;
    }
    case BuiltinAttentionKind::kSign:
      return x[kV] * y[kBin];
  }
  throw std::logic_error("unreachable");
}

/// (A, B) with f(x, y) = Ax . By, row-major d x d.
struct DotProductAttention {
  std::vector<Vec> a;
  std::vector<Vec> b;

  std::size_t dim() const { return a.size(); }
  friend bool operator==(const DotProductAttention&, const DotProductAttention&) = default;
};

inline Rational dot_product_attention(const DotProductAttention& dpa, const Vec& x, const Vec& y) {
  if (x.size() != dpa.dim() || y.size() != dpa.dim())
    throw DimensionError("dot-product attention of dimension " + std::to_string(dpa.dim()) + " applied to " +
                         std::to_string(x.size()));
  Rational acc;
  for (std::size_t r = 0; r < dpa.dim(); ++r) {
    Rational ax, by;
    for (std::size_t c = 0; c < dpa.dim(); ++c) {
      if (!dpa.a[r][c].is_zero()) ax += dpa.a[r][c] * x[c];
      if (!dpa.b[r][c].is_zero()) by += dpa.b[r][c] * y[c];
    }
    acc += ax * by;
  }
  return acc;
}

/// Matrix form of the dot-product builtins; nullopt for the indicator ones,
/// whose realization is a circuit.
inline std::optional<DotProductAttention> dot_product_realization(const BuiltinAttention& a, std::size_t dim) {
  if (dim < required_dim(a)) throw DimensionError(to_string(a) + " needs dimension >= " + std::to_string(required_dim(a)));
  struct Term {
    Rational coeff;
    std::size_t xc, yc;
  };
  std::vector<Term> terms;
  const Rational n(static_cast<std::int64_t>(a.n));
  switch (a.kind) {
    case BuiltinAttentionKind::kEEq:
    case BuiltinAttentionKind::kVEq: return std::nullopt;
    case BuiltinAttentionKind::kEDp: terms = {{2, kP, kS}, {-1, kOne, kSsq}}; break;
    case BuiltinAttentionKind::kVDp: terms = {{2, kS, kS}, {-1, kOne, kSsq}}; break;
    case BuiltinAttentionKind::kB: terms = {{2, kS, kS}, {-1, kOne, kSsq}, {Rational(2) * n, kOne, kI}, {-1, kOne, kIsq}}; break;
    case BuiltinAttentionKind::kZPlus:
    case BuiltinAttentionKind::kZMinus:
      terms = {{a.kind == BuiltinAttentionKind::kZPlus ? 1 : -1, kV, kS}, {3, kOne, kS}, {-1, kOne, kSsq},
               {1, kOne, kI}, {-1, kOne, kIsq}};
      break;
    case BuiltinAttentionKind::kSign: terms = {{1, kV, kBin}}; break;
  }
  DotProductAttention dpa{std::vector<Vec>(dim, Vec(dim)), std::vector<Vec>(dim, Vec(dim))};
  for (std::size_t r = 0; r < terms.size(); ++r) {
    dpa.a[r][terms[r].xc] = terms[r].coeff;
    dpa.b[r][terms[r].yc] = 1;
  }
  return dpa;
}

// ---------------------------------------------------------------------------
// Activation

enum class BuiltinActivationKind {
  kProject,  // returns its first argument
  kEGen,
  kVGen,
  kEAvg,
  kVAvg,
  kESemi,
  kVSemi,
  kEFnc,
  kVFnc,
  kEExt,
  kVExt,
  kVSign,
};

struct BuiltinActivation {
  BuiltinActivationKind kind = BuiltinActivationKind::kProject;
  std::vector<std::string> basis;  // kEExt / kVExt

  friend bool operator==(const BuiltinActivation&, const BuiltinActivation&) = default;
};

inline std::string to_string(const BuiltinActivation& a) {
  using K = BuiltinActivationKind;
  switch (a.kind) {
    case K::kProject: return "act_project";
    case K::kEGen: return "act_E_gen";
    case K::kVGen: return "act_V_gen";
    case K::kEAvg: return "act_E_avg";
    case K::kVAvg: return "act_V_avg";
    case K::kESemi: return "act_E_semi";
    case K::kVSemi: return "act_V_semi";
    case K::kEFnc: return "act_E_fnc";
    case K::kVFnc: return "act_V_fnc";
    case K::kEExt: return "act_E_ext";
    case K::kVExt: return "act_V_ext";
    case K::kVSign: return "act_V_sign";
  }
  return "?";
}

inline std::optional<BuiltinActivationKind> parse_builtin_activation(std::string_view name) {
  using K = BuiltinActivationKind;
  for (K k : {K::kProject, K::kEGen, K::kVGen, K::kEAvg, K::kVAvg, K::kESemi, K::kVSemi, K::kEFnc, K::kVFnc, K::kEExt,
              K::kVExt, K::kVSign})
    if (to_string(BuiltinActivation{k}) == name) return k;
  return std::nullopt;
}

/// Largest arity among the basis functions, at least 2 (the product gates).
inline std::size_t basis_heads(const std::vector<std::string>& basis, const ExtensionRegistry& registry) {
  std::size_t m = 2;
  for (const auto& b : basis) m = std::max(m, registry.at(b).arity);
  return m;
}

/// Number of vectors the activation takes (H + 1); nullopt when any count
/// from `minimum` up is accepted.
struct ActivationArity {
  std::size_t minimum;
  bool exact;
};

inline ActivationArity activation_arity(const BuiltinActivation& a, const ExtensionRegistry& registry) {
  using K = BuiltinActivationKind;
  switch (a.kind) {
    case K::kProject: return {1, false};
    case K::kEGen:
    case K::kVGen:
    case K::kEAvg:
    case K::kVAvg:
    case K::kEFnc:
    case K::kVFnc: return {3, true};
    case K::kESemi:
    case K::kVSemi: return {4, true};
    case K::kEExt: return {3, false};
    case K::kVExt: return {2 + basis_heads(a.basis, registry), true};
    case K::kVSign: return {7, true};
  }
  return {1, false};
}

inline std::size_t activation_min_dim(const BuiltinActivation& a) {
  using K = BuiltinActivationKind;
  switch (a.kind) {
    case K::kProject: return 1;
    case K::kVSign: return 9;
    default: return 5;
  }
}

/// Applies the activation to (x, z^1, ..., z^H). All components except v are
/// copied from the first argument.
inline Vec builtin_activation(const BuiltinActivation& act, std::span<const Vec* const> in, const Charfin& chi,
                              const ExtensionRegistry& registry = default_registry()) {
  using K = BuiltinActivationKind;
  const auto arity = activation_arity(act, registry);
  if (in.size() < arity.minimum || (arity.exact && in.size() != arity.minimum))
    throw DimensionError(to_string(act) + " takes " + std::to_string(arity.minimum) + " vectors, got " +
                         std::to_string(in.size()));
  const std::size_t d = in[0]->size();
  for (const Vec* v : in)
    if (v->size() != d || d < activation_min_dim(act))
      throw DimensionError(to_string(act) + " applied to vectors of mismatched or too small dimension");
  if (act.kind == K::kProject) return *in[0];

  const Vec& x = *in[0];
  const Rational& t = x[kT];
  auto is = [&](const Rational& type) { return chi(type, t); };
  const Rational keep = is(types::kInput) + is(types::kConst);
  auto v_of = [&](std::size_t h) -> const Rational& { return (*in[h])[kV]; };
  auto count = [&](std::size_t h) { return Rational(2) * (*in[h])[kI] - Rational(1); };
  auto extension_terms = [&](std::size_t first_fetch) {
    Rational acc;
    for (const auto& name : act.basis) {
      const Extension& ext = registry.at(name);
      std::vector<Rational> args;
      for (std::size_t k = 0; k < ext.arity; ++k) args.push_back(v_of(first_fetch + k));
      acc += is(types::of_extension(ext)) * ext.fn(args);
    }
    return acc;
  };

  Rational v;
  switch (act.kind) {
    case K::kEGen:
    case K::kEFnc:
      v = keep * x[kV] + (is(types::kOutput) + is(types::kPlus) + is(types::kTimes)) * v_of(1);
      break;
    case K::kVGen:
      // Only the alpha = 1 edge of a gate carries its value, so the next
      // layer's weighted-sum fetch sees it exactly once.
      v = keep * x[kV] +
          zero_fn(x[kI] - Rational(1)) * ((is(types::kOutput) + is(types::kPlus)) * v_of(1) + is(types::kTimes) * v_of(2));
      break;
    case K::kEAvg:
      v = keep * x[kV] + (is(types::kOutput) + is(types::kPlus) + is(types::kTimes)) * count(2) * v_of(1);
      break;
    case K::kVAvg:
      v = keep * x[kV] + (is(types::kOutput) + is(types::kPlus)) * v_of(1) + is(types::kTimes) * v_of(2);
      break;
    case K::kESemi:
      v = keep * x[kV] + (is(types::kOutput) + is(types::kPlus)) * count(2) * v_of(1) + is(types::kTimes) * v_of(1);
      break;
    case K::kVSemi:
      v = keep * x[kV] + (is(types::kOutput) + is(types::kPlus)) * v_of(1) + is(types::kTimes) * (v_of(2) * v_of(3));
      break;
    case K::kVFnc:
      v = keep * x[kV] + is(types::kOutput) * v_of(1) + is(types::kPlus) * (v_of(1) + v_of(2)) +
          is(types::kTimes) * (v_of(1) * v_of(2));
      break;
    case K::kEExt: {
      Rational single = is(types::kTimes);
      for (const auto& name : act.basis) single += is(types::of_extension(registry.at(name)));
      v = keep * x[kV] + (is(types::kOutput) + is(types::kPlus)) * count(2) * v_of(1) + single * v_of(1);
      break;
    }
    case K::kVExt:
      v = keep * x[kV] + (is(types::kOutput) + is(types::kPlus)) * v_of(1) + is(types::kTimes) * (v_of(2) * v_of(3)) +
          extension_terms(2);
      break;
    case K::kVSign: {
      // heads: +, B(1), B(2), z+, z-, sign
      const Rational zero_v = Rational(4) * ((*in[4])[kS] - Rational(1)) * ((*in[5])[kS] - Rational(1));
      const Rational sign_v = (Rational(1) - zero_v) * (Rational(2) * (*in[6])[kBin] - Rational(1));
      v = keep * x[kV] + (is(types::kOutput) + is(types::kPlus)) * v_of(1) + is(types::kTimes) * (v_of(2) * v_of(3)) +
          is(types::kSign) * sign_v;
      break;
    }
    case K::kProject: break;
  }
  Vec out = x;
  out[kV] = std::move(v);
  return out;
}

}  // namespace circformer
