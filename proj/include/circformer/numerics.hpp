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

// Scalar helpers over Q: sign, zero, finite characteristic functions and
// Lagrange interpolation polynomials.

#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "circformer/rational.hpp"

namespace circformer {

inline Rational sign(const Rational& x) { return Rational(x.sign()); }

/// 1 iff x = 0.
inline Rational zero_fn(const Rational& x) { return Rational(x.is_zero() ? 1 : 0); }

/// 1 iff x = r, computed as zero(x + (-1) * r).
inline Rational charfin(const Rational& r, const Rational& x) {
  return zero_fn(x + Rational(-1) * r);
}

inline Rational relu(const Rational& x) { return x.sign() > 0 ? x : Rational(); }

/// The polynomial prod_{b in A \ {a}} (x - b) * (a - b)^{-1}. It is 1 at the
/// target and 0 on every other support point; off the support it is whatever
/// the polynomial says.
class LagrangeTable {
 public:
  LagrangeTable(std::vector<Rational> support, Rational target)
      : support_(std::move(support)), target_(std::move(target)) {
    for (std::size_t i = 0; i < support_.size(); ++i)
      for (std::size_t j = i + 1; j < support_.size(); ++j)
        if (support_[i] == support_[j])
          throw std::invalid_argument("Lagrange support has duplicate point " + support_[i].str());
    if (std::find(support_.begin(), support_.end(), target_) == support_.end())
      throw std::invalid_argument("Lagrange target " + target_.str() + " not in support");
    for (const auto& b : support_)
      if (b != target_) {
        others_.push_back(b);
        denominators_.push_back((target_ - b).inverse());
      }
  }

  const std::vector<Rational>& support() const { return support_; }
  const Rational& target() const { return target_; }
  /// Support points other than the target, aligned with denominators().
  const std::vector<Rational>& others() const { return others_; }
  const std::vector<Rational>& denominators() const { return denominators_; }

 private:
  std::vector<Rational> support_;
  Rational target_;
  std::vector<Rational> others_;
  std::vector<Rational> denominators_;
};

inline Rational lagrange_eval(const LagrangeTable& table, const Rational& x) {
  Rational acc(1);
  for (std::size_t k = 0; k < table.others().size(); ++k)
    acc = acc * (x - table.others()[k]) * table.denominators()[k];
  return acc;
}

enum class CharfinMode { kZero, kLagrange };

/// chi_T^a for a fixed finite support T, in one of the two interchangeable
/// realizations. Immutable once built.
class Charfin {
 public:
  Charfin() = default;
  Charfin(CharfinMode mode, std::vector<Rational> support) : mode_(mode), support_(std::move(support)) {
    if (mode_ == CharfinMode::kLagrange)
      for (const auto& a : support_) tables_.emplace_back(support_, a);
  }

  CharfinMode mode() const { return mode_; }
  const std::vector<Rational>& support() const { return support_; }

  const LagrangeTable& table(const Rational& target) const {
    for (const auto& t : tables_)
      if (t.target() == target) return t;
    throw std::invalid_argument("type constant " + target.str() + " not in characteristic support");
  }

  Rational operator()(const Rational& target, const Rational& x) const {
    if (mode_ == CharfinMode::kZero) return charfin(target, x);
    return lagrange_eval(table(target), x);
  }

 private:
  CharfinMode mode_ = CharfinMode::kZero;
  std::vector<Rational> support_;
  std::vector<LagrangeTable> tables_;
};

}  // namespace circformer
