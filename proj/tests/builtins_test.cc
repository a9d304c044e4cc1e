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


#include <gtest/gtest.h>

#include "test_util.hpp"

namespace circformer {
namespace {

using K = BuiltinAttentionKind;
using A = BuiltinActivationKind;

// fig1 sample encoding at the given dimension; row r is 1-based.
Sequence fig1_rows(std::size_t dim) { return embed(encode(testing::fig1(), testing::fig1_inputs()), dim).vectors; }

TEST(BuiltinsTest, AttentionExamples) {
  const auto x = fig1_rows(9);
  auto row = [&](std::size_t r) -> const Vec& { return x[r - 1]; };
  EXPECT_EQ(builtin_attention({K::kVDp}, row(6), row(1)), Rational(11));
  EXPECT_EQ(builtin_attention({K::kB, 2}, row(11), row(11)), Rational(53));
  EXPECT_EQ(builtin_attention({K::kEDp}, row(12), row(10)), Rational(49));
  EXPECT_EQ(builtin_attention({K::kEEq}, row(12), row(7)), Rational(0));
  EXPECT_EQ(builtin_attention({K::kEEq}, row(10), row(5)), Rational(1));
  EXPECT_EQ(builtin_attention({K::kVEq}, row(10), row(11)), Rational(1));
  EXPECT_THROW(builtin_attention({K::kB, 2}, Vec(7), Vec(7)), DimensionError);
  EXPECT_THROW(builtin_attention({K::kSign}, Vec(8), Vec(8)), DimensionError);
}

TEST(BuiltinsTest, DotProductScoresPeakAtMatchingKey) {
  // For an edge query, att_E_dp is maximal exactly at the predecessor node.
  const auto x = fig1_rows(8);
  for (std::size_t q = 5; q < x.size(); ++q) {
    std::vector<Rational> a;
    for (const auto& key : x) a.push_back(builtin_attention({K::kEDp}, x[q], key));
    const auto m = argmax_set(a);
    for (auto j : m) EXPECT_EQ(x[j][kS], x[q][kP]);
  }
}

TEST(BuiltinsTest, MatrixRealizationAgrees) {
  std::mt19937_64 rng(11);
  for (auto kind : {K::kEDp, K::kVDp, K::kB, K::kZPlus, K::kZMinus, K::kSign}) {
    const BuiltinAttention a{kind, 1 + rng() % 5};
    for (std::size_t dim = required_dim(a); dim <= 9; ++dim) {
      const auto dpa = dot_product_realization(a, dim);
      ASSERT_TRUE(dpa.has_value());
      for (int trial = 0; trial < 1000 / 5; ++trial) {
        const Vec x = testing::random_vec(rng, dim), y = testing::random_vec(rng, dim);
        ASSERT_EQ(dot_product_attention(*dpa, x, y), builtin_attention(a, x, y)) << to_string(a) << " dim " << dim;
      }
    }
  }
  EXPECT_FALSE(dot_product_realization({K::kEEq}, 5).has_value());
  EXPECT_THROW(dot_product_realization({K::kB, 1}, 7), DimensionError);
}

TEST(BuiltinsTest, NamesRoundTrip) {
  for (auto kind : {K::kEEq, K::kVEq, K::kEDp, K::kVDp, K::kZPlus, K::kZMinus, K::kSign}) {
    const BuiltinAttention a{kind};
    EXPECT_EQ(parse_builtin_attention(to_string(a)), a);
  }
  EXPECT_EQ(parse_builtin_attention("att_B(12)"), (BuiltinAttention{K::kB, 12}));
  EXPECT_FALSE(parse_builtin_attention("att_B(0)"));
  EXPECT_FALSE(parse_builtin_attention("att_B()"));
  EXPECT_FALSE(parse_builtin_attention("att_B(x)"));
  EXPECT_FALSE(parse_builtin_attention("att_nope"));
  for (auto kind : {A::kProject, A::kEGen, A::kVGen, A::kEAvg, A::kVAvg, A::kESemi, A::kVSemi, A::kEFnc, A::kVFnc,
                    A::kEExt, A::kVExt, A::kVSign})
    EXPECT_EQ(parse_builtin_activation(to_string(BuiltinActivation{kind})), kind);
  EXPECT_FALSE(parse_builtin_activation("act_nope"));
}

Vec apply(A kind, std::vector<Vec> in, std::vector<std::string> basis = {}) {
  std::vector<const Vec*> ptr;
  for (auto& v : in) ptr.push_back(&v);
  return builtin_activation(BuiltinActivation{kind, std::move(basis)}, ptr, Charfin{});
}

TEST(BuiltinsTest, ActivationExamples) {
  const Rational q(7, 3);
  // Plus edge whose predecessor's average over its 4 matches is q.
  const Vec edge = {6, 1, 1, 4, 0};
  const Vec fetched = {1, 0, 0, 2, q};
  const Vec counted = {0, 0, Rational(5, 2), 0, 0};
  EXPECT_EQ(apply(A::kEAvg, {edge, fetched, counted}), (Vec{6, 1, 1, 4, Rational(4) * q}));
  // Times edge: product of the two pooled values.
  const Vec times_edge = {7, 6, 2, 5, 0};
  EXPECT_EQ(apply(A::kVSemi, {times_edge, Vec(5), Vec{0, 0, 0, 0, Rational(1, 4)}, Vec{0, 0, 0, 0, 10}})[kV],
            Rational(5, 2));
  // Sources keep their value.
  const Vec input = {2, 0, 0, 2, 7};
  for (auto kind : {A::kEGen, A::kVGen, A::kEAvg, A::kVAvg, A::kEFnc, A::kVFnc})
    EXPECT_EQ(apply(kind, {input, Vec{0, 0, 0, 0, 99}, Vec{0, 0, 0, 0, 98}}), input);
  EXPECT_EQ(apply(A::kVFnc, {Vec{3, 1, 1, 4, 0}, Vec{0, 0, 0, 0, 2}, Vec{0, 0, 0, 0, 5}})[kV], Rational(7));
  EXPECT_EQ(apply(A::kVFnc, {Vec{3, 1, 1, 5, 0}, Vec{0, 0, 0, 0, 2}, Vec{0, 0, 0, 0, 5}})[kV], Rational(10));
  // V_gen only forwards on the alpha = 1 edge.
  EXPECT_EQ(apply(A::kVGen, {Vec{3, 1, 2, 4, 0}, Vec{0, 0, 0, 0, 2}, Vec{0, 0, 0, 0, 5}})[kV], Rational(0));
  EXPECT_EQ(apply(A::kVGen, {Vec{3, 1, 1, 4, 0}, Vec{0, 0, 0, 0, 2}, Vec{0, 0, 0, 0, 5}})[kV], Rational(2));
}

TEST(BuiltinsTest, ExtensionActivation) {
  // relu edge (type 7) and max edge (type 8) at the V step.
  const std::vector<std::string> basis = {"relu", "max"};
  const Vec relu_edge = {4, 3, 1, 7, 0}, max_edge = {4, 3, 1, 8, 0};
  const Vec z1 = {0, 0, 0, 0, -3}, z2 = {0, 0, 0, 0, -5}, z3 = {0, 0, 0, 0, 2};
  EXPECT_EQ(apply(A::kVExt, {relu_edge, z1, z2, z3}, basis)[kV], Rational(0));
  EXPECT_EQ(apply(A::kVExt, {max_edge, z1, z2, z3}, basis)[kV], Rational(2));
  EXPECT_EQ(activation_arity({A::kVExt, {"mux"}}, default_registry()).minimum, 5u);
  EXPECT_EQ(activation_arity({A::kVExt, {"relu"}}, default_registry()).minimum, 4u);
}

TEST(BuiltinsTest, ActivationArityErrors) {
  EXPECT_THROW(apply(A::kEAvg, {Vec(5), Vec(5)}), DimensionError);
  EXPECT_THROW(apply(A::kVSemi, {Vec(5), Vec(5), Vec(5)}), DimensionError);
  EXPECT_THROW(apply(A::kVFnc, {Vec(5), Vec(4), Vec(5)}), DimensionError);
  EXPECT_THROW(apply(A::kVSign, {Vec(8), Vec(8), Vec(8), Vec(8), Vec(8), Vec(8), Vec(8)}), DimensionError);
  EXPECT_EQ(apply(A::kProject, {Vec{1, 2}}), (Vec{1, 2}));
}

TEST(BuiltinsTest, LagrangeCharfinGivesSameActivations) {
  std::mt19937_64 rng(12);
  const Charfin zero;
  const Charfin lag(CharfinMode::kLagrange, types::base_support());
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Vec> in;
    Vec x = testing::random_encoded_vec(rng, 5);
    x[kT] = Rational(static_cast<std::int64_t>(1 + rng() % 5));
    in.push_back(x);
    for (int h = 0; h < 3; ++h) in.push_back(testing::random_vec(rng, 5));
    std::vector<const Vec*> p;
    for (auto& v : in) p.push_back(&v);
    for (auto kind : {A::kESemi, A::kVSemi}) {
      const BuiltinActivation act{kind};
      ASSERT_EQ(builtin_activation(act, p, lag), builtin_activation(act, p, zero));
    }
  }
}

}  // namespace
}  // namespace circformer
